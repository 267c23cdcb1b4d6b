"""Dense complex matrix helpers: row-major vectorization, Kronecker products
and a self-contained Hermitian eigensolver.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` (interleaved
64-bit real/imaginary pairs).  Vectorization is row-major throughout::

    vec([[a, b], [c, d]]) = (a, b, c, d)^T

There is deliberately no column-stacking variant.

The eigensolver is a cyclic Jacobi method in parallel (round-robin) ordering,
so that every sweep rotates ``n/2`` disjoint index pairs at once.  It works on
single matrices and on stacks ``(..., n, n)``; the latter is what the
optimizer uses to screen thousands of small B-matrices in one call.
"""

from __future__ import annotations

from functools import lru_cache, reduce
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput

#: Absolute tolerance for positive-semidefinite verdicts.
PSD_TOL = 1e-10
#: Tolerance for accepting a matrix as Hermitian before symmetrizing.
HERMITIAN_TOL = 1e-10

#: I, sigma_x, sigma_y, sigma_z.
PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

_JACOBI_REL_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 100
_TINY = 1e-290


class EigenResult(NamedTuple):
    """Eigenvalues in descending order and matching unit eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex128 array."""
    out = np.asarray(m, dtype=np.complex128)
    if out.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {out.shape}")
    return out


def vec(m) -> np.ndarray:
    """Row-major vectorization, returned as a column of shape ``(rows*cols, 1)``."""
    m = as_matrix(m)
    return m.reshape(-1, 1).copy()


def unvec(v, rows: int, cols: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`; ``cols`` defaults to ``rows``."""
    cols = rows if cols is None else cols
    v = np.asarray(v, dtype=np.complex128)
    if v.size != rows * cols:
        raise DimensionMismatch(f"cannot unvec {v.size} entries into {rows}x{cols}")
    return v.reshape(rows, cols).copy()


def kron(a, b, *more) -> np.ndarray:
    """Kronecker product of two or more matrices."""
    mats = [np.asarray(x, dtype=np.complex128) for x in (a, b, *more)]
    return reduce(np.kron, mats)


def dagger(m) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def hermiticity_error(m) -> float:
    """Largest entrywise deviation ``max |M - M^dagger|``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - dagger(m))))


def is_hermitian(m, tol: float = 1e-12) -> bool:
    return hermiticity_error(m) <= tol


def hermitian_part(m) -> np.ndarray:
    """``(M + M^dagger) / 2``."""
    m = np.asarray(m, dtype=np.complex128)
    return 0.5 * (m + dagger(m))


def _check_hermitian(m: np.ndarray, tol: float) -> np.ndarray:
    if m.shape[-1] != m.shape[-2]:
        raise NonHermitianInput(f"matrix is not square: shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    err = hermiticity_error(m)
    if err > tol * scale:
        raise NonHermitianInput(f"asymmetry {err:.3e} exceeds tolerance {tol * scale:.3e}")
    return hermitian_part(m)


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint (p, q) pairs per round; ``n - 1`` (or ``n``) rounds cover every pair once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = sorted((players[i], players[m - 1 - i]))
            if q < n:
                pairs.append((p, q))
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> np.ndarray:
    # direct sum; ||M||^2 - ||diag||^2 cancels catastrophically near convergence
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def _jacobi(a: np.ndarray, want_vectors: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """Diagonalize a stack of Hermitian matrices ``(N, n, n)`` in place.

    Returns unsorted eigenvalues ``(N, n)`` and, optionally, eigenvectors.
    """
    count, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy() if want_vectors else None
    if n < 2:
        return np.real(np.diagonal(a, axis1=1, axis2=2)).copy(), v

    target = _JACOBI_REL_TOL * np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    rounds = _round_robin(n)
    active_idx = np.arange(count)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = _off_norm(a[active_idx])
        still = off > target[active_idx]
        active_idx = active_idx[still]
        if active_idx.size == 0:
            break
        sub = a[active_idx]
        vsub = v[active_idx] if want_vectors else None
        for P, Q in rounds:
            app = sub[:, P, P].real
            aqq = sub[:, Q, Q].real
            apq = sub[:, P, Q]
            mag = np.abs(apq)
            nz = mag > _TINY
            safe = np.where(nz, mag, 1.0)
            u = np.where(nz, apq / safe, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            sgn = np.where(theta >= 0.0, 1.0, -1.0)
            t = np.where(nz, sgn / (np.abs(theta) + np.hypot(1.0, theta)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cu = np.conj(u)

            # M <- M G with G = [[c, s], [-s u*, c u*]] on the (p, q) plane
            cc, ss, uu = c[:, None, :], s[:, None, :], cu[:, None, :]
            colp = sub[:, :, P]
            colq = sub[:, :, Q]
            sub[:, :, P] = cc * colp - ss * uu * colq
            sub[:, :, Q] = ss * colp + cc * uu * colq
            # M <- G^dagger M
            cc, ss, uu = c[:, :, None], s[:, :, None], u[:, :, None]
            rowp = sub[:, P, :]
            rowq = sub[:, Q, :]
            sub[:, P, :] = cc * rowp - ss * uu * rowq
            sub[:, Q, :] = ss * rowp + cc * uu * rowq
            sub[:, P, Q] = 0.0
            sub[:, Q, P] = 0.0
            if want_vectors:
                cc, ss, uu = c[:, None, :], s[:, None, :], cu[:, None, :]
                colp = vsub[:, :, P]
                colq = vsub[:, :, Q]
                vsub[:, :, P] = cc * colp - ss * uu * colq
                vsub[:, :, Q] = ss * colp + cc * uu * colq
        a[active_idx] = sub
        if want_vectors:
            v[active_idx] = vsub
    return np.real(np.diagonal(a, axis1=1, axis2=2)).copy(), v


def eigh(m, tol: float = HERMITIAN_TOL) -> EigenResult:
    """Eigendecomposition of a Hermitian matrix (or a stack of them).

    The input is checked against ``tol`` and symmetrized before the Jacobi
    iteration.  Eigenvalues come back in descending order, eigenvectors as the
    matching columns.

    Raises
    ------
    NonHermitianInput
        If ``max |M - M^dagger|`` exceeds ``tol`` (scaled by ``max(1, max|M|)``).
    """
    m = np.asarray(m, dtype=np.complex128)
    herm = _check_hermitian(m, tol)
    batch = herm.shape[:-2]
    n = herm.shape[-1]
    w, v = _jacobi(herm.reshape(-1, n, n).copy(), want_vectors=True)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return EigenResult(w.reshape(*batch, n), v.reshape(*batch, n, n))


def eigvalsh(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Eigenvalues only, descending; accepts stacks ``(..., n, n)``."""
    m = np.asarray(m, dtype=np.complex128)
    herm = _check_hermitian(m, tol)
    batch = herm.shape[:-2]
    n = herm.shape[-1]
    w, _ = _jacobi(herm.reshape(-1, n, n).copy(), want_vectors=False)
    return -np.sort(-w, axis=-1).reshape(*batch, n)


def min_eigenvalue(m, tol: float = HERMITIAN_TOL):
    """Smallest eigenvalue (float, or array for stacked input)."""
    w = eigvalsh(m, tol)[..., -1]
    return float(w) if np.ndim(w) == 0 else w


def is_psd(m, psd_tol: float = PSD_TOL) -> bool:
    return min_eigenvalue(m) >= -psd_tol
