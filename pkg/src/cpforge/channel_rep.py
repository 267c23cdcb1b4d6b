"""Linear Hermitian-preserving maps and their four interconvertible forms.

Index conventions (row-major ``vec`` everywhere):

* A-matrix: ``vec(rho') = A vec(rho)``, i.e. ``rho'[r', s'] = sum A[(r', s'), (r, s)] rho[r, s]``.
* B-matrix: the reshuffle ``B[(r', r), (s', s)] = A[(r', s'), (r, s)]``.  It is
  Hermitian for Hermitian-preserving maps and PSD iff the map is CP.
* Choi matrix: ``sum_ij E(|i><j|) (x) |i><j|`` (output factor first).  Under the
  conventions above it is the same operator as the B-matrix.
* Signed Kraus: ``rho -> sum_a eta_a E_a rho E_a^dagger`` with ``eta_a = +-1``.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput
from .matrix_core import PSD_TOL, as_matrix, eigh, hermitian_part, hermiticity_error, min_eigenvalue

KRAUS_DROP_TOL = 1e-12
STRUCTURE_TOL = 1e-12

SignedKraus = list[tuple[int, np.ndarray]]


def _square_root_dim(size: int, what: str) -> int:
    d = int(round(np.sqrt(size)))
    if d * d != size:
        raise DimensionMismatch(f"{what} side {size} is not a perfect square")
    return d


def _scaled(err: float, m: np.ndarray) -> float:
    return err / max(1.0, float(np.max(np.abs(m)))) if m.size else err


# ----------------------------------------------------------------------------
# array-level conversions
# ----------------------------------------------------------------------------


def a_to_b(amatrix, dim_in: int, dim_out: int) -> np.ndarray:
    """Reshuffle an A-matrix into its B-matrix (exact, no arithmetic)."""
    a = as_matrix(amatrix)
    n, m = dim_in, dim_out
    if a.shape != (m * m, n * n):
        raise DimensionMismatch(f"A-matrix shape {a.shape} does not match dims in={n}, out={m}")
    return a.reshape(m, m, n, n).transpose(0, 2, 1, 3).reshape(m * n, m * n).copy()


def b_to_a(bmatrix, dim_in: int, dim_out: int) -> np.ndarray:
    """Inverse reshuffle of :func:`a_to_b`."""
    b = as_matrix(bmatrix)
    n, m = dim_in, dim_out
    if b.shape != (m * n, m * n):
        raise DimensionMismatch(f"B-matrix shape {b.shape} does not match dims in={n}, out={m}")
    return b.reshape(m, n, m, n).transpose(0, 2, 1, 3).reshape(m * m, n * n).copy()


def b_to_kraus(bmatrix, dim_in: int, dim_out: int, drop_tol: float = KRAUS_DROP_TOL) -> SignedKraus:
    """Signed Kraus operators from the spectral decomposition of a B-matrix.

    Each eigenpair ``(g, c)`` with ``|g| >= drop_tol`` yields
    ``E = sqrt(|g|) * unvec(c)`` (shape ``dim_out x dim_in``) and ``eta = sign(g)``.
    """
    b = as_matrix(bmatrix)
    if b.shape != (dim_in * dim_out, dim_in * dim_out):
        raise DimensionMismatch(f"B-matrix shape {b.shape} does not match dims")
    err = hermiticity_error(b)
    if _scaled(err, b) > 1e-10:
        raise NonHermitianInput(f"B-matrix asymmetry {err:.3e}")
    w, v = eigh(b)
    ops: SignedKraus = []
    for g, col in zip(w, v.T):
        if abs(g) < drop_tol:
            continue
        ops.append((1 if g > 0 else -1, np.sqrt(abs(g)) * col.reshape(dim_out, dim_in)))
    return ops


def kraus_to_b(kraus: Iterable[tuple[int, np.ndarray]]) -> np.ndarray:
    """``B = sum eta vec(E) vec(E)^dagger``."""
    total = None
    for eta, op in kraus:
        v = np.asarray(op, dtype=np.complex128).reshape(-1)
        term = eta * np.outer(v, v.conj())
        total = term if total is None else total + term
    if total is None:
        raise DimensionMismatch("empty Kraus list")
    return total


def kraus_to_a(kraus: Iterable[tuple[int, np.ndarray]]) -> np.ndarray:
    """``A = sum eta E (x) conj(E)`` (row-major vec of ``E rho E^dagger``)."""
    total = None
    for eta, op in kraus:
        op = np.asarray(op, dtype=np.complex128)
        term = eta * np.kron(op, op.conj())
        total = term if total is None else total + term
    if total is None:
        raise DimensionMismatch("empty Kraus list")
    return total


def hermiticity_preservation_error(amatrix, dim_in: int, dim_out: int) -> float:
    """``max |A[(s',r'),(s,r)] - conj(A[(r',s'),(r,s)])|``."""
    t = as_matrix(amatrix).reshape(dim_out, dim_out, dim_in, dim_in)
    return float(np.max(np.abs(t.transpose(1, 0, 3, 2) - t.conj())))


def trace_preservation_error(amatrix, dim_in: int, dim_out: int) -> float:
    """``max |sum_r' A[(r',r'),(s,r)] - delta_sr|``."""
    t = as_matrix(amatrix).reshape(dim_out, dim_out, dim_in, dim_in)
    partial = np.einsum("iiab->ab", t)
    return float(np.max(np.abs(partial - np.eye(dim_in))))


# ----------------------------------------------------------------------------
# states
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace Hermitian matrix.  Positivity is deliberately not enforced."""

    matrix: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        if hermiticity_error(m) > STRUCTURE_TOL:
            raise NonHermitianInput("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > STRUCTURE_TOL:
            raise ValueError(f"density matrix trace {tr} != 1")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", m.shape[0])

    @classmethod
    def from_bloch(cls, r) -> "DensityMatrix":
        """Single-qubit state ``(I + r . sigma) / 2``."""
        x, y, z = (float(c) for c in r)
        return cls(0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)


def _as_array(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)


# ----------------------------------------------------------------------------
# channel
# ----------------------------------------------------------------------------


class Channel:
    """A linear Hermitian-preserving map ``C^{n x n} -> C^{m x m}``.

    The A-matrix is the canonical form; B-matrix, Choi matrix and signed Kraus
    operators are derived on demand and cached.  Instances are immutable.

    Parameters
    ----------
    amatrix : array_like
        Matrix of shape ``(m*m, n*n)``.
    dim_in, dim_out : int, optional
        Hilbert-space dimensions; inferred from the shape when omitted.
    trace_preserving : bool or None
        Caller's claim.  The flag is always verified and the verified value is
        what :attr:`trace_preserving` reports; a contradicting claim warns.
    rep : str
        Representation the channel was built from (``"a"``, ``"b"``, ``"choi"``
        or ``"kraus"``); used as the default when serializing.
    """

    def __init__(self, amatrix, dim_in: int | None = None, dim_out: int | None = None, *,
                 trace_preserving: bool | None = None, rep: str = "a", kraus: SignedKraus | None = None):
        a = as_matrix(amatrix).copy()
        m = dim_out if dim_out is not None else _square_root_dim(a.shape[0], "A-matrix row")
        n = dim_in if dim_in is not None else _square_root_dim(a.shape[1], "A-matrix column")
        if a.shape != (m * m, n * n):
            raise DimensionMismatch(f"A-matrix shape {a.shape} does not match dims in={n}, out={m}")
        herr = hermiticity_preservation_error(a, n, m)
        if _scaled(herr, a) > 1e-10:
            raise NonHermitianInput(f"A-matrix is not Hermiticity-preserving (error {herr:.3e})")
        a.setflags(write=False)
        self._a = a
        self.dim_in = n
        self.dim_out = m
        self.rep = rep
        self.hermiticity_error = herr
        self.tp_error = trace_preservation_error(a, n, m)
        self.trace_preserving = self.tp_error <= STRUCTURE_TOL * max(1.0, float(np.max(np.abs(a))))
        if trace_preserving is not None and bool(trace_preserving) != self.trace_preserving:
            warnings.warn(f"trace_preserving={trace_preserving} claimed but verified "
                          f"{self.trace_preserving} (error {self.tp_error:.3e})", stacklevel=2)
        self._lock = threading.RLock()
        self._cache: dict[str, object] = {}
        if kraus is not None:
            self._cache["kraus"] = [(int(e), np.asarray(k, dtype=np.complex128)) for e, k in kraus]

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_amatrix(cls, amatrix, dim_in=None, dim_out=None, **kw) -> "Channel":
        return cls(amatrix, dim_in, dim_out, **kw)

    @classmethod
    def from_bmatrix(cls, bmatrix, dim_in: int, dim_out: int | None = None, **kw) -> "Channel":
        dim_out = dim_in if dim_out is None else dim_out
        b = as_matrix(bmatrix)
        if _scaled(hermiticity_error(b), b) > 1e-10:
            raise NonHermitianInput("B-matrix is not Hermitian")
        kw.setdefault("rep", "b")
        return cls(b_to_a(b, dim_in, dim_out), dim_in, dim_out, **kw)

    @classmethod
    def from_choi(cls, choi, dim_in: int, dim_out: int | None = None, **kw) -> "Channel":
        kw.setdefault("rep", "choi")
        return cls.from_bmatrix(choi, dim_in, dim_out, **kw)

    @classmethod
    def from_kraus(cls, kraus: Sequence, **kw) -> "Channel":
        """Build from ``[(eta, E), ...]``; bare matrices are taken with ``eta = +1``."""
        ops = []
        for item in kraus:
            if isinstance(item, tuple) and len(item) == 2 and np.isscalar(item[0]):
                eta, op = item
            else:
                eta, op = 1, item
            if eta not in (1, -1):
                raise ValueError(f"eta must be +1 or -1, got {eta}")
            ops.append((int(eta), as_matrix(op)))
        m, n = ops[0][1].shape
        if any(op.shape != (m, n) for _, op in ops):
            raise DimensionMismatch("Kraus operators have inconsistent shapes")
        kw.setdefault("rep", "kraus")
        return cls(kraus_to_a(ops), n, m, kraus=ops, **kw)

    @classmethod
    def identity(cls, dim: int = 2) -> "Channel":
        return cls(np.eye(dim * dim), dim, dim)

    # -- representations ----------------------------------------------------

    def _cached(self, key: str, build):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    @property
    def amatrix(self) -> np.ndarray:
        return self._a

    @property
    def bmatrix(self) -> np.ndarray:
        return self._cached("b", lambda: hermitian_part(a_to_b(self._a, self.dim_in, self.dim_out)))

    @property
    def choi(self) -> np.ndarray:
        return self._cached("choi", lambda: choi_matrix(self))

    @property
    def kraus(self) -> SignedKraus:
        return self._cached("kraus", lambda: b_to_kraus(self.bmatrix, self.dim_in, self.dim_out))

    def spectrum(self) -> np.ndarray:
        """B-matrix eigenvalues, descending."""
        return self._cached("spectrum", lambda: eigh(self.bmatrix).eigenvalues)

    @property
    def trace_b(self) -> float:
        return float(np.real(np.trace(self.bmatrix)))

    @property
    def n_qubits(self) -> int | None:
        if self.dim_in != self.dim_out:
            return None
        k = self.dim_in.bit_length() - 1
        return k if 2 ** k == self.dim_in else None

    # -- behaviour ----------------------------------------------------------

    def apply(self, rho):
        return apply(self, rho)

    def compose(self, inner: "Channel") -> "Channel":
        """``self o inner``."""
        return compose(self, inner)

    def __matmul__(self, inner: "Channel") -> "Channel":
        return compose(self, inner)

    def is_cp(self, tol: float = PSD_TOL, source: str = "b") -> tuple[bool, float]:
        return is_cp(self, tol, source=source)

    def __repr__(self) -> str:
        return (f"Channel(dim_in={self.dim_in}, dim_out={self.dim_out}, rep={self.rep!r}, "
                f"trace_preserving={self.trace_preserving})")


def choi_matrix(channel: Channel) -> np.ndarray:
    """``sum_ij E(|i><j|) (x) |i><j|`` built by applying the A-matrix to matrix units."""
    n, m = channel.dim_in, channel.dim_out
    out = np.zeros((m * n, m * n), dtype=np.complex128)
    a = channel.amatrix
    for i, j in product(range(n), repeat=2):
        image = a[:, i * n + j].reshape(m, m)
        unit = np.zeros((n, n))
        unit[i, j] = 1.0
        out += np.kron(image, unit)
    return hermitian_part(out)


def is_cp(channel: Channel, tol: float = PSD_TOL, source: str = "b") -> tuple[bool, float]:
    """CP verdict and its certificate (the smallest B or Choi eigenvalue)."""
    if source == "b":
        lam = float(channel.spectrum()[-1])
    elif source == "choi":
        lam = min_eigenvalue(channel.choi)
    else:
        raise ValueError(f"unknown source {source!r}")
    return lam >= -tol, lam


def apply(channel: Channel, rho):
    """``unvec(A vec(rho))``.

    Returns a :class:`DensityMatrix` when given one (which requires the output
    to have unit trace), otherwise a plain array.
    """
    r = _as_array(rho)
    if r.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch(f"state of shape {r.shape} for a map with dim_in={channel.dim_in}")
    out = (channel.amatrix @ r.reshape(-1)).reshape(channel.dim_out, channel.dim_out)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(hermitian_part(out))
    return out


def apply_kraus(kraus: Iterable[tuple[int, np.ndarray]], rho) -> np.ndarray:
    """``sum eta E rho E^dagger``."""
    r = _as_array(rho)
    out = None
    for eta, op in kraus:
        term = eta * (op @ r @ op.conj().T)
        out = term if out is None else out + term
    return out


def compose(outer: Channel, inner: Channel) -> Channel:
    """``outer o inner``; the A-matrix is the plain product ``A_outer A_inner``."""
    if inner.dim_out != outer.dim_in:
        raise DimensionMismatch(f"cannot compose: inner dim_out={inner.dim_out}, outer dim_in={outer.dim_in}")
    return Channel(outer.amatrix @ inner.amatrix, inner.dim_in, outer.dim_out)


# ----------------------------------------------------------------------------
# local extension to several subsystems
# ----------------------------------------------------------------------------


def local_vec_permutation(dims: Sequence[int]) -> np.ndarray:
    """Index map from global row-major vec to the locally stacked ordering.

    For subsystem dimensions ``dims`` the global vec of ``rho`` is indexed by
    ``(r_1..r_k, s_1..s_k)`` whereas ``A_1 (x) ... (x) A_k`` expects
    ``(r_1 s_1, ..., r_k s_k)``.  Entry ``g`` of the result is the local index
    feeding global position ``g``.
    """
    k = len(dims)
    local_shape = [d for d in dims for _ in range(2)]
    idx = np.arange(int(np.prod(local_shape))).reshape(local_shape)
    axes = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)]
    return idx.transpose(axes).reshape(-1)


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """``R`` with ``R[g, perm[g]] = 1``."""
    perm = np.asarray(perm)
    r = np.zeros((perm.size, perm.size))
    r[np.arange(perm.size), perm] = 1.0
    return r


def _fill_identities(channels: Sequence[Channel | None]) -> list[Channel]:
    out = []
    for ch in channels:
        out.append(Channel.identity(2) if ch is None else ch)
    if not out:
        raise DimensionMismatch("need at least one local channel")
    return out


def naive_extension(channels: Sequence[Channel | None]) -> np.ndarray:
    """Raw Kronecker product of local A-matrices, applied as if to the global vec.

    This is *not* the correct multi-partite A-matrix; it exists to demonstrate
    the mismatch.
    """
    chans = _fill_identities(channels)
    out = chans[0].amatrix
    for ch in chans[1:]:
        out = np.kron(out, ch.amatrix)
    return out


def extend_local(channels: Sequence[Channel | None]) -> Channel:
    """Global A-matrix of ``E_1 (x) E_2 (x) ... (x) E_k`` acting on the joint state.

    Computed as ``R_out (A_1 (x) ... (x) A_k) R_in^T`` where ``R`` reorders the
    global row-major vec into per-subsystem blocks.  ``None`` entries stand for
    the single-qubit identity.
    """
    chans = _fill_identities(channels)
    local = naive_extension(chans)
    p_out = local_vec_permutation([c.dim_out for c in chans])
    p_in = local_vec_permutation([c.dim_in for c in chans])
    a = local[np.ix_(p_out, p_in)]
    return Channel(a, int(np.prod([c.dim_in for c in chans])), int(np.prod([c.dim_out for c in chans])))


def extend_local_kraus(channels: Sequence[Channel | None]) -> Channel:
    """Same map as :func:`extend_local`, built from tensored signed Kraus operators."""
    chans = _fill_identities(channels)
    ops: SignedKraus = [(1, np.ones((1, 1), dtype=np.complex128))]
    for ch in chans:
        ops = [(e1 * e2, np.kron(k1, k2)) for e1, k1 in ops for e2, k2 in ch.kraus]
    return Channel.from_kraus(ops, rep="a")
