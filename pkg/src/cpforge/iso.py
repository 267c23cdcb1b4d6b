"""Operator-basis expansions of the maximally entangled projector.

For an orthonormal operator basis ``{G_a}`` of a ``d``-level system,

    sum_a G_a (x) conj(G_a) = sum_ij |ii><jj|.

With Pauli strings (normalized by ``1/sqrt(d)``) ``conj(sigma) = w sigma`` where
``w = -1`` for an odd number of ``sigma_y`` factors; with rescaled Gell-Mann
matrices the sign flips for each antisymmetric (imaginary) factor.

The merge unitary permutes ``2k`` qubits so that ``k`` Bell pairs, each
ordered ``|i_j i_j>``, become one maximally entangled pair of ``2^k``-level
systems with big-endian encoding: qubits ``1..k`` form the first qudit and
qubits ``k+1..2k`` the second.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .errors import ParamOutOfRange, UnsupportedK
from .matrix_core import PAULI

PAULI_LABELS = "IXYZ"


def _gellmann_unscaled() -> tuple[np.ndarray, ...]:
    """The eight standard Gell-Mann matrices ``lambda_1 .. lambda_8``."""
    lam = np.zeros((8, 3, 3), dtype=np.complex128)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return tuple(lam)


GELLMANN = _gellmann_unscaled()
# rescaled basis: identity / sqrt(3), lambda_i / sqrt(2)  ->  tr(G_a G_b) = delta_ab
GELLMANN_SCALED = (np.eye(3, dtype=np.complex128) / np.sqrt(3),) + tuple(g / np.sqrt(2) for g in GELLMANN)
# indices (into GELLMANN_SCALED) of the antisymmetric, purely imaginary members lambda_2, lambda_5, lambda_7
GELLMANN_COMPLEX = frozenset({2, 5, 7})


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Paulis (0=I, 1=X, 2=Y, 3=Z) with its conjugation sign."""

    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors or any(f not in (0, 1, 2, 3) for f in self.factors):
            raise ValueError(f"Pauli factors must be in 0..3, got {self.factors}")

    @property
    def weight(self) -> int:
        """``+1`` for an even number of ``sigma_y`` factors, else ``-1``."""
        return -1 if sum(f == 2 for f in self.factors) % 2 else 1

    @property
    def label(self) -> str:
        return "".join(PAULI_LABELS[f] for f in self.factors)

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, (PAULI[f] for f in self.factors))


@dataclass(frozen=True)
class GellMannString:
    """Tensor product of rescaled Gell-Mann matrices (0 = scaled identity)."""

    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors or any(f not in range(9) for f in self.factors):
            raise ValueError(f"Gell-Mann factors must be in 0..8, got {self.factors}")

    @property
    def weight(self) -> int:
        """``-1`` for an odd number of antisymmetric factors, else ``+1``."""
        return -1 if sum(f in GELLMANN_COMPLEX for f in self.factors) % 2 else 1

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, (GELLMANN_SCALED[f] for f in self.factors))


def pauli_strings(n: int) -> list[PauliString]:
    return [PauliString(f) for f in product(range(4), repeat=n)]


def gellmann_strings(n: int) -> list[GellMannString]:
    return [GellMannString(f) for f in product(range(9), repeat=n)]


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalized ``sum_i |ii>`` in ``C^d (x) C^d``."""
    return np.eye(d, dtype=np.complex128).reshape(-1)


def max_entangled_projector(d: int) -> np.ndarray:
    """Unnormalized ``sum_ij |ii><jj|``."""
    v = max_entangled_vector(d)
    return np.outer(v, v.conj())


def pauli_form(n: int) -> np.ndarray:
    """``(1/2^n) sum_P w_P P (x) P`` over all ``n``-qubit Pauli strings.

    Equals ``sum_ij |ii><jj|`` on two ``2^n``-level systems.  Supported for
    ``1 <= n <= 3``.
    """
    if not 1 <= n <= 3:
        raise ParamOutOfRange(f"pauli_form supports 1 to 3 qubits, got {n}")
    d = 2 ** n
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for s in pauli_strings(n):
        m = s.matrix()
        out += s.weight * np.kron(m, m)
    return out / d


def gellmann_form(n: int = 1) -> np.ndarray:
    """``sum_G w_G G (x) G`` over rescaled Gell-Mann strings on ``n`` qutrits (``n`` in 1, 2).

    Equals ``sum_ij |ii><jj|`` on two ``3^n``-level systems.
    """
    if n not in (1, 2):
        raise ParamOutOfRange(f"gellmann_form supports 1 or 2 qutrits, got {n}")
    d = 3 ** n
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for s in gellmann_strings(n):
        m = s.matrix()
        out += s.weight * np.kron(m, m)
    return out


def qubit_permutation_matrix(perm) -> np.ndarray:
    """Permutation unitary with output qubit ``j`` carrying input qubit ``perm[j]`` (0-indexed, qubit 0 most significant)."""
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation: {perm}")
    d = 2 ** n
    idx = np.arange(d).reshape((2,) * n).transpose(perm).reshape(-1)
    u = np.zeros((d, d), dtype=np.complex128)
    u[np.arange(d), idx] = 1.0
    return u


def swap(n: int, a: int, b: int) -> np.ndarray:
    """SWAP of qubits ``a`` and ``b`` (1-indexed) among ``n``."""
    perm = list(range(n))
    perm[a - 1], perm[b - 1] = perm[b - 1], perm[a - 1]
    return qubit_permutation_matrix(perm)


def _pair_swaps(n: int, count: int) -> np.ndarray:
    """``prod_j SWAP(2j, n/2 + 2j - 1)`` for ``j = 1..count`` (the ``j = 1`` factor acts first)."""
    u = np.eye(2 ** n, dtype=np.complex128)
    for j in range(1, count + 1):
        u = swap(n, 2 * j, n // 2 + 2 * j - 1) @ u
    return u


def _cycle_to_end(n: int, a: int) -> np.ndarray:
    """Move qubit ``a`` (1-indexed) to the last position, shifting ``a+1..n`` left by one."""
    perm = [q for q in range(n) if q != a - 1] + [a - 1]
    return qubit_permutation_matrix(perm)


def ebit_merge_unitary(k: int) -> np.ndarray:
    """Qubit permutation ``U`` with ``U |Phi_2>^(x)k = |Phi_(2^k)>`` (unnormalized, ``2 <= k <= 4``).

    Qubits are labeled ``1..n`` with ``n = 2k``; pair ``j`` occupies qubits
    ``2j-1, 2j``.  For even ``k`` the swaps ``(2j, n/2 + 2j - 1)``,
    ``j = 1..k/2``, bring the ket and bra halves into the same order.  For odd
    ``k``, qubit ``n/2 + 1`` is first cycled to the end and then the swaps for
    ``j = 1..(k-1)/2`` are applied.
    """
    if not 2 <= k <= 4:
        raise UnsupportedK(f"ebit_merge_unitary supports 2 to 4 ebits, got {k}")
    n = 2 * k
    if k % 2 == 0:
        return _pair_swaps(n, k // 2)
    return _pair_swaps(n, (k - 1) // 2) @ _cycle_to_end(n, n // 2 + 1)


def ebit_product_state(k: int) -> np.ndarray:
    """``(|00> + |11>)^(x)k`` with pairs adjacent."""
    return reduce(np.kron, [max_entangled_vector(2)] * k)


def is_permutation_matrix(u, tol: float = 0.0) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    ones = np.abs(u - 1) <= tol
    zeros = np.abs(u) <= tol
    if not np.all(ones | zeros):
        return False
    return bool(np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1))


__all__ = [
    "GELLMANN",
    "GELLMANN_SCALED",
    "GellMannString",
    "PauliString",
    "ebit_merge_unitary",
    "ebit_product_state",
    "gellmann_form",
    "gellmann_strings",
    "is_permutation_matrix",
    "max_entangled_projector",
    "max_entangled_vector",
    "pauli_form",
    "pauli_strings",
    "qubit_permutation_matrix",
    "swap",
]
