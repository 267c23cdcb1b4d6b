"""Named single- and multi-qubit map families.

Asymmetric depolarizers are parameterized by the Bloch-vector scale factors
``(alpha, beta, gamma)``: the map sends ``(x, y, z) -> (alpha x, beta y, gamma z)``.
The usual mixing picture ``rho -> (1 - p) rho + p I/2`` is the symmetric case
with ``tau = 1 - p``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel_rep import Channel, compose, extend_local
from .errors import DimensionMismatch, ParamOutOfRange
from .matrix_core import PAULI, PSD_TOL

SQRT_TOL = 1e-12


@dataclass(frozen=True)
class DepolarizerParams:
    """Per-qubit scale triples ``(alpha, beta, gamma)``."""

    per_qubit: tuple[tuple[float, float, float], ...]

    def __init__(self, per_qubit):
        arr = np.asarray(per_qubit, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] == 0:
            raise DimensionMismatch(f"expected triples (alpha, beta, gamma), got shape {arr.shape}")
        object.__setattr__(self, "per_qubit", tuple(tuple(float(v) for v in row) for row in arr))

    @classmethod
    def from_flat(cls, values) -> "DepolarizerParams":
        return cls(np.asarray(values, dtype=float).reshape(-1, 3))

    @classmethod
    def uniform(cls, value: float, n_qubits: int = 1) -> "DepolarizerParams":
        return cls(np.full((n_qubits, 3), float(value)))

    @property
    def n_qubits(self) -> int:
        return len(self.per_qubit)

    @property
    def flat(self) -> np.ndarray:
        return np.array(self.per_qubit, dtype=float).reshape(-1)

    @property
    def valid(self) -> bool:
        """Fujiwara-Algoet validity (the ADM is CP)."""
        return fujiwara_algoet_valid(self)

    def __iter__(self):
        return iter(self.per_qubit)


@dataclass(frozen=True)
class TranslationParams:
    """Bloch-vector offset ``(x0, y0, z0)``."""

    offset: tuple[float, float, float]

    def __init__(self, offset):
        v = np.asarray(offset, dtype=float).reshape(-1)
        if v.shape != (3,):
            raise DimensionMismatch(f"offset must have 3 components, got {v.shape}")
        object.__setattr__(self, "offset", tuple(float(c) for c in v))


def _as_params(params) -> DepolarizerParams:
    return params if isinstance(params, DepolarizerParams) else DepolarizerParams(params)


def adm_amatrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Single-qubit asymmetric depolarizer A-matrix."""
    a, b, g = float(alpha), float(beta), float(gamma)
    return 0.5 * np.array(
        [
            [1 + g, 0, 0, 1 - g],
            [0, a + b, a - b, 0],
            [0, a - b, a + b, 0],
            [1 - g, 0, 0, 1 + g],
        ],
        dtype=np.complex128,
    )


def adm(params, *more, allow_unphysical: bool = False) -> Channel:
    """Asymmetric depolarizer, local on each qubit.

    Parameters
    ----------
    params : DepolarizerParams, triple, or sequence of triples
        ``adm(a, b, g)`` is accepted as shorthand for ``adm([(a, b, g)])``.
    allow_unphysical : bool
        Permit scale factors outside ``[-1, 1]`` (e.g. formal inverses).

    Raises
    ------
    ParamOutOfRange
        If a factor exceeds 1 in magnitude and ``allow_unphysical`` is false.
    """
    if more:
        params = (params, *more)
    p = _as_params(params)
    flat = p.flat
    if not np.all(np.isfinite(flat)):
        raise ParamOutOfRange("depolarizer parameters must be finite")
    if np.any(np.abs(flat) > 1.0 + SQRT_TOL):
        if not allow_unphysical:
            raise ParamOutOfRange(f"depolarizer parameters outside [-1, 1]: {flat.tolist()}")
        warnings.warn("constructing an asymmetric depolarizer with |parameter| > 1", stacklevel=2)
    locals_ = [Channel(adm_amatrix(*t), 2, 2) for t in p.per_qubit]
    return locals_[0] if len(locals_) == 1 else extend_local(locals_)


def symmetric_depolarizer(tau: float, n_qubits: int = 1) -> Channel:
    """``adm(tau, tau, tau)`` on every qubit; ``tau = 1 - p`` in the mixing picture."""
    if not 0.0 <= tau <= 1.0:
        raise ParamOutOfRange(f"tau must lie in [0, 1], got {tau}")
    return adm(DepolarizerParams.uniform(tau, n_qubits))


def global_symmetric_depolarizer(tau: float, dim: int) -> Channel:
    """``rho -> tau rho + (1 - tau) tr(rho) I/d`` on a single ``d``-level system."""
    if not 0.0 <= tau <= 1.0:
        raise ParamOutOfRange(f"tau must lie in [0, 1], got {tau}")
    ident = np.eye(dim).reshape(-1)
    a = tau * np.eye(dim * dim) + (1 - tau) / dim * np.outer(ident, ident)
    return Channel(a, dim, dim)


def completely_depolarizing(n_qubits: int = 1) -> Channel:
    return adm(DepolarizerParams.uniform(0.0, n_qubits))


def identity_channel(dim: int = 2) -> Channel:
    return Channel.identity(dim)


def fujiwara_algoet_valid(params, tol: float = 2 * PSD_TOL) -> bool:
    """``|gamma + alpha| <= 1 + beta`` and ``|gamma - alpha| <= 1 - beta`` for every qubit.

    The B-matrix eigenvalues of the depolarizer are half the slacks of these
    inequalities, so the default ``tol = 2 * PSD_TOL`` makes the verdict agree
    with the B-matrix PSD test at ``PSD_TOL``.
    """
    p = _as_params(params)
    for a, b, g in p.per_qubit:
        if abs(g + a) > 1 + b + tol or abs(g - a) > 1 - b + tol:
            return False
    return True


def translation_amatrix(x0: float, y0: float, z0: float) -> np.ndarray:
    x0, y0, z0 = float(x0), float(y0), float(z0)
    minus = x0 - 1j * y0
    plus = x0 + 1j * y0
    return 0.5 * np.array(
        [
            [2 + z0, 0, 0, z0],
            [minus, 2, 0, minus],
            [plus, 0, 2, plus],
            [-z0, 0, 0, 2 - z0],
        ],
        dtype=np.complex128,
    )


def translation(offset, *more) -> Channel:
    """Bloch-vector translation ``r -> r + offset`` (NCP for any nonzero offset)."""
    if more:
        offset = (offset, *more)
    p = offset if isinstance(offset, TranslationParams) else TranslationParams(offset)
    return Channel(translation_amatrix(*p.offset), 2, 2)


def robust_map(kappa: float) -> Channel:
    """Trace-preserving single-qubit map that needs depolarization of order ``1/kappa``.

    It is NCP for ``kappa > (3 - sqrt 5)/2`` and sends ``(I - sigma_x)/2`` to
    ``(I - sigma_z)/2`` for every ``kappa``.
    """
    k = float(kappa)
    if not k > 0:
        raise ParamOutOfRange(f"kappa must be positive, got {kappa}")
    a = np.array(
        [
            [k, k, k, k],
            [k, 0, k, 0],
            [k, k, 0, 0],
            [1 - k, -k, -k, 1 - k],
        ],
        dtype=np.complex128,
    )
    return Channel(a, 2, 2)


def invert(channel: Channel) -> Channel:
    """Formal inverse of an invertible square A-matrix.

    No complete-positivity (or even Hermiticity-preservation beyond round-off)
    claim is made for the result.
    """
    a = channel.amatrix
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("only square A-matrices can be inverted")
    inv = np.linalg.inv(a)
    return Channel(inv, channel.dim_out, channel.dim_in)


def depolarize(params, channel: Channel, allow_unphysical: bool = False) -> Channel:
    """``adm(params) o channel``."""
    return compose(adm(params, allow_unphysical=allow_unphysical), channel)


def sigma_conjugation(index: int) -> Channel:
    """``rho -> sigma_i rho sigma_i`` for ``index`` in 1..3."""
    return Channel.from_kraus([(1, PAULI[index])])

