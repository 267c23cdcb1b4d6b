"""Disturbance and distance measures for asymmetric depolarizers.

The fidelities are closed forms for a single qubit whose state ``r`` is sent by
a map to ``r'`` and then scaled by ``D = diag(alpha, beta, gamma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel_rep import Channel, DensityMatrix, apply
from .errors import DimensionMismatch, DomainError, WeightSumError
from .maps import DepolarizerParams, _as_params
from .matrix_core import PAULI, as_matrix

RADICAND_CLAMP = 1e-6
# 1 - |r|^2 for a pure state computed in double precision lands within a few
# ulps of zero; the square root would amplify that to ~1e-8.
RADICAND_SNAP = 1e-14
WEIGHT_TOL = 1e-12


def bloch_vector(rho) -> np.ndarray:
    """``r_i = tr(rho sigma_i)`` for a 2x2 matrix."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    if m.shape != (2, 2):
        raise DimensionMismatch(f"Bloch vectors need a single-qubit state, got {m.shape}")
    return np.array([np.real(np.trace(m @ s)) for s in PAULI[1:]])


def bloch_state(r) -> DensityMatrix:
    return DensityMatrix.from_bloch(r)


def m1(params) -> float:
    """Mean absolute depolarization parameter over all ``3n`` entries."""
    return float(np.mean(np.abs(_as_params(params).flat)))


def _radicand(value, what: str):
    value = np.asarray(value, dtype=float)
    if np.any(value < -RADICAND_CLAMP):
        raise DomainError(f"{what} radicand {float(np.min(value)):.3e} is outside the Bloch ball")
    return np.where(value <= RADICAND_SNAP, 0.0, value)


def fidelity_from_bloch(r, r_out, scales) -> np.ndarray:
    """``(1/2){1 + r.D r_out + sqrt[(1 - r.r)(1 - r_out.D^2 r_out)]}``.

    ``r`` and ``r_out`` broadcast over leading axes; ``scales`` is the diagonal
    of ``D``.
    """
    r = np.asarray(r, dtype=float)
    r_out = np.asarray(r_out, dtype=float)
    d = np.asarray(scales, dtype=float)
    dr = d * r_out
    rad1 = _radicand(1.0 - np.sum(r * r, axis=-1), "input")
    rad2 = _radicand(1.0 - np.sum(dr * dr, axis=-1), "output")
    return 0.5 * (1.0 + np.sum(r * dr, axis=-1) + np.sqrt(rad1 * rad2))


def _single_triple(params) -> np.ndarray:
    p = _as_params(params)
    if p.n_qubits != 1:
        raise DimensionMismatch("closed-form fidelities are defined for a single qubit only")
    return np.array(p.per_qubit[0])


def _map_output_bloch(rho, channel: Channel) -> np.ndarray:
    if channel.dim_in != 2 or channel.dim_out != 2:
        raise DimensionMismatch("closed-form fidelities are defined for a single qubit only")
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    return bloch_vector(apply(channel, m))


def fidelity_vs_input(rho, channel: Channel, adm_params) -> float:
    """Fidelity between the input ``rho`` and ``adm o channel (rho)``."""
    r = bloch_vector(rho)
    return float(fidelity_from_bloch(r, _map_output_bloch(rho, channel), _single_triple(adm_params)))


def fidelity_vs_map_output(rho, channel: Channel, adm_params) -> float:
    """Fidelity between ``channel(rho)`` and ``adm o channel (rho)``."""
    r_out = _map_output_bloch(rho, channel)
    return float(fidelity_from_bloch(r_out, r_out, _single_triple(adm_params)))


@dataclass(frozen=True)
class PauliChannelWeights:
    """OSR weights ``(k0, kx, ky, kz)`` of a Pauli channel; must sum to one."""

    kappa: tuple[float, float, float, float]

    def __init__(self, kappa):
        k = np.asarray(kappa, dtype=float).reshape(-1)
        if k.shape != (4,):
            raise DimensionMismatch(f"Pauli weights need 4 entries, got {k.shape}")
        if abs(k.sum() - 1.0) > WEIGHT_TOL:
            raise WeightSumError(f"Pauli weights sum to {k.sum()!r}, not 1")
        object.__setattr__(self, "kappa", tuple(float(v) for v in k))

    def as_array(self) -> np.ndarray:
        return np.array(self.kappa)


def pauli_weights(params) -> PauliChannelWeights:
    """OSR weights of a single-qubit asymmetric depolarizer."""
    a, b, g = _single_triple(params)
    return PauliChannelWeights(
        [(1 + a + b + g) / 4, (1 + a - b - g) / 4, (1 - a + b - g) / 4, (1 - a - b + g) / 4]
    )


def _weights(w) -> np.ndarray:
    return (w if isinstance(w, PauliChannelWeights) else PauliChannelWeights(w)).as_array()


def pauli_diamond_distance(a, b) -> float:
    """``sum_i |k_i(a) - k_i(b)|`` for Pauli channels."""
    return float(np.sum(np.abs(_weights(a) - _weights(b))))


def adm_symmetric_diamond_distance(params, tau: float) -> float:
    """Closed form of the Pauli diamond distance between ``adm(a, b, g)`` and ``adm(tau, tau, tau)``."""
    a, b, g = _single_triple(params)
    return 0.25 * (abs(a + b + g - 3 * tau) + abs(a - b - g + tau) + abs(a - b + g - tau) + abs(a + b - g - tau))


def purity(rho) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    return float(np.real(np.trace(m @ m)))


def linear_entropy(rho) -> float:
    """``1 - tr(rho^2)``."""
    return 1.0 - purity(rho)


__all__ = [
    "DepolarizerParams",
    "PauliChannelWeights",
    "adm_symmetric_diamond_distance",
    "bloch_state",
    "bloch_vector",
    "fidelity_from_bloch",
    "fidelity_vs_input",
    "fidelity_vs_map_output",
    "linear_entropy",
    "m1",
    "pauli_diamond_distance",
    "pauli_weights",
    "purity",
]
