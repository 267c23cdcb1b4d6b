"""Seeded random ensembles of maps and states for property checks."""

from __future__ import annotations

import numpy as np

from .channel_rep import Channel, DensityMatrix
from .errors import NoSolution
from .matrix_core import PSD_TOL


def tp_project_bmatrix(b: np.ndarray, dim_in: int, dim_out: int) -> np.ndarray:
    """Closest (Frobenius) B-matrix whose output partial trace is the identity.

    Trace preservation reads ``Tr_out B = I_in``; the correction
    ``I_out (x) (Tr_out B - I_in) / dim_out`` is subtracted.
    """
    t = b.reshape(dim_out, dim_in, dim_out, dim_in)
    partial = np.einsum("iaib->ab", t)
    return b - np.kron(np.eye(dim_out), partial - np.eye(dim_in)) / dim_out


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (g + g.conj().T)


def random_tp_map(rng: np.random.Generator, dim: int = 2, scale: float = 0.5) -> Channel:
    """Trace-preserving Hermitian-preserving map with ``B = I/dim + scale * H``, TP-projected."""
    n2 = dim * dim
    b = np.eye(n2) / dim + scale * random_hermitian(rng, n2)
    return Channel.from_bmatrix(tp_project_bmatrix(b, dim, dim), dim, dim, rep="a")


def random_ncp_map(rng: np.random.Generator, dim: int = 2, scale: float = 0.5, max_tries: int = 1000) -> Channel:
    """Draw :func:`random_tp_map` samples until one has a negative B eigenvalue."""
    for _ in range(max_tries):
        ch = random_tp_map(rng, dim, scale)
        if ch.is_cp(PSD_TOL)[1] < -1e-6:
            return ch
    raise NoSolution("no NCP sample drawn; increase scale")


def random_ncp_ensemble(seed: int, count: int, dim: int = 2, scale: float = 0.5) -> list[Channel]:
    rng = np.random.default_rng(seed)
    return [random_ncp_map(rng, dim, scale) for _ in range(count)]


def random_bloch_ball(rng: np.random.Generator, count: int) -> np.ndarray:
    """Points uniform in the unit ball."""
    v = rng.normal(size=(count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(count, 1)) ** (1.0 / 3.0)


def random_qubit_states(rng: np.random.Generator, count: int) -> list[DensityMatrix]:
    return [DensityMatrix.from_bloch(r) for r in random_bloch_ball(rng, count)]
