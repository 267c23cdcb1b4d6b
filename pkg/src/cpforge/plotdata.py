"""CSV tables behind the fidelity and Bloch-sphere figures."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .catalog import z_shift_map
from .channel_rep import Channel
from .maps import adm, robust_map
from .measures import fidelity_vs_input
from .optimizer import single_qubit_state

SHIFT_ADM = (math.sqrt(2 / 3), math.sqrt(2 / 3), 2 / 3)
SHIFT_TAU = 2 / 3


def fibonacci_sphere(count: int, radius: float = 1.0) -> np.ndarray:
    """Nearly uniform points on a sphere (golden-angle spiral)."""
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return radius * np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def bloch_map(channel: Channel, points: np.ndarray) -> np.ndarray:
    """Affine Bloch action of a single-qubit map, applied to many points at once."""
    # r' = t + M r with t, M read off from the images of I/2 and the Paulis
    pauli = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
    a = channel.amatrix

    def image(m):
        out = (a @ np.asarray(m, dtype=complex).reshape(-1)).reshape(2, 2)
        return np.array([np.real(np.trace(out @ s)) for s in pauli])

    t = image(np.eye(2) / 2)
    mat = np.stack([image(s / 2) for s in pauli], axis=1)
    return t + points @ mat.T


def fidelity_theta_rows(step_deg: float = 1.0) -> list[tuple[float, float, float, float]]:
    """``(theta, f_adm, f_spa, gap)`` for pure inputs at polar angle ``theta`` in ``[0, pi]``."""
    t = z_shift_map()
    rows = []
    for deg in np.arange(0.0, 180.0 + 0.5 * step_deg, step_deg):
        theta = math.radians(float(deg))
        rho = single_qubit_state(theta)
        fa = fidelity_vs_input(rho, t, SHIFT_ADM)
        fs = fidelity_vs_input(rho, t, (SHIFT_TAU,) * 3)
        rows.append((theta, fa, fs, fa - fs))
    return rows


def bloch_image_rows(count: int = 1000) -> list[tuple[float, ...]]:
    """Sphere points, their shifted images, and the images after the optimal depolarizer."""
    pts = fibonacci_sphere(count)
    shifted = bloch_map(z_shift_map(), pts)
    repaired = bloch_map(adm(SHIFT_ADM), shifted)
    return [tuple(map(float, (*p, *s, *r))) for p, s, r in zip(pts, shifted, repaired)]


def robust_domain_rows(kappa: float = 1.0, points_per_radius: int = 200) -> list[tuple[float, ...]]:
    """Images of spheres of radius ``1/6 .. 1`` under the robust map, with an in-ball flag."""
    ch = robust_map(kappa)
    rows = []
    for k in range(1, 7):
        r = k / 6
        pts = fibonacci_sphere(points_per_radius, r)
        img = bloch_map(ch, pts)
        norms = np.linalg.norm(img, axis=1)
        for p, q, n in zip(pts, img, norms):
            rows.append((r, *map(float, p), *map(float, q), float(n), int(n <= 1 + 1e-12)))
    return rows


SCENARIOS = {
    "fidelity-theta": (("theta", "f_adm", "f_spa", "gap"), fidelity_theta_rows),
    "bloch-image": (("x", "y", "z", "x_shift", "y_shift", "z_shift", "x_out", "y_out", "z_out"), bloch_image_rows),
    "robust-domain": (("radius", "x", "y", "z", "x_out", "y_out", "z_out", "norm_out", "in_ball"),
                      robust_domain_rows),
}


def write_csv(scenario: str, path) -> int:
    """Write ``scenario`` to ``path``; returns the number of data rows."""
    header, build = SCENARIOS[scenario]
    rows = build()
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return len(rows)


__all__ = [
    "SCENARIOS",
    "bloch_image_rows",
    "bloch_map",
    "fibonacci_sphere",
    "fidelity_theta_rows",
    "robust_domain_rows",
    "write_csv",
]
