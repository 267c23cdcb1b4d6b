"""Fixed single-qubit maps used by the scripted scenarios and tests."""

from __future__ import annotations

import numpy as np

from .channel_rep import Channel
from .maps import translation

S = 1.0 / np.sqrt(2.0)


def z_shift_map(dz: float = 0.5) -> Channel:
    """Translation of the Bloch vector by ``(0, 0, dz)``."""
    return translation(0.0, 0.0, dz)


def flipped_shift_map() -> Channel:
    """TP map with B spectrum ``{2, sqrt 2, -sqrt 2, 0}``; optimal repair keeps only the y axis."""
    a = np.array(
        [[-S, 0, 0, 1 - S], [-S, -1, 0, -S], [-S, 0, -1, -S], [1 + S, 0, 0, S]],
        dtype=np.complex128,
    )
    return Channel(a, 2, 2)


def single_state_domain_map() -> Channel:
    """TP map whose only valid input is the pure state with Bloch vector ``(1/sqrt 2, 0, 1/sqrt 2)``."""
    a = np.array(
        [[1 - S, 0, 0, -S], [-S, 1, 0, -S], [-S, 0, 1, -S], [S, 0, 0, 1 + S]],
        dtype=np.complex128,
    )
    return Channel(a, 2, 2)


SINGLE_DOMAIN_BLOCH = np.array([S, 0.0, S])


def overscaled_depolarizer(x: float) -> Channel:
    """Depolarizer-shaped map ``(r_x, r_y, r_z) -> (x r_x, -x r_y, -r_z)``; NCP for ``|x| > 1``.

    ``adm(1/x, -1/x, -1)`` undoes it exactly.
    """
    a = np.array([[0, 0, 0, 1], [0, 0, x, 0], [0, x, 0, 0], [1, 0, 0, 0]], dtype=np.complex128)
    return Channel(a, 2, 2)


def amplified_coherence_map(x: float) -> Channel:
    """TP map ``(r_x, r_y, r_z) -> (x r_x, x r_y, 1 - r_z)``.

    ``adm(1/x^2, 1/x^2, 0)`` repairs it for ``x >= 2`` but not for ``x = 1.5``.
    """
    a = np.array(
        [[0.5, 0, 0, 1.5], [0, x, 0, 0], [0, 0, x, 0], [0.5, 0, 0, -0.5]],
        dtype=np.complex128,
    )
    return Channel(a, 2, 2)


__all__ = [
    "SINGLE_DOMAIN_BLOCH",
    "amplified_coherence_map",
    "flipped_shift_map",
    "overscaled_depolarizer",
    "single_state_domain_map",
    "z_shift_map",
]
