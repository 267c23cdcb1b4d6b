import numpy as np
import pytest

from cpforge.channel_rep import trace_preservation_error
from cpforge.ensembles import (
    random_bloch_ball,
    random_ncp_ensemble,
    random_ncp_map,
    random_qubit_states,
    random_tp_map,
    tp_project_bmatrix,
)
from cpforge.errors import NoSolution


def test_tp_projection_is_trace_preserving():
    rng = np.random.default_rng(3)
    ch = random_tp_map(rng, dim=3)
    assert trace_preservation_error(ch.amatrix, 3, 3) <= 1e-12
    b = ch.bmatrix
    assert np.allclose(tp_project_bmatrix(b, 3, 3), b, atol=1e-14)


def test_ncp_ensemble_is_seeded_and_ncp():
    a = random_ncp_ensemble(11, 5)
    b = random_ncp_ensemble(11, 5)
    for x, y in zip(a, b):
        assert np.array_equal(x.amatrix, y.amatrix)
        assert x.is_cp()[1] < -1e-6
        assert x.trace_preserving
        assert np.allclose(x.bmatrix, x.bmatrix.conj().T)


def test_ncp_sampler_gives_up():
    with pytest.raises(NoSolution):
        random_ncp_map(np.random.default_rng(0), scale=0.0, max_tries=5)


def test_random_states():
    rng = np.random.default_rng(5)
    pts = random_bloch_ball(rng, 500)
    assert np.all(np.linalg.norm(pts, axis=1) <= 1)
    states = random_qubit_states(rng, 4)
    assert all(np.trace(s.matrix).real == pytest.approx(1.0) for s in states)
