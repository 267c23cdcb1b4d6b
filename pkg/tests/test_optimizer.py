import itertools
import math
import warnings

import numpy as np
import pytest

from cpforge.catalog import amplified_coherence_map, flipped_shift_map, single_state_domain_map, z_shift_map
from cpforge.channel_rep import Channel, a_to_b, extend_local
from cpforge.ensembles import random_ncp_ensemble
from cpforge.errors import DimensionMismatch, NoSolution
from cpforge.maps import adm_amatrix, robust_map
from cpforge.optimizer import (
    ConstraintMode,
    MonotonicityWarning,
    ObjectiveKind,
    SearchConfig,
    SignMode,
    bisect_boundary,
    feasibility,
    is_feasible,
    nonzero_witness,
    optimal_symmetric_tau,
    optimize_adm,
    theorem2_witness,
    write_trace_csv,
)

SQ6 = math.sqrt(6)
ADM_OPT = np.array([math.sqrt(2 / 3), math.sqrt(2 / 3), 2 / 3])


# -- independent SDP oracle --------------------------------------------------------

def _affine_blocks(channel):
    """``B(adm(c) o channel) = B0 + sum_i c_i Bi`` and ``B(adm(c)) = D0 + sum_i c_i Di``."""
    a = channel.amatrix
    b0 = a_to_b(adm_amatrix(0, 0, 0) @ a, 2, 2)
    d0 = a_to_b(adm_amatrix(0, 0, 0), 2, 2)
    bs, ds = [], []
    for e in np.eye(3):
        bs.append(a_to_b(adm_amatrix(*e) @ a, 2, 2) - b0)
        ds.append(a_to_b(adm_amatrix(*e), 2, 2) - d0)
    return b0, bs, d0, ds


def _real_embedding(cp, m):
    re, im = cp.real(m), cp.imag(m)
    return cp.bmat([[re, -im], [im, re]])


def sdp_m1_optimum(channel):
    """Best M1 over all sign orthants; each orthant is a linear SDP."""
    cp = pytest.importorskip("cvxpy")
    b0, bs, d0, ds = _affine_blocks(channel)
    best = -np.inf
    for signs in itertools.product([1, -1], repeat=3):
        c = cp.Variable(3)
        comp = b0 + sum(c[i] * bs[i] for i in range(3))
        dep = d0 + sum(c[i] * ds[i] for i in range(3))
        cons = [_real_embedding(cp, comp) >> 0, _real_embedding(cp, dep) >> 0]
        cons += [signs[i] * c[i] >= 0 for i in range(3)] + [cp.abs(c) <= 1]
        prob = cp.Problem(cp.Maximize(sum(signs[i] * c[i] for i in range(3)) / 3), cons)
        prob.solve(solver="CLARABEL")
        if prob.status in ("optimal", "optimal_inaccurate"):
            best = max(best, prob.value)
    return best


def sdp_symmetric_tau(channel):
    cp = pytest.importorskip("cvxpy")
    b0, bs, _, _ = _affine_blocks(channel)
    tau = cp.Variable()
    prob = cp.Problem(cp.Maximize(tau), [_real_embedding(cp, b0 + tau * sum(bs)) >> 0, tau >= 0, tau <= 1])
    prob.solve(solver="CLARABEL")
    return tau.value


# -- worked examples -----------------------------------------------------------------

def test_shift_map_optimum():
    res = optimize_adm(z_shift_map())
    assert np.allclose(res.params.flat, ADM_OPT, atol=1e-4)
    assert res.objective == pytest.approx((2 + 2 * SQ6) / 9, abs=1e-6)
    assert res.feasible
    assert res.symmetric_tau == pytest.approx(2 / 3, abs=1e-9)


def test_flipped_map_optimum():
    res = optimize_adm(flipped_shift_map())
    assert np.allclose(res.params.flat, [0, 1, 0], atol=1e-4)
    assert optimal_symmetric_tau(flipped_shift_map()).tau == pytest.approx(1 / (1 + 2 * math.sqrt(2)), abs=1e-9)


def test_single_domain_map():
    ch = single_state_domain_map()
    assert optimal_symmetric_tau(ch).tau == pytest.approx(1 / 3, abs=1e-9)
    res = optimize_adm(ch)
    assert res.objective >= 1.309 / 3 - 1e-3
    bounded = optimize_adm(ch, config=SearchConfig(constraint_mode="bounded", sign_mode="nonneg"))
    assert np.allclose(bounded.params.flat, [1 / 3] * 3, atol=1e-4)
    assert res.objective > bounded.objective + 1e-3


def test_identity_is_left_alone():
    res = optimize_adm(Channel.identity())
    assert np.allclose(res.params.flat, [1, 1, 1])
    assert res.objective == pytest.approx(1.0)


# -- feasibility ------------------------------------------------------------------------

def test_feasibility_examples():
    comp, dep = feasibility(z_shift_map(), ADM_OPT)
    assert comp == pytest.approx(0.0, abs=1e-12)
    assert dep == pytest.approx((5 - 2 * SQ6) / 6, abs=1e-12)
    for kappa in (2, 5, 10):
        assert not is_feasible(robust_map(kappa), (0, 1 / kappa + 0.01, 0))
        assert is_feasible(robust_map(kappa), (0, 1 / kappa, 0))
    assert is_feasible(robust_map(3), (0, 0, 0))


def test_feasibility_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        feasibility(z_shift_map(), [(1, 1, 1), (1, 1, 1)])


# -- symmetric baseline and bisection -----------------------------------------------------

def test_bisect_boundary():
    assert bisect_boundary(lambda t: t <= 0.3, 0.0, 1.0) == pytest.approx(0.3, abs=1e-12)
    assert bisect_boundary(lambda t: True, 0.0, 1.0) == 1.0
    with pytest.raises(NoSolution):
        bisect_boundary(lambda t: False, 0.0, 1.0)


def test_symmetric_tau_certificate_and_no_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error", MonotonicityWarning)
        res = optimal_symmetric_tau(z_shift_map())
    assert res.certificate >= -1e-10


@pytest.mark.parametrize("kappa", [1, 2, 5])
def test_robust_boundaries(kappa):
    beta = bisect_boundary(lambda b: is_feasible(robust_map(kappa), (0, b, 0)), 0.0, 1.0)
    assert beta == pytest.approx(1 / kappa, abs=1e-9)


# -- witness ------------------------------------------------------------------------------

def test_witness_shift_map():
    w = nonzero_witness(z_shift_map())
    assert np.min(np.abs(w.flat)) >= 1e-4
    assert is_feasible(z_shift_map(), w)
    assert theorem2_witness is nonzero_witness


def test_witness_robust_map():
    w = nonzero_witness(robust_map(10)).flat
    assert 0 < w[1] <= 0.1 + 1e-9
    assert np.all(w > 0)
    assert is_feasible(robust_map(10), w)


def test_witness_amplified_coherence():
    w = np.abs(nonzero_witness(amplified_coherence_map(3)).flat)
    assert np.all(w >= [1 / 9, 1 / 9, 1e-4])


# -- search modes and objectives ---------------------------------------------------------

def test_nonneg_and_bounded_modes():
    ch = flipped_shift_map()
    nn = optimize_adm(ch, config=SearchConfig(sign_mode=SignMode.NON_NEGATIVE))
    assert np.all(nn.params.flat >= 0)
    bounded = optimize_adm(ch, config=SearchConfig(constraint_mode=ConstraintMode.BOUNDED_BY_SYMMETRIC,
                                                   sign_mode=SignMode.NON_NEGATIVE))
    assert np.all(bounded.params.flat >= bounded.symmetric_tau - 1e-12)
    assert bounded.feasible


@pytest.mark.parametrize("kind", list(ObjectiveKind))
def test_objectives_beat_symmetric(kind):
    res = optimize_adm(z_shift_map(), kind)
    assert res.feasible
    assert res.objective >= res.symmetric_objective - 1e-9


def test_fidelity_vs_input_objective_on_shift():
    res = optimize_adm(z_shift_map(), "fid-in")
    # the y <-> x symmetry of the shift map makes alpha = beta at the optimum
    assert res.params.flat[0] == pytest.approx(res.params.flat[1], abs=1e-4)


def test_reference_state_override():
    cfg = SearchConfig(reference_states=[np.array([0.0, 0.0, -1.0])])
    res = optimize_adm(z_shift_map(), "fid-in", cfg)
    assert res.feasible


def test_deterministic_and_thread_independent():
    ch = flipped_shift_map()
    a = optimize_adm(ch)
    b = optimize_adm(ch)
    c = optimize_adm(ch, config=SearchConfig(threads=3))
    assert np.array_equal(a.params.flat, b.params.flat)
    assert np.array_equal(a.params.flat, c.params.flat)
    assert a.objective == b.objective == c.objective


def test_trace_csv(tmp_path):
    res = optimize_adm(z_shift_map(), config=SearchConfig(record_trace=True))
    path = tmp_path / "trace.csv"
    write_trace_csv(res, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iter,alpha,beta,gamma,objective,comp_min_eig,adm_min_eig"
    assert len(lines) > 2


def test_grid_resolution_validated():
    with pytest.raises(ValueError):
        SearchConfig(grid_resolution=2)


# -- oracle comparisons -----------------------------------------------------------------

@pytest.mark.parametrize("index", range(8))
def test_matches_sdp_oracle(index):
    ch = random_ncp_ensemble(77, 8)[index]
    res = optimize_adm(ch)
    assert res.feasible
    assert res.objective == pytest.approx(sdp_m1_optimum(ch), abs=1e-5)
    assert res.symmetric_tau == pytest.approx(sdp_symmetric_tau(ch), abs=1e-6)


@pytest.mark.parametrize("make", [z_shift_map, flipped_shift_map, single_state_domain_map])
def test_examples_match_sdp_oracle(make):
    ch = make()
    assert optimize_adm(ch).objective == pytest.approx(sdp_m1_optimum(ch), abs=1e-5)


# -- multi-qubit ---------------------------------------------------------------------------

@pytest.mark.slow
def test_two_qubit_local_shift():
    ch = extend_local([z_shift_map(), None])
    res = optimize_adm(ch)
    assert res.feasible
    assert np.allclose(res.params.flat, [*ADM_OPT, 1, 1, 1], atol=1e-4)
    assert res.objective == pytest.approx(((2 + 2 * SQ6) / 9 + 1) / 2, abs=1e-6)


def test_two_qubit_symmetric_tau_and_witness():
    ch = extend_local([z_shift_map(), None])
    assert optimal_symmetric_tau(ch).tau == pytest.approx(2 / 3, abs=1e-9)
    w = nonzero_witness(ch)
    assert w.n_qubits == 2 and np.min(np.abs(w.flat)) >= 1e-4
    assert is_feasible(ch, w)
