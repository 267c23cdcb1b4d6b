"""Acceptance suite: eleven end-to-end criteria at their stated tolerances.

Each criterion is a function returning ``(label, error, tol)`` rows; it passes
when every row has ``error <= tol`` and the wall-clock limit (if any) holds.
Run under pytest for one test per criterion plus a PASS/FAIL summary, or as
``python tests/test_acceptance.py`` for the summary alone.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from cpforge.catalog import (
    amplified_coherence_map,
    flipped_shift_map,
    overscaled_depolarizer,
    single_state_domain_map,
    z_shift_map,
)
from cpforge.channel_rep import compose, extend_local, naive_extension
from cpforge.ensembles import random_ncp_ensemble, random_qubit_states
from cpforge.iso import (
    ebit_merge_unitary,
    ebit_product_state,
    gellmann_form,
    is_permutation_matrix,
    max_entangled_projector,
    max_entangled_vector,
    pauli_form,
)
from cpforge.maps import adm, completely_depolarizing, fujiwara_algoet_valid, robust_map, symmetric_depolarizer
from cpforge.matrix_core import eigvalsh
from cpforge.measures import adm_symmetric_diamond_distance, fidelity_vs_input, linear_entropy, m1
from cpforge.optimizer import (
    SearchConfig,
    bisect_boundary,
    is_feasible,
    optimal_symmetric_tau,
    optimize_adm,
    theorem2_witness,
)
from cpforge.optimizer import single_qubit_state
from cpforge.reproduce import correct_extension_amatrix

SQ6 = math.sqrt(6)
SQ17 = math.sqrt(17)
ADM_OPT = (math.sqrt(2 / 3), math.sqrt(2 / 3), 2 / 3)
ENSEMBLE_SEED = 2024

#: criterion id -> (passed, summary line); filled as criteria run
RESULTS: dict[int, tuple[bool, str]] = {}


def err(expected, actual) -> float:
    return float(np.max(np.abs(np.asarray(expected, dtype=complex) - np.asarray(actual, dtype=complex))))


def flag(ok: bool) -> float:
    """Boolean row: error 0 when ``ok``, else 1 (compared against tol 0)."""
    return 0.0 if ok else 1.0


def desc(values) -> list[float]:
    return sorted(values, reverse=True)


# -- criteria ------------------------------------------------------------------

def criterion_1():
    t = z_shift_map()
    return [
        ("B(ADM o T)", err([5 / 3, 1 / 3, 0, 0], compose(adm(ADM_OPT), t).spectrum()), 1e-9),
        ("B(ADM)", err(desc([(5 + 2 * SQ6) / 6, 1 / 6, 1 / 6, (5 - 2 * SQ6) / 6]), adm(ADM_OPT).spectrum()), 1e-9),
        ("B(SPA o T)", err(desc([(5 + SQ17) / 6, 1 / 3, (5 - SQ17) / 6, 0]),
                           compose(symmetric_depolarizer(2 / 3), t).spectrum()), 1e-9),
        ("B(SPA)", err([3 / 2, 1 / 6, 1 / 6, 1 / 6], symmetric_depolarizer(2 / 3).spectrum()), 1e-9),
    ]


def criterion_2():
    t = z_shift_map()
    thetas = np.radians(np.arange(181))
    f_adm = np.array([fidelity_vs_input(single_qubit_state(th), t, ADM_OPT) for th in thetas])
    f_spa = np.array([fidelity_vs_input(single_qubit_state(th), t, (2 / 3,) * 3) for th in thetas])
    gap = f_adm - f_spa
    return [
        ("M1(ADM)", err((2 + 2 * SQ6) / 9, m1(ADM_OPT)), 1e-9),
        ("M1(SPA)", err(2 / 3, m1((2 / 3,) * 3)), 1e-9),
        ("F_ADM curve", err((8 + SQ6 + 2 * np.cos(thetas) + (2 - SQ6) * np.cos(2 * thetas)) / 12, f_adm), 1e-9),
        ("F_SPA curve", err((5 + np.cos(thetas)) / 6, f_spa), 1e-9),
        ("gap curve", err((SQ6 - 2) / 6 * np.sin(thetas) ** 2, gap), 1e-9),
        ("gap >= 0", max(0.0, -float(gap.min())), 1e-9),
        ("diamond distance", err((SQ6 - 2) / 3, adm_symmetric_diamond_distance(ADM_OPT, 2 / 3)), 1e-9),
    ]


def criterion_3():
    t = z_shift_map()
    flipped, single = flipped_shift_map(), single_state_domain_map()
    res_t = optimize_adm(t)
    res_f = optimize_adm(flipped)
    res_s = optimize_adm(single)
    return [
        ("T optimum", err(ADM_OPT, res_t.params.flat), 1e-4),
        ("T symmetric tau", err(2 / 3, optimal_symmetric_tau(t).tau), 1e-9),
        ("flipped tau", err(1 / (1 + 2 * math.sqrt(2)), optimal_symmetric_tau(flipped).tau), 1e-9),
        ("flipped optimum", err([0, 1, 0], res_f.params.flat), 1e-4),
        ("single-domain tau", err(1 / 3, optimal_symmetric_tau(single).tau), 1e-9),
        ("single-domain M1", max(0.0, 1.309 / 3 - 1e-3 - res_s.objective), 0.0),
    ]


def criterion_4():
    rows = []
    for kappa in (1, 2, 5):
        ch = robust_map(kappa)
        beta = bisect_boundary(lambda b: is_feasible(ch, (0, b, 0)), 0.0, 1.0)
        rows.append((f"boundary kappa={kappa}", err(1 / kappa, beta), 1e-9))
        rows.append((f"spectrum kappa={kappa}", err([1, 1, 0, 0], compose(adm(0, 1 / kappa, 0), ch).spectrum()), 1e-9))
    return rows


def criterion_5():
    rows = []
    for x in (1.5, 2, 10):
        undo = compose(adm((1 / x, -1 / x, -1), allow_unphysical=True), overscaled_depolarizer(x))
        rows.append((f"inverse x={x}", err(np.eye(4), undo.amatrix), 1e-12))
    for x, expect in ((2, True), (3, True), (10, True), (1.5, False)):
        cp = compose(adm(1 / x ** 2, 1 / x ** 2, 0), amplified_coherence_map(x)).is_cp()[0]
        rows.append((f"coherence x={x} CP={expect}", flag(cp is expect), 0.0))
    return rows


def criterion_6():
    rows = []
    for n in (1, 2, 3):
        d = 2 ** n
        pf = pauli_form(n)
        rows.append((f"Pauli form n={n}", err(max_entangled_projector(d), pf), 1e-12))
        rows.append((f"Pauli spectrum n={n}", err([d] + [0] * (d * d - 1), eigvalsh(pf)), 1e-9))
    gf = gellmann_form(1)
    rows.append(("Gell-Mann form d=3", err(max_entangled_projector(3), gf), 1e-12))
    rows.append(("Gell-Mann spectrum d=3", err([3] + [0] * 8, eigvalsh(gf)), 1e-9))
    return rows


def criterion_7():
    rows = []
    for k in (2, 3, 4):
        u = ebit_merge_unitary(k)
        rows.append((f"merge k={k}", err(max_entangled_vector(2 ** k), u @ ebit_product_state(k)), 1e-12))
        rows.append((f"permutation k={k}", flag(is_permutation_matrix(u)), 0.0))
    return rows


def criterion_8():
    v = (np.eye(4) / 4).reshape(-1)
    naive = naive_extension([completely_depolarizing(), None]) @ v
    correct = extend_local([completely_depolarizing(), None])
    # unnormalized Bell projector |00><00| + |00><11| + |11><00| + |11><11|, scaled by 1/8
    bell = max_entangled_projector(2) / 8
    return [
        ("naive artifact", err(bell.reshape(-1), naive), 1e-12),
        ("correct output", err(v, correct.amatrix @ v), 1e-12),
        ("correct A-matrix", err(correct_extension_amatrix(), correct.amatrix), 1e-12),
    ]


def criterion_9():
    maps = random_ncp_ensemble(ENSEMBLE_SEED, 200)
    worst_witness, worst_feas, worst_gap = np.inf, np.inf, np.inf
    for ch in maps:
        w = theorem2_witness(ch)
        worst_witness = min(worst_witness, float(np.min(np.abs(w.flat))))
        worst_feas = min(worst_feas, 0.0 if is_feasible(ch, w) else -1.0)
        res = optimize_adm(ch)
        worst_gap = min(worst_gap, res.objective - res.symmetric_tau)
    return [
        ("witness nonzero", max(0.0, 1e-4 - worst_witness), 0.0),
        ("witness feasible", -worst_feas, 0.0),
        ("M1 >= tau", max(0.0, -worst_gap), 1e-9),
    ]


def criterion_10():
    rng = np.random.default_rng(ENSEMBLE_SEED + 1)
    maps = random_ncp_ensemble(ENSEMBLE_SEED + 2, 50)
    config = SearchConfig(constraint_mode="bounded")
    worst = -np.inf
    for ch in maps:
        res = optimize_adm(ch, config=config)
        adm_map = compose(adm(res.params), ch)
        spa_map = compose(symmetric_depolarizer(res.symmetric_tau), ch)
        for rho in random_qubit_states(rng, 20):
            worst = max(worst, linear_entropy(adm_map.apply(rho.matrix)) - linear_entropy(spa_map.apply(rho.matrix)))
    return [("S_L(SPA) >= S_L(ADM) - 1e-10", max(0.0, worst), 1e-10)]


def criterion_11():
    axis = np.linspace(-1, 1, 21)
    mismatches = sum(fujiwara_algoet_valid(p) != adm(p).is_cp()[0]
                     for p in ((a, b, g) for a in axis for b in axis for g in axis))
    return [("FA vs PSD mismatches", float(mismatches), 0.0)]


CRITERIA = {
    1: ("shift-map eigenvalues", criterion_1, 1.0),
    2: ("shift-map measures", criterion_2, None),
    3: ("optimizer reproduction", criterion_3, 60.0),
    4: ("robust map boundary", criterion_4, None),
    5: ("inverse and coherence repairs", criterion_5, None),
    6: ("operator-basis identity", criterion_6, None),
    7: ("ebit merge unitary", criterion_7, None),
    8: ("naive vs correct extension", criterion_8, None),
    9: ("random NCP witness/optimizer suite", criterion_9, 120.0),
    10: ("linear-entropy ordering", criterion_10, None),
    11: ("Fujiwara-Algoet equivalence", criterion_11, None),
}


def evaluate(cid: int) -> tuple[bool, str, list]:
    title, fn, limit = CRITERIA[cid]
    start = time.perf_counter()
    rows = fn()
    elapsed = time.perf_counter() - start
    failed = [r for r in rows if not r[1] <= r[2]]
    time_ok = limit is None or elapsed < limit
    passed = not failed and time_ok
    worst = max(rows, key=lambda r: r[1] - r[2])
    line = (f"{'PASS' if passed else 'FAIL'} criterion {cid:>2} ({title}): worst {worst[0]} "
            f"error={worst[1]:.3g} tol={worst[2]:.0e}; {elapsed:.2f} s"
            + ("" if limit is None else f" (limit {limit:g} s)"))
    RESULTS[cid] = (passed, line)
    return passed, line, failed


@pytest.mark.parametrize("cid", list(CRITERIA))
def test_criterion(cid):
    passed, line, failed = evaluate(cid)
    print(line)
    assert passed, (line, failed)


if __name__ == "__main__":
    import sys

    ok = True
    for cid in CRITERIA:
        passed, line, _ = evaluate(cid)
        print(line, flush=True)
        ok &= passed
    sys.exit(0 if ok else 1)
