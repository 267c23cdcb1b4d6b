"""Command-line front end.

Subcommands
-----------
check FILE           CP/NCP verdict, B spectrum and trace-preservation error.
optimize FILE        Best asymmetric depolarizer next to the symmetric baseline.
reproduce ID         Scripted worked example with PASS/FAIL lines (alias: ``paper``).
plotdata SCENARIO    CSV tables for the fidelity and Bloch-sphere figures.
ensemble             Random NCP maps: witness and optimizer checks.

Exit codes: 0 success (an NCP verdict is a result, not an error), 1 failed
check, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .channel_rep import Channel
from .ensembles import random_ncp_ensemble
from .errors import CPForgeError, ParseError
from .matrix_core import PSD_TOL
from .measures import adm_symmetric_diamond_distance, fidelity_from_bloch, m1
from .optimizer import (
    ConstraintMode,
    ObjectiveKind,
    SearchConfig,
    SignMode,
    _map_bloch,
    default_reference_bloch,
    feasibility,
    nonzero_witness,
    optimize_adm,
    write_trace_csv,
)
from .plotdata import SCENARIOS as PLOT_SCENARIOS
from .plotdata import write_csv
from .reproduce import SCENARIOS, run_scenario
from .serialization import format_number, load_channel

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _num(x):
    """15-significant-digit rendering for plain output; JSON keeps full floats."""
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_num(v) for v in np.asarray(x).tolist()) + "]"
    if isinstance(x, complex):
        return format_number(x) if x.imag else format_number(x.real)
    if isinstance(x, (float, np.floating)):
        return format_number(float(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(_jsonable(report), indent=2) + "\n")
        return
    for key, value in report["outputs"].items():
        if key == "checks":
            continue
        out.write(f"{key}: {_num(value)}\n")
    for chk in report["outputs"].get("checks", []):
        out.write(f"{'PASS' if chk['passed'] else 'FAIL'}  {chk['name']}  error={_num(chk['error'])}"
                  f"  tol={_num(chk['tol'])}\n")
    out.write(f"time_ms: {report['timing_ms']:.3f}\n")


def _report(command: str, inputs: dict, outputs: dict, start: float) -> dict:
    return {"command": command, "inputs": inputs, "outputs": outputs,
            "timing_ms": (time.perf_counter() - start) * 1e3}


# -- commands ----------------------------------------------------------------

def cmd_check(args) -> int:
    start = time.perf_counter()
    ch = load_channel(args.channel)
    ok, lam = ch.is_cp(args.tol)
    outputs = {
        "verdict": "CP" if ok else "NCP",
        "min_eigenvalue": lam,
        "spectrum": ch.spectrum(),
        "trace_preserving": bool(ch.trace_preserving),
        "tp_error": ch.tp_error,
        "trace_b": ch.trace_b,
    }
    _emit(_report("check", {"channel": args.channel, "tol": args.tol}, outputs, start), args.json)
    return EXIT_OK


def _fidelity_summary(ch: Channel, params) -> float | None:
    """Smallest fidelity between a pure input and its repaired image over inputs mapped into the ball."""
    if ch.dim_in != 2 or ch.dim_out != 2:
        return None
    r, _ = default_reference_bloch()
    r_out = _map_bloch(ch, r)
    inside = np.sum(r_out * r_out, axis=1) <= 1.0 + 1e-9
    if not np.any(inside):
        return None
    return float(np.min(fidelity_from_bloch(r[inside], r_out[inside], np.asarray(params)[:3])))


def cmd_optimize(args) -> int:
    start = time.perf_counter()
    ch = load_channel(args.channel)
    mode = args.mode
    config = SearchConfig(
        grid_resolution=args.grid,
        psd_tol=args.tol,
        sign_mode=SignMode.FULL_CUBE if mode == "cube" else SignMode.NON_NEGATIVE,
        constraint_mode=ConstraintMode.BOUNDED_BY_SYMMETRIC if mode == "bounded" else ConstraintMode.UNCONSTRAINED,
        record_trace=args.out is not None,
    )
    res = optimize_adm(ch, args.objective, config)
    flat = res.params.flat
    k = res.params.n_qubits
    tau = res.symmetric_tau
    spa_comp, spa_adm = feasibility(ch, [(tau,) * 3] * k, args.tol)
    measures = {
        "m1": {"adm": m1(res.params), "spa": tau},
        "fidelity_min": None,
        "diamond": None,
    }
    if k == 1:
        fa, fs = _fidelity_summary(ch, flat), _fidelity_summary(ch, (tau,) * 3)
        measures["fidelity_min"] = None if fa is None else {"adm": fa, "spa": fs}
        measures["diamond"] = adm_symmetric_diamond_distance(flat, tau)
    outputs = {
        "adm_params": flat,
        "objective": res.objective,
        "objective_kind": res.objective_kind.value,
        "composition_min_eig": res.composition_min_eig,
        "adm_min_eig": res.adm_min_eig,
        "spa_tau": tau,
        "spa_objective": res.symmetric_objective,
        "spa_composition_min_eig": spa_comp,
        "spa_adm_min_eig": spa_adm,
        "iterations": res.iterations,
        "converged": res.converged,
    }
    if args.out:
        write_trace_csv(res, args.out)
        outputs["trace_file"] = args.out
    report = _report("optimize", {"channel": args.channel, "objective": res.objective_kind.value, "mode": mode,
                                  "grid": args.grid, "tol": args.tol}, outputs, start)
    if args.json:
        report["outputs"]["measures"] = measures
        _emit(report, True)
    else:
        _emit(report, False)
        _measure_table(measures)
    return EXIT_OK


def _measure_table(measures: dict) -> None:
    print(f"{'measure':<14}{'adm':>24}{'spa':>24}")
    print(f"{'m1':<14}{_num(measures['m1']['adm']):>24}{_num(measures['m1']['spa']):>24}")
    if measures["fidelity_min"] is not None:
        f = measures["fidelity_min"]
        print(f"{'fidelity_min':<14}{_num(f['adm']):>24}{_num(f['spa']):>24}")
    if measures["diamond"] is not None:
        print(f"diamond distance adm vs spa: {_num(measures['diamond'])}")


def cmd_reproduce(args) -> int:
    ids = list(SCENARIOS) if args.scenario == "all" else [args.scenario]
    all_pass = True
    reports = []
    for sid in ids:
        start = time.perf_counter()
        checks = run_scenario(sid)
        rows = [{"name": c.name, "passed": bool(c.passed), "error": c.error, "tol": c.tol} for c in checks]
        passed = all(r["passed"] for r in rows)
        all_pass &= passed
        reports.append(_report("reproduce", {"scenario": sid},
                               {"scenario": sid, "title": SCENARIOS[sid][0],
                                "result": "PASS" if passed else "FAIL", "checks": rows}, start))
    if args.json:
        print(json.dumps(_jsonable(reports[0] if len(reports) == 1 else reports), indent=2))
    else:
        for rep in reports:
            _emit(rep, False)
    return EXIT_OK if all_pass else EXIT_FAIL


def cmd_plotdata(args) -> int:
    start = time.perf_counter()
    try:
        rows = write_csv(args.scenario, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(_report("plotdata", {"scenario": args.scenario, "out": args.out},
                  {"scenario": args.scenario, "rows": rows, "out": args.out}, start), args.json)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    start = time.perf_counter()
    maps = random_ncp_ensemble(args.seed, args.count)
    failures = []
    min_witness = np.inf
    config = SearchConfig(grid_resolution=args.grid, psd_tol=args.tol)
    for i, ch in enumerate(maps):
        w = nonzero_witness(ch, args.tol)
        comp, dep = feasibility(ch, w, args.tol)
        min_witness = min(min_witness, float(np.min(np.abs(w.flat))))
        res = optimize_adm(ch, config=config)
        if comp < -args.tol or dep < -args.tol or np.min(np.abs(w.flat)) < 1e-4 or res.objective < res.symmetric_tau - 1e-9:
            failures.append(i)
    outputs = {"count": args.count, "seed": args.seed, "failures": failures, "min_witness_param": min_witness,
               "result": "PASS" if not failures else "FAIL"}
    _emit(_report("ensemble", {"seed": args.seed, "count": args.count}, outputs, start), args.json)
    return EXIT_OK if not failures else EXIT_FAIL


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpforge", description="Complete-positivity checks and depolarizer repair of qubit maps.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=PSD_TOL, help="PSD tolerance (default 1e-10)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="CP verdict and B spectrum of a channel file")
    c.add_argument("channel")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("optimize", parents=[common], help="optimal asymmetric depolarizer")
    o.add_argument("channel")
    o.add_argument("--objective", choices=[k.value for k in ObjectiveKind], default="m1")
    o.add_argument("--mode", choices=["cube", "nonneg", "bounded"], default="cube")
    o.add_argument("--grid", type=int, default=21, help="grid points per axis (>= 3)")
    o.add_argument("--out", help="write the refinement trace as CSV")
    o.set_defaults(func=cmd_optimize)

    r = sub.add_parser("reproduce", aliases=["paper"], parents=[common], help="run a scripted worked example")
    r.add_argument("scenario", choices=[*SCENARIOS, "all"])
    r.set_defaults(func=cmd_reproduce)

    d = sub.add_parser("plotdata", parents=[common], help="write figure data as CSV")
    d.add_argument("scenario", choices=list(PLOT_SCENARIOS))
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_plotdata)

    e = sub.add_parser("ensemble", parents=[common], help="witness and optimizer checks on random NCP maps")
    e.add_argument("--seed", type=int, default=2024)
    e.add_argument("--count", type=int, default=20)
    e.add_argument("--grid", type=int, default=21)
    e.set_defaults(func=cmd_ensemble)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", 3) < 3:
        parser.error("--grid must be at least 3")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CPForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
