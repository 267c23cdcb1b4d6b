"""Search for asymmetric depolarizers that make a map completely positive.

Given a (generally NCP) map ``Phi`` on ``k`` qubits, we look for local scale
factors ``c = (alpha_i, beta_i, gamma_i)_{i=1..k}`` such that both
``adm(c) o Phi`` and ``adm(c)`` have positive semidefinite B-matrices, while
maximizing a disturbance objective.

The composed B-matrix is multilinear in ``c``: splitting the output of ``Phi``
into Pauli strings ``P``,

    B[adm(c) o Phi] = sum_P  (prod_i c_i[P_i]) B_P,     c_i[I] = 1,

so thousands of candidates are screened with one matrix product and one
batched eigenvalue call.  Candidates come from a grid over the parameter box;
the best feasible point of every sign orthant seeds a Nelder-Mead search over
ray directions from an interior point of that orthant, each direction scored at
the exact boundary of the feasible set.  Multi-qubit maps are then swept one
qubit at a time (the problem is affine in a single qubit's triple), and the
overall winner gets a short penalized simplex polish.
"""

from __future__ import annotations

import csv
import enum
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from .channel_rep import Channel, DensityMatrix, a_to_b, compose
from .errors import DimensionMismatch, DomainError, NoSolution
from .maps import DepolarizerParams, adm, symmetric_depolarizer
from .matrix_core import PAULI, PSD_TOL
from .measures import bloch_vector, fidelity_from_bloch

PENALTY_WEIGHT = 1e6
TIE_TOL = 1e-7
BISECTION_TOL = 1e-12
WITNESS_FLOOR = 1e-4
MONOTONICITY_SAMPLES = 100
_CHUNK = 4096


class MonotonicityWarning(UserWarning):
    """Feasibility along the symmetric ray is not monotone for this map."""


class ObjectiveKind(str, enum.Enum):
    M1 = "m1"
    FIDELITY_VS_INPUT = "fid-in"
    FIDELITY_VS_MAP_OUTPUT = "fid-out"


class SignMode(str, enum.Enum):
    FULL_CUBE = "cube"
    NON_NEGATIVE = "nonneg"


class ConstraintMode(str, enum.Enum):
    UNCONSTRAINED = "unconstrained"
    BOUNDED_BY_SYMMETRIC = "bounded"


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`optimize_adm`.

    Attributes
    ----------
    grid_resolution : int
        Grid points per axis (at least 3).  Multi-qubit grids are thinned so
        that the total stays within ``max_grid_points``.
    refinement : int
        Number of sign orthants whose best grid point seeds a simplex run.
    psd_tol : float
        Eigenvalues above ``-psd_tol`` count as non-negative.
    constraint_mode : ConstraintMode
        ``BOUNDED_BY_SYMMETRIC`` restricts every parameter to ``[tau, 1]``
        where ``tau`` is the optimal symmetric scale (or ``bound_tau``).
    sign_mode : SignMode
        ``FULL_CUBE`` searches ``[-1, 1]``, ``NON_NEGATIVE`` searches ``[0, 1]``.
    reference_states : sequence, optional
        States (density matrices or Bloch vectors) for the fidelity objectives.
        Defaults to pure states on 180 polar angles and 4 azimuths, weighted
        uniformly over the sphere.
    threads : int, optional
        Worker threads; defaults to ``CPFORGE_THREADS`` or 1.
    """

    grid_resolution: int = 21
    refinement: int = 8
    psd_tol: float = PSD_TOL
    constraint_mode: ConstraintMode = ConstraintMode.UNCONSTRAINED
    sign_mode: SignMode = SignMode.FULL_CUBE
    bound_tau: float | None = None
    max_grid_points: int = 50_000
    max_iterations: int = 4000
    reference_states: Sequence | None = None
    threads: int | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.grid_resolution < 3:
            raise ValueError("grid_resolution must be at least 3")
        if self.refinement < 0:
            raise ValueError("refinement must be non-negative")
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        object.__setattr__(self, "sign_mode", SignMode(self.sign_mode))


class TraceRow(NamedTuple):
    iteration: int
    params: tuple[float, ...]
    objective: float
    comp_min_eig: float
    adm_min_eig: float


@dataclass
class OptimizationResult:
    params: DepolarizerParams
    objective: float
    objective_kind: ObjectiveKind
    composition_min_eig: float
    adm_min_eig: float
    iterations: int
    converged: bool
    symmetric_tau: float
    symmetric_objective: float
    trace: list[TraceRow] = field(default_factory=list, repr=False)

    @property
    def feasible(self) -> bool:
        return self.composition_min_eig >= -PSD_TOL and self.adm_min_eig >= -PSD_TOL


class SymmetricTau(NamedTuple):
    tau: float
    certificate: float


# ----------------------------------------------------------------------------
# batched certificate evaluation
# ----------------------------------------------------------------------------


def _pauli_strings(k: int) -> list[np.ndarray]:
    out = []
    for idx in product(range(4), repeat=k):
        m = np.ones((1, 1), dtype=np.complex128)
        for i in idx:
            m = np.kron(m, PAULI[i])
        out.append(m)
    return out


def _n_qubits(channel: Channel) -> int:
    k = channel.n_qubits
    if k is None or k < 1:
        raise DimensionMismatch("asymmetric depolarizers need a map on one or more qubits")
    if k > 3:
        raise DimensionMismatch("searches are limited to three qubits")
    return k


class _Problem:
    """Precomputed pieces for fast certificate evaluation on one map."""

    def __init__(self, channel: Channel):
        self.channel = channel
        self.k = _n_qubits(channel)
        d = channel.dim_in
        self.d = d
        strings = _pauli_strings(self.k)
        blocks = []
        for s in strings:
            v = s.reshape(-1)
            proj = np.outer(v, v.conj()) / d
            blocks.append(a_to_b(proj @ channel.amatrix, d, d))
        self.b_blocks = np.stack(blocks)  # (4^k, d^2, d^2)
        self._flat_blocks = self.b_blocks.reshape(len(blocks), -1)

    def weights(self, params: np.ndarray) -> np.ndarray:
        """Pauli-string weights ``prod_i c_i[P_i]`` for params of shape ``(N, 3k)``."""
        p = params.reshape(len(params), self.k, 3)
        c = np.concatenate([np.ones((len(params), self.k, 1)), p], axis=2)
        w = c[:, 0, :]
        for i in range(1, self.k):
            w = (w[:, :, None] * c[:, i, None, :]).reshape(len(params), -1)
        return w

    def comp_bmatrices(self, params: np.ndarray) -> np.ndarray:
        w = self.weights(params).astype(np.complex128)
        dd = self.d * self.d
        return (w @ self._flat_blocks).reshape(len(params), dd, dd)

    def comp_min_eig(self, params: np.ndarray) -> np.ndarray:
        b = self.comp_bmatrices(params)
        b = 0.5 * (b + np.conj(np.swapaxes(b, -1, -2)))
        return np.linalg.eigvalsh(b)[:, 0]

    def adm_min_eig(self, params: np.ndarray) -> np.ndarray:
        """Local B spectra are ``2 kappa``; the tensor-product spectrum is their products."""
        p = params.reshape(len(params), self.k, 3)
        a, b, g = p[..., 0], p[..., 1], p[..., 2]
        local = 0.5 * np.stack([1 + a + b + g, 1 + a - b - g, 1 - a + b - g, 1 - a - b + g], axis=-1)
        spec = local[:, 0, :]
        for i in range(1, self.k):
            spec = (spec[:, :, None] * local[:, i, None, :]).reshape(len(params), -1)
        return spec.min(axis=1)

    def certificates(self, params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        params = np.atleast_2d(np.asarray(params, dtype=float))
        return self.comp_min_eig(params), self.adm_min_eig(params)


# ----------------------------------------------------------------------------
# objectives
# ----------------------------------------------------------------------------


def default_reference_bloch(n_polar: int = 180, azimuths: Sequence[float] = (0.0, np.pi / 2, np.pi, 1.5 * np.pi)):
    """Pure-state Bloch vectors on polar-angle midpoints, with surface-measure weights."""
    theta = (np.arange(n_polar) + 0.5) * np.pi / n_polar
    phi = np.asarray(azimuths, dtype=float)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    r = np.stack([np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t)], axis=-1).reshape(-1, 3)
    w = np.repeat(np.sin(theta), len(phi))
    return r, w / w.sum()


def _reference_bloch(states) -> tuple[np.ndarray, np.ndarray]:
    if states is None:
        return default_reference_bloch()
    rows = []
    for s in states:
        if isinstance(s, DensityMatrix):
            rows.append(bloch_vector(s))
        else:
            arr = np.asarray(s)
            rows.append(bloch_vector(arr) if arr.shape == (2, 2) else np.asarray(arr, dtype=float).reshape(3))
    r = np.array(rows, dtype=float)
    return r, np.full(len(r), 1.0 / len(r))


def _map_bloch(channel: Channel, r: np.ndarray) -> np.ndarray:
    """Bloch vectors of ``channel`` applied to the states with Bloch vectors ``r``."""
    rho = 0.5 * (PAULI[0][None] + np.einsum("ni,ijk->njk", r, np.stack(PAULI[1:])))
    out = np.einsum("ab,nb->na", channel.amatrix, rho.reshape(len(r), 4)).reshape(len(r), 2, 2)
    return np.real(np.einsum("njk,ikj->ni", out, np.stack(PAULI[1:])))


class _Objective:
    """Vectorized objective ``params (N, 3k) -> values (N,)``."""

    def __init__(self, kind: ObjectiveKind, channel: Channel, reference_states=None):
        self.kind = ObjectiveKind(kind)
        if self.kind is ObjectiveKind.M1:
            return
        if channel.dim_in != 2 or channel.dim_out != 2:
            raise DimensionMismatch("fidelity objectives are defined for single-qubit maps only")
        r, w = _reference_bloch(reference_states)
        r_out = _map_bloch(channel, r)
        if self.kind is ObjectiveKind.FIDELITY_VS_MAP_OUTPUT:
            inside = np.sum(r_out * r_out, axis=1) <= 1.0 + 1e-9
            if not np.any(inside):
                raise DomainError("no reference state is mapped into the Bloch ball; supply reference_states")
            r, r_out, w = r_out[inside], r_out[inside], w[inside] / w[inside].sum()
        self.r, self.r_out, self.w = r, r_out, w

    def __call__(self, params: np.ndarray) -> np.ndarray:
        params = np.atleast_2d(params)
        if self.kind is ObjectiveKind.M1:
            return np.mean(np.abs(params), axis=1)
        dr = params[:, None, :] * self.r_out[None]
        rad1 = np.clip(1.0 - np.sum(self.r * self.r, axis=1), 0.0, None)
        rad2 = np.clip(1.0 - np.sum(dr * dr, axis=2), 0.0, None)
        f = 0.5 * (1.0 + np.einsum("ni,mni->mn", self.r, dr) + np.sqrt(rad1[None] * rad2))
        return f @ self.w

    def exact(self, params: np.ndarray) -> float:
        """Objective with the strict domain checks of the public fidelity formulas."""
        if self.kind is ObjectiveKind.M1:
            return float(np.mean(np.abs(params)))
        vals = fidelity_from_bloch(self.r, self.r_out, params[:3])
        return float(vals @ self.w)


# ----------------------------------------------------------------------------
# public API
# ----------------------------------------------------------------------------


def feasibility(channel: Channel, params, psd_tol: float = PSD_TOL) -> tuple[float, float]:
    """Certificate eigenvalues ``(min eig B[adm o map], min eig B[adm])``.

    Both come from the package eigensolver.  The pair is feasible iff both are
    at least ``-psd_tol``.
    """
    p = params if isinstance(params, DepolarizerParams) else DepolarizerParams(params)
    if channel.n_qubits != p.n_qubits:
        raise DimensionMismatch(f"{p.n_qubits}-qubit parameters for a map on dim {channel.dim_in}")
    dep = adm(p)
    return compose(dep, channel).is_cp(psd_tol)[1], dep.is_cp(psd_tol)[1]


def is_feasible(channel: Channel, params, psd_tol: float = PSD_TOL) -> bool:
    comp, dep = feasibility(channel, params, psd_tol)
    return comp >= -psd_tol and dep >= -psd_tol


def bisect_boundary(feasible: Callable[[float], bool], lo: float, hi: float, tol: float = BISECTION_TOL) -> float:
    """Largest ``t`` in ``[lo, hi]`` with ``feasible(t)``, assuming one transition.

    ``feasible(lo)`` must hold.  Returns ``hi`` directly when it is feasible.
    """
    if feasible(hi):
        return hi
    if not feasible(lo):
        raise NoSolution(f"lower end {lo} of the bracket is infeasible")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def ray_boundary(channel: Channel, direction, psd_tol: float = PSD_TOL, hi: float = 1.0) -> float:
    """Largest ``t`` in ``[0, hi]`` with ``t * direction`` feasible."""
    direction = DepolarizerParams(direction).flat
    prob = _Problem(channel)

    def ok(t: float) -> bool:
        comp, dep = prob.certificates(t * direction)
        return comp[0] >= -psd_tol and dep[0] >= -psd_tol

    return bisect_boundary(ok, 0.0, hi)


def optimal_symmetric_tau(channel: Channel, psd_tol: float = PSD_TOL) -> SymmetricTau:
    """Largest ``tau`` in ``[0, 1]`` making ``symmetric_depolarizer(tau) o map`` CP.

    Multi-qubit maps use the same ``tau`` on every qubit.  The bisection
    assumes a single feasibility transition along the ray; this is checked at
    100 sample points and a :class:`MonotonicityWarning` is issued if violated.

    Returns
    -------
    SymmetricTau
        ``(tau, certificate)`` with the certificate the minimum composition
        eigenvalue at ``tau``.
    """
    prob = _Problem(channel)
    nparam = 3 * prob.k

    def comp(t: float) -> float:
        return float(prob.comp_min_eig(np.full((1, nparam), t))[0])

    if comp(0.0) < -psd_tol:
        raise NoSolution("complete depolarization does not yield a CP map; the input is not trace-preserving")
    tau = bisect_boundary(lambda t: comp(t) >= -psd_tol, 0.0, 1.0)
    samples = np.linspace(0.0, tau, MONOTONICITY_SAMPLES)
    bad = prob.comp_min_eig(np.repeat(samples[:, None], nparam, axis=1)) < -psd_tol
    if np.any(bad):
        warnings.warn(f"feasibility is not monotone along the symmetric ray below tau={tau:.12g}",
                      MonotonicityWarning, stacklevel=2)
    cert = compose(symmetric_depolarizer(tau, prob.k), channel).is_cp(psd_tol)[1]
    return SymmetricTau(tau, cert)


def nonzero_witness(channel: Channel, psd_tol: float = PSD_TOL) -> DepolarizerParams:
    """Feasible depolarizer parameters that are all bounded away from zero.

    Starts from the largest feasible uniform scale ``s (1, ..., 1)`` and then
    raises each parameter in turn as far as feasibility allows.  Every entry of
    the result is at least ``max(s, 1e-4)``.

    Raises
    ------
    NoSolution
        If no uniform scale of at least ``1e-4`` is feasible.
    """
    prob = _Problem(channel)
    nparam = 3 * prob.k

    def ok(p: np.ndarray) -> bool:
        comp, dep = prob.certificates(p)
        return comp[0] >= -psd_tol and dep[0] >= -psd_tol

    s = bisect_boundary(lambda t: ok(np.full(nparam, t)), 0.0, 1.0)
    if s < WITNESS_FLOOR:
        raise NoSolution(f"largest feasible uniform scale {s:.3e} is below {WITNESS_FLOOR}")
    p = np.full(nparam, s)
    for i in range(nparam):
        def ok_axis(t: float, i=i) -> bool:
            q = p.copy()
            q[i] = t
            return ok(q)

        p[i] = bisect_boundary(ok_axis, s, 1.0)
    # guard against round-off in the final certificate
    step = 1e-12
    while not is_feasible(channel, DepolarizerParams.from_flat(p), psd_tol) and np.any(p > s):
        p = np.maximum(p - step, s)
        step *= 4.0
    return DepolarizerParams.from_flat(p)


#: Alias matching the constructive statement it realizes.
theorem2_witness = nonzero_witness


def _tie_key(obj: float, x: np.ndarray):
    """Sort key: higher objective, then fewer negative entries, then lexicographically larger."""
    return (-round(obj / TIE_TOL), int(np.sum(x < 0)), tuple(-x))


def _better(a, b) -> bool:
    """``a`` and ``b`` are ``(objective, x)``; objectives within TIE_TOL count as equal."""
    (oa, xa), (ob, xb) = a, b
    if abs(oa - ob) > TIE_TOL:
        return oa > ob
    na, nb = int(np.sum(xa < 0)), int(np.sum(xb < 0))
    if na != nb:
        return na < nb
    return tuple(xa) > tuple(xb)


def _box(config: SearchConfig, channel: Channel, nparam: int) -> tuple[np.ndarray, np.ndarray, float, float]:
    tau_info = optimal_symmetric_tau(channel, config.psd_tol)
    tau = tau_info.tau
    lo = -1.0 if config.sign_mode is SignMode.FULL_CUBE else 0.0
    bound_tau = tau
    if config.constraint_mode is ConstraintMode.BOUNDED_BY_SYMMETRIC:
        bound_tau = tau if config.bound_tau is None else float(config.bound_tau)
        lo = max(lo, bound_tau)
    return np.full(nparam, lo), np.full(nparam, 1.0), tau, bound_tau


def _grid(lo: np.ndarray, hi: np.ndarray, config: SearchConfig) -> np.ndarray:
    nparam = len(lo)
    res = config.grid_resolution
    while res > 3 and res ** nparam > config.max_grid_points:
        res -= 1
    axes = [np.linspace(lo[i], hi[i], res) if hi[i] > lo[i] else np.array([lo[i]]) for i in range(nparam)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _workers(config: SearchConfig) -> int:
    if config.threads is not None:
        return max(1, int(config.threads))
    env = os.environ.get("CPFORGE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _map_ordered(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def optimize_adm(channel: Channel, objective: ObjectiveKind | str = ObjectiveKind.M1,
                 config: SearchConfig | None = None) -> OptimizationResult:
    """Best feasible asymmetric depolarizer for ``channel`` under ``objective``.

    The returned parameters satisfy both certificates (composition and
    depolarizer B-matrices PSD within ``psd_tol``, checked with the package
    eigensolver) and their objective is never below that of the optimal
    symmetric depolarizer.  Among optima equal to within 1e-7 the one with the
    fewest negative entries, then the lexicographically largest, is returned.
    The search is deterministic for a given configuration.
    """
    config = config or SearchConfig()
    kind = ObjectiveKind(objective)
    prob = _Problem(channel)
    nparam = 3 * prob.k
    obj = _Objective(kind, channel, config.reference_states)
    lo, hi, tau, bound_tau = _box(config, channel, nparam)
    tol = config.psd_tol
    margin = 0.5 * tol
    workers = _workers(config)

    # -- grid screening -----------------------------------------------------
    pts = _grid(lo, hi, config)
    chunks = [pts[i:i + _CHUNK] for i in range(0, len(pts), _CHUNK)]

    def screen(chunk):
        comp, dep = prob.certificates(chunk)
        return (comp >= -margin) & (dep >= -margin), obj(chunk)

    screened = _map_ordered(screen, chunks, workers)
    feas = np.concatenate([s[0] for s in screened])
    vals = np.concatenate([s[1] for s in screened])

    sym = np.full(nparam, max(tau, bound_tau) if config.constraint_mode is ConstraintMode.BOUNDED_BY_SYMMETRIC else tau)
    sym = np.clip(sym, lo, hi)
    best_by_orthant: dict[tuple, tuple[float, np.ndarray]] = {}
    for idx in np.flatnonzero(feas):
        x = pts[idx]
        sig = tuple((x < 0).astype(int))
        cand = (float(vals[idx]), x)
        if sig not in best_by_orthant or _better(cand, best_by_orthant[sig]):
            best_by_orthant[sig] = cand
    sym_val = float(obj(sym)[0])
    sym_sig = tuple((sym < 0).astype(int))
    if sym_sig not in best_by_orthant or _better((sym_val, sym), best_by_orthant[sym_sig]):
        best_by_orthant[sym_sig] = (sym_val, sym)
    feasible_pts = pts[feas]
    sig_keys = [tuple((x < 0).astype(int)) for x in feasible_pts]
    sig_index = {sig: i for i, sig in enumerate(dict.fromkeys(sig_keys))}
    orthant_of = np.array([sig_index[sg] for sg in sig_keys], dtype=int)
    seeds = sorted(best_by_orthant.items(), key=lambda kv: _tie_key(kv[1][0], kv[1][1]))[: max(1, config.refinement)]

    # -- simplex refinement -------------------------------------------------
    def refine(item):
        sig, (val0, x0) = item
        neg = np.array(sig, dtype=bool)
        blo = np.where(neg, lo, np.maximum(lo, 0.0))
        bhi = np.where(neg, np.minimum(hi, 0.0), hi)
        members = feasible_pts[orthant_of == sig_index[sig]] if sig in sig_index else x0[None]
        anchor = members.mean(axis=0) if len(members) else x0
        comp, dep = prob.certificates(anchor)
        if comp[0] < -margin or dep[0] < -margin:
            anchor = x0
        return _refine_seed(prob, obj, x0, anchor, blo, bhi, config)

    refined = _map_ordered(refine, seeds, workers)

    candidates: list[tuple[float, np.ndarray]] = [(sym_val, sym)]
    candidates += [(v, x) for _, (v, x) in seeds]
    iterations = 0
    converged = True
    trace: list[TraceRow] = []
    for x, nit, ok, rows in refined:
        iterations += nit
        converged &= ok
        trace.extend(TraceRow(len(trace) + i, *r[1:]) for i, r in enumerate(rows))
        candidates.append((float(obj(x)[0]), x))

    ranked = sorted(candidates, key=lambda c: _tie_key(c[0], c[1]))
    # pick the best by pairwise comparison (sorting by rounded key is only a pre-order)
    best = None
    for cand in ranked:
        if best is None or _better(cand, best):
            best = cand
    sig = best[1] < 0
    polished, nit = _penalty_polish(prob, obj, best[1], np.where(sig, lo, np.maximum(lo, 0.0)),
                                    np.where(sig, np.minimum(hi, 0.0), hi), config)
    iterations += nit
    best = (float(obj(polished)[0]), polished)
    order = [best] + [c for c in ranked if c is not best]
    for val, x in order:
        params = DepolarizerParams.from_flat(x)
        comp_eig, adm_eig = feasibility(channel, params, tol)
        if comp_eig >= -tol and adm_eig >= -tol:
            return OptimizationResult(
                params=params,
                objective=obj.exact(x) if prob.k == 1 else float(obj(x)[0]),
                objective_kind=kind,
                composition_min_eig=comp_eig,
                adm_min_eig=adm_eig,
                iterations=iterations,
                converged=bool(converged),
                symmetric_tau=tau,
                symmetric_objective=sym_val,
                trace=trace if config.record_trace else [],
            )
    raise NoSolution("no candidate passed the final certificate check")


def _refine_seed(prob: _Problem, obj: _Objective, x0: np.ndarray, anchor: np.ndarray,
                 blo: np.ndarray, bhi: np.ndarray, config: SearchConfig):
    """Refine one orthant seed; returns ``(x, iterations, converged, trace_rows)``.

    Nelder-Mead runs over ray directions from ``anchor``, scoring each
    direction by the objective at the exact boundary point of the feasible set
    along that ray.
    """
    rows: list[tuple] = []
    tol = config.psd_tol
    margin = 0.5 * tol
    idx = np.flatnonzero(bhi > blo)
    if idx.size == 0:
        return x0, 0, True, rows

    def record(x):
        if config.record_trace:
            comp, dep = prob.certificates(x)
            rows.append((len(rows), tuple(float(v) for v in x), float(obj(x)[0]), float(comp[0]), float(dep[0])))

    ray = _RayBoundary(prob, anchor, blo, bhi, margin)

    def point(z):
        u = np.zeros_like(anchor)
        u[idx] = z
        return ray.boundary_point(u)

    start = x0 - anchor
    if not np.any(start[idx]):
        start = np.where(bhi > blo, np.where(bhi > 0, bhi, blo) - anchor, 0.0)
    z0 = start[idx]
    z0 = z0 / max(np.linalg.norm(z0), 1e-300)
    # multi-qubit rays need root finding; keep the joint run short and let the
    # exact per-qubit sweeps do the fine work
    budget = config.max_iterations if prob.k == 1 else min(config.max_iterations, 50 * idx.size)
    res = minimize(
        lambda z: -float(obj(point(z))[0]), z0, method="Nelder-Mead",
        callback=(lambda zk: record(point(zk))) if config.record_trace else None,
        options={"xatol": 1e-12, "fatol": 1e-15, "adaptive": idx.size > 3,
                 "maxiter": budget, "maxfev": 2 * budget},
    )
    nit = int(res.nit)
    ok = res.status == 0 or prob.k > 1
    x = point(res.x)
    if obj(x0)[0] > obj(x)[0]:
        x = x0
    if prob.k > 1:
        # sweep from both the simplex result and the grid seed: the seed often
        # sits on box faces that the joint simplex only approaches
        best = None
        for start_x in (x, x0):
            cand, extra = _block_polish(prob, obj, start_x, blo, bhi, config)
            nit += extra
            if best is None or obj(cand)[0] > obj(best)[0]:
                best = cand
        x = best

    record(x)
    return x, nit, ok, rows


def _penalty_polish(prob: _Problem, obj: _Objective, x: np.ndarray, blo: np.ndarray, bhi: np.ndarray,
                    config: SearchConfig) -> tuple[np.ndarray, int]:
    """Short bounded simplex run on ``-objective + 1e6 * violation`` started at ``x``.

    The polished point is kept only if it stays feasible and gains more than
    1e-10 in objective.
    """
    tol = config.psd_tol
    idx = np.flatnonzero(bhi > blo)
    if idx.size == 0:
        return x, 0

    def penalized(z):
        full = _embed(x, idx, np.clip(z, blo[idx], bhi[idx]))
        comp, dep = prob.certificates(full)
        viol = max(0.0, -(comp[0] + tol)) + max(0.0, -(dep[0] + tol))
        return -float(obj(full)[0]) + PENALTY_WEIGHT * viol

    simplex = [x[idx]]
    for j in range(idx.size):
        v = x[idx].copy()
        h = 1e-6 * (bhi[idx[j]] - blo[idx[j]])
        v[j] = v[j] + h if v[j] + h <= bhi[idx[j]] else v[j] - h
        simplex.append(v)
    res = minimize(penalized, x[idx], method="Nelder-Mead", bounds=list(zip(blo[idx], bhi[idx])),
                   options={"initial_simplex": np.array(simplex), "xatol": 1e-13, "fatol": 1e-15,
                            "maxiter": 400})
    cand = _embed(x, idx, np.clip(res.x, blo[idx], bhi[idx]))
    comp, dep = prob.certificates(cand)
    margin = 0.5 * tol
    if comp[0] >= -margin and dep[0] >= -margin and obj(cand)[0] > obj(x)[0] + 1e-10:
        return cand, int(res.nit)
    return x, int(res.nit)


def _box_step(u: list, anchor: list, blo: list, bhi: list) -> float:
    t = np.inf
    for ui, ai, lo, hi in zip(u, anchor, blo, bhi):
        if ui > 0:
            t = min(t, (hi - ai) / ui)
        elif ui < 0:
            t = min(t, (lo - ai) / ui)
    return max(t, 0.0)


class _AffineRay:
    """Exact boundary steps for an affine LMI ``M(c) = M(anchor) + sum_i (c - anchor)_i G_i``.

    With ``M(anchor) = L L^dagger`` positive definite the matrix stays PSD along
    ``anchor + t u`` up to ``t = 1 / lambda_max(-sum_i u_i L^{-1} G_i L^{-dagger})``.
    The single-qubit depolarizer spectrum ``1 + s_j . c`` (up to a factor) is
    linear as well and handled in closed form.
    """

    @staticmethod
    def build(anchor: np.ndarray, m0: np.ndarray, grads: np.ndarray, blo, bhi) -> "_AffineRay | None":
        m0 = 0.5 * (m0 + m0.conj().T)
        kap = 1.0 + _SIGNS @ anchor
        if np.linalg.eigvalsh(m0)[0] <= 1e-9 or np.min(kap) <= 1e-9:
            return None
        return _AffineRay(anchor, m0, grads, kap, blo, bhi)

    def __init__(self, anchor, m0, grads, kap, blo, bhi):
        self.anchor = anchor
        self.anchor_list = anchor.tolist()
        self.blo, self.bhi = list(blo), list(bhi)
        linv = np.linalg.inv(np.linalg.cholesky(m0))
        g = -np.einsum("ij,njk,lk->nil", linv, grads, linv.conj())
        g = 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))
        self.whitened = g.reshape(len(grads), -1)
        self.dim = m0.shape[0]
        self.kap = kap.tolist()

    def boundary_point(self, u: np.ndarray) -> np.ndarray:
        n = float(np.sqrt(u @ u))
        if n == 0 or not np.isfinite(n):
            return self.anchor.copy()
        u = u / n
        t = _box_step(u.tolist(), self.anchor_list, self.blo, self.bhi)
        c = (u @ self.whitened).reshape(self.dim, self.dim)
        lam = float(np.linalg.eigvalsh(c)[-1])
        if lam > 0:
            t = min(t, 1.0 / lam)
        for kap, slope in zip(self.kap, (_SIGNS @ u).tolist()):
            if slope < 0:
                t = min(t, -kap / slope)
        return self.anchor + t * u


class _RayBoundary:
    """Largest feasible step from a fixed anchor along arbitrary directions.

    Single-qubit maps are affine in the parameters and use :class:`_AffineRay`;
    otherwise the first crossing is located with Brent's method.
    """

    def __init__(self, prob: _Problem, anchor: np.ndarray, blo: np.ndarray, bhi: np.ndarray, margin: float):
        self.prob, self.anchor, self.margin = prob, anchor, margin
        self.blo, self.bhi = blo.tolist(), bhi.tolist()
        self.anchor_list = anchor.tolist()
        self.affine = None
        if prob.k == 1:
            m0 = prob.comp_bmatrices(anchor[None])[0]
            self.affine = _AffineRay.build(anchor, m0, prob.b_blocks[1:], self.blo, self.bhi)

    def boundary_point(self, u: np.ndarray) -> np.ndarray:
        if self.affine is not None:
            return self.affine.boundary_point(u)
        n = float(np.sqrt(u @ u))
        if n == 0 or not np.isfinite(n):
            return self.anchor.copy()
        u = u / n
        t = _box_step(u.tolist(), self.anchor_list, self.blo, self.bhi)
        return self.anchor + self._crossing(u, t) * u

    def _crossing(self, u: np.ndarray, t_hi: float) -> float:
        """Root of ``min certificate = -margin / 2`` on ``[0, t_hi]`` by Brent's method."""
        def g(t: float) -> float:
            comp, dep = self.prob.certificates(self.anchor + t * u)
            return min(comp[0], dep[0]) + 0.5 * self.margin

        if g(t_hi) >= 0:
            return t_hi
        if g(0.0) < 0:
            return 0.0
        return brentq(g, 0.0, t_hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _block_polish(prob: _Problem, obj: _Objective, x: np.ndarray, blo: np.ndarray, bhi: np.ndarray,
                  config: SearchConfig, max_sweeps: int = 6) -> tuple[np.ndarray, int]:
    """Cyclic per-qubit refinement for multi-qubit maps.

    With all other qubits fixed the composed B-matrix is affine in one qubit's
    triple, so each block is refined with exact boundary steps from an interior
    anchor (the mean of the block's feasible points on a small grid).
    """
    margin = 0.5 * config.psd_tol
    nit = 0
    axes = np.linspace(0.0, 1.0, 7)
    unit = np.stack(np.meshgrid(axes, axes, axes, indexing="ij"), axis=-1).reshape(-1, 3)
    for _ in range(max_sweeps):
        improved = False
        for q in range(prob.k):
            sl = slice(3 * q, 3 * q + 3)
            lo_q, hi_q = blo[sl], bhi[sl]
            if not np.any(hi_q > lo_q):
                continue
            base = x.copy()
            base[sl] = 0.0
            probes = np.repeat(base[None], 4, axis=0)
            probes[1:, sl] = np.eye(3)
            mats = prob.comp_bmatrices(probes)
            m_base, grads = mats[0], mats[1:] - mats[0]
            # restrict to the joint range: identity-like factors on other qubits
            # leave a kernel shared by every matrix in the affine family
            u, sv, _ = np.linalg.svd(np.hstack([m_base, *grads]))
            q_basis = u[:, sv > 1e-10 * max(1.0, sv[0])]
            m_base = q_basis.conj().T @ m_base @ q_basis
            grads = np.einsum("ji,njk,kl->nil", q_basis.conj(), grads, q_basis)
            cands = lo_q + unit * (hi_q - lo_q)
            m = m_base[None] + np.tensordot(cands, grads, axes=1)
            m = 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
            ok = (np.linalg.eigvalsh(m)[:, 0] > 1e-9) & (np.min(1.0 + cands @ _SIGNS.T, axis=1) > 1e-9)
            if not np.any(ok):
                continue
            anchor = cands[ok].mean(axis=0)
            ray = _AffineRay.build(anchor, m_base + np.tensordot(anchor, grads, axes=1), grads, lo_q, hi_q)
            if ray is None:
                continue

            def full(z, ray=ray, sl=sl):
                out = x.copy()
                out[sl] = ray.boundary_point(z)
                return out

            z0 = x[sl] - anchor
            if not np.any(z0):
                z0 = hi_q - anchor
            res = minimize(lambda z: -float(obj(full(z))[0]), z0 / np.linalg.norm(z0), method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 600})
            nit += int(res.nit)
            corner = x.copy()
            corner[sl] = np.where(np.abs(lo_q) > np.abs(hi_q), lo_q, hi_q)
            for cand in (full(res.x), corner):
                comp, dep = prob.certificates(cand)
                if comp[0] >= -margin and dep[0] >= -margin and obj(cand)[0] > obj(x)[0] + 1e-15:
                    improved |= obj(cand)[0] > obj(x)[0] + 1e-12
                    x = cand
        if not improved:
            break
    return x, nit


# sign patterns of the single-qubit depolarizer spectrum: 2 kappa_j = (1 + s_j . c) / 2
_SIGNS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)


def _embed(x: np.ndarray, idx: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = x.copy()
    out[idx] = z
    return out


def write_trace_csv(result: OptimizationResult, path) -> None:
    """Dump the refinement trace as ``iter,alpha,beta,gamma,objective,comp_min_eig,adm_min_eig``."""
    k = result.params.n_qubits
    names = ["alpha", "beta", "gamma"] if k == 1 else [f"{n}_{i + 1}" for i in range(k) for n in ("alpha", "beta", "gamma")]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", *names, "objective", "comp_min_eig", "adm_min_eig"])
        for row in result.trace:
            w.writerow([row.iteration, *(repr(v) for v in row.params), repr(row.objective),
                        repr(row.comp_min_eig), repr(row.adm_min_eig)])


def single_qubit_state(theta: float, phi: float = 0.0) -> DensityMatrix:
    """Pure state at polar angle ``theta`` and azimuth ``phi``."""
    return DensityMatrix.from_bloch([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


__all__ = [
    "ConstraintMode",
    "MonotonicityWarning",
    "ObjectiveKind",
    "OptimizationResult",
    "SearchConfig",
    "SignMode",
    "SymmetricTau",
    "bisect_boundary",
    "default_reference_bloch",
    "feasibility",
    "is_feasible",
    "nonzero_witness",
    "optimal_symmetric_tau",
    "optimize_adm",
    "ray_boundary",
    "single_qubit_state",
    "theorem2_witness",
    "write_trace_csv",
]
