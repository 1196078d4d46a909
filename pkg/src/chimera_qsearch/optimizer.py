"""Evolution-time upper bound and bounded multistart Nelder-Mead over (gamma, t)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .evolution import (
    CostParams,
    DegenerateEvaluation,
    NumericalError,
    SearchProblem,
    success_probability,
)
from .graph import ChimeraParams, build_chimera, marked_vertex

__all__ = [
    "NelderMeadConfig",
    "NelderMeadResult",
    "ObjectiveFailure",
    "OptimumRecord",
    "MultistartResult",
    "nelder_mead",
    "time_upperbound",
    "start_grid",
    "qss_optimization",
    "make_problem",
]

log = logging.getLogger(__name__)


class ObjectiveFailure(RuntimeError):
    """The objective produced a non-finite or degenerate value."""


@dataclass(frozen=True)
class NelderMeadConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_iterations: int = 500
    tolerance_f: float = 1e-8
    initial_step_fractions: tuple[float, ...] = (0.1, 0.05)
    min_step: float = 1e-4

    def __post_init__(self) -> None:
        if not self.reflection > 0:
            raise ValueError("reflection must be > 0")
        if not self.expansion > self.reflection:
            raise ValueError("expansion must exceed reflection")
        if not 0 < self.contraction < 1:
            raise ValueError("contraction must lie in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool


def _initial_simplex(start: np.ndarray, lo: np.ndarray, hi: np.ndarray, cfg: NelderMeadConfig):
    width = hi - lo
    verts = [start.copy()]
    for d in range(start.size):
        step = cfg.initial_step_fractions[d] * width[d]
        step = max(step, cfg.min_step) if width[d] > 0 else 0.0
        v = start.copy()
        v[d] = min(start[d] + step, hi[d])
        if v[d] - start[d] < cfg.min_step:
            # against the upper face: step inward instead
            v[d] = max(start[d] - step, lo[d])
        verts.append(v)
    return np.array(verts)


def nelder_mead(
    f: Callable[[np.ndarray], float],
    start: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    cfg: NelderMeadConfig = NelderMeadConfig(),
) -> NelderMeadResult:
    """Minimize ``f`` inside a box; trial points are projected onto the box before evaluation.

    Stops once the spread of simplex values falls below ``tolerance_f`` relative
    to the best value, or after ``max_iterations``. Raises :class:`ObjectiveFailure`
    if ``f`` returns a non-finite value.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    x0 = np.asarray(start, dtype=float)
    if x0.shape != lo.shape:
        raise ValueError("start and bounds differ in dimension")
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise ValueError(f"start {x0} outside the box")

    nevals = 0

    def evaluate(x):
        nonlocal nevals
        nevals += 1
        try:
            val = float(f(x))
        except (DegenerateEvaluation, NumericalError, FloatingPointError) as exc:
            raise ObjectiveFailure(str(exc)) from exc
        if not math.isfinite(val):
            raise ObjectiveFailure(f"objective returned {val} at {x}")
        return val

    def project(x):
        return np.clip(x, lo, hi)

    simplex = _initial_simplex(x0, lo, hi, cfg)
    fvals = np.array([evaluate(v) for v in simplex])
    converged = False
    it = 0
    while it < cfg.max_iterations:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        spread = fvals[-1] - fvals[0]
        if spread <= cfg.tolerance_f * abs(fvals[0]) or np.ptp(simplex, axis=0).max() == 0.0:
            converged = True
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = project(centroid + cfg.reflection * (centroid - worst))
        fr = evaluate(xr)
        if fr < fvals[0]:
            xe = project(centroid + cfg.expansion * (centroid - worst))
            fe = evaluate(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = project(centroid + cfg.contraction * (xr - centroid))
            fc = evaluate(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = project(centroid + cfg.contraction * (worst - centroid))
            fc = evaluate(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, len(simplex)):
            simplex[i] = project(best + cfg.shrink * (simplex[i] - best))
            fvals[i] = evaluate(simplex[i])
    i = int(np.argmin(fvals))
    return NelderMeadResult(simplex[i].copy(), float(fvals[i]), it, nevals, converged)


def make_problem(params: ChimeraParams, reduce: bool = True) -> SearchProblem:
    return SearchProblem(build_chimera(params), marked_vertex(params), reduce=reduce)


def time_upperbound(params: ChimeraParams, problem: SearchProblem | None = None) -> float:
    """Coarse bound on the useful evolution time at hopping rate ``1/(shore+1)``.

    Starts from ``t' = 1/p(1)`` and takes the minimum of the unpenalized ratio
    ``t/p(t)`` over ``t = 0.1 t', 0.2 t', ..., t'``.
    """
    if problem is None:
        problem = make_problem(params)
    s = problem.setup(1.0 / (params.shore + 1))
    p_init = success_probability(s, 1.0)
    if p_init <= 0.0:
        raise ObjectiveFailure("success probability vanishes at t = 1")
    t_prime = 1.0 / p_init
    times = t_prime * np.arange(1, 11) / 10.0
    probs = success_probability(s, times)
    with np.errstate(divide="ignore"):
        ratios = np.where(probs > 0, times / np.where(probs > 0, probs, 1.0), np.inf)
    return float(min(t_prime, ratios.min()))


def start_grid(norm: float, t_bound: float, gamma_points: int = 40, time_points: int = 16):
    """Multistart points: gamma_0 evenly up to ``2/norm``, t_0 evenly over ``[0, t_bound]``.

    The defaults reproduce ``gamma_0 = m/(20 norm)``, m = 1..40 and
    ``t_0 = j t_bound/15``, j = 0..15. Gamma values above 1 are clipped into the box.
    """
    if gamma_points < 1 or time_points < 1:
        raise ValueError("grid sizes must be >= 1")
    gammas = [min(m * 2.0 / (norm * gamma_points), 1.0) for m in range(1, gamma_points + 1)]
    if time_points == 1:
        times = [0.0]
    else:
        times = [j * t_bound / (time_points - 1) for j in range(time_points)]
    return [(g, t) for g in gammas for t in times]


@dataclass(frozen=True)
class OptimumRecord:
    gamma: float
    time: float
    probability: float
    cost_value: float
    raw_ratio: float
    graph_order: int
    family_index: int
    start_point: tuple[float, float]
    converged: bool = True
    rows: int = 0
    shore: int = 0
    start_cost: float = field(default=math.nan, compare=False)


@dataclass
class MultistartResult:
    params: ChimeraParams
    t_bound: float
    norm: float
    records: list[OptimumRecord]
    failures: list[tuple[float, float]]

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def best(self) -> OptimumRecord:
        if not self.records:
            raise ValueError("no successful optimizations")
        return min(self.records, key=lambda r: (r.cost_value, r.start_point))


def qss_optimization(
    params: ChimeraParams,
    cp: CostParams = CostParams(),
    gamma_points: int = 40,
    time_points: int = 16,
    cfg: NelderMeadConfig = NelderMeadConfig(),
    family_index: int = 0,
    problem: SearchProblem | None = None,
) -> MultistartResult:
    """Run Nelder-Mead from every start point on ``(t + c ln n)/p(gamma, t)``.

    Every local optimum is kept (no deduplication); starts whose objective
    degenerates are reported in ``failures``.
    """
    if problem is None:
        problem = make_problem(params)
    n = problem.n
    t_bound = time_upperbound(params, problem)
    norm = float(np.linalg.eigvalsh(problem.walk)[-1])

    def objective(x):
        return problem.cost(x[0], x[1], cp)

    box = [(0.0, 1.0), (0.0, t_bound)]
    records = []
    failures = []
    for g0, t0 in start_grid(norm, t_bound, gamma_points, time_points):
        try:
            res = nelder_mead(objective, (g0, t0), box, cfg)
            start_cost = objective(np.array([g0, t0]))
        except ObjectiveFailure as exc:
            log.warning("start (%g, %g) on %s failed: %s", g0, t0, params, exc)
            failures.append((g0, t0))
            continue
        gamma, t = float(res.x[0]), float(res.x[1])
        p = problem.probability(gamma, t)
        records.append(
            OptimumRecord(
                gamma=gamma,
                time=t,
                probability=p,
                cost_value=res.fun,
                raw_ratio=t / p,
                graph_order=n,
                family_index=family_index,
                start_point=(g0, t0),
                converged=res.converged,
                rows=params.rows,
                shore=params.shore,
                start_cost=start_cost,
            )
        )
    records.sort(key=lambda r: r.start_point)
    return MultistartResult(params, t_bound, norm, records, failures)
