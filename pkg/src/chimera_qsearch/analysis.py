"""Filtering of multistart optima, per-order minima and complexity-exponent fits."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .evolution import CostParams
from .families import FamilySpec, RegressionFit, fit_loglog
from .graph import ChimeraParams
from .optimizer import MultistartResult, NelderMeadConfig, OptimumRecord, qss_optimization

__all__ = [
    "filter_records",
    "per_order_minima",
    "fit_alpha",
    "SweepConfig",
    "SweepResult",
    "family_sweep",
    "default_workers",
]

log = logging.getLogger(__name__)


def _threshold(n: int) -> float:
    return math.log(n) / n


def filter_records(records: Iterable[OptimumRecord]) -> list[OptimumRecord]:
    """Drop optima with ``t < ln(n)/n`` or ``p < ln(n)/n`` (boundaries are kept)."""
    out = []
    for rec in records:
        thr = _threshold(rec.graph_order)
        if rec.time >= thr and rec.probability >= thr:
            out.append(rec)
    return out


def per_order_minima(records: Iterable[OptimumRecord]) -> dict[int, OptimumRecord]:
    """Record with the smallest unpenalized ``t/p`` for each graph order, keyed by order."""
    best: dict[int, OptimumRecord] = {}
    for rec in records:
        cur = best.get(rec.graph_order)
        if cur is None or (rec.raw_ratio, rec.start_point) < (cur.raw_ratio, cur.start_point):
            best[rec.graph_order] = rec
    return dict(sorted(best.items()))


def fit_alpha(minima: Mapping[int, float | OptimumRecord]) -> RegressionFit:
    """Slope of ``ln T_min`` against ``ln n``."""
    orders = sorted(minima)
    values = [
        v.raw_ratio if isinstance(v, OptimumRecord) else float(v)
        for v in (minima[n] for n in orders)
    ]
    return fit_loglog(orders, values)


def default_workers() -> int:
    env = os.environ.get("CHIMERA_QSEARCH_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepConfig:
    penalty_coefficient: float = 1.0
    gamma_points: int = 40
    time_points: int = 16
    size_cap: int | None = 700
    workers: int = 1
    nelder_mead: NelderMeadConfig = field(default_factory=NelderMeadConfig)


@dataclass
class SweepResult:
    family: FamilySpec
    runs: list[MultistartResult]
    records: list[OptimumRecord]
    minima: dict[int, OptimumRecord]
    fit: RegressionFit | None
    filtered_out: int
    dropped_orders: list[int]
    skipped_params: list[ChimeraParams]

    @property
    def alpha(self) -> float:
        if self.fit is None:
            raise ValueError(f"no fit for {self.family.label}: fewer than 3 orders survived")
        return self.fit.slope

    @property
    def failures(self) -> int:
        return sum(len(r.failures) for r in self.runs)


def _run_one(args) -> MultistartResult:
    params, index, cfg = args
    return qss_optimization(
        params,
        CostParams(cfg.penalty_coefficient),
        gamma_points=cfg.gamma_points,
        time_points=cfg.time_points,
        cfg=cfg.nelder_mead,
        family_index=index,
    )


def family_sweep(family: FamilySpec, cfg: SweepConfig = SweepConfig()) -> SweepResult:
    """Optimize every graph of a family, filter, take per-order minima and fit alpha.

    Graphs above ``cfg.size_cap`` vertices are skipped. The fit is ``None`` when
    fewer than three orders survive filtering.
    """
    members = family.members(cfg.size_cap)
    skipped = [family.params(i) for i in family.indices if family.params(i).n > (cfg.size_cap or math.inf)]
    for p in skipped:
        log.warning("skipping %s: n=%d exceeds size cap %s", p, p.n, cfg.size_cap)
    tasks = [(p, i, cfg) for i, p in members]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(_run_one, tasks))
    else:
        runs = [_run_one(t) for t in tasks]
    runs.sort(key=lambda r: r.params.n)
    records = [rec for run in runs for rec in run.records]
    kept = filter_records(records)
    minima = per_order_minima(kept)
    dropped = sorted({r.params.n for r in runs} - set(minima))
    for n in dropped:
        log.warning("%s: no optimum survived filtering at n=%d; order omitted", family.label, n)
    fit = fit_alpha(minima) if len(minima) >= 3 else None
    return SweepResult(
        family=family,
        runs=runs,
        records=records,
        minima=minima,
        fit=fit,
        filtered_out=len(records) - len(kept),
        dropped_orders=dropped,
        skipped_params=skipped,
    )
