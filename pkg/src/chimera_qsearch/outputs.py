"""CSV/JSON writers and readers for optimizer records, minima, fits and metrics."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping

from .families import RegressionFit
from .graph import ChimeraParams
from .optimizer import OptimumRecord
from .spectral import ConditionMetrics

RECORD_HEADER = ["k", "l", "n", "gamma0", "t0", "gamma_opt", "t_opt", "p", "cost", "raw_ratio", "converged"]
MINIMA_HEADER = ["family", "k", "l", "n", "t_opt", "p", "t_over_p"]
FIT_FIELDS = ["family", "alpha", "intercept", "r2", "n_points", "filtered_out"]
METRICS_HEADER = [
    "family", "k", "l", "n", "delta", "sqrt_epsilon", "nu", "r", "condition_ratio", "efficiency_estimate",
]


def _num(x: float) -> str:
    return repr(float(x))


def _open(path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="utf-8")


def write_records_csv(path: str | Path, records: Iterable[OptimumRecord]) -> None:
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow(
                [
                    r.rows, r.shore, r.graph_order,
                    _num(r.start_point[0]), _num(r.start_point[1]),
                    _num(r.gamma), _num(r.time), _num(r.probability),
                    _num(r.cost_value), _num(r.raw_ratio), int(r.converged),
                ]
            )


def read_records_csv(path: str | Path) -> list[OptimumRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RECORD_HEADER:
            raise ValueError(f"{path}: expected header {','.join(RECORD_HEADER)}")
        out = []
        for row in reader:
            out.append(
                OptimumRecord(
                    gamma=float(row["gamma_opt"]),
                    time=float(row["t_opt"]),
                    probability=float(row["p"]),
                    cost_value=float(row["cost"]),
                    raw_ratio=float(row["raw_ratio"]),
                    graph_order=int(row["n"]),
                    family_index=0,
                    start_point=(float(row["gamma0"]), float(row["t0"])),
                    converged=bool(int(row["converged"])),
                    rows=int(row["k"]),
                    shore=int(row["l"]),
                )
            )
    return out


def write_minima_csv(path: str | Path, family: str, minima: Mapping[int, OptimumRecord]) -> None:
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MINIMA_HEADER)
        for n in sorted(minima):
            r = minima[n]
            w.writerow([family, r.rows, r.shore, n, _num(r.time), _num(r.probability), _num(r.raw_ratio)])


def fit_payload(family: str, fit: RegressionFit | None, filtered_out: int, n_points: int) -> dict:
    return {
        "family": family,
        "alpha": None if fit is None else fit.slope,
        "intercept": None if fit is None else fit.intercept,
        "r2": None if fit is None else fit.r2,
        "n_points": n_points,
        "filtered_out": filtered_out,
    }


def write_json(path: str | Path, payload) -> None:
    with _open(path) as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_metrics_csv(
    path: str | Path, family: str, rows: Iterable[tuple[int, ChimeraParams, ConditionMetrics]]
) -> None:
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_HEADER)
        for _, p, m in sorted(rows, key=lambda row: row[2].n):
            w.writerow(
                [
                    family, p.rows, p.shore, m.n, _num(m.delta), _num(m.sqrt_epsilon), _num(m.nu),
                    _num(m.r), _num(m.condition_ratio), _num(m.efficiency_estimate),
                ]
            )
