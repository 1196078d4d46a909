"""Reproduce the full family study: sweeps for every family plus condition metrics.

    python scripts/run_experiments.py --out results --gamma-grid 8 --time-grid 8

With the default 40 x 16 start grid the local and global sweeps take a while
on a single core; use the smaller grid for a quick pass.
"""

from __future__ import annotations

import argparse
import logging
import time
from pathlib import Path

from chimera_qsearch import outputs
from chimera_qsearch.analysis import SweepConfig, family_sweep
from chimera_qsearch.families import FamilySpec
from chimera_qsearch.spectral import METRIC_FIELDS, family_metrics, metric_scaling

SWEEPS = (
    [FamilySpec.from_range("local", 2, 6, l) for l in (2, 3, 4, 5)]
    + [FamilySpec.from_range("global", 2, 12, k) for k in (2, 3, 4, 5)]
    + [
        FamilySpec.from_range("cell-quadratic", 2, 4),
        FamilySpec.from_range("balanced", 2, 5),
        FamilySpec.from_range("grid-quadratic", 2, 4),
    ]
)
CONDITIONS = [
    FamilySpec.from_range("local", 2, 10, 2),
    FamilySpec.from_range("global", 2, 14, 2),
    FamilySpec.from_range("global", 40, 80, 2),
    FamilySpec.from_range("balanced", 2, 6),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--gamma-grid", type=int, default=8)
    ap.add_argument("--time-grid", type=int, default=8)
    ap.add_argument("--size-cap", type=int, default=2048)
    ap.add_argument("--skip-sweeps", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    out = Path(args.out)
    cfg = SweepConfig(gamma_points=args.gamma_grid, time_points=args.time_grid, size_cap=args.size_cap)

    summary = []
    for fam in CONDITIONS:
        rows = family_metrics(fam)
        stem = f"{fam.label}_{fam.indices[0]}-{fam.indices[-1]}".replace("(", "_").replace(")", "")
        outputs.write_metrics_csv(out / f"{stem}_conditions.csv", fam.label, rows)
        slopes = {m: metric_scaling(fam, m, rows=rows).slope for m in METRIC_FIELDS}
        summary.append((f"conditions {stem}", slopes))
        logging.info("conditions %s: %s", stem, {k: round(v, 3) for k, v in slopes.items()})

    if not args.skip_sweeps:
        for fam in SWEEPS:
            t0 = time.perf_counter()
            res = family_sweep(fam, cfg)
            stem = fam.label.replace("(", "_").replace(")", "")
            outputs.write_records_csv(out / f"{stem}_records.csv", res.records)
            outputs.write_minima_csv(out / f"{stem}_minima.csv", fam.label, res.minima)
            outputs.write_json(
                out / f"{stem}_fit.json",
                outputs.fit_payload(fam.label, res.fit, res.filtered_out, len(res.minima)),
            )
            alpha = None if res.fit is None else round(res.fit.slope, 3)
            summary.append((f"sweep {fam.label}", {"alpha": alpha}))
            logging.info("sweep %s: alpha=%s (%.0fs)", fam.label, alpha, time.perf_counter() - t0)

    for name, values in summary:
        print(name, values)


if __name__ == "__main__":
    main()
