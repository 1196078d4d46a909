"""Command-line entry point: ``chimera-qsearch <command> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 partial
computational failure (failed start points, orders lost to filtering).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import outputs
from .analysis import SweepConfig, default_workers, family_sweep, filter_records, fit_alpha, per_order_minima
from .evolution import CostParams, SearchProblem, success_probability
from .families import FAMILY_NAMES, FamilySpec, parse_range
from .graph import ChimeraParams, build_chimera, marked_vertex, save_graph, to_json
from .optimizer import NelderMeadConfig, qss_optimization
from .spectral import METRIC_FIELDS, family_metrics, metric_scaling

log = logging.getLogger("chimera_qsearch")

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2

DEFAULT_RANGES = {
    "local": "2..6",
    "global": "2..12",
    "grid-quadratic": "2..4",
    "balanced": "2..5",
    "cell-quadratic": "2..4",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _add_graph_args(p, need_cols=True):
    p.add_argument("--rows", type=_positive_int, required=True)
    p.add_argument("--cols", type=_positive_int, required=need_cols)
    p.add_argument("--shore", type=_positive_int, required=True)


def _add_family_args(p):
    p.add_argument("--family", choices=FAMILY_NAMES, required=True)
    p.add_argument("--fixed", type=_positive_int, help="fixed grid size (global) or shore (local)")
    p.add_argument("--range", dest="index_range", help="inclusive index range, e.g. 2..6")
    p.add_argument("--size-cap", type=_positive_int, default=700, help="skip graphs with more vertices")
    p.add_argument("--out-dir", default="results")


def _add_opt_args(p):
    p.add_argument("--penalty-coeff", type=_nonneg_float, default=1.0, help="c in t_penalty = c ln n")
    p.add_argument("--gamma-grid", type=_positive_int, default=40)
    p.add_argument("--time-grid", type=_positive_int, default=16)
    p.add_argument("--max-iter", type=_positive_int, default=500)
    p.add_argument("--ftol", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chimera-qsearch", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat 'key = value' file; command-line flags take precedence")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a chimera graph as JSON")
    _add_graph_args(p)
    p.add_argument("--out", help="output path (stdout if omitted)")

    p = sub.add_parser("probe", help="evaluate one success probability")
    _add_graph_args(p)
    p.add_argument("--gamma", type=_nonneg_float, required=True)
    p.add_argument("--time", type=_nonneg_float, required=True)
    p.add_argument("--json", action="store_true", help="print a JSON object instead of the bare value")
    p.add_argument("--full-space", action="store_true", help="diagonalize the full n x n Hamiltonian")

    p = sub.add_parser("optimize", help="multistart Nelder-Mead on one graph")
    _add_graph_args(p)
    _add_opt_args(p)
    p.add_argument("--out", help="records CSV (default: <out-dir>/records_k<rows>_l<shore>.csv)")
    p.add_argument("--out-dir", default="results")

    p = sub.add_parser("sweep", help="optimize a whole family and fit the complexity exponent")
    _add_family_args(p)
    _add_opt_args(p)
    p.add_argument("--workers", type=_positive_int, default=None)

    p = sub.add_parser("conditions", help="spectral fast-search metrics over a family")
    _add_family_args(p)
    p.add_argument("--plot", action="store_true", help="write one log-log SVG per metric")

    p = sub.add_parser("analyze", help="filter, minimize and fit an existing records CSV")
    p.add_argument("--records", required=True)
    p.add_argument("--family", default="records", help="label written to the outputs")
    p.add_argument("--out-dir", default="results")
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre_parser = argparse.ArgumentParser(add_help=False)
    pre_parser.add_argument("--config")
    pre_parser.add_argument("-v", "--verbose", action="store_true")
    pre, rest = pre_parser.parse_known_args(argv)
    command = rest[0] if rest else None
    if not pre.config or command not in COMMANDS:
        return parser.parse_args(argv)
    try:
        values = read_config(pre.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    subparser = parser._subparsers._group_actions[0].choices[command]  # noqa: SLF001
    actions = {a.dest: a for a in subparser._actions if a.dest != "help"}  # noqa: SLF001
    defaults = {}
    for key, value in values.items():
        if key == "index_range" or key == "range":
            key = "index_range"
        if key not in actions:
            raise UsageError(f"unknown config key {key!r} for command {command!r}")
        action = actions[key]
        if isinstance(action, (argparse._StoreTrueAction,)):  # noqa: SLF001
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            try:
                defaults[key] = action.type(value) if action.type else value
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad config value for {key!r}: {value}") from exc
            if action.choices is not None and defaults[key] not in action.choices:
                raise UsageError(f"config value {value!r} for {key!r} not in {list(action.choices)}")
        action.required = False
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _params(args) -> ChimeraParams:
    return ChimeraParams(args.rows, args.cols if args.cols is not None else args.rows, args.shore)


def _family(args) -> FamilySpec:
    start, stop = parse_range(args.index_range or DEFAULT_RANGES[args.family])
    fixed = args.fixed if args.family in ("local", "global") else None
    if args.family in ("local", "global") and fixed is None:
        raise UsageError(f"--fixed is required for family {args.family}")
    return FamilySpec.from_range(args.family, start, stop, fixed)


def _stem(label: str) -> str:
    return label.replace("(", "_").replace(")", "")


def _nm_config(args) -> NelderMeadConfig:
    return NelderMeadConfig(max_iterations=args.max_iter, tolerance_f=args.ftol)


def cmd_generate(args) -> int:
    g = build_chimera(_params(args))
    if args.out:
        save_graph(g, args.out)
        print(f"wrote {args.out}: n={g.n}, edges={len(g.edges)}")
    else:
        print(json.dumps(to_json(g)))
    return EXIT_OK


def cmd_probe(args) -> int:
    params = _params(args)
    problem = SearchProblem(build_chimera(params), marked_vertex(params), reduce=not args.full_space)
    p = success_probability(problem.setup(args.gamma), args.time)
    if args.json:
        print(json.dumps({"rows": params.rows, "cols": params.cols, "shore": params.shore, "n": params.n,
                          "gamma": args.gamma, "time": args.time, "p": p}))
    else:
        print(f"{p:.12g}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    params = _params(args)
    res = qss_optimization(
        params,
        CostParams(args.penalty_coeff),
        gamma_points=args.gamma_grid,
        time_points=args.time_grid,
        cfg=_nm_config(args),
    )
    out = args.out or str(Path(args.out_dir) / f"records_k{params.rows}_l{params.shore}.csv")
    outputs.write_records_csv(out, res.records)
    print(f"t_bound = {res.t_bound:.6g}; {len(res.records)} records -> {out}")
    if res.records:
        b = res.best()
        print(f"best: gamma={b.gamma:.6g} t={b.time:.6g} p={b.probability:.6g} cost={b.cost_value:.6g} t/p={b.raw_ratio:.6g}")
    if res.failures:
        print(f"warning: {len(res.failures)} start points failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_sweep(args) -> int:
    family = _family(args)
    cfg = SweepConfig(
        penalty_coefficient=args.penalty_coeff,
        gamma_points=args.gamma_grid,
        time_points=args.time_grid,
        size_cap=args.size_cap,
        workers=args.workers or default_workers(),
        nelder_mead=_nm_config(args),
    )
    res = family_sweep(family, cfg)
    out = Path(args.out_dir)
    stem = _stem(family.label)
    outputs.write_records_csv(out / f"{stem}_records.csv", res.records)
    outputs.write_minima_csv(out / f"{stem}_minima.csv", family.label, res.minima)
    outputs.write_json(out / f"{stem}_fit.json", outputs.fit_payload(family.label, res.fit, res.filtered_out, len(res.minima)))
    for n in res.dropped_orders:
        print(f"warning: no optimum survived filtering at n={n}; order omitted", file=sys.stderr)
    for p in res.skipped_params:
        print(f"warning: skipped {p.rows}x{p.cols}x{p.shore} (n={p.n} > size cap)", file=sys.stderr)
    if res.fit is None:
        print(f"{family.label}: fewer than 3 orders available, no fit", file=sys.stderr)
        return EXIT_PARTIAL
    print(f"{family.label}: alpha = {res.fit.slope:.6g} (r2 = {res.fit.r2:.4f}, {len(res.minima)} orders)")
    return EXIT_PARTIAL if res.failures or res.dropped_orders else EXIT_OK


def cmd_conditions(args) -> int:
    family = _family(args)
    rows = family_metrics(family, args.size_cap)
    out = Path(args.out_dir)
    stem = _stem(family.label)
    outputs.write_metrics_csv(out / f"{stem}_conditions.csv", family.label, rows)
    slopes = {}
    for metric in METRIC_FIELDS:
        fit = metric_scaling(family, metric, rows=rows)
        slopes[metric] = {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2}
        if args.plot:
            from .plotting import loglog_svg

            loglog_svg(out / f"{stem}_{metric}.svg", [m.n for *_, m in rows],
                       [getattr(m, metric) for *_, m in rows], fit, family.label, metric)
    outputs.write_json(out / f"{stem}_condition_slopes.json", {"family": family.label, "n_points": len(rows), "slopes": slopes})
    for metric in ("delta", "condition_ratio", "efficiency_estimate"):
        print(f"{family.label}: slope[{metric}] = {slopes[metric]['slope']:.6g}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    records = outputs.read_records_csv(args.records)
    kept = filter_records(records)
    minima = per_order_minima(kept)
    out = Path(args.out_dir)
    stem = _stem(args.family)
    outputs.write_minima_csv(out / f"{stem}_minima.csv", args.family, minima)
    fit = fit_alpha(minima) if len(minima) >= 3 else None
    outputs.write_json(out / f"{stem}_fit.json",
                       outputs.fit_payload(args.family, fit, len(records) - len(kept), len(minima)))
    if fit is None:
        print(f"{args.family}: fewer than 3 orders survived filtering, no fit", file=sys.stderr)
        return EXIT_PARTIAL
    print(f"{args.family}: alpha = {fit.slope:.6g} (r2 = {fit.r2:.4f}, {len(minima)} orders)")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "probe": cmd_probe,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "conditions": cmd_conditions,
    "analyze": cmd_analyze,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = _apply_config(parser, argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, TypeError, OSError) as exc:
        print(f"chimera-qsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
