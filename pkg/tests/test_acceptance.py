"""Exit criteria: one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion with the measured values.
"""

import time

import numpy as np
import pytest

from chimera_qsearch.analysis import SweepConfig, family_sweep
from chimera_qsearch.evolution import CostParams, SearchProblem, state_norm
from chimera_qsearch.families import FamilySpec
from chimera_qsearch.graph import (
    ChimeraParams,
    build_chimera,
    is_connected,
    marked_vertex,
    max_degree,
    vertex_coords,
)
from chimera_qsearch.optimizer import make_problem, qss_optimization
from chimera_qsearch.spectral import centralize, condition_metrics, eigendecompose, family_metrics, metric_scaling
from oracles import brute_force_chimera_edges, dense_grid_minimum, dense_probability

ORACLE_GRAPHS = [(1, 1, 2), (2, 2, 2), (2, 2, 3), (3, 3, 2)]
TEST_GRAPHS = ORACLE_GRAPHS + [(1, 1, 4), (1, 1, 8), (2, 3, 2), (3, 3, 4), (4, 4, 2), (4, 4, 4)]
SWEEP = SweepConfig(gamma_points=8, time_points=8, size_cap=700)


def problem(params):
    p = ChimeraParams(*params)
    return SearchProblem(build_chimera(p), marked_vertex(p))


def test_criterion_01_oracle_equivalence(record_property):
    rng = np.random.default_rng(20190606)
    start = time.perf_counter()
    worst = 0.0
    for params in ORACLE_GRAPHS:
        pb = problem(params)
        a = pb.graph.adjacency
        for gamma, t in zip(rng.uniform(0, 1, 20), rng.uniform(0, 30, 20)):
            diff = abs(pb.probability(gamma, t) - dense_probability(a, pb.marked, gamma, t))
            worst = max(worst, diff)
    elapsed = time.perf_counter() - start
    record_property("max_abs_diff", f"{worst:.2e}")
    record_property("seconds", f"{elapsed:.1f}")
    assert worst <= 1e-8
    assert elapsed < 10


def test_criterion_02_trivial_anchors(record_property):
    worst = 0.0
    for params in TEST_GRAPHS:
        pb = problem(params)
        n = pb.n
        for gamma in (0.0, 0.15, 0.5, 1.0):
            worst = max(worst, abs(pb.probability(gamma, 0.0) - 1 / n))
        p0 = pb.probability(0.0, np.linspace(0, 200, 41))
        worst = max(worst, float(np.abs(p0 - 1 / n).max()))
    record_property("max_abs_diff", f"{worst:.2e}")
    assert worst <= 1e-10


def test_criterion_03_unitarity(record_property):
    worst = 0.0
    for params in TEST_GRAPHS:
        pb = problem(params)
        for gamma in (0.1, 0.4, 0.9):
            s = pb.setup(gamma)
            for t in np.linspace(0.0, 100.0, 10):
                worst = max(worst, abs(state_norm(s, t) - 1.0))
    record_property("max_norm_error", f"{worst:.2e}")
    assert worst <= 1e-9


def test_criterion_04_graph_invariants(record_property):
    checked = 0
    for k in range(1, 6):
        for l in range(1, 6):
            p = ChimeraParams(k, k, l)
            g = build_chimera(p)
            a = g.adjacency
            assert g.n == 2 * k * k * l
            assert len(g.edges) == k * k * l * l + l * (k * (k - 1) + k * (k - 1)) == int(a.sum()) // 2
            assert np.array_equal(a, a.T) and not np.any(np.diag(a))
            assert set(g.degrees.tolist()) <= {l, l + 1, l + 2}
            assert max_degree(g) == (l if k == 1 else l + 1 if k == 2 else l + 2)
            for u, v in g.edges:
                cu, cv = vertex_coords(p, u), vertex_coords(p, v)
                assert cu[:2] != cv[:2] or cu[2] != cv[2]
            assert is_connected(g)
            if k <= 3 and l <= 3:
                assert set(g.edges) == brute_force_chimera_edges(k, k, l)
            checked += 1
    record_property("graphs", checked)


def test_criterion_05_centralization(record_property):
    worst = 0.0
    for k, _, l in TEST_GRAPHS:
        if k != _:
            continue
        lam = centralize(eigendecompose(build_chimera(ChimeraParams(k, k, l)).adjacency)).values
        worst = max(worst, abs(lam[0] - 1), abs(lam[1] + lam[-1]))
    bulk = []
    for l in range(2, 13):
        ch = centralize(eigendecompose(build_chimera(ChimeraParams(1, 1, l)).adjacency))
        bulk.append(condition_metrics(ch, 0).bulk_radius)
    bulk_err = max(abs(b - 1 / 3) for b in bulk)
    record_property("max_centralization_error", f"{worst:.2e}")
    record_property("K_ll_bulk_error", f"{bulk_err:.2e}")
    assert worst <= 1e-10
    assert bulk_err <= 1e-10


@pytest.mark.parametrize("params", [(2, 2, 2), (1, 1, 4)])
def test_criterion_06_optimizer_oracle(params, record_property):
    start = time.perf_counter()
    p = ChimeraParams(*params)
    cp = CostParams()
    res = qss_optimization(p, cp)
    grid_min, _ = dense_grid_minimum(make_problem(p), cp, res.t_bound, size=200)
    best = res.best().cost_value
    elapsed = time.perf_counter() - start
    record_property("best", f"{best:.6g}")
    record_property("grid_min", f"{grid_min:.6g}")
    record_property("seconds", f"{elapsed:.1f}")
    assert len(res.records) == 640
    assert best <= 1.05 * grid_min
    assert elapsed < 120


def _timed_sweep(family, cfg=SWEEP):
    start = time.perf_counter()
    res = family_sweep(family, cfg)
    return res, time.perf_counter() - start


def test_criterion_07_local_family_exponent(record_property):
    res, elapsed = _timed_sweep(FamilySpec.from_range("local", 2, 6, 2))
    record_property("alpha", f"{res.alpha:.3f}")
    record_property("seconds", f"{elapsed:.0f}")
    assert elapsed <= 30 * 60
    assert 1.2 <= res.alpha <= 1.8


def test_criterion_08_global_family_exponent(record_property):
    res, elapsed = _timed_sweep(FamilySpec.from_range("global", 2, 12, 2))
    record_property("alpha", f"{res.alpha:.3f}")
    record_property("seconds", f"{elapsed:.0f}")
    assert elapsed <= 30 * 60
    assert 0.35 <= res.alpha <= 0.8


def test_criterion_09_intermediate_ordering(record_property):
    # the largest grid-quadratic member has n = 2048, so the cap is raised to keep three orders
    cfg = SweepConfig(gamma_points=8, time_points=8, size_cap=2048)
    start = time.perf_counter()
    alphas = {}
    for name in ("cell-quadratic", "balanced", "grid-quadratic"):
        alphas[name] = family_sweep(FamilySpec.from_range(name, 2, 4), cfg).alpha
        record_property(name, f"{alphas[name]:.3f}")
    elapsed = time.perf_counter() - start
    record_property("seconds", f"{elapsed:.0f}")
    assert elapsed <= 60 * 60
    assert alphas["cell-quadratic"] < alphas["balanced"] < alphas["grid-quadratic"]


CONDITION_FAMILIES = [
    FamilySpec.from_range("local", 2, 6, 2),
    FamilySpec.from_range("global", 2, 12, 2),
    FamilySpec.from_range("balanced", 2, 5),
]


def test_criterion_10_gap_decreasing(record_property):
    for fam in CONDITION_FAMILIES:
        gaps = [m.delta for *_, m in family_metrics(fam)]
        record_property(fam.label, ",".join(f"{g:.3f}" for g in gaps))
        assert all(b < a for a, b in zip(gaps, gaps[1:])), fam.label


def test_criterion_11_condition_only_global(record_property):
    slopes = {fam.label: metric_scaling(fam, "condition_ratio").slope for fam in CONDITION_FAMILIES}
    for label, slope in slopes.items():
        record_property(label, f"{slope:.3f}")
    assert slopes["global(2)"] > 0
    assert slopes["local(2)"] <= 0.05
    assert slopes["balanced"] <= 0.05


def test_criterion_12_efficiency_exponent(record_property):
    start = time.perf_counter()
    slope = metric_scaling(FamilySpec.from_range("global", 2, 14, 2), "efficiency_estimate").slope
    elapsed = time.perf_counter() - start
    record_property("slope", f"{slope:.3f}")
    record_property("seconds", f"{elapsed:.1f}")
    assert elapsed < 300
    assert abs(slope - 3.35) <= 0.5
