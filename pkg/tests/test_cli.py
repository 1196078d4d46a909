import csv
import json

import pytest

from chimera_qsearch import cli, outputs
from chimera_qsearch.evolution import SearchProblem, success_probability
from chimera_qsearch.graph import ChimeraParams, build_chimera, load_graph, marked_vertex
from chimera_qsearch.optimizer import MultistartResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_generate(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, out, _ = run(capsys, "generate", "--rows", "3", "--cols", "3", "--shore", "4", "--out", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    assert data["n"] == 72
    assert load_graph(path) == build_chimera(ChimeraParams(3, 3, 4))


def test_generate_complete_bipartite_stdout(capsys):
    code, out, _ = run(capsys, "generate", "--rows", "1", "--cols", "1", "--shore", "3")
    assert code == 0
    assert len(json.loads(out)["edges"]) == 9


@pytest.mark.parametrize("time", ["7.5", "0"])
def test_probe_trivial(capsys, time):
    code, out, _ = run(capsys, "probe", "--shore", "4", "--rows", "3", "--cols", "3", "--gamma", "0", "--time", time)
    assert code == 0
    assert out.strip() == f"{1 / 72:.12g}"


def test_probe_matches_library(capsys):
    code, out, _ = run(capsys, "probe", "--rows", "2", "--cols", "2", "--shore", "3",
                       "--gamma", "0.31", "--time", "4.2", "--json")
    p = ChimeraParams(2, 2, 3)
    expected = success_probability(SearchProblem(build_chimera(p), marked_vertex(p)).setup(0.31), 4.2)
    assert code == 0 and json.loads(out)["p"] == expected


def test_optimize_small_grid(tmp_path, capsys):
    out_csv = tmp_path / "r.csv"
    code, out, _ = run(capsys, "optimize", "--rows", "2", "--cols", "2", "--shore", "2",
                       "--gamma-grid", "4", "--time-grid", "4", "--out", str(out_csv))
    assert code == 0 and "best:" in out
    rows = read_csv(out_csv)
    assert rows[0] == outputs.RECORD_HEADER
    assert len(rows) == 17


def test_optimize_partial_failure_exit_code(tmp_path, capsys, monkeypatch):
    def fake(params, *a, **k):
        return MultistartResult(params, 1.0, 1.0, [], [(0.1, 0.0)])

    monkeypatch.setattr(cli, "qss_optimization", fake)
    code, *_ = run(capsys, "optimize", "--rows", "2", "--cols", "2", "--shore", "2", "--out-dir", str(tmp_path))
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "--rows", "0", "--cols", "1", "--shore", "1"],
        ["probe", "--rows", "1", "--cols", "1", "--shore", "1", "--gamma", "-1", "--time", "1"],
        ["probe", "--rows", "1", "--cols", "1", "--shore", "1", "--gamma", "0", "--time", "1", "--bogus"],
        ["sweep", "--family", "local", "--range", "2..3"],
        ["frobnicate"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    code, *_ = run(capsys, *argv)
    assert code == 1


def test_help_lists_flags(capsys):
    assert cli.main(["sweep", "--help"]) == 0
    out = capsys.readouterr().out
    for flag in ("--family", "--fixed", "--range", "--penalty-coeff", "--gamma-grid", "--time-grid",
                 "--size-cap", "--workers", "--out-dir"):
        assert flag in out


def test_sweep_and_analyze(tmp_path, capsys):
    args = ["sweep", "--family", "global", "--fixed", "2", "--range", "2..4",
            "--gamma-grid", "3", "--time-grid", "3", "--workers", "1", "--out-dir", str(tmp_path / "a")]
    code, out, _ = run(capsys, *args)
    assert code == 0 and "alpha" in out
    fit = json.loads((tmp_path / "a" / "global_2_fit.json").read_text())
    assert list(fit) == outputs.FIT_FIELDS
    assert fit["n_points"] == 3
    minima = read_csv(tmp_path / "a" / "global_2_minima.csv")
    assert minima[0] == outputs.MINIMA_HEADER and len(minima) == 4

    code, *_ = run(capsys, "analyze", "--records", str(tmp_path / "a" / "global_2_records.csv"),
                   "--family", "global(2)", "--out-dir", str(tmp_path / "b"))
    assert code == 0
    assert (tmp_path / "b" / "global_2_fit.json").read_bytes() == (tmp_path / "a" / "global_2_fit.json").read_bytes()
    assert (tmp_path / "b" / "global_2_minima.csv").read_bytes() == (tmp_path / "a" / "global_2_minima.csv").read_bytes()

    # same config, different worker count: byte-identical outputs
    args[-3:] = ["2", "--out-dir", str(tmp_path / "c")]
    assert run(capsys, *args)[0] == 0
    for name in ("global_2_records.csv", "global_2_minima.csv", "global_2_fit.json"):
        assert (tmp_path / "c" / name).read_bytes() == (tmp_path / "a" / name).read_bytes()


def test_sweep_reports_missing_orders(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--family", "grid-quadratic", "--range", "2..4", "--size-cap", "100",
                       "--gamma-grid", "2", "--time-grid", "2", "--workers", "1", "--out-dir", str(tmp_path))
    assert code == 2
    assert "size cap" in err and "no fit" in err
    assert json.loads((tmp_path / "grid-quadratic_fit.json").read_text())["alpha"] is None


def test_conditions_global(tmp_path, capsys):
    code, *_ = run(capsys, "conditions", "--family", "global", "--fixed", "2", "--range", "2..8",
                   "--out-dir", str(tmp_path), "--plot")
    assert code == 0
    rows = read_csv(tmp_path / "global_2_conditions.csv")
    assert rows[0] == outputs.METRICS_HEADER
    ns = [int(r[3]) for r in rows[1:]]
    deltas = [float(r[4]) for r in rows[1:]]
    assert ns == sorted(ns)
    assert all(b < a for a, b in zip(deltas, deltas[1:]))
    slopes = json.loads((tmp_path / "global_2_condition_slopes.json").read_text())
    assert "efficiency_estimate" in slopes["slopes"]
    assert (tmp_path / "global_2_delta.svg").read_text().lstrip().startswith("<?xml")


def test_conditions_complete_bipartite_constant(tmp_path, capsys):
    code, *_ = run(capsys, "conditions", "--family", "global", "--fixed", "1", "--range", "2..8",
                   "--out-dir", str(tmp_path))
    assert code == 0
    deltas = [float(r[4]) for r in read_csv(tmp_path / "global_1_conditions.csv")[1:]]
    assert deltas == pytest.approx([2 / 3] * 7, abs=1e-10)


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# probe config\nrows = 3\ncols = 3\nshore = 4\ngamma = 0\ntime = 2.0\n")
    code, out, _ = run(capsys, "--config", str(cfg), "probe")
    assert code == 0 and out.strip() == f"{1 / 72:.12g}"
    # flags win over the file
    code, out, _ = run(capsys, "--config", str(cfg), "probe", "--shore", "2")
    assert out.strip() == f"{1 / 36:.12g}"


@pytest.mark.parametrize("text", ["colour = red\n", "rows 3\n", "rows = x\n"])
def test_bad_config(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, *_ = run(capsys, "--config", str(cfg), "generate", "--rows", "1", "--cols", "1", "--shore", "1")
    assert code == 1
