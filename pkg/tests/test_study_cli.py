import math
from math import comb

import numpy as np
import pytest
from scipy.integrate import quad as adaptive_quad

from anisogrid import InvalidArgumentError
from anisogrid.cli import main
from anisogrid.model_problems import DiffusionConfig
from anisogrid.study import (
    AnalyticSpec,
    StudyConfig,
    fit_slope,
    load_reference,
    run_convergence_study,
    run_indexset_report,
    run_reference,
    write_csv,
)


def read_csv(path):
    lines = [ln for ln in open(path).read().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, map(float, ln.split(",")))) for ln in lines[1:]]


# slope fitting

def test_fit_slope_recovers_power_law():
    n = np.array([10, 100, 1000, 10_000])
    assert fit_slope(n, 3.0 * n ** -1.5) == pytest.approx(-1.5, rel=1e-12)


def test_fit_slope_skips_floor_rows():
    n = np.array([10, 100, 1000, 10_000, 100_000])
    err = np.maximum(n ** -2.0, 1e-9)
    assert fit_slope(n, err, floor=1e-9) == pytest.approx(-2.0, rel=1e-12)


def test_fit_slope_needs_two_points():
    assert math.isnan(fit_slope([10, 100], [1e-3, 1e-12], floor=1e-6))


# index-set report

def test_indexset_report_orderings():
    w = [math.log(n ** 2 + math.sqrt(1 + n ** 4)) for n in range(1, 7)]
    rows = run_indexset_report(w, np.arange(0, 12, 1.5), r=2)
    for row in rows:
        assert row["card_X"] <= row["bound_sg"] * (1 + 1e-12) <= row["bound_bd"] * (1 + 1e-12)
        assert row["points_Y_union"] <= row["card_X"] ** 2 == row["cost_sq"]
        assert row["max_box"] <= row["card_X"] <= row["bound_tp"]
        assert row["card_Y"] <= row["card_X"]


def test_indexset_report_isotropic_cardinality():
    rows = run_indexset_report(1.0, range(10), m=2)
    assert [r["card_X"] for r in rows] == [comb(q + 2, 2) for q in range(10)]
    assert all(math.isnan(r["bound_loglog"]) for r in rows)


# references

def test_one_dimensional_reference_matches_adaptive_oracle():
    cfg = StudyConfig(problem=AnalyticSpec(2, 1), reference="self", q_ref=20.0, q_max=1.0)
    value, _ = run_reference(cfg)
    oracle, _ = adaptive_quad(lambda y: 0.5 / (0.6 + 0.2 * y), -1, 1, epsabs=0, epsrel=1e-13)
    assert value[0] == pytest.approx(oracle, rel=1e-12, abs=1e-12)
    assert value[0] == pytest.approx(2.5 * math.log(2), rel=1e-13)


def test_reference_file_is_reproducible(tmp_path):
    cfg = StudyConfig(problem=AnalyticSpec(3, 5), reference="qmc", log2_n=10)
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run_reference(cfg, a)
    run_reference(cfg, b)
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "# method=qmc-halton" in text and "# log2_n=10" in text
    assert load_reference(a).shape == (1,)


def test_reference_write_error_names_path(tmp_path):
    cfg = StudyConfig(problem=AnalyticSpec(3, 2), reference="qmc", log2_n=4)
    bad = tmp_path / "missing" / "ref.txt"
    with pytest.raises(OSError, match="missing"):
        run_reference(cfg, bad)


def test_self_reference_must_exceed_schedule():
    with pytest.raises(InvalidArgumentError):
        StudyConfig(q_max=10, q_ref=9)
    with pytest.raises(InvalidArgumentError):
        StudyConfig(q_start=3, q_max=2)


# convergence studies

def test_analytic_study_small(tmp_path):
    out = tmp_path / "conv.csv"
    cfg = StudyConfig(problem=AnalyticSpec(3, 4), q_max=10, out=str(out))
    res = run_convergence_study(cfg)
    header, rows = read_csv(out)
    assert header == ["q", "N_points", "n_eval", "card_X", "err_linf"]
    errs = [r["err_linf"] for r in rows]
    assert all(e >= 0 for e in errs)
    assert errs[-1] < errs[0]
    assert res.slopes["linf"] < -1.5
    assert all(r["n_eval"] <= r["N_points"] for r in rows)
    assert out.read_text() == write_csv(res.rows, str(tmp_path / "again.csv"), res.comments())


def test_diffusion_study_small():
    cfg = StudyConfig(
        problem=DiffusionConfig(h_exponent=6, trace_tol=1e-6), moments=2, q_max=6, reference="qmc", log2_n=12
    )
    res = run_convergence_study(cfg)
    assert [k for k in res.rows[0] if k.startswith("err_")] == ["err_m1", "err_m2"]
    assert res.rows[-1]["err_m1"] < res.rows[0]["err_m1"]
    assert res.reference.shape == (2 * 63,)


# command line

def test_cli_rules(capsys):
    assert main(["rules", "--level", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,node,weight"
    assert lines[2] == "1,0,0.44444444444444459"
    assert len(lines) == 4


def test_cli_indexset_stats(tmp_path, capsys):
    wfile = tmp_path / "w.txt"
    wfile.write_text("2.5\n1\n")
    assert main(["indexset", "stats", "--weights", str(wfile), "--q", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("q,card_X,card_Y,bound_sg,bound_bd,bound_tp,bound_loglog,max_box,cost_exact,cost_sq")
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["card_X"] == "10" and row["bound_tp"] == "18" and row["cost_sq"] == "100"


def test_cli_indexset_schedule(tmp_path, capsys):
    wfile = tmp_path / "w.txt"
    wfile.write_text("1\n1\n")
    out = tmp_path / "s.csv"
    assert main(["indexset", "stats", "--weights", str(wfile), "--q", "0", "--q-max", "4",
                 "--q-step", "2", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert [r["q"] for r in rows] == [0, 2, 4]
    assert [r["card_X"] for r in rows] == [1, 6, 15]


def test_cli_qmc_reference(tmp_path):
    out = tmp_path / "ref.txt"
    assert main(["qmc", "reference", "--problem", "analytic", "--r", "3", "--m", "3",
                 "--log2-n", "8", "--out", str(out)]) == 0
    vals = load_reference(out)
    assert vals.shape == (1,)
    assert 1.6 < vals[0] < 1.8


def test_cli_converge_analytic_with_grid_dump(tmp_path):
    out, grid = tmp_path / "c.csv", tmp_path / "g.csv"
    assert main(["converge", "analytic", "--r", "4", "--m", "3", "--q-max", "6",
                 "--out", str(out), "--dump-grid", str(grid)]) == 0
    _, rows = read_csv(out)
    assert [r["q"] for r in rows] == list(range(7))
    data = np.loadtxt(grid, delimiter=",", skiprows=1)
    assert data.shape[1] == 4
    assert math.fsum(data[:, -1]) == pytest.approx(1.0, abs=1e-12)


def test_cli_invalid_arguments_exit_2(tmp_path, capsys):
    assert main(["indexset", "stats", "--weights", str(tmp_path / "none.txt"), "--q", "1"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n-2\n")
    assert main(["indexset", "stats", "--weights", str(bad), "--q", "1"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["rules"])
    assert info.value.code == 2
    assert main(["rules", "--level", "-1"]) == 2


def test_cli_numerical_guard_exit_3(capsys):
    code = main(["converge", "diffusion", "--mean", "0.5", "--h-exponent", "5", "--log2-n", "4"])
    assert code == 3
    assert "numerical error" in capsys.readouterr().err
