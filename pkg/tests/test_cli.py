import json

import pytest

from gatelab.cli import main

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


def test_regime_exit_codes():
    assert main(["regime"]) == 0
    assert main(["regime", "--min-ratio", "25"]) == 2


def test_regime_text_output(capsys):
    main(["regime"])
    out = capsys.readouterr().out
    assert "delta1/g" in out
    assert "overall: pass" in out


def test_cz_writes_report_and_timeseries(tmp_path):
    rc = main(["cz", "--model", "eff_diag", "--samples", "3",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "cz.json").read_text())
    assert report["fidelity"] == pytest.approx(1.0, abs=1e-9)
    tsv = (tmp_path / "cz_timeseries.tsv").read_text().splitlines()
    assert tsv[0].startswith("t\tt_seconds\tphase_00")
    assert len(tsv) == 4  # header + 3 samples


def test_cz_reports_are_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["cz", "--model", "eff_diag", "--samples", "3",
                     "--out-dir", str(d)]) == 0
    assert (a / "cz.json").read_bytes() == (b / "cz.json").read_bytes()
    assert (a / "cz_timeseries.tsv").read_bytes() == \
        (b / "cz_timeseries.tsv").read_bytes()


def test_cz_json_stdout_parses(capsys):
    assert main(["cz", "--model", "eff_diag", "--samples", "2",
                 "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["kind"] == "cz"


def test_cz_ion_prints_both_readings(capsys):
    assert main(["cz", "--preset", "ion"]) == 0
    out = capsys.readouterr().out
    assert "angular rate" in out and "cyclic rate" in out


def test_budget_nominal_only(capsys):
    assert main(["budget", "--nominal-only"]) == 0
    out = capsys.readouterr().out
    assert "7.6e-05" in out


def test_fuse_writes_graph_files(tmp_path):
    rc = main(["fuse", "--recipe", "fig2b", "--out-dir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "final.dot").read_text().startswith("graph final {")
    assert (tmp_path / "final.adj").read_text().startswith("7\n")
    assert (tmp_path / "target.dot").exists()
    report = json.loads((tmp_path / "fuse.json").read_text())
    assert report["witness"] == [3]


def test_fuse_plan_file(tmp_path):
    plan = tmp_path / "plan.cfg"
    plan.write_text("n_qubits = 4\nstep = entangle 0 1 2 3\n"
                    "target = 0-1 0-2 0-3\n")
    assert main(["fuse", "--plan", str(plan)]) == 0


def test_fuse_exit_code_contract():
    assert main(["fuse", "--recipe", "fig3b", "--orbit-cap", "2"]) == 3
    assert main(["fuse", "--recipe", "not-a-recipe"]) == 1
    assert main(["fuse"]) == 1


def test_sweep_writes_tsv(tmp_path):
    rc = main(["sweep", "--param", "t", "--range", "100,200,300",
               "--metric", "phase", "--model", "eff_diag",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "sweep.tsv").read_text().splitlines()
    assert lines[0] == "t\tphase"
    assert len(lines) == 4


def test_sweep_grid_file(tmp_path, capsys):
    grid = tmp_path / "grid.cfg"
    grid.write_text("param = t\nvalues = 100 300\nmetric = phase\n"
                    "model = eff_diag\n")
    assert main(["sweep", "--grid", str(grid)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3
    # flags override file keys
    assert main(["sweep", "--grid", str(grid), "--range", "50,150,250"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("param = t\nmetric = phase\n")
    assert main(["sweep", "--grid", str(bad)]) == 1


def test_sweep_range_syntax():
    assert main(["sweep", "--param", "t", "--range", "100:300:3",
                 "--metric", "phase", "--model", "eff_diag"]) == 0
    assert main(["sweep", "--param", "t", "--range", "abc",
                 "--metric", "phase"]) == 1


def test_usage_errors_exit_1():
    assert main(["sweep", "--metric", "phase"]) == 1       # missing --param
    assert main(["cz", "--model", "warp"]) == 1            # bad choice
    assert main(["no-such-command"]) == 1


def test_cz_leakage_exits_2(tmp_path, capsys):
    cfg = tmp_path / "hot.cfg"
    cfg.write_text("omega = 2.0\ndelta1 = 4\ndelta2 = 2\n")
    with pytest.warns(UserWarning):
        rc = main(["cz", "--preset", "custom", "--config", str(cfg),
                   "--model", "full", "--n-atoms", "1", "--n-max", "2",
                   "--t", "40", "--samples", "2"])
    assert rc == 2
    assert "physics failure" in capsys.readouterr().err


def test_custom_preset_needs_config(tmp_path):
    assert main(["regime", "--preset", "custom"]) == 1
    cfg = tmp_path / "p.cfg"
    cfg.write_text("omega = 1.05\ndelta1 = 20\ndelta2 = 21\n")
    assert main(["regime", "--preset", "custom", "--config", str(cfg)]) == 0
    assert main(["regime", "--preset", "custom",
                 "--config", str(tmp_path / "missing.cfg")]) == 1


def test_recipes_command(capsys):
    assert main(["recipes"]) == 0
    out = capsys.readouterr().out
    assert "fig2b" in out
    assert "[reconstructed]" in out
