import json

import pytest

from framepbo.cli_app import detect_kind, main
from framepbo.sections import default_data_dir


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestValidate:
    def test_shipped_fixtures(self, capsys):
        assert run_cli("validate") == 0
        out = capsys.readouterr().out
        assert out.count("OK ") == 4
        assert "WARNING beam row 1" in out

    def test_negative_depth(self, tmp_path, capsys):
        p = tmp_path / "beams.csv"
        p.write_text("id,depth_mm,width_mm,bot_bars,top_bars,reconstructed\n1,300,300,3Φ16,3Φ16,false\n"
                     "2,-300,300,3Φ16,3Φ16,false\n", encoding="utf-8")
        assert run_cli("validate", p) == 2
        assert "line 3" in capsys.readouterr().out

    def test_empty(self, tmp_path):
        p = tmp_path / "columns.csv"
        p.write_text("")
        assert run_cli("validate", p) == 2

    def test_missing_file(self, tmp_path):
        assert run_cli("validate", tmp_path / "nope.csv") == 4

    def test_detect_kind(self):
        assert detect_kind(["id", "side_mm", "bars"]) == "column"
        assert detect_kind(["foo"]) is None


class TestAnalyze:
    def test_all_max(self, tmp_path):
        out = tmp_path / "a"
        assert run_cli("analyze", "--design", "max", "--out", out) == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["feasible"] and rep["penalty"]["C"] == 0
        for name in ("pushover.csv", "drift.csv", "capacity.svg", "drift.svg"):
            assert (out / name).exists()

    def test_all_min(self, tmp_path):
        out = tmp_path / "b"
        assert run_cli("analyze", "--design", "min", "--out", out) == 1
        assert json.loads((out / "report.json").read_text())["penalty"]["C"] > 0

    def test_empty_levels(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[run]\nlevels =\n")
        assert run_cli("analyze", "--config", cfg, "--design", "max", "--out", tmp_path / "o") == 2

    def test_bad_design(self, tmp_path):
        assert run_cli("analyze", "--design", "1,2", "--out", tmp_path) == 2
        assert run_cli("analyze", "--design", "x", "--out", tmp_path) == 2

    def test_missing_design(self, tmp_path):
        assert run_cli("analyze", "--out", tmp_path) == 2

    def test_unreadable_config(self, tmp_path):
        assert run_cli("analyze", "--config", tmp_path / "missing.ini") == 4


class TestOptimize:
    def test_outputs_and_report(self, tmp_path, tiny_config_text):
        cfg = tmp_path / "tiny.ini"
        cfg.write_text(tiny_config_text.format(seed=1, threads=1))
        out = tmp_path / "o"
        code = run_cli("optimize", "--config", cfg, "--out", out)
        rep = json.loads((out / "report.json").read_text())
        assert code == (0 if rep["levels"]["LS"]["feasible"] else 1)
        for name in rep["levels"]["LS"]["files"].values():
            assert (out / name).exists()
        meta = json.loads((out / "run_meta.json").read_text())
        assert "started" in meta and "wall_clock_s" in meta
        (out / "capacity.svg").unlink()
        assert run_cli("report", out) == 0
        assert (out / "capacity.svg").exists()

    def test_restarts_reproducible(self, tmp_path, tiny_config_text):
        cfg = tmp_path / "tiny.ini"
        cfg.write_text(tiny_config_text.format(seed=2, threads=1).replace("r = 1", "r = 3"))
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("optimize", "--config", cfg, "--out", a)
        run_cli("optimize", "--config", cfg, "--out", b)
        runs = json.loads((a / "report.json").read_text())["levels"]["LS"]["runs"]
        assert len({r["seed"] for r in runs}) == 3
        for name in ("report.json", "convergence_LS.csv", "pushover_LS.csv", "drift.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_divergence_abort(self, tmp_path):
        # an unmeetable elastic drift limit leaves every candidate penalized
        cfg = tmp_path / "d.ini"
        cfg.write_text("[run]\nlevels = LS\n[abc]\nN_p = 4\nI_max = 10\nabort_on_divergence = true\n"
                       "[custom]\nstories = 1\nbays = 5.0\n[bounds]\nbeam = 1:2\ncolumn = 1:2\n"
                       "[spectrum]\nelastic_drift_limit = 0.00001\n")
        assert run_cli("optimize", "--config", cfg, "--out", tmp_path / "d") == 3

    def test_seed_override(self, tmp_path, tiny_config_text):
        cfg = tmp_path / "tiny.ini"
        cfg.write_text(tiny_config_text.format(seed=1, threads=1))
        run_cli("optimize", "--config", cfg, "--out", tmp_path / "s", "--seed", "42")
        assert json.loads((tmp_path / "s" / "report.json").read_text())["seed"] == 42


def test_report_missing_dir(tmp_path):
    assert run_cli("report", tmp_path / "none") == 4


def test_data_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("FRAME_PBO_DATA", str(tmp_path))
    assert run_cli("validate") == 4
    monkeypatch.setenv("FRAME_PBO_DATA", str(default_data_dir().resolve()))
