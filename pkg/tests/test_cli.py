import json

import pytest

from favardkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestDatasets:
    def test_cantor_csv_to_stdout(self, capsys):
        code, out = run(capsys, "cantor", "--set", "cantor", "--n", "1", "--csv", "-")
        assert code == 0
        lines = out.strip().splitlines()
        meta = [l for l in lines if l.startswith("# ")]
        assert any(l.startswith("# version=") for l in meta)
        assert any(l == "# command=cantor" for l in meta)
        body = [l for l in lines if not l.startswith("#")]
        assert body[0].split(",")[0] == "ix"
        assert len(body) == 1 + 4

    def test_squares_file_roundtrip(self, capsys, tmp_path):
        spec = {"base": 2, "level": 1, "cells": [[0, 0], [1, 1]]}
        p = tmp_path / "cells.json"
        p.write_text(json.dumps(spec))
        code, out = run(
            capsys, "cantor", "--set", "squares", "--file", str(p), "--json", "-"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["squares"]["cells"] == [[0, 0], [1, 1]]

    def test_missing_squares_file_flag(self, capsys):
        code, out = run(capsys, "cantor", "--set", "squares", "--json", "-")
        assert code == 2
        assert json.loads(out.strip())["error"]["type"] == "ConfigError"


class TestFavardCommand:
    def test_single_estimate_json(self, capsys):
        code, out = run(capsys, "favard", "--set", "cantor", "--n", "1", "--json", "-")
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["value"] - 1.0498) < 0.01
        assert payload["error_bound"] <= 1e-3

    def test_table_csv(self, capsys):
        code, out = run(
            capsys, "favard", "--set", "cantor", "--table", "2", "--tol", "1e-2", "--csv", "-"
        )
        assert code == 0
        body = [l for l in out.splitlines() if l and not l.startswith("#")]
        assert body[0].startswith("n,")
        assert len(body) == 1 + 3


class TestErrorChannels:
    def test_config_error_exit_2(self, capsys):
        code, out = run(capsys, "favard", "--set", "cantor", "--tol", "-1")
        assert code == 2
        err = json.loads(out.strip())["error"]
        assert err["exit_code"] == 2

    def test_budget_error_exit_3(self, capsys):
        code, out = run(
            capsys, "beta", "--set", "cantor", "--n", "2", "--max-level", "25", "--json", "-"
        )
        assert code == 3
        assert json.loads(out.strip())["error"]["type"] == "BudgetError"

    def test_generation_cap_is_budget(self, capsys):
        code, out = run(capsys, "cantor", "--set", "cantor", "--n", "40", "--json", "-")
        assert code == 3

    def test_hypothesis_failure_exit_4(self, capsys, tmp_path):
        spec = {"base": 2, "level": 0, "cells": [[0, 0]]}
        p = tmp_path / "unit.json"
        p.write_text(json.dumps(spec))
        code, out = run(
            capsys,
            "scales",
            "--set",
            "squares",
            "--file",
            str(p),
            "--mode",
            "twoproj",
            "--rmin",
            "1e-6",
            "--json",
            "-",
        )
        assert code == 4
        assert json.loads(out.strip())["error"]["type"] == "HypothesisFailure"

    def test_bad_flag_is_config_error(self, capsys):
        code, out = run(capsys, "favard", "--no-such-flag")
        assert code == 2


class TestConfigFile:
    def test_overrides_apply(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 1}))
        code, out = run(
            capsys, "--config", str(cfg), "cantor", "--set", "cantor", "--json", "-"
        )
        assert code == 0
        assert len(json.loads(out)["squares"]["cells"]) == 4

    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus_key": 1}))
        code, out = run(capsys, "--config", str(cfg), "cantor", "--json", "-")
        assert code == 2


class TestScalesAndDiag:
    def test_twoproj_schedule_json(self, capsys):
        code, out = run(
            capsys, "scales", "--set", "cantor", "--n", "8", "--mode", "twoproj",
            "--rmin", "1e-9", "--json", "-"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["schedule"]["mode"] == "twoproj"
        assert len(payload["schedule"]["pairs"]) >= 3

    def test_main_schedule_reports_bound(self, capsys):
        code, out = run(
            capsys, "scales", "--set", "boundary", "--n", "4", "--mode", "main",
            "--n-target", "2", "--resolution", "128", "--json", "-"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["bound"]["N"] >= 2
        assert payload["bound"]["predicted"] > 0.0

    def test_sector_diag_with_oracle(self, capsys):
        code, out = run(
            capsys, "--oracle", "diag", "--set", "cantor", "--n", "3",
            "--op", "sector", "--json", "-"
        )
        assert code == 0
        payload = json.loads(out)
        assert "sector_mass" in payload
        assert "mc_area" in payload

    def test_line_diag(self, capsys):
        code, out = run(
            capsys, "diag", "--set", "cantor", "--n", "2", "--op", "line",
            "--omega", "1.5707963267948966", "--line-c", "0.0", "--sep", "0.0625",
            "--json", "-"
        )
        assert code == 0
        assert json.loads(out)["line_multiplicity"] == 8


class TestPipelineAndCalibrate:
    def test_pipeline_threads_byte_identical(self, capsys, tmp_path):
        cal = tmp_path / "cal.json"
        outs = []
        for t in ("1", "2"):
            code, out = run(
                capsys, "--threads", t, "--calibration", str(cal),
                "pipeline", "--full", "--n", "2", "--csv", "-"
            )
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1]
        assert "thread" not in outs[0]

    def test_calibrate_writes_once(self, capsys, tmp_path):
        cal = tmp_path / "cal.json"
        code, _ = run(
            capsys, "--calibration", str(cal), "calibrate",
            "--constant", "C_rect_beta", "--dataset", "cantor"
        )
        assert code == 0
        saved = json.loads(cal.read_text())
        assert "C_rect_beta" in saved["constants"]
        code, out = run(
            capsys, "--calibration", str(cal), "calibrate",
            "--constant", "C_rect_beta", "--dataset", "cantor"
        )
        assert code == 2
