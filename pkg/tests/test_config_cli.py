"""Configuration validation, hashing, and end-to-end CLI behavior.

CLI tests run the installed module in a subprocess so exit codes and the
stderr error JSON are exercised exactly as a shell user sees them.
"""

import json
import math
import subprocess
import sys

import pytest

from dirac_nodal import Classical, ConfigError
from dirac_nodal.cli import read_csv_table
from dirac_nodal.config import config_hash, load_config, parse_config

PI = math.pi

ZERO_QUARTER = {
    "mass": 0.0,
    "potential": {"kind": "named", "name": "zero", "params": {}},
    "boundary": {"kind": "classical", "alpha": 0.0, "beta": PI / 4},
    "solver": {"steps": 512, "lambda_tol": 1e-10},
}

SIN_HALF = {
    "mass": 0.5,
    "potential": {"kind": "named", "name": "sin2x", "params": {}},
    "boundary": {"kind": "classical", "alpha": 0.0, "beta": 0.0},
    "solver": {"steps": 1024},
}


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "dirac_nodal.cli", *args],
                          capture_output=True, text=True)


class TestConfigParsing:
    def test_valid_document(self, tmp_path):
        cfg = load_config(write_config(tmp_path, ZERO_QUARTER))
        assert cfg.problem.mass == 0.0
        assert isinstance(cfg.problem.boundary, Classical)
        assert cfg.solver.steps == 512
        assert cfg.mode.tag == "corrected"

    def test_unknown_top_level_key(self):
        doc = dict(ZERO_QUARTER, extra=1)
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(doc)

    def test_unknown_solver_key(self):
        doc = dict(ZERO_QUARTER, solver={"steps": 512, "nonsense": 2})
        with pytest.raises(ConfigError, match="solver"):
            parse_config(doc)

    def test_missing_boundary(self):
        doc = {k: v for k, v in ZERO_QUARTER.items() if k != "boundary"}
        with pytest.raises(ConfigError, match="boundary"):
            parse_config(doc)

    def test_boundary_violation_names_inequality(self):
        doc = dict(ZERO_QUARTER)
        doc["boundary"] = {"kind": "param_dependent", "alpha": 0.0, "beta": 0.0,
                           "a0": 0.0, "b0": 1.0, "a1": 1.0, "b1": 1.0}
        with pytest.raises(ConfigError, match=r"a0\*sin\(alpha\)"):
            parse_config(doc)

    def test_bad_potential_name(self):
        doc = dict(ZERO_QUARTER,
                   potential={"kind": "named", "name": "bogus", "params": {}})
        with pytest.raises(ConfigError, match="unknown potential"):
            parse_config(doc)

    def test_mass_must_be_number(self):
        doc = dict(ZERO_QUARTER, mass="heavy")
        with pytest.raises(ConfigError, match="mass"):
            parse_config(doc)

    def test_json_syntax_error_carries_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"mass": 0.0,\n  "oops"\n}')
        with pytest.raises(ConfigError, match="line"):
            load_config(path)


class TestConfigHash:
    def test_key_order_irrelevant(self):
        a = {"mass": 0.5, "potential": {"kind": "named", "name": "zero"}}
        b = {"potential": {"name": "zero", "kind": "named"}, "mass": 0.5}
        assert config_hash(a) == config_hash(b)

    def test_value_changes_hash(self):
        a = {"mass": 0.5}
        b = {"mass": 0.25}
        assert config_hash(a) != config_hash(b)


class TestSpectrumCommand:
    def test_closed_form_and_determinism(self, tmp_path):
        cfg = write_config(tmp_path, ZERO_QUARTER)
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        for out in (out1, out2):
            res = run_cli("spectrum", "--problem", str(cfg), "--n-min", "3",
                          "--n-max", "8", "--out", str(out))
            assert res.returncode == 0, res.stderr
        assert out1.read_bytes() == out2.read_bytes()
        comments, header, rows = read_csv_table(out1)
        assert header == ["n", "lambda", "residual"]
        assert comments and "config=" in comments[0]
        for row in rows:
            n = int(row[0])
            assert float(row[1]) == pytest.approx(n + 0.25, abs=1e-9)

    def test_jobs_do_not_change_output(self, tmp_path):
        cfg = write_config(tmp_path, ZERO_QUARTER)
        out1, out2 = tmp_path / "j1.csv", tmp_path / "j3.csv"
        run_cli("spectrum", "--problem", str(cfg), "--n-min", "3", "--n-max",
                "9", "--out", str(out1), "--jobs", "1")
        run_cli("spectrum", "--problem", str(cfg), "--n-min", "3", "--n-max",
                "9", "--out", str(out2), "--jobs", "3")
        assert out1.read_bytes() == out2.read_bytes()

    def test_invalid_boundary_exits_2_with_json(self, tmp_path):
        doc = dict(ZERO_QUARTER)
        doc["boundary"] = {"kind": "param_dependent", "alpha": 0.0, "beta": 0.0,
                           "a0": 0.0, "b0": 1.0, "a1": 1.0, "b1": 1.0}
        cfg = write_config(tmp_path, doc)
        res = run_cli("spectrum", "--problem", str(cfg), "--n-min", "4",
                      "--n-max", "6", "--out", str(tmp_path / "x.csv"))
        assert res.returncode == 2
        payload = json.loads(res.stderr.strip().splitlines()[-1])
        assert "a0*sin(alpha)" in payload["message"]

    def test_seed_failure_exits_3(self, tmp_path):
        doc = {
            "mass": 0.5,
            "potential": {"kind": "named", "name": "constant", "params": {"c": 0.5}},
            "boundary": {"kind": "classical", "alpha": 0.0, "beta": 0.0},
            "solver": {"steps": 512, "bracket_expansion": 0.01},
        }
        cfg = write_config(tmp_path, doc)
        res = run_cli("spectrum", "--problem", str(cfg), "--n-min", "4",
                      "--n-max", "4", "--out", str(tmp_path / "x.csv"))
        assert res.returncode == 3
        payload = json.loads(res.stderr.strip().splitlines()[-1])
        assert payload["type"] == "SeedFailure"

    def test_seedless_rejects_singular_constants(self, tmp_path):
        doc = {
            "mass": 0.5,
            "potential": {"kind": "named", "name": "constant", "params": {"c": 0.5}},
            "boundary": {"kind": "classical", "alpha": 0.0, "beta": 0.0},
            "solver": {"steps": 512},
        }
        cfg = write_config(tmp_path, doc)
        res = run_cli("spectrum", "--problem", str(cfg), "--n-min", "4",
                      "--n-max", "6", "--out", str(tmp_path / "x.csv"),
                      "--seedless")
        assert res.returncode == 3
        payload = json.loads(res.stderr.strip().splitlines()[-1])
        assert payload["type"] == "ConstantsUnavailable"

    def test_ambiguous_bracket_exits_3(self, tmp_path):
        doc = dict(ZERO_QUARTER, solver={"steps": 512, "bracket_expansion": 1.3})
        cfg = write_config(tmp_path, doc)
        res = run_cli("spectrum", "--problem", str(cfg), "--n-min", "6",
                      "--n-max", "6", "--out", str(tmp_path / "x.csv"))
        assert res.returncode == 3
        assert json.loads(res.stderr.strip().splitlines()[-1])["type"] \
            == "AmbiguousBracket"


class TestNodesCommand:
    def test_nodes_csv(self, tmp_path):
        cfg = write_config(tmp_path, ZERO_QUARTER)
        out = tmp_path / "nodes.csv"
        res = run_cli("nodes", "--problem", str(cfg), "--n", "6",
                      "--component", "1", "--out", str(out))
        assert res.returncode == 0, res.stderr
        _, header, rows = read_csv_table(out)
        assert header == ["j", "x", "length"]
        lam = 6.25
        for row in rows:
            j = int(row[0])
            assert float(row[1]) == pytest.approx(j * PI / lam, abs=1e-8)
        assert rows[-1][2] == ""  # no length after the last node
        lengths = [float(r[2]) for r in rows[:-1]]
        assert all(l > 0 for l in lengths)


class TestReconstructCommand:
    def test_report_and_determinism(self, tmp_path):
        cfg = write_config(tmp_path, SIN_HALF)
        out1, out2 = tmp_path / "f1.csv", tmp_path / "f2.csv"
        for out in (out1, out2):
            res = run_cli("reconstruct", "--problem", str(cfg), "--n", "12",
                          "--out", str(out))
            assert res.returncode == 0, res.stderr
        assert out1.read_bytes() == out2.read_bytes()
        report = json.loads((tmp_path / "f1.json").read_text())
        assert report["mode"] == "corrected"
        assert report["lambda_source"] == "numeric"
        assert report["l1_error"] < 0.6
        _, header, rows = read_csv_table(out1)
        assert header == ["x_left", "x_right", "value"]
        assert float(rows[0][0]) == 0.0
        assert float(rows[-1][1]) == pytest.approx(PI)

    def test_integer_seed_mode_adjusts_mean(self, tmp_path):
        doc = {
            "mass": 0.0,
            "potential": {"kind": "named", "name": "constant", "params": {"c": 1.0}},
            "boundary": {"kind": "classical", "alpha": 0.0, "beta": 0.0},
            "solver": {"steps": 512},
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "fn.csv"
        res = run_cli("reconstruct", "--problem", str(cfg), "--n", "24",
                      "--lambda-source", "integer_seed", "--out", str(out))
        assert res.returncode == 0, res.stderr
        report = json.loads((tmp_path / "fn.json").read_text())
        assert report["adjust_mean"] is True
        assert report["l1_error"] < 1e-6  # V - v/pi vanishes for V = 1


class TestStabilityCommand:
    def test_mismatched_boundaries_rejected(self, tmp_path):
        a = write_config(tmp_path, SIN_HALF, "a.json")
        other = dict(SIN_HALF)
        other["boundary"] = {"kind": "classical", "alpha": 0.0, "beta": 0.5}
        b = write_config(tmp_path, other, "b.json")
        res = run_cli("stability", "--problem-a", str(a), "--problem-b", str(b),
                      "--n-min", "8", "--n-max", "12",
                      "--out", str(tmp_path / "s.csv"))
        assert res.returncode == 2

    def test_summary_and_table(self, tmp_path):
        a = write_config(tmp_path, SIN_HALF, "a.json")
        zero = dict(SIN_HALF)
        zero["potential"] = {"kind": "named", "name": "zero", "params": {}}
        b = write_config(tmp_path, zero, "b.json")
        out = tmp_path / "stab.csv"
        res = run_cli("stability", "--problem-a", str(a), "--problem-b", str(b),
                      "--n-min", "10", "--n-max", "14", "--out", str(out))
        assert res.returncode == 0, res.stderr
        summary = json.loads((tmp_path / "stab.json").read_text())
        assert summary["d_sigma"] == pytest.approx(
            summary["d0_estimate"] / (1 + summary["d0_estimate"]))
        _, header, rows = read_csv_table(out)
        assert header == ["n", "S_n", "ratio_corrected", "ratio_paper_exact"]
        assert len(rows) == 5


class TestValidateAsymptoticsCommand:
    def test_orders_written(self, tmp_path):
        cfg = write_config(tmp_path, SIN_HALF)
        out = tmp_path / "orders.csv"
        res = run_cli("validate-asymptotics", "--problem", str(cfg),
                      "--n-min", "10", "--n-max", "16", "--out", str(out))
        assert res.returncode == 0, res.stderr
        _, header, rows = read_csv_table(out)
        assert header == ["n", "err_lambda", "err_node_max", "err_length_max"]
        assert len(rows) == 7
        summary = json.loads((tmp_path / "orders.json").read_text())
        assert summary["slope_lambda"] < -1.5


class TestQuasinodalCommand:
    def test_solver_data_passes(self, tmp_path):
        cfg = write_config(tmp_path, SIN_HALF)
        out = tmp_path / "report.json"
        res = run_cli("quasinodal-check", "--problem", str(cfg), "--n-min", "8",
                      "--n-max", "14", "--out", str(out))
        assert res.returncode == 0, res.stderr
        report = json.loads(out.read_text())
        assert report["asymptotics_pass"] is True
        assert report["l1_trend_pass"] is True

    def test_case_mismatch_exits_3(self, tmp_path):
        cfg = write_config(tmp_path, ZERO_QUARTER)  # classical, case II
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps(
            {"case": "I", "rows": {"10": [k * PI / 8 for k in range(1, 8)]}}))
        res = run_cli("quasinodal-check", "--problem", str(cfg), "--n-min", "8",
                      "--n-max", "12", "--grid-file", str(grid),
                      "--out", str(tmp_path / "r.json"))
        assert res.returncode == 3
        assert json.loads(res.stderr.strip().splitlines()[-1])["type"] \
            == "CaseMismatch"

    def test_grid_file_with_offset_fails(self, tmp_path):
        cfg = write_config(tmp_path, ZERO_QUARTER)
        rows = {}
        for n in (36, 44, 52):
            rows[str(n)] = [k * PI / n + 0.3 for k in range(1, n - 4)]
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"case": "II", "rows": rows}))
        out = tmp_path / "report.json"
        res = run_cli("quasinodal-check", "--problem", str(cfg), "--n-min", "36",
                      "--n-max", "52", "--grid-file", str(grid),
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        report = json.loads(out.read_text())
        assert report["asymptotics_pass"] is False
        assert report["flagged_rows"] == [36, 44, 52]


class TestLogEnvironment:
    def test_invalid_level_rejected(self, tmp_path):
        cfg = write_config(tmp_path, ZERO_QUARTER)
        res = subprocess.run(
            [sys.executable, "-m", "dirac_nodal.cli", "spectrum", "--problem",
             str(cfg), "--n-min", "3", "--n-max", "4",
             "--out", str(tmp_path / "x.csv")],
            capture_output=True, text=True,
            env={"DIRAC_NODAL_LOG": "chatty", "PATH": "/usr/bin:/bin"})
        assert res.returncode == 2
