import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from vlczf.cli import SCHEMA_VERSION, main
from vlczf.config import ScenarioConfig
from vlczf.errors import ConfigError


def read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        assert first.startswith("# ")
        meta = json.loads(first[2:])
        rows = list(csv.DictReader(fh))
    return meta, rows


class TestConfig:
    def test_defaults(self):
        cfg = ScenarioConfig.from_text("")
        assert cfg.layout is not None and cfg.literal_H is None
        assert cfg.snr.p0_over_sigma == pytest.approx(1e7)
        assert len(cfg.d1_range) == 51 and cfg.d1_range[0] == -2.5 and cfg.d1_range[-1] == 2.5

    def test_comments_and_literal_H(self):
        cfg = ScenarioConfig.from_text("# scenario\nH = 1, 2 ; 2, 1  # gains\nxi = 0.1,0.9\n")
        np.testing.assert_array_equal(cfg.literal_H, [[1, 2], [2, 1]])
        assert cfg.xi == [0.1, 0.9]
        assert cfg.channel().det == -3.0

    @pytest.mark.parametrize("text", [
        "nonsense",
        "colour = red",
        "snr_db = loud",
        "snr_db = inf",
        "H = 1,2;3",
        "H = 1,2;2,1\nroom = 5,5,3",
        "xi = 1.5",
        "d1_range = 1:0:0.1",
        "direction = up",
        "targets = 1",
        "num_symbols = 0",
        "db_convention = volts",
        "user1_displacement = -9",
        "fov_deg = 0",
    ])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            ScenarioConfig.from_text(text)

    def test_overrides_win(self):
        cfg = ScenarioConfig.from_text("seed = 1", {"seed": "7"})
        assert cfg.seed == 7

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ScenarioConfig.from_file(tmp_path / "nope.cfg")


def run(argv, capsys=None):
    return main([str(a) for a in argv])


class TestCli:
    def test_boundary_blocks(self, tmp_path):
        out = tmp_path / "b.csv"
        assert run(["boundary", "--set", "xi=0,0.3", "--grid", "8", "--out", out]) == 0
        meta, rows = read_csv(out)
        assert meta["schema_version"] == SCHEMA_VERSION and meta["command"] == "boundary"
        assert list(rows[0]) == ["xi", "x", "L2", "R1_bits", "R2_bits"]
        zero = [r for r in rows if float(r["xi"]) == 0.0]
        assert len(zero) == 1 and float(zero[0]["R1_bits"]) == 0.0 == float(zero[0]["R2_bits"])
        assert len(rows) >= 9

    def test_symrate_columns(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run(["symrate", "--grid", "5", "--out", out]) == 0
        _, rows = read_csv(out)
        vals = [float(r["sym_rate_bits"]) for r in rows]
        assert [float(r["xi"]) for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert vals[0] == vals[-1] == 0.0 and max(vals) == vals[2]

    def test_coverage_and_threads_byte_identical(self, tmp_path):
        args = ["coverage", "--set", "xi=0.1", "--grid", "5"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", a, "--threads", "1"]) == 0
        assert run(args + ["--out", b, "--threads", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()
        _, rows = read_csv(a)
        assert len(rows) == 25
        diag = [r for r in rows if r["d1"] == r["d2"]]
        assert all(r["singular"] == "1" and float(r["sym_rate_bits"]) == 0.0 for r in diag)

    def test_loss(self, tmp_path):
        out = tmp_path / "l.csv"
        assert run(["loss", "--set", "xi=0.3", "--grid", "3", "--out", out]) == 0
        meta, rows = read_csv(out)
        assert [float(r["displacement_m"]) for r in rows] == [0.0, 0.4, 0.8]
        assert "0.3" in meta["optimum"]

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("H = 1,2;2,1\nxi = 0.5\nsnr_db = 10\n")
        out = tmp_path / "s.csv"
        assert run(["boundary", "--config", cfg, "--grid", "3", "--out", out]) == 0
        meta, rows = read_csv(out)
        assert meta["config"]["H"] == [[1.0, 2.0], [2.0, 1.0]]
        assert meta["config"]["given"]["snr_db"] == "10"
        # Both kinks of L2 sit at x = 1 for this H and appear once.
        assert [float(r["x"]) for r in rows] == [0.0, 0.75, 1.0, 1.5]

    def test_simulate_feasible_and_deterministic(self, tmp_path):
        args = ["simulate", "--set", "xi=0.3", "--set", "targets=1,1.5",
                "--set", "num_symbols=20000", "--seed", "5"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b, "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert doc["feasible"] and doc["seed"] == 5 and doc["meta"]["command"] == "simulate"

    def test_simulate_infeasible_exit4(self, tmp_path):
        out = tmp_path / "x.json"
        assert run(["simulate", "--set", "xi=0.3", "--set", "targets=3,3", "--out", out]) == 4
        doc = json.loads(out.read_text())
        assert doc["feasible"] is False and doc["margin"] < 0

    @pytest.mark.parametrize("argv", [
        ["boundary", "--set", "bogus=1"],
        ["boundary", "--set", "noequals"],
        ["boundary", "--config", "/nonexistent/cfg"],
        ["simulate"],
        ["coverage", "--set", "H=1,2;2,1"],
        ["boundary", "--grid", "1"],
        ["boundary", "--threads", "0"],
    ])
    def test_config_errors_exit2(self, argv, capsys):
        assert run(argv) == 2
        assert "config error" in capsys.readouterr().err

    @pytest.mark.parametrize("H", ["1,2;2,4", "0,1;0,2"])
    def test_singular_exit3(self, H, tmp_path):
        assert run(["boundary", "--set", f"H={H}", "--out", tmp_path / "o.csv"]) == 3

    def test_verify(self, capsys):
        assert run(["verify"]) == 0
        out = capsys.readouterr().out
        assert out.count("[PASS]") == 6 and "[FAIL]" not in out

    def test_console_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "vlczf.cli", "symrate", "--grid", "3"],
                             capture_output=True, text=True, check=True)
        assert res.stdout.splitlines()[1] == "xi,sym_rate_bits"
