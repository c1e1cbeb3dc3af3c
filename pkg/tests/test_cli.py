import csv
import io
import json
import math
import subprocess
import sys

import pytest

from mahlerset.cli import main, run_cli

M_PLASTIC = 0.2811995743229618465


def ok(argv):
    res = run_cli(argv)
    assert res.status == 0, res.error
    return json.loads(res.output)


def csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    return json.loads(lines[0][len("# config: "):]), list(csv.reader(io.StringIO("\n".join(lines[1:]))))


class TestMeasure:
    def test_plastic(self):
        out = ok(["measure", "--poly", "z1^3-z1-1", "-k", "1"])
        assert abs(out["result"]["value"] - M_PLASTIC) < 1e-12
        assert out["config"]["command"] == "measure"
        assert out["config"]["schedule"] == [5, 9, 13, 17, 25, 37]

    def test_zero_polynomial(self):
        res = run_cli(["measure", "--poly", "0"])
        assert res.status == 1
        assert "zero polynomial has no Mahler measure" in res.error

    def test_matrix(self):
        out = ok(["measure", "--poly", "1+z1+z2", "--matrix", "[[1,2]]"])
        assert abs(out["result"]["value"]) < 1e-12
        assert out["result"]["detail"]["H"]["data"] == [[1, 2]]

    def test_empty_matrix(self):
        out = ok(["measure", "--poly", "1+z1+z2", "--matrix", '{"rows":0,"cols":2,"data":[]}'])
        assert out["result"]["value"] == pytest.approx(math.log(3))

    def test_vanishing_member(self):
        res = run_cli(["measure", "--poly", "z1-z2", "--matrix", "[[1,1]]"])
        assert res.status == 1 and "F_A is the zero polynomial" in res.error

    @pytest.mark.parametrize("method", ["lawton", "jensen2d", "qmc"])
    def test_methods(self, method):
        out = ok(["measure", "--poly", "1+z1+z2", "--method", method, "--samples", "2048"])
        assert out["result"]["method"] == method
        assert abs(out["result"]["value"] - 0.3230659472194505) < 5e-3

    def test_jensen_needs_two_variables(self):
        assert run_cli(["measure", "--poly", "1+z1", "--method", "jensen2d"]).status == 2

    def test_poly_file_json(self, tmp_path):
        f = tmp_path / "p.json"
        f.write_text(json.dumps({"k": 1, "terms": [{"e": [3], "c": 1}, {"e": [1], "c": -1},
                                                   {"e": [0], "c": -1}]}))
        out = ok(["measure", "--poly-file", str(f)])
        assert abs(out["result"]["value"] - M_PLASTIC) < 1e-12

    def test_out_file(self, tmp_path):
        target = tmp_path / "r.json"
        res = run_cli(["measure", "--poly", "2", "--out", str(target)])
        assert res.status == 0 and res.output == ""
        assert json.loads(target.read_text())["result"]["value"] == pytest.approx(math.log(2))


class TestUsageErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["frobnicate"],
            ["measure"],
            ["measure", "--poly", "1+", "-k", "1"],
            ["measure", "--poly", "z3", "-k", "2"],
            ["measure", "--poly", "1+z1", "--matrix", "[[1,2"],
            ["measure", "--poly", "1+z1", "--matrix", "[[1,2]]"],
            ["measure", "--poly", "1+z1", "--schedule", "9,5"],
            ["measure", "--poly", "1+z1", "--format", "csv"],
            ["shnf"],
            ["q", "--vector", "1,x"],
            ["q", "--vector", "0,0"],
            ["spectrum", "--poly", "1+z1", "--ranks", "3"],
            ["mbgen", "-B", "0"],
            ["embed", "--poly-file", "/nonexistent/p.txt"],
        ],
    )
    def test_exit_2(self, argv):
        res = run_cli(argv)
        assert res.status == 2
        assert res.error

    def test_message_names_command(self):
        res = run_cli(["measure", "--poly", "1+", "-k", "1"])
        assert res.error.startswith("mahlerset measure: error: polynomial syntax")


class TestLattice:
    def test_shnf_example(self):
        out = ok(["shnf", "--matrix", "[[1,1,4,0],[0,2,3,3],[0,0,5,1]]"])
        assert out["H"]["data"] == [[1, 0, 0, -2], [0, 1, 4, 2], [0, 0, 5, 1]]
        assert out["rank"] == 3

    def test_hnf(self):
        out = ok(["hnf", "--matrix", "[[2,4],[1,1]]"])
        assert out["H"]["data"] == [[1, 1], [0, 2]]

    def test_matrix_file(self, tmp_path):
        f = tmp_path / "m.json"
        f.write_text("[[2,4,6]]")
        assert ok(["shnf", "--matrix-file", str(f)])["H"]["data"] == [[1, 2, 3]]

    def test_q(self):
        assert ok(["q", "--vector", "1,3,9"])["q"] == 3

    def test_q_not_found(self):
        res = run_cli(["q", "--vector", "1,100", "--bound", "5"])
        assert res.status == 1


class TestSpectrumCommands:
    def test_spectrum_json(self):
        out = ok(["spectrum", "--poly", "z1-z2", "--height", "1"])
        assert out["distinct_values"] == [0.0]
        assert out["config"]["height"] == 1

    def test_spectrum_csv(self):
        res = run_cli(["spectrum", "--poly", "1+z1+z2", "--format", "csv"])
        echo, rows = csv_rows(res.output)
        assert echo["command"] == "spectrum"
        assert rows[0] == ["H", "value", "error_bound", "method"]
        assert len(rows) - 1 == len(ok(["spectrum", "--poly", "1+z1+z2"])["entries"])

    def test_lehmer(self):
        out = ok(["lehmer", "--poly", "z1-z2"])
        assert out["lehmer_element"] is None and out["max_element"] == 0.0
        out = ok(["lehmer", "--poly", "1+z1+z2"])
        assert out["lehmer_element"] == pytest.approx(0.3230659472194505, abs=1e-9)
        assert out["max_element"] == pytest.approx(math.log(3))

    def test_converge_csv(self):
        res = run_cli(["converge", "--poly", "1+z1+z2", "--schedule", "5,9,13", "--format", "csv"])
        echo, rows = csv_rows(res.output)
        assert echo["schedule"] == [5, 9, 13]
        assert rows[0] == ["n", "estimate"] and [r[0] for r in rows[1:]] == ["5", "9", "13"]

    def test_bounds(self):
        out = ok(["bounds", "--poly", "5+z1+z2"])
        assert out["lower"] == pytest.approx(math.log(5)) and out["upper"] == pytest.approx(math.log(7))
        assert out["polytope"]["dim"] == 2

    def test_embed(self):
        out = ok(["embed", "--poly", "1+z1+z2"])
        assert out["n"] == 2 and out["A"]["data"] == [[2, 0, 1, 0], [0, 1, 1, 0]]

    def test_mbgen(self):
        out = ok(["mbgen", "-B", "2"])
        assert out["count"] == 8
        res = run_cli(["mbgen", "-B", "1", "--format", "csv"])
        _, rows = csv_rows(res.output)
        assert rows == [["c", "b", "form"], ["1", "1", "z1"], ["-1", "1", "-z1"]]


def test_config_echo_everywhere():
    for argv in (["bounds", "--poly", "1+z1"], ["q", "--vector", "1,2"], ["mbgen", "-B", "1"],
                 ["hnf", "--matrix", "[[1]]"], ["measure", "--poly", "1+z1", "--seed", "4"]):
        echo = ok(argv)["config"]
        for key in ("schedule", "degree_cap", "nodes", "jensen_rule", "samples", "seed", "tolerance"):
            assert key in echo
    assert ok(["measure", "--poly", "1+z1", "--seed", "4"])["config"]["seed"] == 4


def test_deterministic():
    argv = ["measure", "--poly", "2+z1-z2+z1*z2", "--method", "qmc", "--seed", "7", "--samples", "512"]
    assert run_cli(argv).output == run_cli(argv).output


def test_main_writes_streams(capsys):
    assert main(["q", "--vector", "1,2,4"]) == 0
    assert json.loads(capsys.readouterr().out)["q"] == 2
    assert main(["measure", "--poly", "0"]) == 1
    assert "zero polynomial" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mahlerset", "q", "--vector", "1,3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["q"] == 3
