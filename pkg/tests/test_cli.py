"""End-to-end tests of the command-line interface."""

import json

import numpy as np
import pytest

from bellres import cli

RT2 = np.sqrt(2.0)
TSIRELSON = 2 * RT2


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(out):
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestBound:
    def test_chsh_probustness(self, capsys):
        code, out, _ = run(capsys, ["bound", "--builtin", "chsh-c4", "--value", "0.2"])
        assert code == 0
        doc = json.loads(out)
        assert doc["feasible"] is True
        assert doc["local_bound"] == pytest.approx(2.0)
        assert doc["rank"] == 2
        assert doc["resource_value"] == pytest.approx(4 * 2.2 / TSIRELSON - 1, abs=1e-10)

    def test_i3322_target(self, capsys):
        code, out, _ = run(capsys, ["bound", "--builtin", "i3322", "--target", "4.001"])
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["resource_value"] - 2.6756) <= 5e-4
        assert doc["local_bound"] == pytest.approx(4.0)

    def test_maximally_mixed_target(self, capsys):
        code, out, _ = run(capsys, ["bound", "--builtin", "chsh-c4", "--target", "0.0"])
        assert code == 0
        doc = json.loads(out)
        assert doc["resource_value"] == pytest.approx(0.0, abs=1e-10)

    def test_renyi2_measure(self, capsys):
        code, out, _ = run(
            capsys,
            ["bound", "--builtin", "chsh-c4", "--value", "0.2", "--measure", "renyi2"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["feasible"] is True
        assert doc["resource_value"] > 0.0

    def test_relent_measure(self, capsys):
        code, out, _ = run(
            capsys,
            ["bound", "--builtin", "chsh-c4", "--value", "0.2", "--measure", "relent"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["feasible"] is True
        assert doc["resource_value"] > 0.0
        assert doc["beta"] > 0.0

    def test_infeasible_exits_2(self, capsys):
        code, out, _ = run(capsys, ["bound", "--builtin", "chsh-c4", "--target", "3.0"])
        assert code == 2
        assert json.loads(out)["feasible"] is False

    def test_steering_builtin(self, capsys):
        code, out, _ = run(capsys, ["bound", "--builtin", "steering-f2", "--value", "0.1"])
        assert code == 0
        doc = json.loads(out)
        assert doc["local_bound"] == pytest.approx(RT2)
        assert doc["spectrum"][0] == pytest.approx(2.0, abs=1e-12)


class TestScenarioFiles:
    def test_correlation_form(self, capsys, tmp_path):
        doc = {
            "correlation": {
                "g": [[1, 1], [1, -1]],
                "bloch_a": [[0, 0, 1], [1, 0, 0]],
                "bloch_b": [[1 / RT2, 0, 1 / RT2], [-1 / RT2, 0, 1 / RT2]],
            }
        }
        path = tmp_path / "chsh.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, ["bound", "--scenario", str(path), "--value", "0.2"])
        assert code == 0
        parsed = json.loads(out)
        assert parsed["local_bound"] == pytest.approx(2.0)
        assert parsed["spectrum"][0] == pytest.approx(TSIRELSON, abs=1e-10)

    def test_measurement_form(self, capsys, tmp_path):
        eye_half = [[1, 0], [0, 0]]
        proj0 = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]  # |0><0| as [re,im]
        proj1 = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
        doc = {
            "dims": [2, 2],
            "measurements": {"alice": [[proj0, proj1]], "bob": [[proj0, proj1]]},
            "coefficients": [
                {"a": 0, "b": 0, "x": 0, "y": 0, "c": 1.0},
                {"a": 1, "b": 1, "x": 0, "y": 0, "c": 1.0},
                {"a": 0, "b": 1, "x": 0, "y": 0, "c": -1.0},
                {"a": 1, "b": 0, "x": 0, "y": 0, "c": -1.0},
            ],
        }
        path = tmp_path / "zz.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, ["bound", "--scenario", str(path), "--target", "1.0"])
        assert code == 0
        parsed = json.loads(out)
        assert parsed["local_bound"] == pytest.approx(1.0)  # sigma_z x sigma_z correlator
        assert parsed["spectrum"][0] == pytest.approx(1.0, abs=1e-12)

    def test_malformed_json_exits_1(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, ["bound", "--scenario", str(path), "--value", "0.1"])
        assert code == 1
        assert "input error" in err

    def test_both_forms_exits_1(self, capsys, tmp_path):
        path = tmp_path / "both.json"
        path.write_text(json.dumps({"measurements": {}, "correlation": {}}))
        code, _, _ = run(capsys, ["bound", "--scenario", str(path), "--value", "0.1"])
        assert code == 1

    def test_missing_file_exits_1(self, capsys):
        code, _, _ = run(capsys, ["bound", "--scenario", "/nonexistent.json", "--value", "0.1"])
        assert code == 1

    def test_no_operator_source_exits_1(self, capsys):
        code, _, _ = run(capsys, ["bound", "--value", "0.1"])
        assert code == 1


class TestCurveCommands:
    def test_chsh_curve_values_and_determinism(self, capsys):
        argv = ["chsh-curve", "--v", "0.001", "--c-grid", "0:4:9"]
        code, out1, _ = run(capsys, argv)
        assert code == 0
        code, out2, _ = run(capsys, argv)
        assert out1 == out2  # byte-identical across runs
        header, rows = parse_csv(out1)
        assert header == ["C", "lambda1", "E_R", "P_R", "feasible"]
        assert rows[0][4] == "false"  # C = 0 infeasible for any v > 0
        last = rows[-1]
        assert float(last[0]) == 4.0
        assert float(last[2]) == pytest.approx(2 * 2.001 / np.sqrt(8.0) - 1, abs=1e-10)

    def test_steering_curve(self, capsys):
        code, out, _ = run(capsys, ["steering-curve", "--v", "0.01", "--ca-grid", "0:2:5"])
        assert code == 0
        header, rows = parse_csv(out)
        assert header[0] == "C_A"
        assert rows[0][4] == "false"
        assert rows[-1][4] == "true"

    def test_heatmap_corner(self, capsys):
        code, out, _ = run(
            capsys, ["heatmap", "--v", "0.001", "--ca-grid", "0:2:3", "--cb-grid", "0:2:3"]
        )
        assert code == 0
        header, rows = parse_csv(out)
        cells = {(float(r[0]), float(r[1])): r for r in rows}
        assert cells[(2.0, 0.0)][5] == "false"
        assert cells[(2.0, 2.0)][5] == "true"

    def test_bad_grid_exits_1(self, capsys):
        code, _, err = run(capsys, ["chsh-curve", "--v", "0.001", "--c-grid", "nope"])
        assert code == 1
        assert "grid" in err


class TestMinResources:
    def test_endpoint_row_and_ordering(self, capsys):
        v_max = TSIRELSON - 2.0
        code, out, _ = run(capsys, ["min-resources", "--v-grid", f"0.001:{v_max}:20"])
        assert code == 0
        _, rows = parse_csv(out)
        feasible = [r for r in rows if r[5] == "true"]
        assert feasible
        last = feasible[-1]
        assert float(last[1]) == pytest.approx(3.0, abs=1e-9)
        assert float(last[2]) == pytest.approx(1.0, abs=1e-9)
        assert float(last[4]) == pytest.approx(1.0, abs=1e-9)
        for r in feasible:
            p_r, c_r, d_r, e_r = map(float, r[1:5])
            assert p_r >= c_r - 1e-9
            assert c_r == d_r == e_r


class TestRelentCompare:
    def test_columns(self, capsys):
        code, out, _ = run(capsys, ["relent-compare", "--v", "0.2", "--c-grid", "0:4:41"])
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["C", "log_robustness", "renyi2_purity", "relent_purity", "feasible"]
        feas = [r for r in rows if r[4] == "true"]
        infeas = [r for r in rows if r[4] == "false"]
        assert infeas and feas  # feasibility edge exists for v = 0.2
        s_p = [float(r[3]) for r in feas]
        assert all(b < a for a, b in zip(s_p, s_p[1:]))  # strictly decreasing
        # the other two columns dip: interior minimum below both endpoints
        for col in (1, 2):
            vals = [float(r[col]) for r in feas]
            assert min(vals) < vals[0] and min(vals) < vals[-1]


class TestI3322Check:
    def test_skip_cr(self, capsys):
        code, out, _ = run(capsys, ["i3322-check", "--skip-cr"])
        assert code == 0
        doc = json.loads(out)
        assert doc["pass"] is True
        assert doc["P_R_delta"] <= 5e-4
        assert doc["E_R_delta"] <= 1e-3
        assert "C_R" not in doc
