import json
from importlib import resources

import pytest
import yaml

from rmspace.cli import main
from rmspace.scenario import Report, ScenarioError, emit_report, parse_scenario, run

SCENARIOS = resources.files("rmspace") / "scenarios"
SHIPPED = sorted(p.name for p in SCENARIOS.iterdir() if p.name.endswith(".yaml"))

MINIMAL = """
space: {probs: [1.0]}
base: {kind: euclidean, dim: 1}
objects:
  start: {point: [0.0]}
task:
  kind: solve-banach
  operator: {affine: {A: [0.5], b: [1.0]}}
  alpha: [0.5]
  x0: start
"""


def scenario_path(name):
    return str(SCENARIOS / name)


def write(tmp_path, text, name="s.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestParse:
    def test_minimal(self):
        scen = parse_scenario(MINIMAL)
        assert scen.kind == "solve-banach"

    def test_probs_must_sum_to_one(self):
        with pytest.raises(ScenarioError, match="probs must sum to 1"):
            parse_scenario(MINIMAL.replace("[1.0]}", "[0.9]}", 1))

    def test_unknown_task_lists_valid(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario(MINIMAL.replace("solve-banach", "solve-everything"))
        msg = str(info.value)
        for kind in ("solve-banach", "solve-power", "ekeland", "caristi", "verify"):
            assert kind in msg

    def test_yaml_error_has_position(self):
        with pytest.raises(ScenarioError, match=r"line \d+"):
            parse_scenario("space: [1, 2\nbase: {")

    def test_unresolved_name_has_path(self):
        with pytest.raises(ScenarioError, match="task.x0"):
            parse_scenario(MINIMAL.replace("x0: start", "x0: nowhere"))

    def test_section_length(self):
        with pytest.raises(ScenarioError, match="objects.start"):
            parse_scenario(MINIMAL.replace("point: [0.0]", "point: [0.0, 1.0]"))

    @pytest.mark.parametrize("name", SHIPPED)
    def test_round_trip(self, name):
        scen = parse_scenario((SCENARIOS / name).read_text())
        again = parse_scenario(scen.to_yaml())
        assert again == scen
        assert parse_scenario(again.to_yaml()) == again


class TestRun:
    def test_banach_example(self):
        rep = run(parse_scenario((SCENARIOS / "banach-affine.yaml").read_text()))
        assert rep.status == "ok"
        assert [s[0] for s in rep.solution] == pytest.approx([2.0, 0.8], abs=1e-8)

    def test_nadler_membership(self):
        rep = run(parse_scenario((SCENARIOS / "nadler-branch.yaml").read_text()))
        assert rep.status == "ok"
        assert rep.certificate["membership"] is True
        assert max(rep.residual) < 1e-6

    def test_verify_passes(self):
        rep = run(parse_scenario((SCENARIOS / "verify-finite.yaml").read_text()))
        assert rep.status == "ok"
        assert rep.checks and all(c["ok"] for c in rep.checks)

    def test_non_contraction_is_error(self):
        scen = parse_scenario(MINIMAL.replace("A: [0.5]", "A: [2.0]"))
        rep = run(scen)
        assert rep.status == "error"
        assert rep.exit_code == 1

    def test_json_round_trip(self):
        rep = run(parse_scenario(MINIMAL))
        doc = emit_report(rep, "json")
        assert Report.from_dict(json.loads(doc)) == rep
        assert json.loads(doc)["status"] == "ok"

    def test_text_report(self):
        rep = run(parse_scenario(MINIMAL))
        text = emit_report(rep, "text", (1.0,))
        assert "status" in text and "ok" in text


class TestMain:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_exit_zero(self, name, capsys):
        assert main(["run", scenario_path(name)]) == 0
        out = capsys.readouterr().out
        assert json.loads(out)["status"] == "ok"

    @pytest.mark.parametrize("name", ["banach-affine.yaml", "power-nilpotent.yaml", "nadler-branch.yaml"])
    def test_byte_identical(self, name, capsys):
        main(["run", scenario_path(name)])
        first = capsys.readouterr().out
        main(["run", scenario_path(name)])
        assert capsys.readouterr().out == first

    def test_violation_exit(self, tmp_path, capsys):
        path = write(tmp_path, MINIMAL.replace("A: [0.5]", "A: [2.0]"))
        assert main(["run", path]) == 1
        captured = capsys.readouterr()
        assert json.loads(captured.out)["status"] == "error"
        assert "status error" in captured.err

    def test_parse_error_exit(self, tmp_path, capsys):
        path = write(tmp_path, MINIMAL.replace("[1.0]}", "[0.9]}", 1))
        assert main(["run", path]) == 2
        assert "probs must sum to 1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.yaml")]) == 2

    def test_usage_error(self, capsys):
        assert main(["frobnicate"]) == 2
        assert main([]) == 2

    def test_verify_command(self, capsys):
        assert main(["verify", scenario_path("banach-affine.yaml"), "--format", "text"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_tol_override(self, capsys):
        assert main(["run", scenario_path("banach-affine.yaml"), "--tol", "1e-4"]) == 0
        loose = json.loads(capsys.readouterr().out)
        main(["run", scenario_path("banach-affine.yaml")])
        tight = json.loads(capsys.readouterr().out)
        assert loose["iterations"] < tight["iterations"]

    def test_timing_opt_in(self, capsys):
        main(["run", scenario_path("banach-affine.yaml")])
        assert "timing" not in json.loads(capsys.readouterr().out)
        main(["run", scenario_path("banach-affine.yaml"), "--timing"])
        assert "timing" in json.loads(capsys.readouterr().out)

    def test_hull(self, tmp_path, capsys):
        doc = yaml.safe_load(MINIMAL)
        doc["objects"]["G"] = {"set": [[0.0], [1.0]]}
        path = write(tmp_path, yaml.safe_dump(doc))
        assert main(["hull", path, "--set", "G", "--format", "json"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["size"] == 2

    def test_hull_unknown_set(self, capsys):
        assert main(["hull", scenario_path("banach-affine.yaml"), "--set", "missing"]) == 2
