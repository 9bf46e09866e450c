import json
import subprocess
import sys

import pytest

from condatom.cli import main, run
from condatom.scenario import parse_scenario

LEBESGUE_SCENARIO = json.dumps(
    {
        "space": {"fibers": [{"weight": "1", "breakpoints": ["0", "1"], "densities": ["1"]}]},
        "sets": {"A": [{"intervals": [["1/2", "1"]], "picks": []}]},
        "h": ["1/2"],
    }
)

ATOM_SCENARIO = json.dumps(
    {
        "space": {
            "fibers": [
                {
                    "weight": "1",
                    "breakpoints": ["0", "1/2", "1"],
                    "densities": ["1", "0"],
                    "atoms": [{"location": "1/2", "weight": "1/2"}],
                }
            ]
        }
    }
)


def invoke(args):
    return subprocess.run(
        [sys.executable, "-m", "condatom.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(LEBESGUE_SCENARIO)
    return path


class TestRunDispatch:
    def test_check_atomless(self):
        data = run("check", parse_scenario(LEBESGUE_SCENARIO))
        assert data["verdict"] == "atomless"
        assert data["status"] == "pass"

    def test_check_with_atom_still_passes_its_checks(self):
        data = run("check", parse_scenario(ATOM_SCENARIO))
        assert data["verdict"] == "atom"
        assert data["witness"]["location"] == "1/2"
        assert data["status"] == "pass"  # the verdict is data, not a failure

    def test_split_emits_half_interval(self):
        data = run("split", parse_scenario(LEBESGUE_SCENARIO))
        # the default C is the whole space, h = 1/2
        assert data["result"] == [{"intervals": [["0", "1/2"]], "picks": []}]
        assert data["checks"] == {"subset": True, "exact-proportion": True}

    def test_scan_reports_level(self):
        data = run("scan", parse_scenario(LEBESGUE_SCENARIO))
        assert data["level"] == "3/4"
        assert data["fibers"] == [0]
        assert data["status"] == "pass"

    def test_family_and_uniform(self):
        sc = parse_scenario(LEBESGUE_SCENARIO)
        fam = run("family", sc, depth=2)
        assert fam["checks"] == {"exact-levels": True, "nested": True}
        assert fam["levels"]["1/2"] == [{"intervals": [["0", "1/2"]], "picks": []}]
        uni = run("uniform", sc, count=16)
        assert uni["checks"]["level-masses-exact"] is True

    def test_densities_requires_measures(self):
        from condatom.cli import InputError

        with pytest.raises(InputError, match="measures"):
            run("densities", parse_scenario(LEBESGUE_SCENARIO))

    def test_selftest_small(self):
        data = run("selftest", None, seed=7, count=2)
        assert data["status"] == "pass"
        assert len(data["criteria"]) == 9


class TestCommandLine:
    def test_check_exit_zero(self, scenario_file):
        res = invoke(["check", "--scenario", str(scenario_file)])
        assert res.returncode == 0
        assert json.loads(res.stdout)["verdict"] == "atomless"

    def test_missing_scenario_is_input_error(self):
        res = invoke(["check"])
        assert res.returncode == 2
        assert "needs --scenario" in res.stderr

    def test_invalid_scenario_is_input_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"space": {"fibers": []}}')
        res = invoke(["check", "--scenario", str(bad)])
        assert res.returncode == 2
        assert "at least one fiber" in res.stderr

    def test_atom_obstruction_is_input_error(self, tmp_path):
        path = tmp_path / "atom.json"
        path.write_text(ATOM_SCENARIO)
        res = invoke(["family", "--scenario", str(path), "--depth", "1"])
        assert res.returncode == 2
        assert "point mass" in res.stderr

    def test_out_file_and_byte_determinism(self, scenario_file, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for out in (out1, out2):
            res = invoke(["split", "--scenario", str(scenario_file), "--out", str(out)])
            assert res.returncode == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_selftest_reports_are_byte_identical(self, tmp_path):
        runs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            res = invoke(["selftest", "--seed", "11", "--count", "2", "--out", str(out)])
            assert res.returncode == 0
            runs.append(out.read_bytes())
        assert runs[0] == runs[1]


def test_main_returns_exit_code(scenario_file, capsys):
    assert main(["check", "--scenario", str(scenario_file)]) == 0
    out = capsys.readouterr().out
    assert json.loads(out)["status"] == "pass"
