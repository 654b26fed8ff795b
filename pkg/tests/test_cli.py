import json

import numpy as np
import pytest
from typer.testing import CliRunner

from daugavet.main import app, run
from daugavet.models.reports import plain
from daugavet.services.space_service import SpaceService
from daugavet.utils.io_utils import dump_json

runner = CliRunner()

ROTATION = [[0, -1], [1, 0]]


@pytest.fixture
def plane(write_json):
    return write_json("plane.json", {"lp": {"p": 2, "dim": 2}})


@pytest.fixture
def rotation_on(write_json):
    def make(space_descriptor, name="op.json"):
        return write_json(name, {"matrix": ROTATION, "space": space_descriptor})

    return make


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


class TestOutput:
    def test_norm(self, plane):
        result = invoke("space", "norm", "--space", plane, "--x", "[3, -4]")
        assert result.exit_code == 0
        body = json.loads(result.stdout)
        assert body["norm"] == pytest.approx(5.0)
        assert body["provenance"]["norm"] == "exact"

    def test_summary_is_deterministic(self, rotation_on):
        op = rotation_on({"lp": {"p": 2, "dim": 2}})
        first = invoke("nr", "summary", "--op", op, "--budget", 8)
        second = invoke("nr", "summary", "--op", op, "--budget", 8)
        assert first.exit_code == 0
        assert first.stdout == second.stdout
        assert json.loads(first.stdout)["radius"] == pytest.approx(0.0, abs=1e-12)

    def test_query(self):
        result = invoke("cantor", "grid", "-k", 1, "-m", 27, "--query", "gap_nodes")
        assert result.exit_code == 0
        assert result.stdout.strip() == "8"

    def test_csv(self):
        result = invoke("cantor", "grid", "--format", "csv")
        lines = result.stdout.strip().splitlines()
        assert lines[0] == "m,k,cantor_nodes,gap_nodes,coverage,exact"
        assert lines[1].startswith("27,1,20,8,")

    def test_out_file(self, tmp_path):
        target = tmp_path / "reports" / "grid.json"
        result = invoke("cantor", "grid", "--out", target)
        assert result.exit_code == 0
        assert result.stdout == ""
        assert json.loads(target.read_text())["cantor_nodes"] == 20

    def test_space_entry_resolved_relative_to_operator(self, plane, write_json):
        op = write_json("relative.json", {"matrix": ROTATION, "space": plane.name})
        result = invoke("lie", "verify", "--op", op, "--budget", 4)
        assert result.exit_code == 0
        assert json.loads(result.stdout)["isometric"] == "yes"


def strict_loads(text):
    def reject(constant):
        pytest.fail(f"output contains the non-standard JSON constant {constant}")

    return json.loads(text, parse_constant=reject)


class TestStrictJson:
    def test_plain_maps_non_finite_to_none(self):
        assert plain(float("inf")) is None
        assert plain(np.float64("nan")) is None
        assert plain(complex(1.0, float("-inf"))) == [1.0, None]
        assert plain([1.5, np.inf]) == [1.5, None]

    def test_dump_refuses_non_finite(self):
        with pytest.raises(ValueError):
            dump_json({"x": float("inf")})

    @pytest.mark.parametrize("descriptor", [
        {"lp": {"p": 2, "dim": 2}},
        {"lp": {"p": 3, "dim": 3}},
        {"field": "complex", "descriptor": {"lp": {"p": 1, "dim": 2}}},
        {"field": "complex", "descriptor": {"lp": {"p": 2, "dim": 2}}},
        {"sum": {"kind": "l1", "parts": [{"lp": {"p": 2, "dim": 2}}, {"lp": {"p": 1, "dim": 2}}]}},
    ], ids=["l2", "l3", "complex-l1", "complex-l2", "l1-sum-with-l2"])
    def test_space_dual(self, write_json, descriptor):
        path = write_json("space.json", descriptor)
        result = invoke("space", "dual", "--space", path)
        assert result.exit_code == 0
        body = strict_loads(result.stdout)
        assert body["extreme_count"] is None
        assert body["dim"] in (2, 3, 4)

    def test_space_pairs_on_complex_plane(self, write_json):
        path = write_json("space.json", {"field": "complex", "descriptor": {"lp": {"p": 2, "dim": 2}}})
        result = invoke("space", "pairs", "--space", path, "--budget", 4)
        assert result.exit_code == 0
        body = strict_loads(result.stdout)
        assert body["count"] == len(body["xs"]) > 0
        assert body["provenance"]["xs"] == "sampled"


class TestExitCodes:
    def test_construction_error(self, write_json, capsys):
        bad = write_json("bad.json", {"lp": {"p": 0.5, "dim": 2}})
        assert run(["space", "dual", "--space", str(bad)]) == 2
        assert "error code=2 kind=construction" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run(["space", "dual", "--space", str(tmp_path / "absent.json")]) == 2

    def test_usage_error(self, capsys):
        assert run(["space", "norm", "--no-such-option"]) == 2
        assert "kind=usage" in capsys.readouterr().err

    def test_capability_error(self, write_json, capsys):
        smooth = write_json("l3.json", {"lp": {"p": 3, "dim": 2}})
        assert run(["lie", "basis", "--space", str(smooth)]) == 3
        assert "error code=3" in capsys.readouterr().err

    def test_refuted_isometry(self, rotation_on, capsys):
        op = rotation_on({"lp": {"p": "inf", "dim": 2}})
        assert run(["lie", "verify", "--op", str(op)]) == 4
        captured = capsys.readouterr()
        assert json.loads(captured.out)["isometric"] == "no"
        assert "error code=4" in captured.err

    def test_bump_needs_refinement(self, capsys):
        assert run(["cantor", "bump", "--lo", "0.30", "--hi", "0.34"]) == 4
        capsys.readouterr()
        assert run(["cantor", "bump", "--lo", "0.30", "--hi", "0.34", "--refine"]) == 0
        assert json.loads(capsys.readouterr().out)["m"] == 729

    def test_precondition_witness(self, write_json, capsys):
        op = write_json("stretch.json", {"matrix": [[2, 0], [0, 1]], "space": {"lp": {"p": 2, "dim": 2}}})
        other = write_json("l1.json", {"lp": {"p": 1, "dim": 2}})
        assert run(["sum", "extend", "--op", str(op), "--with", str(other), "--mode", "isometry"]) == 4
        assert "witness=[1.0, 0.0]" in capsys.readouterr().err

    def test_unexpected_failure_is_one_line(self, plane, monkeypatch, capsys):
        def failing(space, budget=None):
            raise ArithmeticError("linear program failed\nstatus 4")

        monkeypatch.setattr(SpaceService, "pairs_report", staticmethod(failing))
        assert run(["space", "pairs", "--space", str(plane)]) == 1
        err = capsys.readouterr().err.strip()
        assert err.count("\n") == 0
        assert err.startswith("error code=1 kind=internal")
        assert "ArithmeticError: linear program failed status 4" in err
