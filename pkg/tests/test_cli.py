"""
Tests for the command line.
"""
import json

import pytest

from src import cli
from src.models.manifest import PlanFile
from src.services import spacetime
from tests.fixtures.sample_codes import CodeFixtures


def _run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = cli.main(["--out", str(out), *argv])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


@pytest.fixture
def z0_plan(tmp_path):
    """Plan file for Z0 on Shor."""
    out = tmp_path / "plan.json"
    code = cli.main(["--out", str(out), "plan", CodeFixtures.manifest_path("shor"),
                     CodeFixtures.request_path("z0"), "--seed", "1"])
    assert code == cli.EXIT_OK
    return out


def _write_code(tmp_path, hx: str, hz: str) -> str:
    (tmp_path / "hx.txt").write_text(hx)
    (tmp_path / "hz.txt").write_text(hz)
    manifest = tmp_path / "code.json"
    manifest.write_text(json.dumps({"name": "tiny", "hx": "hx.txt", "hz": "hz.txt"}))
    return str(manifest)


class TestInspect:
    """inspect"""

    def test_shor(self, tmp_path):
        code, report = _run(tmp_path, "inspect", CodeFixtures.manifest_path("shor"))
        assert code == cli.EXIT_OK
        assert report["schema"] == 1
        assert report["status"] == "pass"
        data = report["data"]
        assert (data["n"], data["k"], data["distance"]) == (9, 1, 3)
        assert data["distance_certified"] is True

    def test_hypergraph_product(self, tmp_path):
        code, report = _run(tmp_path, "inspect", CodeFixtures.manifest_path("hgp_cycle3"))
        assert code == cli.EXIT_OK
        assert (report["data"]["n"], report["data"]["k"], report["data"]["distance"]) == (18, 2, 3)

    def test_distance_over_cap(self, tmp_path):
        """A cap below the distance reports no certified value."""
        code, report = _run(tmp_path, "inspect", CodeFixtures.manifest_path("shor"), "--cap", "2")
        assert code == cli.EXIT_OK
        assert report["data"]["distance"] is None
        assert report["data"]["exceeds_cap"] is True

    def test_non_css_code(self, tmp_path):
        """X and Z checks overlapping on one qubit are a usage error."""
        manifest = _write_code(tmp_path, "1 3\n0: 0 1\n", "1 3\n0: 0 2\n")
        code, report = _run(tmp_path, "inspect", manifest)
        assert code == cli.EXIT_USAGE
        assert report["status"] == "error"
        assert report["data"]["kind"] == "CssViolationError"

    def test_missing_matrix_file(self, tmp_path):
        manifest = tmp_path / "code.json"
        manifest.write_text(json.dumps({"name": "gone", "hx": "nope.txt", "hz": "nope.txt"}))
        code, report = _run(tmp_path, "inspect", str(manifest))
        assert code == cli.EXIT_USAGE
        assert "not found" in report["data"]["error"]

    def test_cap_out_of_range(self, tmp_path):
        code, _ = _run(tmp_path, "inspect", CodeFixtures.manifest_path("shor"), "--cap", "99")
        assert code == cli.EXIT_USAGE

    def test_unknown_command(self):
        assert cli.main(["teleport"]) == cli.EXIT_USAGE


class TestPlanAndVerify:
    """plan, then verify the written plan file"""

    def test_plan_file(self, z0_plan):
        data = json.loads(z0_plan.read_text())
        assert data["schema"] == 1
        assert data["seed"] == 1
        assert data["request"]["products"] == ["Z0"]
        assert data["report"]["status"] == "pass"
        assert data["report"]["data"]["certified"] is True
        assert PlanFile.load(str(z0_plan)).request.spec == {"Z0": 1}

    def test_verify(self, tmp_path, z0_plan):
        code, report = _run(tmp_path, "verify", str(z0_plan))
        assert code == cli.EXIT_OK
        assert report["data"]["failed"] == []
        assert report["status"] in ("pass", "inconclusive")
        assert report["data"]["certifications"]["commutation"]["status"] == "pass"

    def test_malformed_request(self, tmp_path):
        request = tmp_path / "bad.json"
        request.write_text(json.dumps(CodeFixtures.request([])))
        code, report = _run(tmp_path, "plan", CodeFixtures.manifest_path("shor"), str(request))
        assert code == cli.EXIT_USAGE
        assert report["status"] == "error"

    def test_request_mode_violation(self, tmp_path):
        """Overlapping products in disjoint mode are refused by the planner."""
        request = tmp_path / "overlap.json"
        request.write_text(json.dumps(CodeFixtures.request(["Z0", "Z0 Z1"])))
        code, report = _run(tmp_path, "plan", CodeFixtures.manifest_path("hgp_cycle3"), str(request))
        assert code == cli.EXIT_USAGE
        assert report["data"]["kind"] == "RequestModeError"

    def test_unsupported_schema(self, tmp_path, z0_plan):
        data = json.loads(z0_plan.read_text())
        data["schema"] = 2
        z0_plan.write_text(json.dumps(data))
        code, _ = _run(tmp_path, "verify", str(z0_plan))
        assert code == cli.EXIT_USAGE


class TestSimulate:
    """simulate"""

    def test_spec_from_request(self, tmp_path, z0_plan):
        code, report = _run(tmp_path, "simulate", str(z0_plan), "--seed", "3")
        assert code == cli.EXIT_OK
        assert report["data"]["results"] == {"Z0": 1}
        assert report["data"]["restored"] is True

    def test_spec_file(self, tmp_path, z0_plan):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"Z0": -1}))
        code, report = _run(tmp_path, "simulate", str(z0_plan), "--spec", str(spec))
        assert code == cli.EXIT_OK
        assert report["data"]["results"] == {"Z0": -1}


class TestFaultcheck:
    """faultcheck"""

    def test_memory_window_over_cap(self, tmp_path, z0_plan):
        """Without branching the branch window is a memory window of distance 3."""
        export = tmp_path / "model.txt"
        code, report = _run(tmp_path, "faultcheck", str(z0_plan), "--window", "branch", "--cap", "2",
                            "--export", str(export))
        assert code == cli.EXIT_OK
        assert report["status"] == "inconclusive"
        data = report["data"]
        assert data["determinism"]["passed"] is True
        assert data["fault_distance"]["exceeds_cap"] is True
        assert set(data["model"]["families"]) == {"repeat"}
        parsed = spacetime.parse_model(export.read_text())
        assert len(parsed["detectors"]) == data["model"]["detectors"]
