"""
Tests for detector models, fault distance and the model audits.
"""
import pytest

from src.config import Settings
from src.exceptions import NonLogicalFaultError, UnknownFaultError
from src.models.deformation import as_deformed
from src.models.pauli import LogicalPauliProduct
from src.models.plan import MeasurementRequest
from src.models.spacetime import Schedule
from src.services import spacetime
from src.services.surgery_planner import plan
from tests.fixtures.sample_codes import CodeFixtures


@pytest.fixture(scope="module")
def sticker_plan():
    """Shor with its Z logical forced through one sticker, then measured."""
    request = MeasurementRequest((LogicalPauliProduct.parse("Z0"),), "disjoint")
    return plan(CodeFixtures.shor(), request, Settings(distance_cap=6), seed=1, force_branch=True)


@pytest.fixture(scope="module")
def branch_model(sticker_plan):
    return spacetime.window_model(sticker_plan, "branch", rounds=3)


@pytest.fixture
def settings():
    return Settings(fault_cap=4)


class TestSchedule:
    """Window timing."""

    def test_branch_schedule(self):
        schedule = spacetime.schedule_for(CodeFixtures.shor(), 3)
        assert (schedule.t_i, schedule.t_o, schedule.rounds) == (1, 4, 3)

    def test_unbranch_schedule(self):
        schedule = spacetime.schedule_for(CodeFixtures.shor(), 2, padding=2, kind="unbranch")
        assert (schedule.t_i, schedule.t_o, schedule.last_round) == (0, 2, 4)

    @pytest.mark.parametrize("kwargs", [{"t_i": 1, "t_o": 1}, {"t_i": 0, "t_o": 2, "padding": 0},
                                        {"t_i": 0, "t_o": 2, "kind": "merge"}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            Schedule(**kwargs)

    def test_needs_a_round(self):
        with pytest.raises(ValueError):
            spacetime.schedule_for(CodeFixtures.shor(), 0)


class TestBranchWindow:
    """Detectors and faults of the sticker window."""

    def test_detector_count(self, sticker_plan, branch_model):
        """Every check repeats; all but the random-first vertex checks also compare at t_i and t_o."""
        after = sticker_plan.branch_code
        random_first = after.select(provenance="branch", role="vertex")
        checks = len(after.checks)
        assert len(random_first) == 3
        assert len(branch_model.detectors) == checks * 2 + 2 * (checks - len(random_first))
        key = random_first[0].key
        assert f"{key}^1" not in branch_model.detectors
        assert f"{key}^2" in branch_model.detectors

    def test_families(self, branch_model):
        """Changed X checks and new face checks get deformation detectors."""
        counts = branch_model.family_counts()
        assert counts["deform"] > 0
        assert branch_model.detectors["s0^1"].family == "deform"
        assert branch_model.detectors["s2^1"].family == "repeat"

    def test_trivial_deformation_only_repeats(self):
        """Nothing changes, so every detector compares a check with itself."""
        code = as_deformed(CodeFixtures.shor())
        model = spacetime.build_branch_detectors(code, spacetime.schedule_for(code, 2), before=code)
        assert set(model.family_counts()) == {"repeat"}

    def test_measurement_fault_syndrome(self, branch_model):
        """A flipped outcome lights the two detectors sharing it."""
        assert spacetime.syndrome_of(["M[s2]@2"], branch_model) == {"s2^2", "s2^3"}

    def test_syndromes_cancel(self, branch_model):
        """The same fault twice is invisible."""
        assert spacetime.syndrome_of(["X0@2", "X0@2"], branch_model) == set()

    def test_unknown_fault(self, branch_model):
        with pytest.raises(UnknownFaultError):
            spacetime.syndrome_of(["M[nope]@1"], branch_model)

    def test_observables(self, sticker_plan, branch_model):
        """Both logicals of the branched code plus the frame of the single leaf."""
        logicals = [o for o in branch_model.observables if o.startswith("L")]
        assert len(logicals) == 2 * sticker_plan.branch_code.k
        assert branch_model.observables[-1] == "frame[0]"

    def test_report(self, branch_model):
        report = spacetime.model_report(branch_model)
        assert report["detectors"] == len(branch_model.detectors)
        assert report["space_faults"] + report["time_faults"] == report["faults"]
        assert report["schedule"] == {"kind": "branch", "t_i": 1, "t_o": 4, "padding": 1}


class TestFaultDistance:
    """Bounded search for undetectable logical faults."""

    def test_three_rounds(self, branch_model, settings):
        result = spacetime.fault_distance(branch_model, settings=settings)
        assert result["distance"] == 3
        assert result["certified"] is True
        assert result["outside_stabilizer_span"] is True
        assert spacetime.syndrome_of(result["witness"], branch_model) == set()

    def test_time_only(self, branch_model, settings):
        """Repeated misreads of a vertex check flip the frame after three rounds."""
        result = spacetime.fault_distance(branch_model, mode="time-only", settings=settings)
        assert result["distance"] == 3
        assert all(w.startswith("M[") for w in result["witness"])

    def test_single_round(self, sticker_plan, settings):
        """With one round a vertex check outcome is never repeated."""
        model = spacetime.window_model(sticker_plan, "branch", rounds=1)
        result = spacetime.fault_distance(model, settings=settings)
        assert result["distance"] == 1
        assert result["witness"][0].startswith("M[A[")

    def test_cap(self, branch_model, settings):
        """Nothing up to the cap is inconclusive, not a pass."""
        result = spacetime.fault_distance(branch_model, cap=2, settings=settings)
        assert result["distance"] is None
        assert result["exceeds_cap"] is True
        assert result["status"] == "inconclusive"

    def test_bad_mode(self, branch_model):
        with pytest.raises(ValueError):
            spacetime.fault_distance(branch_model, mode="space-only")


class TestDecouple:
    """Moving syndrome-free fault sets to one timestep."""

    def test_witness_decouples(self, branch_model, settings):
        witness = spacetime.fault_distance(branch_model, settings=settings)["witness"]
        result = spacetime.decouple(witness, branch_model)
        assert result["certified"]
        assert result["timestep"] == 1
        assert all(f.endswith("@1") for f in result["space"])

    def test_pair_generator_vanishes(self, branch_model):
        """A space fault repeated one step later, with the outcome it flips, is trivial."""
        ids = branch_model.stabilizers["pair[X0@1]"]
        assert spacetime.in_stabilizer_span(ids, branch_model)
        result = spacetime.decouple(ids, branch_model)
        assert result["space"] == [] and result["time"] == []
        assert result["certified"]

    def test_detected_fault_rejected(self, branch_model):
        with pytest.raises(NonLogicalFaultError):
            spacetime.decouple(["M[s2]@2"], branch_model)


class TestAudits:
    """Determinism, completeness and stabilizer audits."""

    @pytest.mark.parametrize("window", ["branch", "measure", "unbranch"])
    def test_windows_pass(self, sticker_plan, window):
        model = spacetime.window_model(sticker_plan, window, rounds=2)
        assert spacetime.audit_determinism(model, trials=2, seed=4)["passed"]
        assert spacetime.audit_stabilizers(model)["passed"]
        assert spacetime.audit_completeness(model)["passed"]

    def test_planted_missing_detector(self, sticker_plan, branch_model):
        """Dropping a detector keeps determinism but breaks completeness."""
        key = sticker_plan.branch_code.select(provenance="branch", role="vertex")[0].key
        planted = branch_model.without([f"{key}^2"])
        assert spacetime.audit_determinism(planted, trials=2)["passed"]
        report = spacetime.audit_completeness(planted)
        assert not report["passed"]
        assert f"{key}^2" in report["failures"]

    def test_unknown_window(self, sticker_plan):
        with pytest.raises(ValueError):
            spacetime.window_model(sticker_plan, "merge")


class TestLineFormat:
    """Export and parse."""

    def test_export_parse(self, branch_model):
        parsed = spacetime.parse_model(spacetime.export_model(branch_model))
        assert parsed["header"]["kind"] == "branch"
        assert set(parsed["detectors"]) == set(branch_model.detectors)
        weight, syndrome = parsed["faults"]["M[s2]@2"]
        assert weight == 1
        assert sorted(syndrome) == ["s2^2", "s2^3"]

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError) as exc:
            spacetime.parse_model("# window kind=branch\nnonsense here\n")
        assert "line 2" in str(exc.value)
