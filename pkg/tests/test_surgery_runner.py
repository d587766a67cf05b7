"""
Tests for simulated execution of surgery plans.
"""
import numpy as np
import pytest

from src.config import Settings
from src.exceptions import CertificationError, EigenSpecError
from src.models.pauli import LogicalPauliProduct, PauliOperator
from src.models.plan import Certification, MeasurementRequest
from src.services import stabilizer_simulator as stabsim
from src.services import surgery_runner as runner
from src.services.surgery_planner import plan, twist_free_decompose
from tests.fixtures.sample_codes import CodeFixtures


@pytest.fixture
def settings():
    return Settings(distance_cap=6)


def _plan(code, products, settings, mode="disjoint", **kwargs):
    request = MeasurementRequest(tuple(LogicalPauliProduct.parse(p) for p in products), mode)
    return plan(code, request, settings, seed=1, **kwargs)


@pytest.fixture
def shor_plan(settings):
    return _plan(CodeFixtures.shor(), ["Z0"], settings)


def _value(result, transcript, text):
    op = runner.logical_operator(result.basis, LogicalPauliProduct.parse(text))
    return stabsim.expectation(transcript["state"], op)


class TestSpecs:
    """Eigen-spec parsing."""

    def test_mapping_and_pairs(self):
        parsed = runner.parse_spec({"Z0": 1, "X1 X2": -1})
        assert [(str(p), s) for p, s in parsed] == [("Z0", 1), ("X1 X2", -1)]
        assert runner.parse_spec([(LogicalPauliProduct.parse("Y0"), -1)])[0][1] == -1

    def test_bad_sign(self):
        with pytest.raises(EigenSpecError):
            runner.parse_spec({"Z0": 0})

    def test_fill_spare_logicals(self):
        """Unmentioned indices in ``fill`` start with Z = +1."""
        basis = _plan(CodeFixtures.shor(), ["Z0"], Settings(distance_cap=6)).basis
        assert len(runner.logical_spec(basis, {}, fill=[0])) == 1
        assert len(runner.logical_spec(basis, {"X0": 1}, fill=[0])) == 1


class TestSingleProduct:
    """Measuring one product and returning to the original code."""

    @pytest.mark.parametrize("sign", [1, -1])
    def test_deterministic_outcome(self, shor_plan, sign):
        """A Z eigenstate reads its eigenvalue and keeps it."""
        transcript = runner.run_surgery(shor_plan, {"Z0": sign}, seed=0)
        assert transcript["results"] == {"Z0": sign}
        assert transcript["restored"]
        assert all(w["consistent"] for w in transcript["windows"])
        assert _value(shor_plan, transcript, "Z0") == sign

    @pytest.mark.parametrize("seed", range(4))
    def test_random_outcome_matches_final_state(self, shor_plan, seed):
        """From an X eigenstate the outcome is random and the final state agrees with it."""
        transcript = runner.run_surgery(shor_plan, {"X0": 1}, seed=seed)
        outcome = transcript["results"]["Z0"]
        assert outcome in (1, -1)
        assert _value(shor_plan, transcript, "Z0") == outcome
        assert transcript["restored"]

    @pytest.mark.slow
    def test_hundred_repetitions(self, shor_plan):
        """Z0 on a Z0 = +1 Shor state reads +1 every time and restores the code."""
        assert shor_plan.measure_code.k == 0
        assert shor_plan.certifications["k_accounting"]
        assert shor_plan.certifications["distance"]
        for seed in range(100):
            transcript = runner.run_surgery(shor_plan, {"Z0": 1}, seed=seed)
            assert transcript["results"] == {"Z0": 1}
            assert transcript["restored"]
            assert _value(shor_plan, transcript, "Z0") == 1

    def test_forced_branching(self, settings):
        """Branch, measure and unbranch windows run in order and undo their ancillas."""
        result = _plan(CodeFixtures.shor(), ["Z0"], settings, force_branch=True)
        transcript = runner.run_surgery(result, {"Z0": -1}, seed=3)
        assert [w["name"] for w in transcript["windows"]] == ["branch", "measure", "unbranch"]
        assert transcript["results"] == {"Z0": -1}
        assert transcript["restored"]
        assert transcript["state"].n == 9

    def test_two_term_product(self, settings):
        """Z0 Z1 from an X0 X1 eigenstate: random outcome, X0 X1 survives."""
        result = _plan(CodeFixtures.hgp_cycle3(), ["Z0 Z1"], settings)
        transcript = runner.run_surgery(result, {"X0": 1, "X1": 1}, seed=5)
        outcome = transcript["results"]["Z0 Z1"]
        assert _value(result, transcript, "Z0 Z1") == outcome
        assert _value(result, transcript, "X0 X1") == 1
        assert transcript["restored"]

    def test_json_view(self, shor_plan):
        """The transcript drops the state and lists final generators."""
        data = runner.transcript_to_json(runner.run_surgery(shor_plan, {"Z0": 1}))
        assert "state" not in data
        assert len(data["final_generators"]) == 9
        assert data["results"] == {"Z0": 1}

    def test_uncertified_plan_refused(self, shor_plan):
        """A failed certification blocks simulation unless explicitly allowed."""
        shor_plan.certifications["distance"] = Certification("fail", "planted")
        with pytest.raises(CertificationError) as exc:
            runner.run_surgery(shor_plan, {"Z0": 1})
        assert "distance" in exc.value.failed
        assert runner.run_surgery(shor_plan, {"Z0": 1}, allow_uncertified=True)["results"] == {"Z0": 1}

    def test_incomplete_spec(self, shor_plan):
        with pytest.raises(EigenSpecError):
            runner.run_surgery(shor_plan, {})


class TestDirectMeasurement:
    """Measuring logicals straight on the tableau."""

    def test_classes(self, shor_plan):
        """Z0 is deterministic on a Z eigenstate; X0 is not."""
        basis = shor_plan.basis
        state = stabsim.prepare_codespace(shor_plan.code, runner.logical_spec(basis, {"Z0": -1}))
        products = [LogicalPauliProduct.parse("Z0"), LogicalPauliProduct.parse("X0")]
        state, classes = runner.direct_measurement(basis, state, products, {"X0": -1})
        assert classes == {"Z0": -1, "X0": None}
        assert stabsim.expectation(state, runner.logical_operator(basis, products[1])) == -1


class TestTwistFreeGadgets:
    """Gadgets on bare qubits against direct measurement."""

    @staticmethod
    def _bare_state(data_ops, n):
        """Data qubits stabilized by ``data_ops``, A in |0>, B in |Y>."""
        generators = list(data_ops)
        generators.append(PauliOperator.from_letters(n, {n - 2: "Z"}))
        generators.append(PauliOperator.from_letters(n, {n - 1: "Y"}))
        return stabsim.StabilizerState.from_generators(generators)

    @pytest.mark.parametrize("data", ["X", "Y", "Z", "-Y"])
    def test_y_product_agrees(self, data):
        """Y0 through its gadget matches measuring Y0 directly, whatever the input."""
        gadget = twist_free_decompose(LogicalPauliProduct.parse("Y0"))
        sign = "-" if data.startswith("-") else "+"
        state = self._bare_state([PauliOperator.from_letters(3, {0: data[-1]}, sign)], 3)
        for seed in range(3):
            assert runner.twist_free_agrees(gadget, state, np.random.default_rng(seed))

    def test_even_product_agrees(self):
        """X0 Z1 on a random two-qubit state, with the catalyst unused."""
        gadget = twist_free_decompose(LogicalPauliProduct.parse("X0 Z1"), ancilla_a=2, ancilla_b=3)
        rng = np.random.default_rng(11)
        data = stabsim.random_stabilizer_state(2, rng)
        ops = [g.extended(4) for g in data.generators()]
        state = self._bare_state(ops, 4)
        assert gadget.ancilla_b is None
        assert runner.twist_free_agrees(gadget, state, rng)

    def test_forced_outcomes(self):
        """On a Y0 = -1 input the reconstructed outcome is -1 for every forced branch."""
        gadget = twist_free_decompose(LogicalPauliProduct.parse("Y0"))
        for forces in [(1, 1, 1), (-1, 1, -1), (1, -1, -1), (-1, -1, 1)]:
            state = self._bare_state([PauliOperator.from_letters(3, {0: "Y"}, "-")], 3)
            result = runner.run_twist_free(gadget, state, forces=forces)
            assert result["outcome"] == -1
            assert stabsim.expectation(result["state"], PauliOperator.from_letters(3, {2: "Y"})) == 1

    def test_random_products(self):
        """100 random products on random data states agree with direct measurement."""
        rng = np.random.default_rng(7)
        odd = 0
        for _ in range(100):
            k = int(rng.integers(1, 4))
            letters = {i: "XYZ"[int(rng.integers(3))] for i in range(k) if rng.random() < 0.75} or {0: "Y"}
            gadget = twist_free_decompose(LogicalPauliProduct(letters), ancilla_a=k, ancilla_b=k + 1)
            data = stabsim.random_stabilizer_state(k, rng)
            state = self._bare_state([g.extended(k + 2) for g in data.generators()], k + 2)
            assert runner.twist_free_agrees(gadget, state, rng), str(gadget.product)
            if gadget.parity:
                odd += 1
                result = runner.run_twist_free(gadget, state.copy(), rng)
                catalyst = PauliOperator.from_letters(k + 2, {k + 1: "Y"})
                assert stabsim.expectation(result["state"], catalyst) == 1
        assert odd > 0


class TestCommutingSet:
    """The staged pipeline on two Shor blocks."""

    def test_reconstructed_outcomes(self, settings):
        """X0 Z1 and Z0 X1 are read off their split products and the code is restored."""
        result = _plan(CodeFixtures.shor_pair(), ["X0 Z1", "Z0 X1"], settings, mode="commuting")
        transcript = runner.run_surgery(result, {"X0 Z1": 1, "Z0 X1": -1}, seed=2)
        assert transcript["results"] == {"X0 Z1": 1, "Z0 X1": -1}
        assert transcript["restored"]
        assert transcript["catalysts_unchanged"]
        assert [s["stage"] for s in transcript["stages"]] == result.stage_labels
