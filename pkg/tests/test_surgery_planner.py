"""
Tests for the surgery planner.
"""
import pytest

from src.config import Settings
from src.exceptions import CertificationError, RequestModeError
from src.models.pauli import LogicalPauliProduct
from src.models.plan import MeasurementRequest
from src.services import surgery_planner as planner
from tests.fixtures.sample_codes import CodeFixtures


@pytest.fixture
def settings():
    return Settings(distance_cap=6)


@pytest.fixture
def shor():
    return CodeFixtures.shor()


def _request(products, mode="disjoint"):
    return MeasurementRequest(tuple(LogicalPauliProduct.parse(p) for p in products), mode)


def _ops(*texts):
    return [LogicalPauliProduct.parse(t).to_operator(2) for t in texts]


class TestRequestChecks:
    """Mode invariants."""

    def test_disjoint_violation(self, settings):
        with pytest.raises(RequestModeError) as exc:
            planner.plan(CodeFixtures.shor_pair(), _request(["X0 Z1", "Z1"]), settings)
        assert exc.value.pair == (0, 1)

    def test_same_or_identity_violation(self):
        """X and Z on the same logical qubit are not compatible."""
        request = _request(["X0 Z1", "Z0"], mode="same-or-identity")
        with pytest.raises(RequestModeError) as exc:
            planner.check_request(request, 2)
        assert exc.value.pair == (0, 1)

    def test_commuting_violation(self, shor, settings):
        with pytest.raises(RequestModeError) as exc:
            planner.plan(shor, _request(["X0", "Z0"], mode="commuting"), settings)
        assert exc.value.pair == (0, 1)

    def test_index_out_of_range(self, shor, settings):
        with pytest.raises(ValueError):
            planner.plan(shor, _request(["Z1"]), settings)

    def test_mode_alias(self):
        """Alternative spellings map onto canonical names."""
        assert planner.check_request(_request(["Z0"], mode="commuting-set"), 1) == "commuting"


class TestSingleProduct:
    """Measuring one logical operator."""

    def test_shor_z(self, shor, settings):
        """Z on Shor: one triangle, no branching, k drops to 0."""
        result = planner.plan(shor, _request(["Z0"]), settings, seed=1)
        assert result.certified, result.failed_certifications()
        assert result.tree.is_trivial
        assert [w.name for w in result.windows] == ["measure"]
        assert result.windows[0].rounds == 3
        assert result.measure_code.k == 0
        measurement = result.measurements[0]
        assert measurement.check_keys == ["Av[p0:0]", "Av[p0:1]", "Av[p0:2]"]
        assert measurement.sign == 1
        assert result.ledger.ancilla_qubits == 3
        assert result.ledger.within_bound
        assert result.ledger.direct_ancillas is None

    def test_forced_branching(self, shor, settings):
        """Forcing a sticker adds branch and unbranch windows around the measurement."""
        result = planner.plan(shor, _request(["Z0"]), settings, seed=1, force_branch=True)
        assert result.certified, result.failed_certifications()
        assert [w.name for w in result.windows] == ["branch", "measure", "unbranch"]
        assert result.ledger.branch_ancillas == 5
        assert result.ledger.gauge_ancillas == 3
        assert "leaf_certificate" in result.certifications
        assert result.certifications["branch_distance"].status == "pass"

    def test_single_window(self, shor):
        """The experimental schedule merges branching into the measurement window."""
        settings = Settings(distance_cap=6, experimental_single_window=True)
        result = planner.plan(shor, _request(["Z0"]), settings, seed=1, force_branch=True)
        assert [w.name for w in result.windows] == ["branch+measure", "unbranch"]

    def test_two_term_product(self, settings):
        """Z0 Z1 on [[18,2,3]] leaves one logical qubit at distance at least 3."""
        code = CodeFixtures.hgp_cycle3()
        result = planner.plan(code, _request(["Z0 Z1"]), settings, seed=2)
        assert result.measure_code.k == 1
        assert result.certifications["k_accounting"].status == "pass"
        assert result.certifications["distance"].status == "pass"
        assert result.certified, result.failed_certifications()

    def test_json_view(self, shor, settings):
        """The report carries basis, windows, ledger and certifications."""
        data = planner.plan_to_json(planner.plan(shor, _request(["Z0"]), settings, seed=1))
        assert data["code"] == {"name": "shor", "n": 9, "k": 1}
        assert data["certified"] is True
        assert data["ledger"]["ancilla_qubits"] == 3
        assert data["measurements"][0]["graph"]["vertices"] == [0, 1, 2]
        assert set(data["certifications"]) >= {"commutation", "k_accounting", "distance", "ldpc", "desiderata"}

    def test_require_certified(self, shor, settings):
        """A certified plan passes silently."""
        planner.require_certified(planner.plan(shor, _request(["Z0"]), settings, seed=1))

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_y_term_product(self, settings, seed):
        """Y0 Z1 on [[18,2,3]] certifies at several seeds and leaves no extra logicals."""
        result = planner.plan(CodeFixtures.hgp_cycle3(), _request(["Y0 Z1"]), settings, seed=seed)
        assert result.certified, result.failed_certifications()
        assert result.measure_code.k == 1
        assert result.certifications["k_accounting"].status == "pass"

    def test_y_pair_on_two_blocks(self, settings):
        """Y0 Y1 joins two branched Y terms with a certified adapter."""
        result = planner.plan(CodeFixtures.shor_pair(), _request(["Y0 Y1"]), settings, seed=1)
        assert result.certified, result.failed_certifications()
        assert result.measure_code.k == 1

    @pytest.mark.parametrize("text", ["Z0 Z1 Z2 Z3", "X0 Z1 X2 Z3"])
    def test_four_term_product(self, settings, text):
        """A four-block chain of term graphs passes the desiderata with the distance cap."""
        result = planner.plan(CodeFixtures.shor_blocks(4), _request([text]), settings, seed=1)
        assert result.certified, result.failed_certifications()
        assert result.certifications["desiderata"].status == "pass"
        assert result.measure_code.k == 3
        assert len(result.measurements[0].adapters) == 3

    def test_ledger_grows_with_terms(self, settings):
        """Ancillas grow with the term count and stay within the bound."""
        code = CodeFixtures.shor_blocks(4)
        ledgers = [planner.plan(code, _request([text]), settings, seed=1).ledger
                   for text in ["Z0", "Z0 Z1", "Z0 Z1 Z2 Z3"]]
        assert [ledger.total_terms for ledger in ledgers] == [1, 2, 4]
        counts = [ledger.ancilla_qubits for ledger in ledgers]
        assert counts == sorted(counts) and counts[0] < counts[-1]
        assert all(ledger.within_bound for ledger in ledgers)

    def test_uncertifiable_adapter_raises(self, monkeypatch):
        """Without a certified adapter after every graph rebuild, planning raises."""
        rebuilds = []

        def failing(*args, **kwargs):
            rebuilds.append(kwargs["seed"])
            raise CertificationError("no adapter", failed=("desiderata",))

        monkeypatch.setattr(planner.gauging, "chain_adapters", failing)
        settings = Settings(distance_cap=6, adapter_retries=3)
        with pytest.raises(CertificationError) as exc:
            planner.plan(CodeFixtures.shor_pair(), _request(["Z0 Z1"]), settings, seed=1)
        assert exc.value.failed == ("desiderata",)
        assert len(rebuilds) == 3 and len(set(rebuilds)) == 3


class TestSameOrIdentity:
    """Several products sharing logical terms."""

    def test_shared_z_term(self, settings):
        """X0 Z1 and Z1 X2 reuse the Z1 representative and remove two logicals."""
        code = CodeFixtures.shor_blocks(3)
        result = planner.plan(code, _request(["X0 Z1", "Z1 X2"], mode="same-or-identity"), settings, seed=1)
        assert result.certified, result.failed_certifications()
        assert len(result.tree.leaves) == 4
        assert result.tree.reps[1] == result.tree.reps[2]
        assert result.measure_code.k == 1
        assert [m.group for m in result.measurements] == ["p0", "p1"]


class TestRegularSplit:
    """Splitting commuting sets into regular subsets."""

    def test_regular_set_unchanged(self):
        theta = _ops("X0 X1", "Z0 Z1")
        assert planner.is_regular(theta)

    def test_irregular_pair(self):
        """X0 Z1 and Z0 X1 commute but are not regular; the split is."""
        theta = _ops("X0 Z1", "Z0 X1")
        assert not planner.is_regular(theta)
        first, second = planner.regularize(theta)
        assert planner.is_regular(first)
        assert planner.is_regular(second)
        assert planner.span_equal(theta, first + second)

    def test_anticommuting_rejected(self):
        with pytest.raises(RequestModeError) as exc:
            planner.regularize(_ops("X0", "Z0"))
        assert exc.value.pair == (0, 1)

    def test_span_equal(self):
        assert planner.span_equal(_ops("X0", "X1"), _ops("X0 X1", "X1"))
        assert not planner.span_equal(_ops("X0"), _ops("X1"))


class TestTwistFree:
    """Y-free decompositions."""

    def test_even_parity(self):
        """X0 Z1 needs only the A ancilla."""
        gadget = planner.twist_free_decompose(LogicalPauliProduct.parse("X0 Z1"))
        assert gadget.parity == 0
        assert gadget.ancilla_a == 2
        assert gadget.ancilla_b is None
        assert str(gadget.first) == "X0 X2"
        assert str(gadget.second) == "Z1 X2"

    def test_odd_parity_uses_catalyst(self):
        """Y0 needs a |Y> catalyst on B."""
        gadget = planner.twist_free_decompose(LogicalPauliProduct.parse("Y0"))
        assert gadget.parity == 1
        assert (gadget.ancilla_a, gadget.ancilla_b) == (1, 2)
        assert str(gadget.first) == "X0 X1 X2"
        assert str(gadget.second) == "Z0 X1 Z2"
        assert gadget.phase == 2

    def test_parts_commute_and_rebuild_product(self):
        """The two measured products commute and multiply to P on the data logicals."""
        gadget = planner.twist_free_decompose(LogicalPauliProduct.parse("X0 Z1"))
        first = gadget.first.to_operator(3)
        second = gadget.second.to_operator(3)
        assert (first * second).letters() == {0: "X", 1: "Z"}
        assert first * second == (second * first)

    def test_catalyst_overlap(self):
        with pytest.raises(ValueError):
            planner.twist_free_decompose(LogicalPauliProduct.parse("X0 Z1"), ancilla_a=1)


class TestCommutingSet:
    """Commuting sets that are not same-or-identity compatible."""

    def test_staged_plan(self, settings):
        """Two split products on two Shor blocks adjoin one more copy for ancillas."""
        code = CodeFixtures.shor_pair()
        result = planner.plan(code, _request(["X0 Z1", "Z0 X1"], mode="commuting"), settings, seed=1)
        assert result.is_commuting_set
        assert result.code.k == 4
        assert result.ancilla_spec["copies"] == 1
        assert result.stage_labels == ["prepare", "theta1.first", "theta1.second", "theta1.readout",
                                       "theta2.first", "theta2.second", "theta2.readout"]
        assert len(result.theta_split[0]) == 1 and len(result.theta_split[1]) == 1
        for name in ("regular", "span_equal", "ancilla_logicals"):
            assert result.certifications[name].status == "pass"

    def test_compatible_set_is_planned_directly(self, settings):
        """A commuting request that is also compatible skips the gadgets."""
        code = CodeFixtures.shor_pair()
        result = planner.plan(code, _request(["Z0", "Z1"], mode="commuting"), settings, seed=1)
        assert not result.is_commuting_set
        assert result.measure_code.k == 0

    @pytest.mark.slow
    def test_odd_y_set(self, settings):
        """Y0 Z1 with X0 X1 borrows A and B logicals from three extra Shor blocks."""
        code = CodeFixtures.shor_pair()
        result = planner.plan(code, _request(["Y0 Z1", "X0 X1"], mode="commuting"), settings, seed=1)
        assert result.certified, result.failed_certifications()
        assert result.ancilla_spec["copies"] == 3
        assert result.code.k == 5
        assert result.stage_labels == ["prepare", "theta1.first", "theta1.second", "theta1.readout"]
        odd = result.gadgets[0]
        assert odd.ancilla_b is not None
        assert str(odd.second) == "Z0 Z1 X2 Z3"
        assert result.gadgets[1].ancilla_b is None
