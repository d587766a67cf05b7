"""
Tests for logical representative selection and cleaning.
"""
import pytest

from src.exceptions import UncleanableError
from src.models.pauli import PauliOperator
from src.services import logical_basis as lb
from src.utils.gf2 import GF2Vector
from tests.fixtures.sample_codes import CodeFixtures


@pytest.fixture
def shor():
    return CodeFixtures.shor()


@pytest.fixture
def hgp():
    return CodeFixtures.hgp_cycle3()


class TestEchelonBasis:
    """Row-echelon Z representatives."""

    def test_shor_representative(self, shor):
        """Eliminating the stabilizer pivots leaves Z on the last qubit of each block."""
        basis = lb.echelon_basis(shor)
        assert basis.k == 1
        assert basis.m == 6
        assert basis.z_reps[0].support == (2, 5, 8)
        assert basis.certificate == [0, 1, 3, 4, 6, 7, 2]

    def test_representatives_are_logical(self, hgp):
        """Each v_i commutes with every X check."""
        basis = lb.echelon_basis(hgp)
        assert basis.k == 2
        for v in basis.z_reps:
            assert (hgp.hx @ v).is_zero()

    def test_deterministic(self, hgp):
        """The basis does not depend on the call."""
        assert [v.support for v in lb.echelon_basis(hgp).z_reps] == \
               [v.support for v in lb.echelon_basis(hgp).z_reps]

    @pytest.mark.parametrize("seed", range(20))
    def test_echelon_property_on_random_codes(self, seed):
        """No union of representatives hides a logical anticommuting with an outside X logical."""
        code = CodeFixtures.random_code(seed, n=12)
        basis = lb.echelon_basis(code)
        result = lb.verify_echelon_property(basis, code)
        assert result.status == "pass", result.detail

    def test_property_skipped_above_limit(self, hgp):
        """Large k is reported inconclusive rather than enumerated."""
        result = lb.verify_echelon_property(lb.echelon_basis(hgp), hgp, limit=1)
        assert result.status == "inconclusive"
        assert not result


class TestCleaning:
    """Moving operators off regions with stabilizers."""

    def test_clean_off_one_qubit(self, shor):
        """X on a block, cleaned off its first qubit, moves to the next block."""
        cleaned = lb.clean(PauliOperator.x_type(9, [0, 1, 2]), [0], shor)
        assert cleaned.support == (3, 4, 5)
        assert cleaned.is_x_type()

    def test_nothing_to_clean(self, shor):
        """Operators already off the region come back unchanged."""
        op = PauliOperator.x_type(9, [0, 1, 2])
        assert lb.clean(op, [7, 8], shor) == op

    def test_uncleanable_reports_witness(self, shor):
        """A region holding the Z logical cannot be cleared of an X logical."""
        with pytest.raises(UncleanableError) as exc:
            lb.clean(PauliOperator.x_type(9, [0, 1, 2]), [2, 5, 8], shor)
        assert exc.value.witness.support == (2, 5, 8)

    def test_mixed_operator_rejected(self, shor):
        """Only single-type operators can be cleaned."""
        with pytest.raises(ValueError):
            lb.clean(PauliOperator.from_string("YIIIIIIII"), [0], shor)

    def test_contained_witness(self, shor):
        """The kernel restricted to the region finds the Z logical and the X operator it hits."""
        x_op = GF2Vector.from_support(9, [0, 1, 2])
        support, index = lb.contained_logical_witness([2, 5, 8], shor, {0: x_op})
        assert support.support == (2, 5, 8)
        assert index == 0
        assert lb.contained_logical_witness([0, 1], shor, {0: x_op}) is None


class TestFullBasis:
    """Y-compatible X representatives and export."""

    def test_pairing_and_disjointness(self, hgp):
        """w_j pairs with v_j only and avoids every other v_i."""
        basis = lb.logical_basis(hgp)
        for i, v in enumerate(basis.z_reps):
            for j, w in enumerate(basis.x_reps):
                assert v.dot(w) == int(i == j)
                if i != j:
                    assert not set(v.support) & set(w.support)

    def test_y_representative_is_hermitian(self, shor):
        """i X(w) Z(v) has sign + and anticommutes with both X and Z representatives."""
        basis = lb.logical_basis(shor)
        y = lb.representative_for(basis, 0, "Y")
        assert y.is_hermitian()
        assert y.sign == 1
        x = lb.representative_for(basis, 0, "X")
        z = lb.representative_for(basis, 0, "Z")
        assert y.x == x.x and y.z == z.z

    def test_representative_index_range(self, shor):
        """Indices beyond k are rejected."""
        with pytest.raises(IndexError):
            lb.representative_for(lb.logical_basis(shor), 1, "Z")

    def test_json_round_trip(self, hgp):
        """A written basis loads back and checks out against the code."""
        basis = lb.logical_basis(hgp)
        loaded = lb.basis_from_json(lb.basis_to_json(basis), hgp)
        assert [v.support for v in loaded.z_reps] == [v.support for v in basis.z_reps]
        assert [w.support for w in loaded.x_reps] == [w.support for w in basis.x_reps]

    def test_json_wrong_code(self, hgp, shor):
        """A basis for another code is refused."""
        data = lb.basis_to_json(lb.logical_basis(hgp))
        with pytest.raises(ValueError):
            lb.basis_from_json(data, shor)

    def test_json_broken_pairing(self, hgp):
        """Swapping the X representatives breaks duality."""
        data = lb.basis_to_json(lb.logical_basis(hgp))
        data["logicals"][0]["w"], data["logicals"][1]["w"] = data["logicals"][1]["w"], data["logicals"][0]["w"]
        with pytest.raises(ValueError):
            lb.basis_from_json(data, hgp)
