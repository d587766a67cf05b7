"""
Tests for branch trees and their deformed codes.
"""
import pytest

from src.config import Settings
from src.exceptions import CommutationAuditError, IncompatibleRepresentativesError, UncleanableError
from src.models.pauli import PauliOperator, commutes, multiply
from src.services import branching
from src.services.logical_basis import logical_basis, representative_for
from tests.fixtures.sample_codes import CodeFixtures


@pytest.fixture
def settings():
    return Settings(distance_cap=6)


@pytest.fixture
def shor():
    return CodeFixtures.shor()


@pytest.fixture
def shor_sticker(shor, settings):
    """Shor with its Z representative forced onto a single sticker."""
    rep = representative_for(logical_basis(shor), 0, "Z")
    return branching.build_branch_tree(shor, [rep], force=True, settings=settings)


@pytest.fixture
def hgp_reps():
    """Z0, Z0·Z1 and Z1 representatives of [[18,2,3]]; the product overlaps both."""
    code = CodeFixtures.hgp_cycle3()
    basis = logical_basis(code)
    z0 = representative_for(basis, 0, "Z")
    z1 = representative_for(basis, 1, "Z")
    return code, [z0, multiply(z0, z1), z1]


class TestSingleSticker:
    """The forced Shor instance."""

    def test_layout(self, shor_sticker):
        """Three copies and two edge qubits for the two incident X checks."""
        tree, deformed = shor_sticker
        sticker = tree.stickers["0"]
        assert sticker.layer == [2, 5, 8]
        assert sorted(sticker.edge_qubits) == ["s0", "s1"]
        assert tree.ancilla_count == 5
        assert deformed.n == 14
        assert len(deformed.checks) == 13
        assert tree.depth == 1

    def test_leaf_moves_to_copies(self, shor_sticker):
        """The leaf is Z on the copy qubits and is certified by its path."""
        tree, deformed = shor_sticker
        leaf = tree.leaves[0]
        assert set(leaf.support) == set(tree.stickers["0"].copies.values())
        assert len(leaf.path) == 3
        assert branching.leaf_certificate(tree, deformed)

    def test_logical_count_kept(self, shor, shor_sticker):
        """Branching adds as many independent checks as qubits."""
        _, deformed = shor_sticker
        assert deformed.k == 1
        assert branching.verify_no_new_logicals(shor, deformed)

    def test_distance_kept(self, shor_sticker, settings):
        """No logical of weight below 3 appears."""
        _, deformed = shor_sticker
        assert branching.verify_distance_preserved(deformed, 3, settings)

    def test_unforced_single_rep_is_trivial(self, shor, settings):
        """A lone representative overlaps nothing and stays in place."""
        rep = representative_for(logical_basis(shor), 0, "Z")
        tree, deformed = branching.build_branch_tree(shor, [rep], settings=settings)
        assert tree.is_trivial
        assert deformed.n == 9
        assert tree.leaves[0].support == rep.support

    def test_export(self, shor_sticker):
        """The JSON view lists stickers and leaves."""
        tree, _ = shor_sticker
        data = tree.to_json()
        assert data["depth"] == 1
        assert data["stickers"][0]["layer"] == [2, 5, 8]
        assert data["leaves"]["0"]["path"] == list(tree.leaves[0].path)


class TestOverlappingRepresentatives:
    """Forced-overlap trees on [[18,2,3]]."""

    @pytest.mark.parametrize("t", [2, 3])
    def test_branching_preserves_code(self, hgp_reps, settings, t):
        """k is unchanged, d stays at least 3 and leaves are pairwise disjoint."""
        code, reps = hgp_reps
        tree, deformed = branching.build_branch_tree(code, reps[:t], settings=settings)
        assert deformed.k == code.k
        assert branching.verify_distance_preserved(deformed, 3, settings)
        supports = [set(leaf.support) for leaf in tree.leaves.values()]
        for a in range(len(supports)):
            for b in range(a + 1, len(supports)):
                assert not supports[a] & supports[b]
        assert branching.leaf_certificate(tree, deformed)

    def test_three_reps_nest(self, hgp_reps, settings):
        """Three representatives split two-and-one, giving a second level."""
        code, reps = hgp_reps
        tree, _ = branching.build_branch_tree(code, reps, settings=settings)
        assert tree.depth == 2
        assert {s.sticker_id for s in tree.roots()} == {"0", "1"}
        assert tree.stickers["0"].children == ["0.0", "0.1"]

    def test_incompatible_letters(self, shor, settings):
        """X and Z representatives meeting on a qubit are refused."""
        basis = logical_basis(shor)
        reps = [representative_for(basis, 0, "X"), representative_for(basis, 0, "Z")]
        with pytest.raises(IncompatibleRepresentativesError) as exc:
            branching.build_branch_tree(shor, reps, settings=settings)
        assert exc.value.pair == (0, 1)


class TestAudits:
    """Commutation audit, distance status and X-operator deformation."""

    def test_commutation_audit(self, shor):
        """A check anticommuting with an X check is caught with its index pair."""
        with pytest.raises(CommutationAuditError) as exc:
            branching.audit_commutation(CodeFixtures.anticommuting_deformation(shor))
        assert exc.value.pair == (0, 8)

    def test_distance_check_inconclusive_above_cap(self, shor_sticker):
        """d-1 above the cap is inconclusive, not a pass."""
        _, deformed = shor_sticker
        result = branching.verify_distance_preserved(deformed, 3, Settings(distance_cap=1))
        assert result.status == "inconclusive"

    def test_x_logical_reaches_leaf(self, shor_sticker):
        """An X logical crossing the branched Z picks up X on the copy of the shared qubit."""
        tree, deformed = shor_sticker
        op = PauliOperator.x_type(9, [0, 1, 2])
        extended = branching.deform_x_through_tree(op, tree, deformed)
        assert extended.support == (0, 1, 2, tree.stickers["0"].copies[2])
        assert all(commutes(extended, c.op) for c in deformed.checks)

    def test_x_logical_blocked_at_leaf(self, shor_sticker):
        """Refusing leaf support turns the same case into an uncleanable error."""
        tree, deformed = shor_sticker
        with pytest.raises(UncleanableError):
            branching.deform_x_through_tree(PauliOperator.x_type(9, [0, 1, 2]), tree, deformed,
                                            allow_leaf_support=False)

    def test_cost_bound(self):
        """C t w (ceil(log2 t) + 1) with C = 2 (fanout + 1)."""
        assert branching.cost_bound(2, 3, 2) == 72
