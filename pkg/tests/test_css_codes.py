"""
Tests for CSS code validation, distance and constructions.
"""
import pytest

from src.config import Settings
from src.exceptions import CssViolationError
from src.models.codes import CssCode, StabilizerCode
from src.models.pauli import PauliOperator
from src.services import css_codes
from src.utils import gf2
from tests.fixtures.sample_codes import DATA_DIR, CodeFixtures


@pytest.fixture
def settings():
    return Settings(distance_cap=6)


@pytest.fixture
def shor():
    return CodeFixtures.shor()


@pytest.fixture
def hgp():
    return CodeFixtures.hgp_cycle3()


class TestValidate:
    """Orthogonality and the weight audit."""

    def test_shor(self, shor):
        """Shor is [[9,1]] with weight-6 checks."""
        report = css_codes.validate(shor, sigma=6)
        assert report["n"] == 9
        assert report["k"] == 1
        assert report["audit"]["max_check_weight"] == 6
        assert report["audit"]["max_qubit_degree"] == 4
        assert report["audit"]["passed"] is True

    def test_audit_fails_below_weight(self, shor):
        """A bound below the check weight fails the audit but not validation."""
        assert css_codes.validate(shor, sigma=5)["audit"]["passed"] is False

    def test_audit_without_sigma(self, shor):
        """Without a bound only maxima are reported."""
        assert css_codes.ldpc_audit(shor)["passed"] is None

    def test_css_violation_names_pair(self, shor):
        """The first anticommuting (X check, Z check) pair is reported."""
        broken = CssCode(shor.hx, CodeFixtures.broken_shor_hz(), name="broken")
        with pytest.raises(CssViolationError) as exc:
            css_codes.validate(broken)
        assert exc.value.pair == (0, 0)

    def test_hgp_parameters(self, hgp):
        """Product of two length-3 cycle codes has n=18, k=2."""
        report = css_codes.validate(hgp, sigma=4)
        assert (report["n"], report["k"]) == (18, 2)
        assert report["audit"]["passed"] is True

    def test_hgp_matches_data_files(self, hgp):
        """The shipped matrix files are the same product."""
        hx = gf2.read_matrix(DATA_DIR / "codes" / "hgp_cycle3_hx.txt")
        hz = gf2.read_matrix(DATA_DIR / "codes" / "hgp_cycle3_hz.txt")
        assert hx == hgp.hx
        assert hz == hgp.hz


class TestDistance:
    """Exact capped search and the randomized estimate."""

    def test_shor_distance(self, shor, settings):
        """Both logical types of Shor have weight 3."""
        result = css_codes.distance(shor, settings=settings)
        assert result["distance"] == 3
        assert result["x_distance"] == 3
        assert result["z_distance"] == 3
        assert result["certified"] is True
        assert result["exceeds_cap"] is False

    def test_witness_is_logical(self, shor, settings):
        """The witness commutes with all checks and is not a stabilizer."""
        result = css_codes.distance(shor, settings=settings)
        witness = PauliOperator.from_string(result["witness"])
        assert witness.weight == 3
        assert css_codes.is_nontrivial_logical(shor.to_stabilizer_code(), witness)

    def test_hgp_distance(self, hgp, settings):
        """[[18,2,3]]."""
        assert css_codes.distance(hgp, settings=settings)["distance"] == 3

    def test_cap_exceeded(self, shor, settings):
        """Nothing up to the cap leaves the distance unset."""
        result = css_codes.distance(shor, cap=2, settings=settings)
        assert result["distance"] is None
        assert result["exceeds_cap"] is True
        assert result["certified"] is True

    def test_cap_above_limit(self, shor):
        """Caps beyond the configured limit are refused."""
        with pytest.raises(ValueError):
            css_codes.distance(shor, cap=9, settings=Settings(distance_cap=8))

    def test_general_stabilizer_search(self, shor, settings):
        """Searching all three letters per qubit gives the same answer."""
        assert css_codes.distance(shor.to_stabilizer_code(), settings=settings)["distance"] == 3

    def test_upper_bound_is_never_certified(self, shor):
        """The estimate bounds the distance from above."""
        result = css_codes.distance_upper_bound(shor, trials=30, seed=1)
        assert result["certified"] is False
        assert result["distance"] >= 3


class TestConstructions:
    """Builders and Tanner graphs."""

    def test_direct_sum(self):
        """Two Shor blocks give [[18,2]] with block-diagonal checks."""
        pair = CodeFixtures.shor_pair()
        assert (pair.n, pair.k) == (18, 2)
        assert css_codes.validate(pair)["k"] == 2

    def test_logical_pairing(self, hgp):
        """X_i anticommutes with Z_j exactly when i == j."""
        z_ops, x_ops = css_codes.logical_operators(hgp)
        for i, x in enumerate(x_ops):
            for j, z in enumerate(z_ops):
                assert x.x.dot(z.z) == int(i == j)

    def test_tanner_round_trip(self, shor):
        """The Tanner graph keeps letters, so the code comes back unchanged."""
        tanner = css_codes.tanner_graph(shor)
        assert tanner.count_by_type()["X"] == 2
        rebuilt = css_codes.css_from_tanner(tanner)
        assert rebuilt.hx == shor.hx
        assert rebuilt.hz == shor.hz

    def test_stabilizer_view(self, shor):
        """X checks come first, then Z checks."""
        stabilizer = StabilizerCode.from_css(shor)
        assert stabilizer.n == 9
        assert len(stabilizer.checks) == shor.hx.rows + shor.hz.rows
        assert stabilizer.k == 1
        assert set(stabilizer.checks[0].to_string().lstrip("+")) <= {"I", "X"}
        assert set(stabilizer.checks[-1].to_string().lstrip("+")) <= {"I", "Z"}

    def test_group_product(self, shor):
        """A product of two Z checks is recognised with its factors."""
        stabilizer = shor.to_stabilizer_code()
        op = stabilizer.checks[2] * stabilizer.checks[3]
        indices, exact = css_codes.group_product(stabilizer, op)
        assert sorted(indices) == [2, 3]
        assert exact == op

    def test_random_codes_are_valid(self):
        """Random fixtures are CSS with small k."""
        for seed in range(5):
            code = CodeFixtures.random_code(seed)
            report = css_codes.validate(code)
            assert 1 <= report["k"] <= 4

    def test_open_chain_product(self, settings):
        """Two open repetition chains give the [[13,1,3]] planar code."""
        rep = css_codes.repetition_code(3)
        code = css_codes.hypergraph_product(rep, rep, name="planar3")
        report = css_codes.validate(code)
        assert (report["n"], report["k"]) == (13, 1)
        assert css_codes.distance(code, settings=settings)["distance"] == 3

    def test_punctured_repetition(self):
        m = css_codes.punctured_repetition(4)
        assert m.array.shape == (4, 1)
        assert gf2.rank(m) == 1
