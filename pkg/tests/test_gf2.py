"""
Tests for GF(2) linear algebra and the matrix text format.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.exceptions import DimensionMismatchError, MatrixFormatError
from src.utils import gf2
from src.utils.gf2 import GF2Matrix, GF2Vector


def binary_matrices(max_rows: int = 6, max_cols: int = 8):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    ).map(GF2Matrix)


@pytest.fixture
def small_matrix():
    """3x4 matrix of rank 2 (third row is the sum of the first two)."""
    return GF2Matrix([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]])


class TestVectorsAndMatrices:
    """Basic value behaviour."""

    def test_vector_support_and_weight(self):
        """Support lists the one-positions in order."""
        v = GF2Vector.from_support(6, [4, 1])
        assert v.support == (1, 4)
        assert v.weight == 2
        assert (v + v).is_zero()

    def test_support_out_of_range(self):
        """Positions outside the length are rejected."""
        with pytest.raises(DimensionMismatchError):
            GF2Vector.from_support(3, [3])

    def test_matrix_is_immutable(self, small_matrix):
        """The backing array cannot be written through."""
        with pytest.raises(ValueError):
            small_matrix.array[0, 0] = 0

    def test_product_dimension_mismatch(self, small_matrix):
        """Multiplying incompatible shapes raises with both sizes."""
        with pytest.raises(DimensionMismatchError):
            small_matrix @ GF2Vector.zeros(3)

    def test_entries(self, small_matrix):
        """Entries are the set of one-positions."""
        assert (0, 0) in small_matrix.entries
        assert (0, 2) not in small_matrix.entries
        assert len(small_matrix.entries) == 6


class TestElimination:
    """rref, rank, kernel, solve and friends."""

    def test_rank(self, small_matrix):
        """Dependent rows do not count."""
        assert gf2.rank(small_matrix) == 2

    def test_rref_pivots(self, small_matrix):
        """Pivots are the lowest eligible columns."""
        reduced, pivots, r = gf2.rref(small_matrix)
        assert pivots == [0, 1]
        assert r == 2
        assert reduced.row(2).is_zero()

    def test_kernel(self, small_matrix):
        """Kernel rows are annihilated and have the right count."""
        basis = gf2.kernel(small_matrix)
        assert basis.rows == 2
        assert (small_matrix @ basis.T).is_zero()

    def test_solve_consistent(self, small_matrix):
        """A right-hand side in the column space has a solution."""
        b = small_matrix @ GF2Vector([1, 0, 1, 1])
        x = gf2.solve(small_matrix, b)
        assert x is not None
        assert small_matrix @ x == b

    def test_solve_inconsistent(self, small_matrix):
        """The odd-parity right-hand side of a dependent system has none."""
        assert gf2.solve(small_matrix, GF2Vector([1, 0, 0])) is None

    def test_row_space_member(self, small_matrix):
        """The combination names the rows that sum to the vector."""
        member, rows = gf2.row_space_member(small_matrix, GF2Vector([1, 0, 1, 0]))
        assert member
        total = np.zeros(4, dtype=np.uint8)
        for r in rows:
            total ^= small_matrix.array[r]
        assert list(total) == [1, 0, 1, 0]
        assert gf2.row_space_member(small_matrix, GF2Vector([0, 0, 0, 1])) == (False, None)

    def test_inverse(self):
        """An invertible matrix times its inverse is the identity."""
        m = GF2Matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
        assert m @ gf2.inverse(m) == GF2Matrix.identity(3)

    def test_inverse_singular(self, small_matrix):
        """Singular or non-square matrices have no inverse."""
        with pytest.raises(DimensionMismatchError):
            gf2.inverse(small_matrix)
        with pytest.raises(ValueError):
            gf2.inverse(GF2Matrix([[1, 1], [1, 1]]))

    def test_complement_basis(self):
        """Candidates already in the span are skipped."""
        span = GF2Matrix([[1, 1, 0]])
        candidates = GF2Matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1], [0, 0, 1]])
        assert gf2.complement_basis(span, candidates) == [1, 3]

    @settings(max_examples=60, deadline=None)
    @given(binary_matrices())
    def test_rank_nullity(self, m):
        """rank + kernel dimension equals the column count."""
        assert gf2.rank(m) + gf2.kernel(m).rows == m.cols

    @settings(max_examples=60, deadline=None)
    @given(binary_matrices())
    def test_rank_of_transpose(self, m):
        """Row rank equals column rank."""
        assert gf2.rank(m) == gf2.rank(m.T)


class TestTextFormat:
    """Matrix files."""

    def test_round_trip(self, small_matrix):
        """Serialized text parses back to the same matrix."""
        assert gf2.from_text(gf2.to_text(small_matrix)) == small_matrix

    def test_comments_and_blank_lines(self):
        """Comments and blank lines are skipped; unlisted rows are zero."""
        text = "# header comment\n\n3 4\n0: 1 2\n# middle\n2: 3\n"
        m = gf2.from_text(text)
        assert m.shape == (3, 4)
        assert m.row(1).is_zero()
        assert m.row_support(2) == (3,)

    def test_column_out_of_range_names_line(self):
        """The error carries the 1-based line number of the bad row."""
        with pytest.raises(MatrixFormatError) as exc:
            gf2.from_text("2 3\n0: 0\n1: 5\n", source="m.txt")
        assert exc.value.line == 3
        assert exc.value.source == "m.txt"
        assert "m.txt:3" in str(exc.value)

    @pytest.mark.parametrize("text", ["", "2\n", "2 2\n0 1\n", "2 2\n0: x\n", "2 2\n0: 1 1\n", "2 2\n0: 0\n0: 1\n"])
    def test_malformed(self, text):
        """Missing headers, bad rows and duplicates are all format errors."""
        with pytest.raises(MatrixFormatError):
            gf2.from_text(text)

    def test_read_missing_file(self, tmp_path):
        """Unreadable files become format errors naming the file."""
        with pytest.raises(MatrixFormatError) as exc:
            gf2.read_matrix(tmp_path / "absent.txt")
        assert "absent.txt" in str(exc.value)

    def test_write_and_read(self, tmp_path, small_matrix):
        """Files written by write_matrix read back unchanged."""
        path = tmp_path / "m.txt"
        gf2.write_matrix(small_matrix, path)
        assert gf2.read_matrix(path) == small_matrix
