"""
Linear algebra over GF(2).

Matrices are backed by dense numpy uint8 arrays; every operation returns new
immutable values. Pivot selection always takes the lowest eligible row so that
outputs are reproducible run to run.

Elimination is dense Gaussian elimination with no sparse path, so rank and
kernel cost O(rows * cols * min(rows, cols)) bit operations even for LDPC
matrices. Codes with tens of thousands of qubits are out of reach.
"""
import logging
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionMismatchError, MatrixFormatError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[Sequence[int]], Sequence[int]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class GF2Vector:
    """Binary vector over GF(2)."""

    __slots__ = ("_array",)

    def __init__(self, values: ArrayLike):
        array = np.array(values, dtype=np.uint8).reshape(-1) % 2
        self._array = _frozen(array.astype(np.uint8))

    @classmethod
    def zeros(cls, length: int) -> "GF2Vector":
        return cls(np.zeros(length, dtype=np.uint8))

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "GF2Vector":
        array = np.zeros(length, dtype=np.uint8)
        for position in support:
            if not 0 <= position < length:
                raise DimensionMismatchError("support position", f"< {length}", position)
            array[position] ^= 1
        return cls(array)

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self._array))

    @property
    def weight(self) -> int:
        return int(self._array.sum())

    def is_zero(self) -> bool:
        return not self._array.any()

    def dot(self, other: "GF2Vector") -> int:
        if len(self) != len(other):
            raise DimensionMismatchError("vector dot", len(self), len(other))
        return int(np.dot(self._array.astype(np.int64), other._array.astype(np.int64)) % 2)

    def restrict(self, positions: Sequence[int]) -> "GF2Vector":
        return GF2Vector(self._array[list(positions)])

    def __add__(self, other: "GF2Vector") -> "GF2Vector":
        if len(self) != len(other):
            raise DimensionMismatchError("vector add", len(self), len(other))
        return GF2Vector(self._array ^ other._array)

    __xor__ = __add__

    def __len__(self) -> int:
        return int(self._array.shape[0])

    def __getitem__(self, index: int) -> int:
        return int(self._array[index])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GF2Vector):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self._array, other._array))

    def __hash__(self) -> int:
        return hash((len(self), self._array.tobytes()))

    def __repr__(self) -> str:
        return f"GF2Vector(len={len(self)}, support={list(self.support)})"


class GF2Matrix:
    """Binary matrix over GF(2)."""

    __slots__ = ("_array",)

    def __init__(self, values: ArrayLike, cols: Optional[int] = None):
        array = np.array(values, dtype=np.uint8)
        if array.ndim == 1:
            # an empty list of rows still needs a column count
            if array.size == 0:
                array = np.zeros((0, cols or 0), dtype=np.uint8)
            else:
                array = array.reshape(1, -1)
        if array.ndim != 2:
            raise DimensionMismatchError("matrix rank", 2, array.ndim)
        if cols is not None and array.shape[1] != cols:
            raise DimensionMismatchError("matrix columns", cols, array.shape[1])
        self._array = _frozen((array % 2).astype(np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, size: int) -> "GF2Matrix":
        return cls(np.eye(size, dtype=np.uint8))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Tuple[int, int]]) -> "GF2Matrix":
        array = np.zeros((rows, cols), dtype=np.uint8)
        seen = set()
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionMismatchError("matrix entry", f"within {rows}x{cols}", (r, c))
            if (r, c) in seen:
                raise MatrixFormatError(f"duplicate entry ({r}, {c})")
            seen.add((r, c))
            array[r, c] = 1
        return cls(array)

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], cols: int) -> "GF2Matrix":
        rows = [GF2Vector.from_support(cols, support).array for support in supports]
        if not rows:
            return cls.zeros(0, cols)
        return cls(np.vstack(rows))

    @classmethod
    def from_vectors(cls, vectors: Sequence[GF2Vector], cols: Optional[int] = None) -> "GF2Matrix":
        if not vectors:
            return cls.zeros(0, cols or 0)
        return cls(np.vstack([v.array for v in vectors]))

    @property
    def rows(self) -> int:
        return int(self._array.shape[0])

    @property
    def cols(self) -> int:
        return int(self._array.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def entries(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset((int(r), int(c)) for r, c in zip(*np.nonzero(self._array)))

    @property
    def T(self) -> "GF2Matrix":
        return GF2Matrix(self._array.T)

    def row(self, index: int) -> GF2Vector:
        return GF2Vector(self._array[index])

    def row_support(self, index: int) -> Tuple[int, ...]:
        return tuple(int(c) for c in np.flatnonzero(self._array[index]))

    def column_support(self, index: int) -> Tuple[int, ...]:
        return tuple(int(r) for r in np.flatnonzero(self._array[:, index]))

    def row_weights(self) -> List[int]:
        return [int(w) for w in self._array.sum(axis=1)]

    def column_weights(self) -> List[int]:
        return [int(w) for w in self._array.sum(axis=0)]

    def is_zero(self) -> bool:
        return not self._array.any()

    def submatrix(self, rows: Optional[Sequence[int]] = None, cols: Optional[Sequence[int]] = None) -> "GF2Matrix":
        array = self._array
        if rows is not None:
            array = array[list(rows), :]
        if cols is not None:
            array = array[:, list(cols)]
        return GF2Matrix(array.reshape(len(rows) if rows is not None else self.rows,
                                       len(cols) if cols is not None else self.cols))

    def nonzero_rows(self) -> "GF2Matrix":
        keep = [i for i in range(self.rows) if self._array[i].any()]
        return self.submatrix(rows=keep)

    @staticmethod
    def vstack(blocks: Sequence["GF2Matrix"]) -> "GF2Matrix":
        cols = {b.cols for b in blocks}
        if len(cols) > 1:
            raise DimensionMismatchError("vstack columns", "equal", sorted(cols))
        return GF2Matrix(np.vstack([b.array for b in blocks]))

    @staticmethod
    def hstack(blocks: Sequence["GF2Matrix"]) -> "GF2Matrix":
        rows = {b.rows for b in blocks}
        if len(rows) > 1:
            raise DimensionMismatchError("hstack rows", "equal", sorted(rows))
        return GF2Matrix(np.hstack([b.array for b in blocks]))

    def kron(self, other: "GF2Matrix") -> "GF2Matrix":
        return GF2Matrix(np.kron(self._array, other._array))

    def __matmul__(self, other):
        if isinstance(other, GF2Vector):
            if self.cols != len(other):
                raise DimensionMismatchError("matrix-vector product", self.cols, len(other))
            return GF2Vector(self._array.astype(np.int64) @ other.array.astype(np.int64))
        if isinstance(other, GF2Matrix):
            if self.cols != other.rows:
                raise DimensionMismatchError("matrix product", self.cols, other.rows)
            return GF2Matrix((self._array.astype(np.int64) @ other.array.astype(np.int64)) % 2)
        return NotImplemented

    def __add__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.shape != other.shape:
            raise DimensionMismatchError("matrix add", self.shape, other.shape)
        return GF2Matrix(self._array ^ other.array)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._array, other.array))

    def __hash__(self) -> int:
        return hash((self.shape, self._array.tobytes()))

    def __repr__(self) -> str:
        return f"GF2Matrix({self.rows}x{self.cols}, ones={int(self._array.sum())})"


def _eliminate(array: np.ndarray, pivot_cols: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
    """Row-reduce a copy of ``array`` to RREF using only the first ``pivot_cols`` columns as pivots."""
    work = (array % 2).astype(np.uint8).copy()
    rows, cols = work.shape
    limit = cols if pivot_cols is None else pivot_cols
    pivots: List[int] = []
    r = 0
    for c in range(limit):
        if r == rows:
            break
        candidates = np.flatnonzero(work[r:, c])
        if candidates.size == 0:
            continue
        p = r + int(candidates[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        mask = work[:, c].astype(bool)
        mask[r] = False
        work[mask] ^= work[r]
        pivots.append(c)
        r += 1
    return work, pivots


def rref(m: GF2Matrix) -> Tuple[GF2Matrix, List[int], int]:
    """
    Reduced row echelon form.

    Args:
        m: Matrix to reduce

    Returns:
        Tuple of (reduced matrix, pivot columns, rank)
    """
    reduced, pivots = _eliminate(m.array)
    return GF2Matrix(reduced.reshape(m.shape)), pivots, len(pivots)


def rref_with_transform(m: GF2Matrix) -> Tuple[GF2Matrix, List[int], GF2Matrix]:
    """RREF together with the invertible row transform ``t`` such that ``t @ m`` is the result."""
    augmented = np.hstack([m.array, np.eye(m.rows, dtype=np.uint8)])
    reduced, pivots = _eliminate(augmented, pivot_cols=m.cols)
    return (GF2Matrix(reduced[:, :m.cols].reshape(m.shape)), pivots,
            GF2Matrix(reduced[:, m.cols:].reshape(m.rows, m.rows)))


def rank(m: GF2Matrix) -> int:
    return rref(m)[2]


def kernel(m: GF2Matrix) -> GF2Matrix:
    """
    Basis of the right kernel ``{x : m x = 0}`` as matrix rows.

    Every basis row is checked against ``m`` before it is returned.
    """
    reduced, pivots, r = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = np.zeros((len(free), m.cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, p in enumerate(pivots):
            basis[i, p] = reduced.array[row, f]
    result = GF2Matrix(basis.reshape(len(free), m.cols))
    if result.rows and not (m @ result.T).is_zero():
        raise RuntimeError("kernel basis failed its own check")
    return result


def solve(m: GF2Matrix, b: GF2Vector) -> Optional[GF2Vector]:
    """
    Solve ``m x = b``.

    Free variables are set to zero, so earlier columns are preferred.

    Returns:
        A solution, or None when ``b`` lies outside the column space
    """
    if len(b) != m.rows:
        raise DimensionMismatchError("solve right-hand side", m.rows, len(b))
    augmented = np.hstack([m.array, b.array.reshape(-1, 1)])
    reduced, pivots = _eliminate(augmented, pivot_cols=m.cols)
    r = len(pivots)
    if reduced[r:, -1].any():
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    for row, p in enumerate(pivots):
        x[p] = reduced[row, -1]
    solution = GF2Vector(x)
    if m @ solution != b:
        raise RuntimeError("solve produced a wrong solution")
    return solution


def row_space_member(m: GF2Matrix, v: GF2Vector) -> Tuple[bool, Optional[List[int]]]:
    """
    Test whether ``v`` is a sum of rows of ``m``.

    Returns:
        (True, row indices of the combination) or (False, None)
    """
    if len(v) != m.cols:
        raise DimensionMismatchError("row space member", m.cols, len(v))
    if v.is_zero():
        return True, []
    if m.rows == 0:
        return False, None
    combination = solve(m.T, v)
    if combination is None:
        return False, None
    return True, list(combination.support)


def inverse(m: GF2Matrix) -> GF2Matrix:
    if m.rows != m.cols:
        raise DimensionMismatchError("inverse of square matrix", "square", m.shape)
    reduced, pivots, transform = rref_with_transform(m)
    if len(pivots) != m.rows:
        raise ValueError("matrix is singular over GF(2)")
    return transform


def complement_basis(span: GF2Matrix, candidates: GF2Matrix) -> List[int]:
    """Indices of candidate rows that extend ``span`` independently, chosen greedily in order."""
    chosen: List[int] = []
    current = span.array.copy()
    current_rank = rank(span) if span.rows else 0
    for i in range(candidates.rows):
        trial = np.vstack([current, candidates.array[i:i + 1]]) if current.size else candidates.array[i:i + 1]
        trial_rank = rank(GF2Matrix(trial))
        if trial_rank > current_rank:
            chosen.append(i)
            current = trial
            current_rank = trial_rank
    return chosen


def to_text(m: GF2Matrix) -> str:
    """Serialize as ``rows cols`` followed by ``row: col col ...`` lines for nonzero rows."""
    lines = [f"{m.rows} {m.cols}"]
    for r in range(m.rows):
        support = m.row_support(r)
        if support:
            lines.append(f"{r}: " + " ".join(str(c) for c in support))
    return "\n".join(lines) + "\n"


def from_text(text: str, source: str = "<text>") -> GF2Matrix:
    """
    Parse the matrix text format.

    Blank lines and lines starting with '#' are ignored.

    Raises:
        MatrixFormatError: With the offending line number
    """
    header: Optional[Tuple[int, int]] = None
    entries: List[Tuple[int, int]] = []
    seen_rows = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise MatrixFormatError("expected header 'rows cols'", source, lineno)
            header = (int(parts[0]), int(parts[1]))
            continue
        if ":" not in line:
            raise MatrixFormatError("expected 'row: col col ...'", source, lineno)
        row_part, cols_part = line.split(":", 1)
        try:
            r = int(row_part)
            cols = [int(c) for c in cols_part.split()]
        except ValueError:
            raise MatrixFormatError("non-integer index", source, lineno)
        if not 0 <= r < header[0]:
            raise MatrixFormatError(f"row {r} out of range", source, lineno)
        if r in seen_rows:
            raise MatrixFormatError(f"row {r} listed twice", source, lineno)
        seen_rows.add(r)
        if len(set(cols)) != len(cols):
            raise MatrixFormatError(f"duplicate column in row {r}", source, lineno)
        for c in cols:
            if not 0 <= c < header[1]:
                raise MatrixFormatError(f"column {c} out of range", source, lineno)
            entries.append((r, c))
    if header is None:
        raise MatrixFormatError("missing header", source, None)
    return GF2Matrix.from_entries(header[0], header[1], entries)


def read_matrix(path: Union[str, Path]) -> GF2Matrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        logger.error(f"Cannot read matrix file {path}: {e}")
        raise MatrixFormatError(f"cannot read file ({e.strerror})", str(path))
    return from_text(text, source=str(path))


def write_matrix(m: GF2Matrix, path: Union[str, Path]) -> None:
    Path(path).write_text(to_text(m))
