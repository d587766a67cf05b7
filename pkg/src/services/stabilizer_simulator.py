"""
Noiseless stabilizer simulator used as the correctness oracle for deformations.
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionMismatchError, EigenSpecError
from ..models.codes import CssCode, StabilizerCode
from ..models.deformation import DeformedCode, as_deformed
from ..models.pauli import PauliOperator
from ..utils import gf2
from ..utils.gf2 import GF2Matrix, GF2Vector
from .css_codes import commutation_violation

logger = logging.getLogger(__name__)

AnyCode = Union[CssCode, StabilizerCode, DeformedCode]


class StabilizerState:
    """
    Pure stabilizer state on ``n`` qubits kept as ``n`` commuting generator rows.

    Row ``i`` is the operator ``i^exponents[i] X(x[i]) Z(z[i])``. With
    ``track`` set, every random outcome gets a fresh symbol and each row
    remembers which symbols its sign depends on, so later deterministic
    outcomes can be written as sampled value XOR a set of earlier random ones.
    """

    def __init__(self, x: np.ndarray, z: np.ndarray, exponents: np.ndarray, track: bool = False):
        self.x = np.array(x, dtype=np.uint8)
        self.z = np.array(z, dtype=np.uint8)
        if self.x.ndim != 2 or self.x.shape != self.z.shape:
            raise DimensionMismatchError("tableau shape", self.x.shape, self.z.shape)
        self.exponents = np.array(exponents, dtype=np.int64) % 4
        self.track = track
        self.symbols: List[int] = [0] * self.x.shape[0]
        self.next_symbol = 0

    @classmethod
    def zero(cls, n: int, track: bool = False) -> "StabilizerState":
        """|0...0>."""
        return cls(np.zeros((n, n), dtype=np.uint8), np.eye(n, dtype=np.uint8), np.zeros(n), track)

    @classmethod
    def plus(cls, n: int, track: bool = False) -> "StabilizerState":
        return cls(np.eye(n, dtype=np.uint8), np.zeros((n, n), dtype=np.uint8), np.zeros(n), track)

    @classmethod
    def from_generators(cls, ops: Sequence[PauliOperator], track: bool = False) -> "StabilizerState":
        """State stabilized by ``ops``; they must be ``n`` independent commuting Hermitian operators."""
        if not ops:
            raise ValueError("need at least one generator")
        n = ops[0].n
        if len(ops) != n:
            raise DimensionMismatchError("generator count", n, len(ops))
        if commutation_violation(ops) is not None:
            raise ValueError("generators do not commute")
        matrix = GF2Matrix(np.vstack([op.symplectic for op in ops]))
        if gf2.rank(matrix) != n:
            raise ValueError("generators are dependent")
        x = np.vstack([op.x.array for op in ops])
        z = np.vstack([op.z.array for op in ops])
        return cls(x, z, np.array([op.exponent for op in ops]), track)

    @property
    def n(self) -> int:
        return int(self.x.shape[1])

    def copy(self) -> "StabilizerState":
        clone = StabilizerState(self.x.copy(), self.z.copy(), self.exponents.copy(), self.track)
        clone.symbols = list(self.symbols)
        clone.next_symbol = self.next_symbol
        return clone

    def row(self, i: int) -> PauliOperator:
        return PauliOperator(self.x[i], self.z[i], int(self.exponents[i]))

    def generators(self) -> List[PauliOperator]:
        return [self.row(i) for i in range(self.x.shape[0])]

    def _multiply_into(self, target: int, source: int) -> None:
        """row[target] <- row[target] * row[source]"""
        phase = 2 * int(np.dot(self.z[target].astype(np.int64), self.x[source].astype(np.int64)) % 2)
        self.exponents[target] = (self.exponents[target] + self.exponents[source] + phase) % 4
        self.x[target] ^= self.x[source]
        self.z[target] ^= self.z[source]
        self.symbols[target] ^= self.symbols[source]

    def _anticommuting_rows(self, op: PauliOperator) -> np.ndarray:
        sx = self.x.astype(np.int64) @ op.z.array.astype(np.int64)
        sz = self.z.astype(np.int64) @ op.x.array.astype(np.int64)
        return np.flatnonzero((sx + sz) % 2)

    def _combination(self, op: PauliOperator) -> Optional[List[int]]:
        matrix = GF2Matrix(np.hstack([self.x, self.z]).reshape(self.x.shape[0], 2 * self.n))
        member, rows = gf2.row_space_member(matrix, GF2Vector(op.symplectic))
        return rows if member else None

    def _evaluate(self, op: PauliOperator) -> Optional[Tuple[int, int]]:
        """(sign, symbol mask) of a commuting operator, or None when it is not in the group."""
        rows = self._combination(op)
        if rows is None:
            return None
        x = np.zeros(self.n, dtype=np.uint8)
        z = np.zeros(self.n, dtype=np.uint8)
        exponent = 0
        mask = 0
        for i in rows:
            exponent += int(self.exponents[i]) + 2 * int(np.dot(z.astype(np.int64), self.x[i].astype(np.int64)) % 2)
            x ^= self.x[i]
            z ^= self.z[i]
            mask ^= self.symbols[i]
        difference = (exponent - op.exponent) % 4
        if difference % 2:
            raise RuntimeError(f"operator {op} is not Hermitian")
        return (1 if difference == 0 else -1), mask

    def __repr__(self) -> str:
        return f"<StabilizerState(n={self.n})>"


def _check_operator(state: StabilizerState, op: PauliOperator) -> None:
    if op.n != state.n:
        raise DimensionMismatchError("operator size", state.n, op.n)
    if not op.is_hermitian():
        raise ValueError(f"cannot measure non-Hermitian operator {op}")


def measure_with_mask(
    state: StabilizerState,
    op: PauliOperator,
    rng: Optional[np.random.Generator] = None,
    force: Optional[int] = None,
) -> Tuple[int, int]:
    """
    Measure ``op`` in place.

    ``force`` picks the outcome of a random measurement; deterministic outcomes
    are never forced.

    Returns:
        (outcome, symbol mask); the mask is zero for fresh random outcomes
        without tracking, or the new symbol's bit with tracking
    """
    _check_operator(state, op)
    anti = state._anticommuting_rows(op)
    if anti.size == 0:
        evaluated = state._evaluate(op)
        if evaluated is None:
            raise RuntimeError("commuting operator outside a pure stabilizer group")
        return evaluated

    pivot = int(anti[0])
    for j in anti[1:]:
        state._multiply_into(int(j), pivot)
    if force is not None:
        outcome = 1 if force > 0 else -1
    else:
        rng = rng if rng is not None else np.random.default_rng()
        outcome = 1 if int(rng.integers(2)) == 0 else -1
    state.x[pivot] = op.x.array
    state.z[pivot] = op.z.array
    state.exponents[pivot] = (op.exponent + (0 if outcome > 0 else 2)) % 4
    mask = 0
    if state.track:
        mask = 1 << state.next_symbol
        state.next_symbol += 1
    state.symbols[pivot] = mask
    return outcome, mask


def measure(
    state: StabilizerState,
    op: PauliOperator,
    rng: Optional[np.random.Generator] = None,
    force: Optional[int] = None,
) -> Tuple[int, StabilizerState]:
    """
    Measure a Hermitian Pauli.

    Returns:
        (outcome +1 or -1, the updated state)
    """
    outcome, _ = measure_with_mask(state, op, rng, force)
    return outcome, state


def expectation(state: StabilizerState, op: PauliOperator) -> Optional[int]:
    """+1 or -1 when ``op`` is deterministic on the state, None when its outcome is random."""
    _check_operator(state, op)
    if state._anticommuting_rows(op).size:
        return None
    evaluated = state._evaluate(op)
    return evaluated[0] if evaluated is not None else None


def apply_pauli(state: StabilizerState, op: PauliOperator) -> StabilizerState:
    """Conjugate the state by ``op``: every anticommuting generator flips sign."""
    if op.n != state.n:
        raise DimensionMismatchError("operator size", state.n, op.n)
    anti = state._anticommuting_rows(op)
    state.exponents[anti] = (state.exponents[anti] + 2) % 4
    return state


def add_qubits(state: StabilizerState, count: int, basis: Union[str, Sequence[str]] = "+") -> StabilizerState:
    """Append ``count`` qubits in |+> or |0> (one basis for all, or one per qubit)."""
    bases = [basis] * count if isinstance(basis, str) else list(basis)
    if len(bases) != count:
        raise DimensionMismatchError("basis list", count, len(bases))
    n, rows = state.n, state.x.shape[0]
    x = np.zeros((rows + count, n + count), dtype=np.uint8)
    z = np.zeros_like(x)
    x[:rows, :n] = state.x
    z[:rows, :n] = state.z
    for i, b in enumerate(bases):
        if b == "+":
            x[rows + i, n + i] = 1
        elif b == "0":
            z[rows + i, n + i] = 1
        else:
            raise ValueError(f"Invalid initialization basis '{b}'")
    state.x, state.z = x, z
    state.exponents = np.concatenate([state.exponents, np.zeros(count, dtype=np.int64)])
    state.symbols = state.symbols + [0] * count
    return state


def discard_qubits(state: StabilizerState, qubits: Sequence[int]) -> StabilizerState:
    """
    Drop qubits that are in a product state with the rest (for example just measured).

    Raises:
        ValueError: If a qubit is still entangled with the others
    """
    for q in sorted(set(qubits), reverse=True):
        single = None
        rows = None
        for letter in ("X", "Z", "Y"):
            candidate = PauliOperator.from_letters(state.n, {q: letter})
            if state._anticommuting_rows(candidate).size == 0:
                rows = state._combination(candidate)
                if rows is not None:
                    single = candidate
                    break
        if single is None:
            raise ValueError(f"qubit {q} is entangled and cannot be discarded")
        pivot = rows[0]
        for i in rows[1:]:
            state._multiply_into(pivot, i)
        for j in range(state.x.shape[0]):
            if j != pivot and (state.x[j, q] or state.z[j, q]):
                state._multiply_into(j, pivot)
        keep_rows = [j for j in range(state.x.shape[0]) if j != pivot]
        keep_cols = [c for c in range(state.n) if c != q]
        state.x = state.x[np.ix_(keep_rows, keep_cols)]
        state.z = state.z[np.ix_(keep_rows, keep_cols)]
        state.exponents = state.exponents[keep_rows]
        state.symbols = [state.symbols[j] for j in keep_rows]
    return state


def random_stabilizer_state(n: int, rng: np.random.Generator, depth: Optional[int] = None) -> StabilizerState:
    """A random stabilizer state reached by measuring random Paulis from |0...0>."""
    state = StabilizerState.zero(n)
    for _ in range(depth or 3 * n):
        vector = rng.integers(0, 2, size=2 * n)
        if not vector.any():
            continue
        measure(state, PauliOperator.from_symplectic(vector), rng)
    return state


def stabilizer_group_equal(a: StabilizerState, b: StabilizerState) -> bool:
    """True iff both states have the same signed stabilizer group."""
    if a.n != b.n:
        return False
    return all(expectation(b, g) == 1 for g in a.generators())


def _as_stabilizer_code(code: AnyCode) -> Tuple[int, List[PauliOperator]]:
    if isinstance(code, DeformedCode):
        return code.n, code.ops()
    deformed = as_deformed(code)
    return deformed.n, deformed.ops()


def prepare_codespace(
    code: AnyCode,
    spec: Sequence[Tuple[PauliOperator, int]],
    track: bool = False,
) -> StabilizerState:
    """
    State stabilized by every check and by each signed logical in ``spec``.

    Args:
        code: Code whose checks all get eigenvalue +1
        spec: (logical operator, +1/-1) pairs completing the checks to a full set

    Raises:
        EigenSpecError: If the spec does not commute, is dependent on the
            checks, or leaves the state underdetermined
    """
    n, checks = _as_stabilizer_code(code)
    logicals = [op for op, _ in spec]
    for op in logicals:
        if op.n != n:
            raise DimensionMismatchError("logical size", n, op.n)
    if commutation_violation(checks + logicals) is not None:
        raise EigenSpecError("eigen-spec operators do not commute with the checks or each other")
    check_rank = gf2.rank(GF2Matrix(np.vstack([c.symplectic for c in checks]))) if checks else 0
    full = [c.symplectic for c in checks] + [op.symplectic for op in logicals]
    total_rank = gf2.rank(GF2Matrix(np.vstack(full))) if full else 0
    if total_rank != check_rank + len(logicals):
        raise EigenSpecError("eigen-spec is dependent on the checks (over-specified)")
    if total_rank != n:
        raise EigenSpecError(f"eigen-spec fixes {total_rank} of {n} generators (under-specified)")

    state = StabilizerState.zero(n, track=track)
    targets = [(c, 1) for c in checks] + [(op, 1 if sign > 0 else -1) for op, sign in spec]
    for op, sign in targets:
        measure(state, op, force=sign)
    wrong = [i for i, (op, sign) in enumerate(targets) if expectation(state, op) != sign]
    if wrong:
        matrix = np.vstack([op.symplectic for op, _ in targets])
        swapped = np.hstack([matrix[:, n:], matrix[:, :n]])
        flips = GF2Vector.from_support(len(targets), wrong)
        fix = gf2.solve(GF2Matrix(swapped.reshape(len(targets), 2 * n)), flips)
        if fix is None:
            raise EigenSpecError("signs of the checks are inconsistent")
        apply_pauli(state, PauliOperator.from_symplectic(fix.array))
    for op, sign in targets:
        if expectation(state, op) != sign:
            raise EigenSpecError(f"could not reach eigenvalue {sign} of {op}")
    logger.debug(f"Prepared codespace state on {n} qubits with {len(spec)} logical constraints")
    return state


class DenseState:
    """
    State-vector oracle for small systems (n <= 10).

    Qubit q is bit q of the basis index.
    """

    MAX_QUBITS = 10

    def __init__(self, vector: np.ndarray):
        size = vector.shape[0]
        n = size.bit_length() - 1
        if 1 << n != size or n > self.MAX_QUBITS:
            raise ValueError(f"dense state needs 2^n entries with n <= {self.MAX_QUBITS}")
        self.n = n
        self.vector = vector.astype(np.complex128)

    @classmethod
    def zero(cls, n: int) -> "DenseState":
        vector = np.zeros(1 << n, dtype=np.complex128)
        vector[0] = 1.0
        return cls(vector)

    @classmethod
    def from_stabilizer(cls, state: StabilizerState, seed: int = 0) -> "DenseState":
        """Project a random vector onto the stabilizer state."""
        rng = np.random.default_rng(seed)
        size = 1 << state.n
        dense = cls(rng.normal(size=size) + 1j * rng.normal(size=size))
        for g in state.generators():
            dense.vector = 0.5 * (dense.vector + dense.applied(g))
        norm = np.linalg.norm(dense.vector)
        if norm < 1e-9:
            raise RuntimeError("projection vanished")
        dense.vector /= norm
        return dense

    def applied(self, op: PauliOperator) -> np.ndarray:
        """``op |psi>`` as a new vector."""
        if op.n != self.n:
            raise DimensionMismatchError("operator size", self.n, op.n)
        index = np.arange(1 << self.n)
        parity = np.zeros(1 << self.n, dtype=np.int64)
        for q in op.z.support:
            parity ^= (index >> q) & 1
        xmask = sum(1 << q for q in op.x.support)
        result = np.zeros_like(self.vector)
        result[index ^ xmask] = (1j ** op.exponent) * np.where(parity, -1, 1) * self.vector
        return result

    def expectation(self, op: PauliOperator) -> float:
        return float(np.real(np.vdot(self.vector, self.applied(op))))

    def probability(self, op: PauliOperator, outcome: int) -> float:
        """Probability of reading ``outcome`` when measuring ``op``."""
        return 0.5 * (1 + outcome * self.expectation(op))

    def measure(self, op: PauliOperator, outcome: int) -> "DenseState":
        """Project onto the ``outcome`` eigenspace and renormalize."""
        projected = 0.5 * (self.vector + outcome * self.applied(op))
        norm = np.linalg.norm(projected)
        if norm < 1e-9:
            raise ValueError(f"outcome {outcome} of {op} has zero probability")
        return DenseState(projected / norm)
