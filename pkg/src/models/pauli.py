"""
Symplectic Pauli operators and logical Pauli products.

An operator is stored as ``i^e X(x) Z(z)``. With ``Y = iXZ`` the letter form of
the same operator carries the phase ``i^(e - #Y)``.
"""
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..constants.pauli_letters import BITS_LETTER, LETTER_BITS, is_valid_pauli_letter
from ..exceptions import DimensionMismatchError
from ..utils.gf2 import GF2Vector

PHASE_PREFIXES = {0: "+", 1: "i", 2: "-", 3: "-i"}
PREFIX_PHASES = {"+": 0, "": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}

_PAULI_STRING = re.compile(r"^(\+i|-i|\+|-|i)?([IXYZ]*)$")


class PauliOperator:
    """Pauli operator ``i^exponent X(x) Z(z)`` on ``n`` qubits."""

    __slots__ = ("_x", "_z", "_exponent")

    def __init__(self, x, z, exponent: int = 0):
        x = x if isinstance(x, GF2Vector) else GF2Vector(x)
        z = z if isinstance(z, GF2Vector) else GF2Vector(z)
        if len(x) != len(z):
            raise DimensionMismatchError("pauli x/z length", len(x), len(z))
        self._x = x
        self._z = z
        self._exponent = int(exponent) % 4

    # construction helpers

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(GF2Vector.zeros(n), GF2Vector.zeros(n))

    @classmethod
    def x_type(cls, n: int, support: Iterable[int]) -> "PauliOperator":
        return cls(GF2Vector.from_support(n, support), GF2Vector.zeros(n))

    @classmethod
    def z_type(cls, n: int, support: Iterable[int]) -> "PauliOperator":
        return cls(GF2Vector.zeros(n), GF2Vector.from_support(n, support))

    @classmethod
    def from_letters(cls, n: int, letters: Mapping[int, str], sign: str = "+") -> "PauliOperator":
        """Build from a qubit -> letter map; ``sign`` is the letter-form phase prefix."""
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for qubit, letter in letters.items():
            if not 0 <= qubit < n:
                raise DimensionMismatchError("pauli qubit", f"< {n}", qubit)
            if not is_valid_pauli_letter(letter):
                raise ValueError(f"Invalid Pauli letter '{letter}'")
            x[qubit], z[qubit] = LETTER_BITS[letter]
        y_count = int((x & z).sum())
        return cls(x, z, PREFIX_PHASES[sign] + y_count)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse ``+XIZY``-style strings (prefix from {+, i, -, -i})."""
        match = _PAULI_STRING.match(text.strip())
        if match is None:
            raise ValueError(f"Invalid Pauli string '{text}'")
        prefix, body = match.group(1) or "+", match.group(2)
        return cls.from_letters(len(body), {q: c for q, c in enumerate(body) if c != "I"}, prefix)

    @classmethod
    def from_symplectic(cls, vector: np.ndarray, exponent: Optional[int] = None) -> "PauliOperator":
        """From a length-2n ``[x | z]`` vector; default phase makes the operator Hermitian with sign +."""
        vector = np.asarray(vector, dtype=np.uint8) % 2
        n = vector.shape[0] // 2
        x, z = vector[:n], vector[n:]
        if exponent is None:
            exponent = int((x & z).sum())
        return cls(x, z, exponent)

    # properties

    @property
    def n(self) -> int:
        return len(self._x)

    @property
    def x(self) -> GF2Vector:
        return self._x

    @property
    def z(self) -> GF2Vector:
        return self._z

    @property
    def exponent(self) -> int:
        return self._exponent

    @property
    def phase(self) -> str:
        """Letter-form phase prefix, one of '+', 'i', '-', '-i'."""
        return PHASE_PREFIXES[(self._exponent - self.y_count) % 4]

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators in letter form."""
        p = (self._exponent - self.y_count) % 4
        if p % 2:
            raise ValueError(f"operator {self} is not Hermitian")
        return 1 if p == 0 else -1

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(q) for q in np.flatnonzero(self._x.array | self._z.array))

    @property
    def weight(self) -> int:
        return int((self._x.array | self._z.array).sum())

    @property
    def y_count(self) -> int:
        return int((self._x.array & self._z.array).sum())

    @property
    def symplectic(self) -> np.ndarray:
        return np.concatenate([self._x.array, self._z.array])

    def is_identity(self) -> bool:
        return self._x.is_zero() and self._z.is_zero()

    def is_x_type(self) -> bool:
        return self._z.is_zero()

    def is_z_type(self) -> bool:
        return self._x.is_zero()

    def is_hermitian(self) -> bool:
        return (self._exponent - self.y_count) % 2 == 0

    def letter(self, qubit: int) -> str:
        return BITS_LETTER[(self._x[qubit], self._z[qubit])]

    def letters(self) -> Dict[int, str]:
        return {q: self.letter(q) for q in self.support}

    # transformations

    def with_exponent(self, exponent: int) -> "PauliOperator":
        return PauliOperator(self._x, self._z, exponent)

    def with_sign(self, sign: int) -> "PauliOperator":
        """Hermitian version whose letter-form sign is ``sign``."""
        return PauliOperator(self._x, self._z, self.y_count + (0 if sign > 0 else 2))

    def negated(self) -> "PauliOperator":
        return PauliOperator(self._x, self._z, self._exponent + 2)

    def unsigned(self) -> "PauliOperator":
        return self.with_sign(+1)

    def restrict(self, qubits: Sequence[int]) -> "PauliOperator":
        """Letters on ``qubits`` only, relabelled 0..len-1, letter-form sign kept."""
        qubits = list(qubits)
        x = self._x.array[qubits]
        z = self._z.array[qubits]
        prefix = (self._exponent - self.y_count) % 4
        return PauliOperator(x, z, prefix + int((x & z).sum()))

    def extended(self, n: int, mapping: Optional[Mapping[int, int]] = None) -> "PauliOperator":
        """Embed into ``n`` qubits; qubit q goes to ``mapping[q]`` (identity map by default)."""
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for q in range(self.n):
            target = mapping[q] if mapping is not None else q
            x[target] = self._x[q]
            z[target] = self._z[q]
        return PauliOperator(x, z, self._exponent)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self._exponent == other._exponent and self._x == other._x and self._z == other._z

    def __hash__(self) -> int:
        return hash((self._x, self._z, self._exponent))

    def to_string(self) -> str:
        body = "".join(self.letter(q) for q in range(self.n))
        return f"{self.phase}{body}"

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"PauliOperator('{self.to_string()}')"


def _check_sizes(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionMismatchError("pauli size", a.n, b.n)


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    _check_sizes(a, b)
    return (a.x.dot(b.z) + a.z.dot(b.x)) % 2


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """True iff the symplectic inner product of ``a`` and ``b`` vanishes."""
    return symplectic_product(a, b) == 0


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """
    Product ``a * b`` with exact phase.

    Moving each Z of ``a`` past an X of ``b`` contributes a factor -1.
    """
    _check_sizes(a, b)
    exponent = a.exponent + b.exponent + 2 * a.z.dot(b.x)
    return PauliOperator(a.x + b.x, a.z + b.z, exponent)


def product(operators: Sequence[PauliOperator], n: Optional[int] = None) -> PauliOperator:
    """Ordered product of ``operators``; identity on ``n`` qubits when empty."""
    if not operators:
        if n is None:
            raise ValueError("empty product needs a qubit count")
        return PauliOperator.identity(n)
    result = operators[0]
    for op in operators[1:]:
        result = multiply(result, op)
    return result


def first_incompatible_qubit(operators: Sequence[PauliOperator]) -> Optional[Tuple[int, int, int]]:
    """
    Find a qubit where two operators act with different non-identity letters.

    Returns:
        (qubit, i, j) for the first conflict, or None when all are compatible
    """
    seen: Dict[int, Tuple[int, str]] = {}
    for index, op in enumerate(operators):
        for qubit, letter in op.letters().items():
            if qubit in seen and seen[qubit][1] != letter:
                return qubit, seen[qubit][0], index
            seen.setdefault(qubit, (index, letter))
    return None


@dataclass(frozen=True)
class LogicalPauliProduct:
    """Product of single-logical-qubit Paulis, indexed by logical qubit."""

    terms: Tuple[Tuple[int, str], ...]

    def __init__(self, terms):
        items = terms.items() if isinstance(terms, Mapping) else terms
        cleaned = []
        for index, letter in items:
            index = int(index)
            if index < 0:
                raise ValueError(f"Logical index must be non-negative, got {index}")
            if not is_valid_pauli_letter(letter, allow_identity=False):
                raise ValueError(f"Invalid logical letter '{letter}' on index {index}")
            cleaned.append((index, letter))
        if not cleaned:
            raise ValueError("A logical product needs at least one term")
        indices = [i for i, _ in cleaned]
        if len(set(indices)) != len(indices):
            raise ValueError(f"Repeated logical index in {cleaned}")
        object.__setattr__(self, "terms", tuple(sorted(cleaned)))

    @classmethod
    def parse(cls, text: str) -> "LogicalPauliProduct":
        """Parse ``"X1 Z2"`` style text."""
        terms = []
        for token in text.replace("*", " ").split():
            if len(token) < 2 or token[0] not in "XYZ" or not token[1:].isdigit():
                raise ValueError(f"Invalid logical term '{token}'")
            terms.append((int(token[1:]), token[0]))
        return cls(terms)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.terms)

    def as_dict(self) -> Dict[int, str]:
        return dict(self.terms)

    def letter(self, index: int) -> str:
        return self.as_dict().get(index, "I")

    def to_operator(self, k: int) -> PauliOperator:
        """The product as a Pauli operator on the ``k`` logical qubits."""
        if self.indices and max(self.indices) >= k:
            raise ValueError(f"Logical index {max(self.indices)} out of range for k={k}")
        return PauliOperator.from_letters(k, self.as_dict())

    @property
    def y_parity(self) -> int:
        return sum(1 for _, letter in self.terms if letter == "Y") % 2

    def __str__(self) -> str:
        return " ".join(f"{letter}{index}" for index, letter in self.terms)


def logically_disjoint(products: Sequence[LogicalPauliProduct]) -> bool:
    """True iff no logical index appears in two products."""
    return disjoint_violation(products) is None


def disjoint_violation(products: Sequence[LogicalPauliProduct]) -> Optional[Tuple[int, int]]:
    owner: Dict[int, int] = {}
    for p, prod in enumerate(products):
        for index in prod.indices:
            if index in owner:
                return owner[index], p
            owner[index] = p
    return None


def same_or_identity_compatible(products: Sequence[LogicalPauliProduct]) -> bool:
    """True iff every logical index is acted on with a single letter across products."""
    return compatibility_violation(products) is None


def compatibility_violation(products: Sequence[LogicalPauliProduct]) -> Optional[Tuple[int, int]]:
    seen: Dict[int, Tuple[int, str]] = {}
    for p, prod in enumerate(products):
        for index, letter in prod.terms:
            if index in seen and seen[index][1] != letter:
                return seen[index][0], p
            seen.setdefault(index, (p, letter))
    return None
