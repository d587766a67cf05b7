"""
Deformed codes: an original code plus new qubits and tagged checks.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..constants.check_provenance import CHECK_PROVENANCES, CHECK_ROLES
from ..exceptions import DimensionMismatchError
from .codes import CssCode, StabilizerCode
from .pauli import PauliOperator, multiply


@dataclass(frozen=True)
class CheckRecord:
    """
    One check of a deformed code.

    ``key`` is stable across successive deformations: an original check keeps
    its key after it picks up support on new qubits.
    """

    key: str
    op: PauliOperator
    provenance: str
    role: str
    group: Optional[str] = None

    def __post_init__(self):
        if self.provenance not in CHECK_PROVENANCES:
            raise ValueError(f"Invalid provenance '{self.provenance}'")
        if self.role not in CHECK_ROLES:
            raise ValueError(f"Invalid role '{self.role}'")


@dataclass(frozen=True)
class DeformedCode:
    """
    Original stabilizer code extended by new qubits and checks.

    Qubits ``0..base.n-1`` are the original data qubits; every later qubit is
    new and listed in ``qubit_labels`` with its initialization basis in
    ``qubit_init``.
    """

    base: StabilizerCode
    n: int
    checks: Tuple[CheckRecord, ...]
    qubit_labels: Mapping[int, str] = field(default_factory=dict)
    qubit_init: Mapping[int, str] = field(default_factory=dict)
    name: str = "deformed"

    def __post_init__(self):
        object.__setattr__(self, "checks", tuple(self.checks))
        keys = [c.key for c in self.checks]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate check keys in deformed code")
        for record in self.checks:
            if record.op.n != self.n:
                raise DimensionMismatchError(f"check {record.key} size", self.n, record.op.n)

    @classmethod
    def trivial(cls, code: Union[CssCode, StabilizerCode]) -> "DeformedCode":
        """The undeformed code, with checks keyed ``s0, s1, ...``."""
        base = code.to_stabilizer_code() if isinstance(code, CssCode) else code
        records = tuple(
            CheckRecord(f"s{j}", op, "original", "code") for j, op in enumerate(base.checks)
        )
        return cls(base=base, n=base.n, checks=records, name=base.name)

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {c.key: i for i, c in enumerate(self.checks)}

    @property
    def keys(self) -> List[str]:
        return [c.key for c in self.checks]

    def ops(self) -> List[PauliOperator]:
        return [c.op for c in self.checks]

    def record(self, key: str) -> CheckRecord:
        return self.checks[self._index[key]]

    def select(self, provenance: Optional[str] = None, role: Optional[str] = None,
               group: Optional[str] = None) -> List[CheckRecord]:
        return [
            c for c in self.checks
            if (provenance is None or c.provenance == provenance)
            and (role is None or c.role == role)
            and (group is None or c.group == group)
        ]

    @cached_property
    def stabilizer_code(self) -> StabilizerCode:
        return StabilizerCode(tuple(self.ops()), self.n, name=self.name)

    @property
    def k(self) -> int:
        return self.stabilizer_code.k

    def without(self, keys: Iterable[str]) -> "DeformedCode":
        """Copy with the named checks removed (used to plant defects in tests)."""
        drop = set(keys)
        return DeformedCode(self.base, self.n, tuple(c for c in self.checks if c.key not in drop),
                            dict(self.qubit_labels), dict(self.qubit_init), name=f"{self.name}-cut")

    def __repr__(self) -> str:
        return f"<DeformedCode(name='{self.name}', n={self.n}, checks={len(self.checks)})>"


def as_deformed(code: Union[CssCode, StabilizerCode, DeformedCode]) -> DeformedCode:
    return code if isinstance(code, DeformedCode) else DeformedCode.trivial(code)


class DeformationBuilder:
    """
    Mutable assembly of a deformation on top of an existing (possibly deformed) code.

    New checks and extra letters are collected as sparse qubit -> letter maps and
    turned into operators once, in :meth:`build`.
    """

    def __init__(self, parent: Union[CssCode, StabilizerCode, DeformedCode]):
        parent = as_deformed(parent)
        self.parent = parent
        self.n = parent.n
        self._labels: Dict[int, str] = dict(parent.qubit_labels)
        self._init: Dict[int, str] = dict(parent.qubit_init)
        self._order: List[str] = []
        self._base_ops: Dict[str, PauliOperator] = {}
        self._extra: Dict[str, Dict[int, str]] = {}
        self._meta: Dict[str, Tuple[str, str, Optional[str]]] = {}
        for record in parent.checks:
            self._order.append(record.key)
            self._base_ops[record.key] = record.op
            self._extra[record.key] = {}
            self._meta[record.key] = (record.provenance, record.role, record.group)

    def add_qubit(self, label: str, init: str = "+") -> int:
        if init not in ("+", "0"):
            raise ValueError(f"Invalid initialization basis '{init}'")
        index = self.n
        self.n += 1
        self._labels[index] = label
        self._init[index] = init
        return index

    def add_check(self, key: str, letters: Mapping[int, str], provenance: str, role: str,
                  group: Optional[str] = None) -> str:
        if key in self._meta:
            raise ValueError(f"check key '{key}' already used")
        self._order.append(key)
        self._base_ops[key] = None
        self._extra[key] = dict(letters)
        self._meta[key] = (provenance, role, group)
        return key

    def extend_check(self, key: str, qubit: int, letter: str) -> None:
        """Put ``letter`` on a new qubit of an existing check."""
        if qubit < self.parent.n and self._base_ops.get(key) is not None:
            raise ValueError(f"qubit {qubit} predates this deformation; only new qubits can be added")
        extra = self._extra[key]
        if qubit in extra and extra[qubit] != letter:
            raise ValueError(f"check {key} already carries {extra[qubit]} on qubit {qubit}")
        extra[qubit] = letter
        provenance, role, group = self._meta[key]
        if provenance == "original":
            self._meta[key] = ("deformed", role, group)

    def keys(self) -> List[str]:
        return list(self._order)

    def letters(self, key: str) -> Dict[int, str]:
        """Current letters of a check, over all qubits."""
        base = self._base_ops[key]
        result = dict(base.letters()) if base is not None else {}
        result.update(self._extra[key])
        return result

    def build(self, name: Optional[str] = None) -> DeformedCode:
        records = []
        for key in self._order:
            base = self._base_ops[key]
            extra = PauliOperator.from_letters(self.n, self._extra[key])
            op = extra if base is None else multiply(base.extended(self.n), extra)
            provenance, role, group = self._meta[key]
            records.append(CheckRecord(key, op, provenance, role, group))
        return DeformedCode(
            base=self.parent.base,
            n=self.n,
            checks=tuple(records),
            qubit_labels=self._labels,
            qubit_init=self._init,
            name=name or self.parent.name,
        )
