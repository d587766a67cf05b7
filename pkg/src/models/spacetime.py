"""
Spacetime records: schedules, detectors, faults and detector models.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .deformation import DeformedCode
from .pauli import PauliOperator

WINDOW_KINDS = ["branch", "gauge", "unbranch"]

# (check key or read-out label, round); round m happens at time m + 1/2
Event = Tuple[str, int]


@dataclass(frozen=True)
class Schedule:
    """
    Timing of one deformation window.

    For branch and gauge windows rounds ``0..padding-1`` measure the code before
    the deformation (round 0 is a perfect boundary), new qubits are initialized
    at ``t_i - 1/2`` with ``t_i = padding``, rounds ``t_i..t_o-1`` measure the
    deformed code and round ``t_o`` is a perfect hand-off. For unbranch windows
    round 0 is a perfect round of the deformed code, new qubits are read out at
    ``t_o + 1/2`` and ``padding`` rounds of the smaller code follow.
    """

    t_i: int
    t_o: int
    padding: int = 1
    kind: str = "branch"

    def __post_init__(self):
        if self.kind not in WINDOW_KINDS:
            raise ValueError(f"Invalid window kind '{self.kind}'")
        if self.t_o - self.t_i < 1:
            raise ValueError(f"t_o - t_i must be at least 1, got {self.t_o - self.t_i}")
        if self.padding < 1:
            raise ValueError("padding needs at least one round")

    @property
    def rounds(self) -> int:
        return self.t_o - self.t_i

    @property
    def last_round(self) -> int:
        return self.t_o + self.padding if self.kind == "unbranch" else self.t_o

    def to_json(self) -> dict:
        return {"kind": self.kind, "t_i": self.t_i, "t_o": self.t_o, "padding": self.padding}


@dataclass(frozen=True)
class Detector:
    """Events whose outcomes multiply to ``parity`` when nothing goes wrong."""

    detector_id: str
    events: FrozenSet[Event]
    parity: int = 1
    family: str = "repeat"


@dataclass(frozen=True)
class Fault:
    """
    One elementary fault.

    ``kind`` is ``space`` (a single-qubit Pauli at an integer time), ``time``
    (a flipped measurement at ``round + 1/2``) or ``init`` (a flipped
    initialization, equivalent to a space fault right after it).
    """

    fault_id: str
    kind: str
    syndrome: FrozenSet[str]
    observables: int = 0
    qubit: Optional[int] = None
    time: Optional[int] = None
    letter: Optional[str] = None
    event: Optional[Event] = None
    weight: int = 1


@dataclass
class DetectorModel:
    """
    Detectors, elementary faults, observables and spacetime stabilizer generators of a window.

    ``stabilizers`` are fault-id sets; ``observables`` name what a fault set
    may change: logical operators of the deformed code and, for branch and
    gauge windows, frame or outcome parities.
    """

    schedule: Schedule
    detectors: Dict[str, Detector]
    faults: Dict[str, Fault]
    observables: List[str]
    stabilizers: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    before: Optional[DeformedCode] = None
    after: Optional[DeformedCode] = None
    logicals: List[PauliOperator] = field(default_factory=list)
    outcome_keys: Dict[str, List[str]] = field(default_factory=dict)
    rounds: Dict[int, List[Tuple[str, PauliOperator]]] = field(default_factory=dict)
    n: int = 0
    n_start: int = 0
    initializations: Dict[int, str] = field(default_factory=dict)

    @property
    def space_faults(self) -> List[Fault]:
        return [f for f in self.faults.values() if f.kind == "space"]

    @property
    def time_faults(self) -> List[Fault]:
        return [f for f in self.faults.values() if f.kind != "space"]

    def family_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for d in self.detectors.values():
            counts[d.family] = counts.get(d.family, 0) + 1
        return counts

    def without(self, detector_ids: Iterable[str]) -> "DetectorModel":
        """Copy with some detectors removed (used to plant defects)."""
        drop = set(detector_ids)
        detectors = {i: d for i, d in self.detectors.items() if i not in drop}
        faults = {i: replace(f, syndrome=f.syndrome - drop) for i, f in self.faults.items()}
        return replace(self, detectors=detectors, faults=faults)

    def __repr__(self) -> str:
        return (f"<DetectorModel(kind='{self.schedule.kind}', detectors={len(self.detectors)}, "
                f"faults={len(self.faults)})>")
