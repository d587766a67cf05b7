"""
Spacetime detector models of deformation windows and their fault-distance checks.
"""
import logging
import re
from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, TypedDict, Union

import numpy as np

from ..config import Settings, get_settings
from ..exceptions import NonLogicalFaultError, UnknownFaultError
from ..models.codes import CssCode, StabilizerCode
from ..models.deformation import DeformedCode, as_deformed
from ..models.pauli import PauliOperator, commutes, product
from ..models.plan import SurgeryPlan
from ..models.spacetime import Detector, DetectorModel, Event, Fault, Schedule
from ..utils import gf2
from ..utils.gf2 import GF2Matrix, GF2Vector
from ..utils.search import Element, TableTooLarge, min_weight_logical
from . import stabilizer_simulator as stabsim
from .gauging import vertex_keys

logger = logging.getLogger(__name__)

AnyCode = Union[CssCode, StabilizerCode, DeformedCode]

SPACE_LETTERS = ("X", "Z", "Y")
# letter of the single-qubit stabilizer of each initialization / read-out basis
BASIS_LETTER = {"+": "X", "0": "Z"}
# letter whose flip an initialization fault amounts to
FLIP_LETTER = {"+": "Z", "0": "X"}


class FaultDistanceResult(TypedDict):
    """Outcome of a bounded fault-distance search."""
    mode: str
    cap: int
    distance: Optional[int]
    certified: bool
    exceeds_cap: bool
    witness: List[str]
    outside_stabilizer_span: Optional[bool]
    sites: int
    status: str


class DecoupledFaults(TypedDict):
    space: List[str]
    time: List[str]
    timestep: int
    certified: bool


class AuditReport(TypedDict):
    passed: bool
    checked: int
    failures: List[str]


class ParsedModel(TypedDict):
    header: Dict[str, str]
    detectors: Dict[str, List[str]]
    faults: Dict[str, Tuple[int, List[str]]]


def space_fault_id(letter: str, qubit: int, time: int) -> str:
    return f"{letter}{qubit}@{time}"


def measurement_fault_id(key: str, round_index: int) -> str:
    return f"M[{key}]@{round_index}"


def init_fault_id(qubit: int) -> str:
    return f"I[{qubit}]"


def readout_key(qubit: int) -> str:
    return f"R{qubit}"


def detector_id(key: str, time: int) -> str:
    return f"{key}^{time}"


def _anticommuting(letter: str, xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Mask of rows anticommuting with a single-qubit ``letter`` given the rows' x and z bits on that qubit."""
    if letter == "X":
        return zs.astype(bool)
    if letter == "Z":
        return xs.astype(bool)
    return (xs ^ zs).astype(bool)


def _single(n: int, qubit: int, letter: str) -> PauliOperator:
    return PauliOperator.from_letters(n, {qubit: letter})


def _combination(target: PauliOperator,
                 pool: Sequence[Tuple[Optional[Event], PauliOperator]]) -> Optional[Tuple[List[Event], int, int]]:
    """
    Express ``target`` as a product of pool operators (which must commute pairwise).

    Returns:
        (events of the chosen pool entries, sign with product = sign * target,
        number of chosen entries without an event), or None
    """
    if not pool:
        return ([], 1, 0) if target.is_identity() else None
    matrix = GF2Matrix(np.vstack([op.symplectic for _, op in pool]))
    member, rows = gf2.row_space_member(matrix, GF2Vector(target.symplectic))
    if not member:
        return None
    combined = product([pool[r][1] for r in rows], target.n)
    if combined == target:
        sign = 1
    elif combined == target.negated():
        sign = -1
    else:
        raise RuntimeError(f"combination of commuting checks has phase {combined.phase}")
    events = [pool[r][0] for r in rows if pool[r][0] is not None]
    return events, sign, len(rows) - len(events)


class _Observable:
    """
    Something a fault set may change.

    Space and initialization faults act through anticommutation with ``op``;
    measurement faults act when they flip one of ``events``.
    """

    def __init__(self, name: str, op: Optional[PauliOperator] = None, events: Iterable[Event] = ()):
        self.name = name
        self.op = op
        self.events = frozenset(events)


class _WindowBuilder:
    """Collects rounds, detectors, fault locations and observables of one window."""

    def __init__(self, schedule: Schedule, n: int, n_start: int):
        self.schedule = schedule
        self.n = n
        self.n_start = n_start
        self.rounds: Dict[int, List[Tuple[str, PauliOperator]]] = {}
        self.faultable: Dict[int, bool] = {}
        self.detectors: Dict[str, Detector] = {}
        self.alive: Dict[int, Tuple[int, int]] = {}
        self.inits: Dict[int, str] = {}
        self.readouts: Dict[int, str] = {}
        self.observables: List[_Observable] = []
        self.codes: Dict[str, List[Tuple[str, PauliOperator]]] = {}
        self.code_at: List[Tuple[int, int, str]] = []

    def add_round(self, index: int, checks: Sequence[Tuple[str, PauliOperator]], faultable: bool) -> None:
        self.rounds[index] = list(checks)
        self.faultable[index] = faultable

    def add_detector(self, key: str, time: int, events: Iterable[Event], parity: int, family: str) -> None:
        name = detector_id(key, time)
        while name in self.detectors:
            name += "'"
        self.detectors[name] = Detector(name, frozenset(events), parity, family)

    def repeat_detectors(self, start: int, stop: int, keys: Sequence[str]) -> None:
        """Compare rounds ``t-1`` and ``t`` for ``t`` in ``start..stop``."""
        for t in range(start, stop + 1):
            for key in keys:
                self.add_detector(key, t, [(key, t - 1), (key, t)], 1, "repeat")

    def deformation_detectors(self, time: int, checks: Sequence[Tuple[str, PauliOperator]],
                              pool: Sequence[Tuple[Optional[Event], PauliOperator]], family: str) -> List[str]:
        """
        Detectors comparing round ``time`` against what is already known.

        A check gets a detector when it is a product of ``pool`` entries; the
        rest have random first outcomes.

        Returns:
            Keys of the checks without a detector
        """
        random_first = []
        for key, op in checks:
            found = _combination(op, pool)
            if found is None:
                random_first.append(key)
                continue
            events, sign, prepared = found
            # a check picking up prepared qubits has changed even when one old outcome fixes it
            same = not prepared and events == [(key, time - 1)] and sign == 1
            self.add_detector(key, time, [(key, time)] + events, sign, "repeat" if same else family)
        return random_first

    # faults

    def event_flips(self, qubit: int, letter: str, time: int) -> List[Event]:
        flipped = []
        for m, checks in self.rounds.items():
            if m < time:
                continue
            for key, op in checks:
                if _anticommuting(letter, op.x.array[qubit:qubit + 1], op.z.array[qubit:qubit + 1])[0]:
                    flipped.append((key, m))
        return flipped

    def _syndrome(self, events: Iterable[Event], by_event: Mapping[Event, List[str]]) -> FrozenSet[str]:
        hits: Dict[str, int] = defaultdict(int)
        for event in events:
            for name in by_event.get(event, ()):
                hits[name] ^= 1
        return frozenset(name for name, odd in hits.items() if odd)

    def _space_mask(self, qubit: int, letter: str) -> int:
        mask = 0
        for j, obs in enumerate(self.observables):
            if obs.op is not None and _anticommuting(letter, obs.op.x.array[qubit:qubit + 1],
                                                     obs.op.z.array[qubit:qubit + 1])[0]:
                mask |= 1 << j
        return mask

    def _event_mask(self, event: Event) -> int:
        mask = 0
        for j, obs in enumerate(self.observables):
            if event in obs.events:
                mask |= 1 << j
        return mask

    def faults(self) -> Dict[str, Fault]:
        by_event: Dict[Event, List[str]] = defaultdict(list)
        for name, detector in self.detectors.items():
            for event in detector.events:
                by_event[event].append(name)

        faults: Dict[str, Fault] = {}
        for qubit, (first, last) in sorted(self.alive.items()):
            masks = {letter: self._space_mask(qubit, letter) for letter in SPACE_LETTERS}
            for t in range(first, last + 1):
                for letter in SPACE_LETTERS:
                    name = space_fault_id(letter, qubit, t)
                    syndrome = self._syndrome(self.event_flips(qubit, letter, t), by_event)
                    faults[name] = Fault(name, "space", syndrome, masks[letter], qubit=qubit, time=t, letter=letter)
        for m, checks in sorted(self.rounds.items()):
            if not self.faultable[m]:
                continue
            for key, _ in checks:
                name = measurement_fault_id(key, m)
                event = (key, m)
                faults[name] = Fault(name, "time", self._syndrome([event], by_event), self._event_mask(event),
                                     time=m, event=event)
        t_i = self.schedule.t_i
        for qubit, basis in sorted(self.inits.items()):
            letter = FLIP_LETTER[basis]
            name = init_fault_id(qubit)
            syndrome = self._syndrome(self.event_flips(qubit, letter, t_i), by_event)
            faults[name] = Fault(name, "init", syndrome, self._space_mask(qubit, letter),
                                 qubit=qubit, time=t_i, letter=letter)
        return faults

    # spacetime stabilizer generators

    def checks_at(self, time: int) -> List[Tuple[str, PauliOperator]]:
        for first, last, code in self.code_at:
            if first <= time <= last:
                return self.codes[code]
        return []

    def stabilizers(self, faults: Mapping[str, Fault]) -> Dict[str, FrozenSet[str]]:
        generators: Dict[str, FrozenSet[str]] = {}
        times = sorted({f.time for f in faults.values() if f.kind == "space"})
        for t in times:
            for key, op in self.checks_at(t):
                ids = [space_fault_id(letter, q, t) for q, letter in op.letters().items()]
                if ids and all(i in faults for i in ids):
                    generators[f"check[{key}@{t}]"] = frozenset(ids)

        for qubit, (first, last) in sorted(self.alive.items()):
            for t in range(first, last):
                if not self.faultable.get(t, False):
                    continue
                for letter in ("X", "Z"):
                    ids = {space_fault_id(letter, qubit, t), space_fault_id(letter, qubit, t + 1)}
                    for key, op in self.rounds[t]:
                        if _anticommuting(letter, op.x.array[qubit:qubit + 1], op.z.array[qubit:qubit + 1])[0]:
                            ids.add(measurement_fault_id(key, t))
                    generators[f"pair[{letter}{qubit}@{t}]"] = frozenset(ids)

        t_i = self.schedule.t_i
        for qubit, basis in sorted(self.inits.items()):
            generators[f"init[{qubit}]"] = frozenset({init_fault_id(qubit),
                                                      space_fault_id(FLIP_LETTER[basis], qubit, t_i)})
            generators[f"prep[{qubit}]"] = frozenset({space_fault_id(BASIS_LETTER[basis], qubit, t_i)})

        t_o = self.schedule.t_o
        for qubit, basis in sorted(self.readouts.items()):
            generators[f"read[{qubit}]"] = frozenset({space_fault_id(FLIP_LETTER[basis], qubit, t_o),
                                                      measurement_fault_id(readout_key(qubit), t_o)})
            generators[f"end[{qubit}]"] = frozenset({space_fault_id(BASIS_LETTER[basis], qubit, t_o)})
        # a generator needs every one of its fault locations
        return {name: ids for name, ids in generators.items() if ids.issubset(faults)}

    def build(self, before: DeformedCode, after: DeformedCode, logicals: List[PauliOperator],
              outcome_keys: Dict[str, List[str]]) -> DetectorModel:
        faults = self.faults()
        model = DetectorModel(
            schedule=self.schedule,
            detectors=self.detectors,
            faults=faults,
            observables=[obs.name for obs in self.observables],
            stabilizers=self.stabilizers(faults),
            before=before,
            after=after,
            logicals=logicals,
            outcome_keys=outcome_keys,
            rounds=self.rounds,
            n=self.n,
            n_start=self.n_start,
            initializations=dict(self.inits),
        )
        logger.info(
            f"Built {self.schedule.kind} window: {len(model.detectors)} detectors, "
            f"{len(model.faults)} faults, {len(model.stabilizers)} stabilizer generators"
        )
        return model


def _checks(code: DeformedCode, n: int, skip: Iterable[str] = ()) -> List[Tuple[str, PauliOperator]]:
    drop = set(skip)
    return [(c.key, c.op.extended(n)) for c in code.checks if c.key not in drop]


def window_logicals(code: DeformedCode, forbidden: Mapping[int, str]) -> List[PauliOperator]:
    """
    Logical representatives of ``code`` that commute with the given single-qubit operators.

    ``forbidden`` maps a new qubit to its preparation or read-out basis; the
    representatives then commute with that basis' stabilizer there.
    """
    n = code.n
    rows = [np.concatenate([op.z.array, op.x.array]) for op in code.ops()]
    for qubit, basis in forbidden.items():
        letter_op = _single(n, qubit, BASIS_LETTER[basis])
        rows.append(np.concatenate([letter_op.z.array, letter_op.x.array]))
    constraint = GF2Matrix(np.vstack(rows)) if rows else GF2Matrix.zeros(0, 2 * n)
    candidates = gf2.kernel(constraint)
    span = GF2Matrix(np.vstack([op.symplectic for op in code.ops()])) if code.checks else GF2Matrix.zeros(0, 2 * n)
    chosen = gf2.complement_basis(span, candidates)
    return [PauliOperator.from_symplectic(candidates.array[i]) for i in chosen]


def _window(before: DeformedCode, after: DeformedCode, schedule: Schedule,
            frames: Mapping[str, Sequence[str]], outcomes: Mapping[str, Sequence[str]]) -> DetectorModel:
    n = after.n
    p, t_i, t_o = schedule.padding, schedule.t_i, schedule.t_o
    if before.n > n:
        raise ValueError(f"window shrinks the code from {before.n} to {n} qubits")
    b_checks = _checks(before, n)
    a_checks = _checks(after, n)
    new = {q: after.qubit_init.get(q, "+") for q in range(before.n, n)}

    w = _WindowBuilder(schedule, n, before.n)
    w.codes = {"before": b_checks, "after": a_checks}
    w.code_at = [(1, t_i - 1, "before"), (t_i, t_o - 1, "after")]
    for m in range(p):
        w.add_round(m, b_checks, faultable=m > 0)
    w.repeat_detectors(1, p - 1, [k for k, _ in b_checks])

    pool: List[Tuple[Optional[Event], PauliOperator]] = [((key, t_i - 1), op) for key, op in b_checks]
    pool += [(None, _single(n, q, BASIS_LETTER[basis])) for q, basis in new.items()]
    for m in range(t_i, t_o):
        w.add_round(m, a_checks, faultable=True)
    random_first = w.deformation_detectors(t_i, a_checks, pool, "deform")
    w.repeat_detectors(t_i + 1, t_o - 1, [k for k, _ in a_checks])
    handoff = [(k, op) for k, op in a_checks if k not in set(random_first)]
    w.add_round(t_o, handoff, faultable=False)
    w.repeat_detectors(t_o, t_o, [k for k, _ in handoff])

    for q in range(before.n):
        w.alive[q] = (1, t_o - 1)
    # faults on new qubits just before the hand-off are counted in the next window,
    # whose first round measures the deformed checks again
    for q in new:
        if t_o - 2 >= t_i:
            w.alive[q] = (t_i, t_o - 2)
    w.inits = new

    logicals = window_logicals(after, new)
    w.observables = [_Observable(f"L{j}", op) for j, op in enumerate(logicals)]
    ops = dict(a_checks)
    for name, keys in frames.items():
        w.observables.append(_Observable(name, None, [(k, t_o - 1) for k in keys]))
    for name, keys in outcomes.items():
        w.observables.append(_Observable(name, product([ops[k] for k in keys], n), [(k, t_o - 1) for k in keys]))
    logger.debug(f"{len(random_first)} checks of {after.name} start with random outcomes")
    return w.build(before, after, logicals, {name: list(keys) for name, keys in outcomes.items()})


def build_branch_detectors(
    deformed: DeformedCode,
    schedule: Schedule,
    before: Optional[AnyCode] = None,
    frames: Optional[Mapping[str, Sequence[str]]] = None,
) -> DetectorModel:
    """
    Detector model of the window that switches ``before`` to ``deformed``.

    Args:
        deformed: Branched code measured from ``t_i``
        schedule: Window timing (kind ``branch``)
        before: Code measured before ``t_i``; defaults to the undeformed base
        frames: Observable name -> path check keys whose last outcomes form a frame

    Returns:
        The detector model
    """
    before_code = as_deformed(before) if before is not None else as_deformed(deformed.base)
    return _window(before_code, deformed, schedule, frames or {}, {})


def build_gauge_detectors(
    before: AnyCode,
    gauged: DeformedCode,
    schedule: Schedule,
    outcomes: Mapping[str, Sequence[str]],
) -> DetectorModel:
    """Detector model of a gauging window; ``outcomes`` maps each measured group to its vertex check keys."""
    return _window(as_deformed(before), gauged, schedule, {}, outcomes)


def build_unbranch_detectors(
    deformed: DeformedCode,
    schedule: Schedule,
    after: Optional[AnyCode] = None,
) -> DetectorModel:
    """
    Detector model of the window that reads out the new qubits of ``deformed``.

    Round 0 is a perfect round of ``deformed``. Rounds up to ``t_o - 1`` are
    faultable, the new qubits and the checks of ``after`` are measured at
    ``t_o + 1/2`` and ``schedule.padding`` rounds of ``after`` follow, the last
    of them perfect.
    """
    after_code = as_deformed(after) if after is not None else as_deformed(deformed.base)
    n = deformed.n
    t_o, p = schedule.t_o, schedule.padding
    d_checks = _checks(deformed, n)
    b_checks = _checks(after_code, n)
    readouts = {q: deformed.qubit_init.get(q, "+") for q in range(after_code.n, n)}
    readout_ops = [(readout_key(q), _single(n, q, BASIS_LETTER[basis])) for q, basis in readouts.items()]

    w = _WindowBuilder(schedule, n, n)
    w.codes = {"deformed": d_checks, "after": b_checks}
    w.code_at = [(1, t_o, "deformed"), (t_o + 1, t_o + p, "after")]
    for m in range(t_o):
        w.add_round(m, d_checks, faultable=m > 0)
    w.repeat_detectors(1, t_o - 1, [k for k, _ in d_checks])

    w.add_round(t_o, readout_ops + b_checks, faultable=True)
    # checks anticommuting with a read-out are destroyed by it
    surviving = [(key, op) for key, op in d_checks if all(commutes(op, r) for _, r in readout_ops)]
    pool: List[Tuple[Optional[Event], PauliOperator]] = [((key, t_o - 1), op) for key, op in surviving]
    pool += [((key, t_o), op) for key, op in readout_ops]
    for key, op in b_checks:
        found = _combination(op, pool)
        if found is None:
            logger.debug(f"Check {key} has no detector at the read-out round")
            continue
        events, sign, _ = found
        same = events == [(key, t_o - 1)] and sign == 1
        w.add_detector(key, t_o, [(key, t_o)] + events, sign, "repeat" if same else "readout")
    readout_pool = [((key, t_o), op) for key, op in readout_ops]
    b_ops = {op for _, op in b_checks}
    for key, op in surviving:
        if op in b_ops or not readout_ops:
            continue
        found = _combination(op, readout_pool)
        if found is not None:
            events, sign, _ = found
            w.add_detector(key, t_o, [(key, t_o - 1)] + events, sign, "readout")

    for m in range(t_o + 1, t_o + p + 1):
        w.add_round(m, b_checks, faultable=m < t_o + p)
    w.repeat_detectors(t_o + 1, t_o + p, [k for k, _ in b_checks])

    for q in range(n):
        w.alive[q] = (1, t_o + p) if q < after_code.n else (1, t_o)
    w.readouts = readouts

    logicals = window_logicals(deformed, readouts)
    for j, op in enumerate(logicals):
        events = [(readout_key(q), t_o) for q in readouts if op.letter(q) != "I"]
        w.observables.append(_Observable(f"L{j}", op, events))
    return w.build(deformed, after_code, logicals, {})


def schedule_for(deformed: AnyCode, rounds: int, padding: int = 1, kind: str = "branch") -> Schedule:
    """
    Schedule with ``rounds`` faultable rounds of ``deformed``.

    Branch and gauge windows start deforming at ``t_i = padding``; unbranch
    windows count from the perfect round 0 and read out at ``t_o = rounds``.
    """
    if rounds < 1:
        raise ValueError(f"a window needs at least one round, got {rounds}")
    if kind == "unbranch":
        schedule = Schedule(t_i=0, t_o=rounds, padding=padding, kind=kind)
    else:
        schedule = Schedule(t_i=padding, t_o=padding + rounds, padding=padding, kind=kind)
    logger.debug(f"Schedule for {getattr(deformed, 'name', 'code')}: {schedule.to_json()}")
    return schedule


def window_model(result: SurgeryPlan, window: str, rounds: Optional[int] = None,
                 padding: int = 1, stage: int = 0) -> DetectorModel:
    """
    Detector model of one window of a plan.

    Args:
        result: Planned surgery; for staged plans ``stage`` picks the stage
        window: ``branch``, ``measure`` or ``unbranch``
        rounds: Faultable rounds; defaults to the planned count
        padding: Rounds of the surrounding code kept in the model

    Returns:
        The detector model
    """
    if result.stages:
        result = result.stages[stage]
    planned = {w.name: w.rounds for w in result.windows}
    original = as_deformed(result.code)
    if window == "branch":
        count = rounds or planned.get("branch", planned.get("measure", 1))
        frames = {
            f"frame[{i}]": list(leaf.path)
            for i, leaf in sorted(result.tree.leaves.items()) if leaf.path
        } if result.tree is not None else {}
        return build_branch_detectors(result.branch_code, schedule_for(result.branch_code, count, padding),
                                      before=original, frames=frames)
    if window == "measure":
        count = rounds or planned.get("measure", 1)
        outcomes = {
            m.group: vertex_keys(m.graph, m.group)
            for m in result.measurements if m.graph is not None
        }
        return build_gauge_detectors(result.branch_code, result.measure_code,
                                     schedule_for(result.measure_code, count, padding, kind="gauge"), outcomes)
    if window == "unbranch":
        count = rounds or planned.get("unbranch", 1)
        return build_unbranch_detectors(result.branch_code, schedule_for(result.branch_code, count, padding,
                                                                         kind="unbranch"), after=original)
    raise ValueError(f"Invalid window '{window}'")


# queries

def _require(model: DetectorModel, fault_ids: Iterable[str]) -> List[str]:
    ids = list(fault_ids)
    for fault_id in ids:
        if fault_id not in model.faults:
            raise UnknownFaultError(fault_id)
    return ids


def syndrome_of(fault_ids: Iterable[str], model: DetectorModel) -> Set[str]:
    """
    Violated detectors of a fault set.

    Raises:
        UnknownFaultError: If a fault id is not in the model
    """
    violated: Set[str] = set()
    for fault_id in _require(model, fault_ids):
        violated ^= set(model.faults[fault_id].syndrome)
    return violated


def observable_flips(fault_ids: Iterable[str], model: DetectorModel) -> int:
    mask = 0
    for fault_id in _require(model, fault_ids):
        mask ^= model.faults[fault_id].observables
    return mask


def _coordinates(model: DetectorModel) -> Dict[Tuple, int]:
    coords: Dict[Tuple, int] = {}
    for fault in model.faults.values():
        if fault.kind == "space":
            for part in ("x", "z"):
                coords.setdefault((fault.qubit, fault.time, part), len(coords))
        else:
            coords.setdefault((fault.fault_id,), len(coords))
    return coords


def _fault_coords(fault: Fault) -> List[Tuple]:
    if fault.kind != "space":
        return [(fault.fault_id,)]
    parts = {"X": ["x"], "Z": ["z"], "Y": ["x", "z"]}[fault.letter]
    return [(fault.qubit, fault.time, part) for part in parts]


def _vector(model: DetectorModel, fault_ids: Iterable[str], coords: Mapping[Tuple, int]) -> np.ndarray:
    vector = np.zeros(len(coords), dtype=np.uint8)
    for fault_id in fault_ids:
        for c in _fault_coords(model.faults[fault_id]):
            vector[coords[c]] ^= 1
    return vector


def _generator_matrix(model: DetectorModel, coords: Mapping[Tuple, int]) -> GF2Matrix:
    rows = [_vector(model, ids, coords) for ids in model.stabilizers.values()]
    if not rows:
        return GF2Matrix.zeros(0, len(coords))
    return GF2Matrix(np.vstack(rows))


def in_stabilizer_span(fault_ids: Iterable[str], model: DetectorModel) -> bool:
    """True iff the fault set is a product of the model's spacetime stabilizer generators."""
    coords = _coordinates(model)
    vector = _vector(model, _require(model, fault_ids), coords)
    member, _ = gf2.row_space_member(_generator_matrix(model, coords), GF2Vector(vector))
    return member


def _sites(model: DetectorModel, mode: str) -> Tuple[List[List[Element]], List[List[str]]]:
    index = {name: i for i, name in enumerate(sorted(model.detectors))}

    def element(fault: Fault) -> Element:
        syndrome = 0
        for name in fault.syndrome:
            syndrome |= 1 << index[name]
        return Element(syndrome, fault.observables)

    sites: List[List[Element]] = []
    names: List[List[str]] = []
    if mode == "full":
        grouped: Dict[Tuple[int, int], List[Fault]] = defaultdict(list)
        for fault in model.space_faults:
            grouped[(fault.qubit, fault.time)].append(fault)
        for location in sorted(grouped):
            options = sorted(grouped[location], key=lambda f: SPACE_LETTERS.index(f.letter))
            sites.append([element(f) for f in options])
            names.append([f.fault_id for f in options])
    for fault in model.time_faults:
        sites.append([element(fault)])
        names.append([fault.fault_id])
    return sites, names


def fault_distance(model: DetectorModel, cap: Optional[int] = None, mode: str = "full",
                   settings: Optional[Settings] = None) -> FaultDistanceResult:
    """
    Smallest syndrome-free fault set that changes an observable.

    ``time-only`` mode restricts the search to measurement and initialization
    faults. When nothing is found up to ``cap`` the result is inconclusive and
    ``exceeds_cap`` is set.
    """
    settings = settings or get_settings()
    cap = cap or settings.fault_cap
    if mode not in ("full", "time-only"):
        raise ValueError(f"Invalid fault-distance mode '{mode}'")
    sites, names = _sites(model, mode)
    result = FaultDistanceResult(mode=mode, cap=cap, distance=None, certified=False, exceeds_cap=False,
                                 witness=[], outside_stabilizer_span=None, sites=len(sites), status="inconclusive")
    if not model.observables:
        logger.warning("Window has no observables; every syndrome-free fault set is trivial")
        result["exceeds_cap"] = True
        return result
    try:
        outcome = min_weight_logical(sites, cap)
    except TableTooLarge as e:
        logger.warning(f"Fault-distance search gave up: {e}")
        return result
    if not outcome.found:
        logger.warning(f"No logical fault of weight <= {cap} in the {model.schedule.kind} window")
        result["exceeds_cap"] = True
        return result

    witness = [names[s][e] for s, e in outcome.witness]
    if syndrome_of(witness, model) or not observable_flips(witness, model):
        raise RuntimeError("fault-distance witness failed its own check")
    outside = not in_stabilizer_span(witness, model)
    if not outside:
        logger.error("Witness lies in the stabilizer span but flips an observable")
    result.update(distance=outcome.weight, certified=outside, witness=witness,
                  outside_stabilizer_span=outside, status="pass" if outside else "fail")
    logger.info(f"Fault distance of {model.schedule.kind} window ({mode}): {outcome.weight}")
    return result


def decouple(fault_ids: Iterable[str], model: DetectorModel, timestep: Optional[int] = None) -> DecoupledFaults:
    """
    Split a syndrome-free fault set into space faults at one timestep and time faults.

    Space faults are moved in time with pair stabilizers; initialization faults
    become the equivalent space fault right after initialization.

    Raises:
        NonLogicalFaultError: If the fault set has a nonempty syndrome
        ValueError: If a fault cannot be moved to ``timestep``
    """
    ids = _require(model, fault_ids)
    if syndrome_of(ids, model):
        raise NonLogicalFaultError("fault set has a nonempty syndrome")
    schedule = model.schedule
    target = timestep if timestep is not None else (schedule.t_o if schedule.kind == "unbranch" else schedule.t_i)

    space: Set[Tuple[int, int, str]] = set()
    other: Set[str] = set()

    def toggle(fault_id: str) -> None:
        fault = model.faults[fault_id]
        if fault.kind == "space":
            for _, _, part in _fault_coords(fault):
                space.symmetric_difference_update({(fault.qubit, fault.time, part)})
        else:
            other.symmetric_difference_update({fault_id})

    def apply(name: str) -> None:
        if name not in model.stabilizers:
            raise ValueError(f"no stabilizer generator {name} to move faults to t={target}")
        for fault_id in model.stabilizers[name]:
            toggle(fault_id)

    for fault_id in ids:
        toggle(fault_id)
    for fault_id in sorted(other):
        fault = model.faults[fault_id]
        if fault.kind == "init":
            apply(f"init[{fault.qubit}]")

    letter_of = {"x": "X", "z": "Z"}
    earliest = min((t for _, t, _ in space), default=target)
    for t in range(earliest, target):
        for qubit, time, part in sorted(space):
            if time == t:
                apply(f"pair[{letter_of[part]}{qubit}@{t}]")
    later = sorted({t for _, t, _ in space if t > target}, reverse=True)
    for t in range(later[0] if later else target, target, -1):
        for qubit, time, part in sorted(space):
            if time == t:
                apply(f"pair[{letter_of[part]}{qubit}@{t - 1}]")

    by_qubit: Dict[int, Set[str]] = defaultdict(set)
    for qubit, time, part in space:
        by_qubit[qubit].add(part)
    space_ids = []
    for qubit in sorted(by_qubit):
        parts = by_qubit[qubit]
        letter = "Y" if parts == {"x", "z"} else letter_of[next(iter(parts))]
        space_ids.append(space_fault_id(letter, qubit, target))
    time_ids = sorted(other)

    coords = _coordinates(model)
    difference = _vector(model, ids, coords) ^ _vector(model, space_ids + time_ids, coords)
    certified, _ = gf2.row_space_member(_generator_matrix(model, coords), GF2Vector(difference))
    return DecoupledFaults(space=space_ids, time=time_ids, timestep=target, certified=certified)


# audits

def audit_determinism(model: DetectorModel, trials: int = 3, seed: int = 0) -> AuditReport:
    """Replay the noiseless window from random input states and check every detector's parity."""
    rng = np.random.default_rng(seed)
    failures: List[str] = []
    for _ in range(trials):
        state = stabsim.random_stabilizer_state(model.n_start, rng)
        extra = [model.initializations.get(q, "+") for q in range(model.n_start, model.n)]
        if extra:
            stabsim.add_qubits(state, len(extra), extra)
        outcomes: Dict[Event, int] = {}
        for m in sorted(model.rounds):
            for key, op in model.rounds[m]:
                outcomes[(key, m)], _ = stabsim.measure(state, op, rng)
        for name, detector in model.detectors.items():
            value = 1
            for event in detector.events:
                value *= outcomes[event]
            if value != detector.parity and name not in failures:
                failures.append(name)
    if failures:
        logger.error(f"{len(failures)} detectors are not deterministic: {failures[:5]}")
    return AuditReport(passed=not failures, checked=len(model.detectors), failures=failures)


def _reference(model: DetectorModel) -> DetectorModel:
    schedule = model.schedule
    if schedule.kind == "unbranch":
        return build_unbranch_detectors(model.before, schedule, after=model.after)
    return _window(model.before, model.after, schedule, {}, {})


def audit_completeness(model: DetectorModel) -> AuditReport:
    """
    Check that the model's detectors span every detector of the generating families.

    The families are rebuilt from the model's codes and schedule and compared
    as GF(2) spans over measurement events.
    """
    reference = _reference(model)
    events = sorted({e for d in list(model.detectors.values()) + list(reference.detectors.values()) for e in d.events})
    column = {e: i for i, e in enumerate(events)}

    def matrix(detectors: Iterable[Detector]) -> GF2Matrix:
        rows = [GF2Vector.from_support(len(events), [column[e] for e in d.events]).array for d in detectors]
        return GF2Matrix(np.vstack(rows)) if rows else GF2Matrix.zeros(0, len(events))

    own = matrix(model.detectors.values())
    failures: List[str] = []
    own_rank = gf2.rank(own) if own.rows else 0
    combined = GF2Matrix.vstack([own, matrix(reference.detectors.values())])
    if gf2.rank(combined) > own_rank:
        for name, detector in reference.detectors.items():
            member, _ = gf2.row_space_member(own, GF2Vector(matrix([detector]).array[0]))
            if not member:
                failures.append(name)
        logger.error(f"Detector model misses {len(failures)} generating detectors: {failures[:5]}")
    return AuditReport(passed=not failures, checked=len(reference.detectors), failures=failures)


def audit_stabilizers(model: DetectorModel) -> AuditReport:
    """Every spacetime stabilizer generator must have an empty syndrome and change no observable."""
    failures = [
        name for name, ids in model.stabilizers.items()
        if syndrome_of(ids, model) or observable_flips(ids, model)
    ]
    if failures:
        logger.error(f"{len(failures)} stabilizer generators act nontrivially: {failures[:5]}")
    return AuditReport(passed=not failures, checked=len(model.stabilizers), failures=failures)


# line format

def _event_text(event: Event) -> str:
    return f"{event[0]}@{event[1]}"


def export_model(model: DetectorModel) -> str:
    """Detectors then faults, one per line, sorted for stable diffs."""
    s = model.schedule
    lines = [f"# window kind={s.kind} t_i={s.t_i} t_o={s.t_o} padding={s.padding}"]
    for name in sorted(model.detectors):
        events = sorted(model.detectors[name].events, key=lambda e: (e[1], e[0]))
        lines.append(f"detector {name}:" + "".join(f" {_event_text(e)}" for e in events))
    for name in sorted(model.faults):
        fault = model.faults[name]
        lines.append(f"fault {name} [{fault.weight}]:" + "".join(f" {d}" for d in sorted(fault.syndrome)))
    return "\n".join(lines) + "\n"


_DETECTOR_LINE = re.compile(r"^detector (\S+?):((?:\s+\S+)*)\s*$")
_FAULT_LINE = re.compile(r"^fault (\S+) \[(\d+)\]:((?:\s+\S+)*)\s*$")
_HEADER_ITEM = re.compile(r"(\w+)=(\S+)")


def parse_model(text: str) -> ParsedModel:
    """
    Read the line format written by ``export_model``.

    Raises:
        ValueError: On a line that is neither a comment, a detector nor a fault
    """
    parsed = ParsedModel(header={}, detectors={}, faults={})
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parsed["header"].update(dict(_HEADER_ITEM.findall(line)))
            continue
        match = _DETECTOR_LINE.match(line)
        if match:
            parsed["detectors"][match.group(1)] = match.group(2).split()
            continue
        match = _FAULT_LINE.match(line)
        if match:
            parsed["faults"][match.group(1)] = (int(match.group(2)), match.group(3).split())
            continue
        raise ValueError(f"line {number}: cannot parse '{line}'")
    return parsed


def model_report(model: DetectorModel) -> dict:
    return {
        "schedule": model.schedule.to_json(),
        "detectors": len(model.detectors),
        "families": model.family_counts(),
        "faults": len(model.faults),
        "space_faults": len(model.space_faults),
        "time_faults": len(model.time_faults),
        "observables": list(model.observables),
        "stabilizer_generators": len(model.stabilizers),
    }
