"""
Noiseless execution of surgery plans on the stabilizer simulator.
"""
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, TypedDict, Union

import numpy as np

from ..exceptions import CertificationError, EigenSpecError
from ..models.codes import CssCode
from ..models.deformation import DeformedCode
from ..models.pauli import LogicalPauliProduct, PauliOperator, product
from ..models.plan import LogicalBasis, SurgeryPlan, TwistFreeGadget
from ..utils import gf2
from ..utils.gf2 import GF2Matrix, GF2Vector
from . import stabilizer_simulator as stabsim
from .branching import unbranch
from .logical_basis import representative_for

logger = logging.getLogger(__name__)

SpecInput = Union[Mapping[str, int], Sequence[Tuple[LogicalPauliProduct, int]]]


class WindowTranscript(TypedDict):
    """Check outcomes of one window, one list entry per round."""
    name: str
    rounds: int
    outcomes: Dict[str, List[int]]
    consistent: bool


class Transcript(TypedDict, total=False):
    """Outcome record of one simulated plan."""
    seed: int
    windows: List[WindowTranscript]
    results: Dict[str, int]
    frame: Dict[str, str]
    restored: bool
    stages: List[dict]
    split_results: Dict[str, int]
    corrections: List[str]
    catalysts_unchanged: bool
    state: stabsim.StabilizerState


class TwistFreeResult(TypedDict):
    """Split outcomes, A read-out and reconstructed outcome of one gadget run."""
    first: int
    second: int
    readout: int
    outcome: int
    corrected: bool
    state: stabsim.StabilizerState


# eigen-specs

def parse_spec(spec: SpecInput) -> List[Tuple[LogicalPauliProduct, int]]:
    """Accept ``{"Z0": 1, "X1 X2": -1}`` or (product, sign) pairs."""
    items = spec.items() if isinstance(spec, Mapping) else spec
    parsed = []
    for key, sign in items:
        prod = key if isinstance(key, LogicalPauliProduct) else LogicalPauliProduct.parse(key)
        if sign not in (1, -1):
            raise EigenSpecError(f"eigenvalue of {prod} must be +1 or -1, got {sign}")
        parsed.append((prod, sign))
    return parsed


def logical_operator(basis: LogicalBasis, prod: LogicalPauliProduct) -> PauliOperator:
    """Physical operator of a logical product built from basis representatives."""
    return product([representative_for(basis, index, letter) for index, letter in prod.terms], basis.n)


def logical_spec(basis: LogicalBasis, spec: SpecInput,
                 fill: Sequence[int] = ()) -> List[Tuple[PauliOperator, int]]:
    """
    Physical (operator, sign) pairs for ``prepare_codespace``.

    Logical indices in ``fill`` that the spec does not mention get ``Z = +1``.
    """
    parsed = parse_spec(spec)
    mentioned = {i for prod, _ in parsed for i in prod.indices}
    parsed += [(LogicalPauliProduct({i: "Z"}), 1) for i in fill if i not in mentioned]
    return [(logical_operator(basis, prod), sign) for prod, sign in parsed]


# windows

def _measure_rounds(state: stabsim.StabilizerState, code: DeformedCode, rounds: int,
                    rng: np.random.Generator, name: str) -> WindowTranscript:
    outcomes: Dict[str, List[int]] = {record.key: [] for record in code.checks}
    for _ in range(rounds):
        for record in code.checks:
            outcome, _ = stabsim.measure(state, record.op, rng)
            outcomes[record.key].append(outcome)
    consistent = all(len(set(values)) == 1 for values in outcomes.values())
    if not consistent:
        logger.error(f"Window {name}: repeated check outcomes disagree")
    return WindowTranscript(name=name, rounds=rounds, outcomes=outcomes, consistent=consistent)


def _grow(state: stabsim.StabilizerState, code: DeformedCode) -> stabsim.StabilizerState:
    new = list(range(state.n, code.n))
    if new:
        stabsim.add_qubits(state, len(new), [code.qubit_init.get(q, "+") for q in new])
    return state


def _frame(window: WindowTranscript, keys: Sequence[str]) -> Dict[str, str]:
    return {key: "-" for key in keys if window["outcomes"][key][0] < 0}


def execute_plan(
    result: SurgeryPlan,
    state: stabsim.StabilizerState,
    rng: np.random.Generator,
    rounds: Optional[int] = None,
) -> Tuple[stabsim.StabilizerState, List[WindowTranscript], Dict[str, int], Dict[str, str]]:
    """
    Run one single-stage plan on a state of its original code.

    Returns:
        (state back on the original code, window transcripts, product outcomes, branch frame)
    """
    branched = result.tree is not None and not result.tree.is_trivial
    windows: List[WindowTranscript] = []
    frame: Dict[str, str] = {}
    branch_rounds = rounds or result.windows[0].rounds

    if branched and len(result.windows) == 3:
        _grow(state, result.branch_code)
        windows.append(_measure_rounds(state, result.branch_code, branch_rounds, rng, "branch"))
        frame = _frame(windows[-1], [c.key for c in result.branch_code.select(provenance="branch", role="vertex")])

    measure_code = result.measure_code
    _grow(state, measure_code)
    measured = _measure_rounds(state, measure_code, rounds or result.windows[-2 if branched else -1].rounds,
                               rng, "measure")
    windows.append(measured)
    if branched and not frame:
        frame = _frame(measured, [c.key for c in result.branch_code.select(provenance="branch", role="vertex")])

    results: Dict[str, int] = {}
    for m in result.measurements:
        value = m.sign
        for key in m.check_keys:
            value *= measured["outcomes"][key][0]
        results[str(m.product)] = value

    vertex = [c.key for c in measure_code.select(provenance="gauge", role="vertex")]
    keep = result.branch_code.n
    state, correction, _ = unbranch(measure_code, state, rng, keep=keep, z_keys=vertex)
    logger.debug(f"Ungauged with correction {correction}")

    if branched:
        windows.append(_measure_rounds(state, result.branch_code, 1, rng, "unbranch"))
        state, correction, _ = unbranch(result.branch_code, state, rng)
        logger.debug(f"Unbranched with correction {correction}")
    return state, windows, results, frame


def _checks_restored(state: stabsim.StabilizerState, code: CssCode) -> bool:
    checks = code.x_checks() + code.z_checks()
    return all(stabsim.expectation(state, c) == 1 for c in checks)


def run_surgery(
    result: SurgeryPlan,
    spec: SpecInput,
    seed: int = 0,
    rounds: Optional[int] = None,
    allow_uncertified: bool = False,
) -> Transcript:
    """
    Simulate a plan on the codespace state described by ``spec``.

    Args:
        result: Plan to execute
        spec: Logical eigenvalues completing the checks to a full stabilizer set
        seed: Seed of the outcome generator
        rounds: Rounds per window (defaults to the plan's schedule)
        allow_uncertified: Run plans with failed certifications anyway

    Returns:
        Transcript whose ``state`` is the final state on the original code

    Raises:
        CertificationError: If the plan is not certified
        EigenSpecError: If the spec does not complete the checks
    """
    if not result.certified and not allow_uncertified:
        failed = result.failed_certifications()
        raise CertificationError(f"refusing to run an uncertified plan: {', '.join(failed)}", failed=tuple(failed))
    if result.is_commuting_set:
        return run_commuting_set(result, spec, seed, rounds)

    rng = np.random.default_rng(seed)
    state = stabsim.prepare_codespace(result.code, logical_spec(result.basis, spec))
    state, windows, results, frame = execute_plan(result, state, rng, rounds)
    restored = _checks_restored(state, result.code)
    logger.info(f"Simulated plan with seed {seed}: {results}")
    return Transcript(seed=seed, windows=windows, results=results, frame=frame, restored=restored, state=state)


# commuting sets

def _split_signs(theta: Sequence[PauliOperator], splits: Sequence[PauliOperator]) -> List[Tuple[List[int], int]]:
    """For each element of ``theta``: the split products multiplying to it and the sign of that product."""
    matrix = GF2Matrix(np.vstack([s.symplectic for s in splits]))
    relations = []
    for op in theta:
        chosen = gf2.solve(matrix.T, GF2Vector(op.symplectic))
        if chosen is None:
            raise RuntimeError(f"{op} is not generated by the split products")
        members = list(chosen.support)
        combined = product([splits[i] for i in members], op.n)
        if combined == op:
            relations.append((members, 1))
        elif combined == op.negated():
            relations.append((members, -1))
        else:
            raise RuntimeError(f"split products reach {op} only up to a complex phase")
    return relations


def run_commuting_set(
    result: SurgeryPlan,
    spec: SpecInput,
    seed: int = 0,
    rounds: Optional[int] = None,
) -> Transcript:
    """
    Execute the staged twist-free pipeline and reconstruct every requested outcome.

    Spare logical qubits not named in ``spec`` start in ``Z = +1``. A catalyst
    reading ``Y = -1`` after preparation is flipped by its Z representative; a
    gadget whose A ancilla reads ``Z = -1`` gets its correction.
    """
    rng = np.random.default_rng(seed)
    basis = result.basis
    spare = sorted(set(range(basis.k)) - {i for p in result.products for i in p.indices})
    state = stabsim.prepare_codespace(result.code, logical_spec(basis, spec, fill=spare))

    gadgets = result.gadgets
    split_results: Dict[str, int] = {}
    corrections: List[str] = []
    windows: List[WindowTranscript] = []
    stages: List[dict] = []
    catalysts_before: Dict[int, Optional[int]] = {}
    for label, stage in zip(result.stage_labels, result.stages):
        state, stage_windows, outcomes, frame = execute_plan(stage, state, rng, rounds)
        windows.extend(WindowTranscript(name=f"{label}:{w['name']}", rounds=w["rounds"], outcomes=w["outcomes"],
                                        consistent=w["consistent"]) for w in stage_windows)
        stages.append({"stage": label, "results": outcomes, "frame": frame})
        if label == "prepare":
            for g in gadgets:
                if outcomes[str(LogicalPauliProduct({g.ancilla_a: "Z"}))] < 0:
                    stabsim.apply_pauli(state, logical_operator(basis, LogicalPauliProduct({g.ancilla_a: "X"})))
                if g.ancilla_b is not None and outcomes[str(LogicalPauliProduct({g.ancilla_b: "Y"}))] < 0:
                    stabsim.apply_pauli(state, logical_operator(basis, LogicalPauliProduct({g.ancilla_b: "Z"})))
            for b in {g.ancilla_b for g in gadgets if g.ancilla_b is not None}:
                catalysts_before[b] = stabsim.expectation(state, logical_operator(basis, LogicalPauliProduct({b: "Y"})))
            continue
        subset, part = label.split(".")
        for g in (g for g in gadgets if g.subset == subset):
            if part in ("first", "second"):
                split_results[f"{part}:{g.product}"] = outcomes[str(getattr(g, part))]
                continue
            m1 = split_results[f"first:{g.product}"]
            m2 = split_results[f"second:{g.product}"]
            split_results[str(g.product)] = (-1 if g.phase == 2 else 1) * m1 * m2
            if outcomes[str(LogicalPauliProduct({g.ancilla_a: "Z"}))] < 0:
                stabsim.apply_pauli(state, logical_operator(basis, g.correction))
                corrections.append(str(g.correction))

    catalysts_unchanged = all(
        stabsim.expectation(state, logical_operator(basis, LogicalPauliProduct({b: "Y"}))) == before
        for b, before in catalysts_before.items()
    )
    k = basis.k
    theta_ops = [p.to_operator(k) for p in result.products]
    split_ops = [g.product.to_operator(k) for g in gadgets]
    results: Dict[str, int] = {}
    for prod, (members, sign) in zip(result.products, _split_signs(theta_ops, split_ops)):
        value = sign
        for i in members:
            value *= split_results[str(gadgets[i].product)]
        results[str(prod)] = value

    restored = _checks_restored(state, result.code)
    logger.info(f"Simulated commuting-set plan with seed {seed}: {results}")
    return Transcript(seed=seed, windows=windows, results=results, frame={}, restored=restored, stages=stages,
                      split_results=split_results, corrections=corrections,
                      catalysts_unchanged=catalysts_unchanged, state=state)


def direct_measurement(
    basis: LogicalBasis,
    state: stabsim.StabilizerState,
    products: Sequence[LogicalPauliProduct],
    outcomes: Optional[Mapping[str, int]] = None,
) -> Tuple[stabsim.StabilizerState, Dict[str, Optional[int]]]:
    """
    Measure logical products straight on the code's tableau.

    Random outcomes are forced to ``outcomes`` when given.

    Returns:
        (state, the deterministic value of each product before it was measured or None)
    """
    classes: Dict[str, Optional[int]] = {}
    for prod in products:
        op = logical_operator(basis, prod)
        classes[str(prod)] = stabsim.expectation(state, op)
        force = outcomes.get(str(prod)) if outcomes else None
        stabsim.measure(state, op, force=force)
    return state, classes


# bare twist-free gadgets

def run_twist_free(
    gadget: TwistFreeGadget,
    state: stabsim.StabilizerState,
    rng: Optional[np.random.Generator] = None,
    forces: Tuple[Optional[int], Optional[int], Optional[int]] = (None, None, None),
) -> TwistFreeResult:
    """
    Apply a gadget to bare qubits, one per logical index.

    A must start in |0> and B in |Y>. ``forces`` picks the outcomes of the two
    split measurements and the A read-out when they are random.
    """
    n = state.n

    def op(prod: LogicalPauliProduct) -> PauliOperator:
        return prod.to_operator(n)

    m1, _ = stabsim.measure(state, op(gadget.first), rng, forces[0])
    m2, _ = stabsim.measure(state, op(gadget.second), rng, forces[1])
    readout, _ = stabsim.measure(state, op(LogicalPauliProduct({gadget.ancilla_a: "Z"})), rng, forces[2])
    corrected = readout < 0
    if corrected:
        stabsim.apply_pauli(state, op(gadget.correction))
    outcome = (-1 if gadget.phase == 2 else 1) * m1 * m2
    return TwistFreeResult(first=m1, second=m2, readout=readout, outcome=outcome, corrected=corrected, state=state)


def twist_free_agrees(gadget: TwistFreeGadget, state: stabsim.StabilizerState,
                      rng: Optional[np.random.Generator] = None) -> bool:
    """
    Compare a gadget run with measuring its product directly.

    Checks the determinism class, the deterministic value, and equality of the
    final stabilizer groups after forcing the direct outcome to the reconstructed one.
    """
    target = gadget.product.to_operator(state.n)
    direct = state.copy()
    expected = stabsim.expectation(direct, target)
    run = run_twist_free(gadget, state.copy(), rng)
    if expected is not None and run["outcome"] != expected:
        return False
    stabsim.measure(direct, target, force=run["outcome"])
    return stabsim.stabilizer_group_equal(run["state"], direct)


def transcript_to_json(transcript: Transcript) -> dict:
    data = {key: value for key, value in transcript.items() if key != "state"}
    state = transcript.get("state")
    if state is not None:
        data["final_generators"] = [str(g) for g in state.generators()]
    return data
