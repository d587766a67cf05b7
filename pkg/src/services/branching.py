"""
Brute-force branching trees: copying overlapping representatives onto disjoint leaves.
"""
import logging
import math
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import Settings, get_settings
from ..constants.pauli_letters import anticommuting_letters
from ..exceptions import (
    CommutationAuditError,
    IncompatibleRepresentativesError,
    UncleanableError,
)
from ..models.codes import CssCode, StabilizerCode
from ..models.deformation import DeformationBuilder, DeformedCode, as_deformed
from ..models.pauli import PauliOperator, first_incompatible_qubit, multiply, product
from ..models.plan import BranchTree, Certification, LeafRecord, LogicalBasis, Sticker
from ..utils import gf2
from ..utils.gf2 import GF2Matrix, GF2Vector
from . import stabilizer_simulator as stabsim
from .css_codes import commutation_violation, distance

logger = logging.getLogger(__name__)

AnyCode = Union[CssCode, StabilizerCode, DeformedCode]


def frame_letters(reps: Sequence[PauliOperator]) -> Dict[int, str]:
    """
    Per-qubit letter shared by all representatives acting on that qubit.

    Raises:
        IncompatibleRepresentativesError: If two representatives disagree on a qubit
    """
    conflict = first_incompatible_qubit(reps)
    if conflict is not None:
        qubit, i, j = conflict
        letters = (reps[i].letter(qubit), reps[j].letter(qubit))
        logger.error(f"Representatives {i} and {j} conflict on qubit {qubit}: {letters}")
        raise IncompatibleRepresentativesError(qubit, (i, j), letters)
    letters: Dict[int, str] = {}
    for rep in reps:
        letters.update(rep.letters())
    return letters


def _overlapping(reps: Sequence[PauliOperator]) -> List[int]:
    supports = [set(r.support) for r in reps]
    return [
        i for i, s in enumerate(supports)
        if any(s & other for j, other in enumerate(supports) if j != i)
    ]


class _TreeBuilder:
    """Adds stickers breadth-first while tracking each representative's current support."""

    def __init__(self, builder: DeformationBuilder, tree: BranchTree):
        self.builder = builder
        self.tree = tree

    def _incidence(self, layer: List[int], letters: Dict[int, str]) -> List[Tuple[str, List[int]]]:
        incident = []
        for key in self.builder.keys():
            check_letters = self.builder.letters(key)
            hits = [
                q for q in layer
                if q in check_letters and anticommuting_letters(check_letters[q], letters[q])
            ]
            if hits:
                incident.append((key, hits))
        return incident

    def add_sticker(self, sticker_id: str, level: int, parent_id: Optional[str],
                    rep_indices: List[int], supports: Dict[int, List[int]],
                    letters: Dict[int, str]) -> Sticker:
        layer = sorted({q for i in rep_indices for q in supports[i]})
        incident = self._incidence(layer, letters)
        edge_qubits: Dict[str, int] = {}
        for key, _ in incident:
            edge_qubits[key] = self.builder.add_qubit(f"e[{sticker_id}:{key}]")
        copies = {q: self.builder.add_qubit(f"copy[{sticker_id}:{q}]") for q in layer}

        column = {q: c for c, q in enumerate(layer)}
        boundary = np.zeros((len(incident), len(layer)), dtype=np.uint8)
        for row, (_, hits) in enumerate(incident):
            for q in hits:
                boundary[row, column[q]] = 1

        a_checks: Dict[int, str] = {}
        for c, q in enumerate(layer):
            check_letters = {q: letters[q], copies[q]: "Z"}
            for row, (key, _) in enumerate(incident):
                if boundary[row, c]:
                    check_letters[edge_qubits[key]] = "Z"
            a_checks[q] = self.builder.add_check(f"A[{sticker_id}:{q}]", check_letters, "branch", "vertex", sticker_id)

        face_checks: Dict[str, str] = {}
        for row, (key, hits) in enumerate(incident):
            self.builder.extend_check(key, edge_qubits[key], "X")
            check_letters = {edge_qubits[key]: "X"}
            for q in hits:
                check_letters[copies[q]] = "X"
            face_checks[key] = self.builder.add_check(f"F[{sticker_id}:{key}]", check_letters, "branch", "face", sticker_id)

        sticker = Sticker(
            sticker_id=sticker_id,
            level=level,
            parent_id=parent_id,
            rep_indices=list(rep_indices),
            layer=layer,
            letters={q: letters[q] for q in layer},
            copies=copies,
            edge_qubits=edge_qubits,
            a_checks=a_checks,
            face_checks=face_checks,
            boundary=GF2Matrix(boundary.reshape(len(incident), len(layer))),
        )
        self.tree.stickers[sticker_id] = sticker
        if parent_id is not None:
            self.tree.stickers[parent_id].children.append(sticker_id)
        logger.debug(f"Sticker {sticker_id}: {len(layer)} copies, {len(incident)} incident checks")
        return sticker

    def grow(self, rep_indices: List[int], supports: Dict[int, List[int]]) -> Dict[int, Tuple[str, List[str], List[int]]]:
        """
        Build every sticker.

        Returns:
            rep index -> (leaf sticker id, path of A-check keys, leaf support)
        """
        leaves: Dict[int, Tuple[str, List[str], List[int]]] = {}
        no_path = {i: [] for i in rep_indices}
        if len(rep_indices) == 1:
            parts = [rep_indices]
        else:
            half = math.ceil(len(rep_indices) / 2)
            parts = [rep_indices[:half], rep_indices[half:]]
        queue = deque(
            (str(side), 0, None, part, supports, dict(self.tree.letters), no_path)
            for side, part in enumerate(parts)
        )
        while queue:
            sticker_id, level, parent_id, part, current, letters, paths = queue.popleft()
            sticker = self.add_sticker(sticker_id, level, parent_id, part, current, letters)
            copied = {i: [sticker.copies[q] for q in current[i]] for i in part}
            extended = {i: paths[i] + [sticker.a_checks[q] for q in current[i]] for i in part}
            if len(part) == 1:
                i = part[0]
                leaves[i] = (sticker_id, extended[i], sorted(copied[i]))
                continue
            copy_letters = {c: "Z" for c in sticker.copies.values()}
            half = math.ceil(len(part) / 2)
            for side, sub in enumerate((part[:half], part[half:])):
                queue.append((f"{sticker_id}.{side}", level + 1, sticker_id, sub, copied, copy_letters, extended))
        return leaves


def build_branch_tree(
    code: AnyCode,
    reps: Sequence[PauliOperator],
    basis: Optional[LogicalBasis] = None,
    force: bool = False,
    settings: Optional[Settings] = None,
) -> Tuple[BranchTree, DeformedCode]:
    """
    Branch overlapping representatives onto pairwise disjoint leaves.

    Representatives disjoint from all others are left in place. With
    ``force`` every representative is branched, so a single representative
    gets one sticker.

    Args:
        code: Code to deform
        reps: Representatives, compatible letter by letter
        basis: Optional basis the representatives came from (logged only)
        force: Branch even when nothing overlaps

    Returns:
        (tree, deformed code)
    """
    settings = settings or get_settings()
    reps = list(reps)
    parent = as_deformed(code)
    letters = frame_letters(reps)
    branched = list(range(len(reps))) if force else _overlapping(reps)
    tree = BranchTree(
        reps=reps,
        letters=letters,
        root_support=tuple(sorted({q for i in branched for q in reps[i].support})),
        branched=branched,
    )
    builder = DeformationBuilder(parent)
    grown: Dict[int, Tuple[str, List[str], List[int]]] = {}
    if branched:
        supports = {i: list(reps[i].support) for i in branched}
        grown = _TreeBuilder(builder, tree).grow(branched, supports)
    deformed = builder.build(name=f"{parent.name}+branch" if branched else parent.name)

    for i, rep in enumerate(reps):
        extended = rep.extended(deformed.n)
        if i not in grown:
            tree.leaves[i] = LeafRecord(i, rep.support, (), rep.sign, extended.unsigned())
            continue
        sticker_id, path, expected = grown[i]
        leaf_op = product([extended] + [deformed.record(key).op for key in path])
        if not leaf_op.is_z_type() or list(leaf_op.support) != expected:
            raise RuntimeError(f"leaf certificate failed for representative {i}")
        tree.leaves[i] = LeafRecord(i, leaf_op.support, tuple(path), leaf_op.sign, leaf_op.unsigned(), sticker_id)

    supports = [set(leaf.support) for leaf in tree.leaves.values()]
    for a in range(len(supports)):
        for b in range(a + 1, len(supports)):
            if supports[a] & supports[b]:
                raise RuntimeError("leaf representatives overlap")
    audit_commutation(deformed)
    if branched:
        logger.info(
            f"Branched {len(branched)} representatives: depth {tree.depth}, "
            f"{len(tree.stickers)} stickers, {tree.ancilla_count} new qubits"
        )
    return tree, deformed


def audit_commutation(code: Union[DeformedCode, StabilizerCode]) -> None:
    """
    Raises:
        CommutationAuditError: Naming the first anticommuting pair of checks
    """
    ops = code.ops() if isinstance(code, DeformedCode) else list(code.checks)
    pair = commutation_violation(ops)
    if pair is not None:
        logger.error(f"Commutation audit failed for {code.name}: checks {pair}")
        raise CommutationAuditError(pair)


def verify_no_new_logicals(original: AnyCode, deformed: DeformedCode) -> bool:
    """True iff the deformation keeps the number of logical qubits."""
    before = as_deformed(original).k
    after = deformed.k
    if before != after:
        logger.warning(f"Logical count changed from {before} to {after}")
    return before == after


def verify_distance_preserved(deformed: Union[DeformedCode, StabilizerCode], d: int,
                              settings: Optional[Settings] = None) -> Certification:
    """
    Certify that no nontrivial logical of weight below ``d`` exists.

    Returns an inconclusive status when ``d - 1`` exceeds the search cap.
    """
    settings = settings or get_settings()
    code = deformed.stabilizer_code if isinstance(deformed, DeformedCode) else deformed
    cap = d - 1
    if cap <= 0 or code.k == 0:
        return Certification("pass", "nothing to search", {"cap": max(cap, 0)})
    if cap > settings.distance_cap:
        logger.warning(f"Distance check for d={d} exceeds cap {settings.distance_cap}")
        return Certification("inconclusive", f"d-1={cap} above cap {settings.distance_cap}", {"cap": cap})
    result = distance(code, cap=cap, settings=settings)
    if result["exceeds_cap"]:
        return Certification("pass", f"no logical of weight <= {cap}", {"cap": cap})
    return Certification("fail", f"logical of weight {result['distance']}",
                         {"cap": cap, "distance": result["distance"], "witness": result["witness"]})


def leaf_certificate(tree: BranchTree, deformed: DeformedCode) -> bool:
    """Recompute every leaf as representative times its path checks."""
    for i, leaf in tree.leaves.items():
        rep = tree.reps[i].extended(deformed.n)
        recomputed = product([rep] + [deformed.record(k).op for k in leaf.path])
        if recomputed != leaf.operator.with_sign(leaf.sign):
            return False
    return True


def ancilla_count(tree: BranchTree) -> int:
    return tree.ancilla_count


def cost_bound(t: int, omega: int, fanout: int) -> float:
    """``C t w (ceil(log2 t) + 1)`` with ``C = 2 (fanout + 1)``."""
    constant = 2 * (fanout + 1)
    return constant * t * omega * (math.ceil(math.log2(max(t, 1))) + 1)


def deform_x_through_tree(op: PauliOperator, tree: BranchTree, deformed: DeformedCode,
                          allow_leaf_support: bool = True) -> PauliOperator:
    """
    Extend ``op`` onto the new qubits so that it commutes with every check.

    Each sticker first tries edge qubits only, solving ``boundary^T y = a``
    where ``a`` marks the A checks the operator anticommutes with. When that
    fails, the anticommuting part is copied onto the sticker's copy layer and
    pushed into its children.

    Raises:
        UncleanableError: If the operator must reach a leaf and ``allow_leaf_support`` is False
    """
    current = op.extended(deformed.n) if op.n < deformed.n else op
    queue = deque(s.sticker_id for s in tree.roots())
    while queue:
        sticker = tree.stickers[queue.popleft()]
        queue.extend(sticker.children)
        a = [int(anticommuting_letters(current.letter(q), sticker.letters[q])) for q in sticker.layer]
        if not any(a):
            continue
        keys = list(sticker.edge_qubits)
        y = gf2.solve(sticker.boundary.T, GF2Vector(a)) if keys else None
        if y is not None:
            edges = [sticker.edge_qubits[keys[r]] for r in y.support]
            current = multiply(current, PauliOperator.x_type(deformed.n, edges))
            continue
        hits = [sticker.copies[q] for q, bit in zip(sticker.layer, a) if bit]
        if not sticker.children and not allow_leaf_support:
            witness = [sticker.layer[c] for c, bit in enumerate(a) if bit]
            logger.error(f"Operator {op} reaches leaf of sticker {sticker.sticker_id}")
            raise UncleanableError("operator anticommutes with a branched logical", witness=witness)
        current = multiply(current, PauliOperator.x_type(deformed.n, hits))
    for record in deformed.checks:
        if not _commutes(current, record.op):
            raise RuntimeError(f"deformed operator still anticommutes with {record.key}")
    return current


def _commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return (a.x.dot(b.z) + a.z.dot(b.x)) % 2 == 0


def unbranch_correction(
    deformed: DeformedCode,
    outcomes: Dict[int, int],
    z_keys: Sequence[str],
    keep: int,
) -> PauliOperator:
    """
    Pauli on the first ``keep`` qubits undoing the X read-out pattern of the removed qubits.

    Solves ``incidence T = x`` where the incidence has one row per measured qubit and
    one column per check in ``z_keys`` (its Z support there); the correction is the
    product of the chosen checks restricted to the kept qubits.
    """
    measured = sorted(outcomes)
    if not measured:
        return PauliOperator.identity(keep)
    row = {q: r for r, q in enumerate(measured)}
    incidence = np.zeros((len(measured), len(z_keys)), dtype=np.uint8)
    for c, key in enumerate(z_keys):
        check = deformed.record(key).op
        for q in measured:
            if check.z[q]:
                incidence[row[q], c] = 1
    x = GF2Vector([1 if outcomes[q] < 0 else 0 for q in measured])
    chosen = gf2.solve(GF2Matrix(incidence.reshape(len(measured), len(z_keys))), x)
    if chosen is None:
        raise RuntimeError("read-out pattern is inconsistent with the removed checks")
    result = PauliOperator.identity(keep)
    for c in chosen.support:
        result = multiply(result, deformed.record(z_keys[c]).op.restrict(range(keep)))
    return result.unsigned()


def unbranch(deformed: DeformedCode, state: "stabsim.StabilizerState", rng: np.random.Generator,
             keep: Optional[int] = None, z_keys: Optional[Sequence[str]] = None,
             ) -> Tuple["stabsim.StabilizerState", PauliOperator, Dict[int, int]]:
    """
    Measure the new qubits out in the X basis and return to the smaller code.

    Args:
        deformed: Code the state currently lives in
        state: Simulator state on ``deformed.n`` qubits (modified in place)
        rng: Outcome generator
        keep: Number of qubits kept (defaults to the original code size)
        z_keys: Checks carrying Z on the removed qubits (defaults to branch vertex checks)

    Returns:
        (state on ``keep`` qubits, applied correction, read-out outcomes)
    """
    keep = deformed.base.n if keep is None else keep
    if z_keys is None:
        z_keys = [c.key for c in deformed.select(provenance="branch", role="vertex")]
    removed = list(range(keep, deformed.n))
    if not removed:
        return state, PauliOperator.identity(keep), {}
    outcomes: Dict[int, int] = {}
    for q in removed:
        outcome, state = stabsim.measure(state, PauliOperator.x_type(state.n, [q]), rng)
        outcomes[q] = outcome
    correction = unbranch_correction(deformed, outcomes, z_keys, keep)
    state = stabsim.discard_qubits(state, removed)
    state = stabsim.apply_pauli(state, correction)
    logger.debug(f"Removed {len(removed)} qubits, correction {correction}")
    return state, correction, outcomes
