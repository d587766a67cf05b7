"""
CSS code service: validation, logical operators, distance, products and Tanner graphs.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, TypedDict, Union

import networkx as nx
import numpy as np

from ..config import Settings, get_settings
from ..exceptions import CssViolationError, DimensionMismatchError
from ..models.codes import (
    EDGE_LABELS,
    LABEL_BITS,
    CssCode,
    LdpcAudit,
    StabilizerCode,
    TannerGraph,
    ValidationReport,
)
from ..models.pauli import PauliOperator, commutes, multiply, symplectic_product
from ..utils import gf2
from ..utils.gf2 import GF2Matrix, GF2Vector
from ..utils.search import Element, min_weight_logical

logger = logging.getLogger(__name__)

AnyCode = Union[CssCode, StabilizerCode]


class DistanceResult(TypedDict, total=False):
    """Outcome of a distance search."""
    distance: Optional[int]
    certified: bool
    exceeds_cap: bool
    cap: int
    x_distance: Optional[int]
    z_distance: Optional[int]
    witness: Optional[str]


def ldpc_audit(code: AnyCode, sigma: Optional[int] = None) -> LdpcAudit:
    """
    Maximum check weight and qubit degree, with pass/fail only when ``sigma`` is given.

    Args:
        code: CSS or stabilizer code
        sigma: Weight bound, or None to report maxima only
    """
    if isinstance(code, CssCode):
        stacked = GF2Matrix.vstack([code.hx, code.hz])
        check_weights = stacked.row_weights()
        degrees = stacked.column_weights()
    else:
        support = np.zeros((len(code.checks), code.n), dtype=np.uint8)
        for i, check in enumerate(code.checks):
            support[i, list(check.support)] = 1
        check_weights = [int(w) for w in support.sum(axis=1)]
        degrees = [int(d) for d in support.sum(axis=0)]
    max_weight = max(check_weights, default=0)
    max_degree = max(degrees, default=0)
    passed = None if sigma is None else (max_weight <= sigma and max_degree <= sigma)
    return LdpcAudit(max_check_weight=max_weight, max_qubit_degree=max_degree, sigma=sigma, passed=passed)


def validate(code: CssCode, sigma: Optional[int] = None) -> ValidationReport:
    """
    Check ``hx hz^T = 0`` and audit weights.

    Raises:
        CssViolationError: Naming the first anticommuting (X check, Z check) pair
    """
    overlap = code.hx @ code.hz.T
    if not overlap.is_zero():
        i, j = min(overlap.entries)
        logger.error(f"Code {code.name} violates CSS orthogonality at checks ({i}, {j})")
        raise CssViolationError(i, j)
    k = code.k
    if k < 0:
        raise RuntimeError(f"negative k for {code.name}")
    audit = ldpc_audit(code, sigma)
    logger.info(f"Validated {code.name}: n={code.n}, k={k}, max weight {audit['max_check_weight']}")
    return ValidationReport(n=code.n, k=k, audit=audit)


def _independent_mod(span: GF2Matrix, candidates: GF2Matrix) -> GF2Matrix:
    chosen = gf2.complement_basis(span, candidates)
    return candidates.submatrix(rows=chosen)


def logical_operators(code: CssCode) -> Tuple[List[PauliOperator], List[PauliOperator]]:
    """
    Z-type and X-type logical bases with identity pairing matrix.

    Z logicals span ker(hx) modulo the row space of hz; X logicals span ker(hz)
    modulo the row space of hx, re-paired so that X_i anticommutes with Z_j iff i == j.
    """
    z_candidates = _independent_mod(code.hz, gf2.kernel(code.hx))
    x_candidates = _independent_mod(code.hx, gf2.kernel(code.hz))
    k = code.k
    if z_candidates.rows != k or x_candidates.rows != k:
        raise RuntimeError(f"logical count mismatch: {z_candidates.rows}/{x_candidates.rows} vs k={k}")
    if k == 0:
        return [], []
    pairing = x_candidates @ z_candidates.T
    x_basis = gf2.inverse(pairing) @ x_candidates
    z_ops = [PauliOperator.z_type(code.n, z_candidates.row_support(i)) for i in range(k)]
    x_ops = [PauliOperator.x_type(code.n, x_basis.row_support(i)) for i in range(k)]
    return z_ops, x_ops


def dual_x_basis(code: CssCode, z_reps: Sequence[GF2Vector]) -> List[GF2Vector]:
    """X-logical supports paired to the given Z-logical supports (identity pairing)."""
    if not z_reps:
        return []
    x_candidates = _independent_mod(code.hx, gf2.kernel(code.hz))
    z_matrix = GF2Matrix.from_vectors(list(z_reps))
    pairing = x_candidates @ z_matrix.T
    x_basis = gf2.inverse(pairing) @ x_candidates
    return [x_basis.row(i) for i in range(x_basis.rows)]


def _omega_swap(matrix: GF2Matrix, n: int) -> GF2Matrix:
    """Swap the x and z halves so that ordinary products become symplectic products."""
    return GF2Matrix(np.hstack([matrix.array[:, n:], matrix.array[:, :n]]))


def stabilizer_logical_operators(code: StabilizerCode) -> List[Tuple[PauliOperator, PauliOperator]]:
    """
    Symplectic logical basis of a general stabilizer code as (X-like, Z-like) pairs.

    Pairs anticommute with each other and commute with every other returned operator.
    """
    n = code.n
    checks = code.symplectic_matrix
    normalizer = gf2.kernel(_omega_swap(checks, n)) if checks.rows else GF2Matrix.identity(2 * n)
    logicals = _independent_mod(checks, normalizer)
    pool = [PauliOperator.from_symplectic(logicals.array[i]) for i in range(logicals.rows)]
    pairs: List[Tuple[PauliOperator, PauliOperator]] = []
    while pool:
        a = pool.pop(0)
        partner = next((i for i, b in enumerate(pool) if not commutes(a, b)), None)
        if partner is None:
            raise RuntimeError("logical basis has no symplectic partner")
        b = pool.pop(partner)
        reduced = []
        for c in pool:
            if not commutes(c, b):
                c = _sym_add(c, a)
            if not commutes(c, a):
                c = _sym_add(c, b)
            reduced.append(c)
        pool = reduced
        pairs.append((a, b))
    return pairs


def _sym_add(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    return PauliOperator.from_symplectic((a.symplectic + b.symplectic) % 2)


def _css_search_sites(checks: GF2Matrix, logicals: Sequence[GF2Vector]) -> List[List[Element]]:
    sites = []
    for q in range(checks.cols):
        syndrome = 0
        for r in checks.column_support(q):
            syndrome |= 1 << r
        signature = 0
        for j, logical in enumerate(logicals):
            if logical[q]:
                signature |= 1 << j
        sites.append([Element(syndrome, signature)])
    return sites


def _pauli_search_sites(code: StabilizerCode, logicals: Sequence[PauliOperator]) -> List[List[Element]]:
    n = code.n
    sites = []
    for q in range(n):
        options = []
        for letter in ("X", "Z", "Y"):
            single = PauliOperator.from_letters(n, {q: letter})
            syndrome = 0
            for r, check in enumerate(code.checks):
                if not commutes(single, check):
                    syndrome |= 1 << r
            signature = 0
            for j, logical in enumerate(logicals):
                if not commutes(single, logical):
                    signature |= 1 << j
            options.append(Element(syndrome, signature))
        sites.append(options)
    return sites


def _resolve_cap(cap: Optional[int], settings: Settings) -> int:
    cap = settings.distance_cap if cap is None else cap
    if cap > settings.distance_cap:
        raise ValueError(f"cap {cap} exceeds the exhaustive limit {settings.distance_cap}")
    return cap


def distance(code: AnyCode, cap: Optional[int] = None, settings: Optional[Settings] = None) -> DistanceResult:
    """
    Exact minimum weight of a nontrivial logical operator, if at most ``cap``.

    CSS codes are searched per Pauli type; other codes over all three letters
    per qubit. When nothing is found up to ``cap`` the result has
    ``exceeds_cap`` set and ``distance`` None.
    """
    settings = settings or get_settings()
    cap = _resolve_cap(cap, settings)
    if isinstance(code, CssCode):
        return _css_distance(code, cap)
    return _stabilizer_distance(code, cap)


def _css_distance(code: CssCode, cap: int) -> DistanceResult:
    z_ops, x_ops = logical_operators(code)
    if not z_ops:
        return DistanceResult(distance=None, certified=True, exceeds_cap=False, cap=cap,
                              x_distance=None, z_distance=None, witness=None)
    # X-type errors are caught by Z checks and detected logically by Z logicals
    x_search = min_weight_logical(_css_search_sites(code.hz, [op.z for op in z_ops]), cap)
    z_search = min_weight_logical(_css_search_sites(code.hx, [op.x for op in x_ops]), cap)
    found = [w for w in (x_search.weight, z_search.weight) if w is not None]
    best = min(found) if found else None
    witness = None
    if best is not None:
        if x_search.weight == best:
            witness = PauliOperator.x_type(code.n, [q for q, _ in x_search.witness])
        else:
            witness = PauliOperator.z_type(code.n, [q for q, _ in z_search.witness])
    logger.info(f"Distance of {code.name}: {best if best is not None else f'> {cap}'}")
    return DistanceResult(
        distance=best,
        certified=True,
        exceeds_cap=best is None,
        cap=cap,
        x_distance=x_search.weight,
        z_distance=z_search.weight,
        witness=str(witness) if witness is not None else None,
    )


def _stabilizer_distance(code: StabilizerCode, cap: int) -> DistanceResult:
    pairs = stabilizer_logical_operators(code)
    if not pairs:
        return DistanceResult(distance=None, certified=True, exceeds_cap=False, cap=cap, witness=None)
    logicals = [op for pair in pairs for op in pair]
    search = min_weight_logical(_pauli_search_sites(code, logicals), cap)
    witness = None
    if search.found:
        letters = {q: ("X", "Z", "Y")[e] for q, e in search.witness}
        witness = PauliOperator.from_letters(code.n, letters)
    logger.info(f"Distance of {code.name}: {search.weight if search.found else f'> {cap}'}")
    return DistanceResult(
        distance=search.weight,
        certified=True,
        exceeds_cap=not search.found,
        cap=cap,
        witness=str(witness) if witness is not None else None,
    )


def distance_upper_bound(code: CssCode, trials: int = 200, seed: int = 0) -> DistanceResult:
    """
    Randomized information-set estimate; an upper bound only, never certified.
    """
    z_ops, x_ops = logical_operators(code)
    if not z_ops:
        return DistanceResult(distance=None, certified=False, exceeds_cap=False, cap=0, witness=None)
    rng = np.random.default_rng(seed)
    best: Optional[int] = None
    best_op: Optional[PauliOperator] = None
    for checks, logicals, make in (
        (code.hz, [op.z for op in z_ops], PauliOperator.x_type),
        (code.hx, [op.x for op in x_ops], PauliOperator.z_type),
    ):
        logical_matrix = GF2Matrix.from_vectors(logicals)
        for _ in range(trials):
            order = rng.permutation(code.n)
            basis = gf2.kernel(checks.submatrix(cols=order))
            for i in range(basis.rows):
                vector = np.zeros(code.n, dtype=np.uint8)
                vector[order] = basis.array[i]
                if not (logical_matrix @ GF2Vector(vector)).is_zero():
                    weight = int(vector.sum())
                    if best is None or weight < best:
                        best = weight
                        best_op = make(code.n, np.flatnonzero(vector))
    logger.warning(f"Distance upper bound for {code.name} is not certified: {best}")
    return DistanceResult(distance=best, certified=False, exceeds_cap=False, cap=0,
                          witness=str(best_op) if best_op is not None else None)


def hypergraph_product(c: GF2Matrix, d: GF2Matrix, name: Optional[str] = None) -> CssCode:
    """
    Hypergraph product of two classical check matrices.

    For ``c`` (m1 x n1) and ``d`` (m2 x n2) the qubits are n1*n2 + m1*m2 and
    ``hx = [c (x) I | I (x) d^T]``, ``hz = [I (x) d | c^T (x) I]``.
    """
    m1, n1 = c.shape
    m2, n2 = d.shape
    hx = GF2Matrix.hstack([c.kron(GF2Matrix.identity(n2)), GF2Matrix.identity(m1).kron(d.T)])
    hz = GF2Matrix.hstack([GF2Matrix.identity(n1).kron(d), c.T.kron(GF2Matrix.identity(m2))])
    code = CssCode(hx, hz, name=name or f"hgp_{m1}x{n1}_{m2}x{n2}")
    logger.debug(f"Built hypergraph product with n={code.n}")
    return code


def direct_sum(a: CssCode, b: CssCode, name: Optional[str] = None) -> CssCode:
    """Two code blocks side by side; qubits of ``b`` follow those of ``a``."""
    def block(top: GF2Matrix, bottom: GF2Matrix) -> GF2Matrix:
        upper = GF2Matrix.hstack([top, GF2Matrix.zeros(top.rows, bottom.cols)])
        lower = GF2Matrix.hstack([GF2Matrix.zeros(bottom.rows, top.cols), bottom])
        return GF2Matrix.vstack([upper, lower])
    return CssCode(block(a.hx, b.hx), block(a.hz, b.hz), name=name or f"{a.name}+{b.name}")


def repetition_code(length: int) -> GF2Matrix:
    """Open-chain repetition check matrix, (length-1) x length."""
    return GF2Matrix.from_supports([(i, i + 1) for i in range(length - 1)], length)


def cycle_code(length: int) -> GF2Matrix:
    """Closed-chain repetition check matrix, length x length."""
    return GF2Matrix.from_supports([(i, (i + 1) % length) for i in range(length)], length)


def punctured_repetition(length: int) -> GF2Matrix:
    """Column vector of ones: one bit checked by ``length`` checks."""
    return GF2Matrix(np.ones((length, 1), dtype=np.uint8))


def shor_code() -> CssCode:
    """The [[9,1,3]] Shor code."""
    hz = GF2Matrix.from_supports([(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)], 9)
    hx = GF2Matrix.from_supports([range(0, 6), range(3, 9)], 9)
    return CssCode(hx, hz, name="shor")


def cycle_hgp_code(length: int = 3) -> CssCode:
    """Hypergraph product of two closed repetition codes; length 3 gives [[18,2,3]]."""
    return hypergraph_product(cycle_code(length), cycle_code(length), name=f"hgp_cycle{length}")


def tanner_graph(code: AnyCode) -> TannerGraph:
    """Bipartite Tanner graph with letter-labelled edges."""
    stabilizer = code.to_stabilizer_code() if isinstance(code, CssCode) else code
    graph = nx.Graph()
    graph.add_nodes_from((("q", i) for i in range(stabilizer.n)), bipartite=0)
    check_types = []
    for j, check in enumerate(stabilizer.checks):
        if check.is_x_type():
            check_type = "X"
        elif check.is_z_type():
            check_type = "Z"
        else:
            check_type = "mixed"
        check_types.append(check_type)
        graph.add_node(("c", j), bipartite=1, check_type=check_type)
        for q in check.support:
            bits = (check.x[q], check.z[q])
            graph.add_edge(("q", q), ("c", j), label=EDGE_LABELS[bits])
    return TannerGraph(graph=graph, n=stabilizer.n, num_checks=len(stabilizer.checks), check_types=check_types)


def from_tanner(tanner: TannerGraph, name: str = "from_tanner") -> StabilizerCode:
    """Inverse of :func:`tanner_graph` on the stabilizer-code level."""
    checks = []
    for j in range(tanner.num_checks):
        letters = {}
        for neighbor in tanner.graph.neighbors(("c", j)):
            bits = LABEL_BITS[tanner.graph.edges[neighbor, ("c", j)]["label"]]
            letters[neighbor[1]] = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[bits]
        checks.append(PauliOperator.from_letters(tanner.n, letters))
    return StabilizerCode(tuple(checks), tanner.n, name=name)


def css_from_tanner(tanner: TannerGraph, name: str = "from_tanner") -> CssCode:
    """Rebuild a CSS code whose check nodes are all X or Z typed."""
    code = from_tanner(tanner, name)
    x_rows = [c.x.support for c, t in zip(code.checks, tanner.check_types) if t == "X"]
    z_rows = [c.z.support for c, t in zip(code.checks, tanner.check_types) if t == "Z"]
    if len(x_rows) + len(z_rows) != tanner.num_checks:
        raise ValueError("Tanner graph has mixed checks; use from_tanner")
    return CssCode(GF2Matrix.from_supports(x_rows, tanner.n), GF2Matrix.from_supports(z_rows, tanner.n), name=name)


def commutation_violation(checks: Sequence[PauliOperator]) -> Optional[Tuple[int, int]]:
    """First anticommuting pair of checks, or None."""
    if not checks:
        return None
    n = checks[0].n
    matrix = np.vstack([c.symplectic for c in checks]).astype(np.int64)
    swapped = np.hstack([matrix[:, n:], matrix[:, :n]])
    gram = (matrix @ swapped.T) % 2
    bad = np.argwhere(np.triu(gram, 1))
    if bad.size == 0:
        return None
    i, j = bad[0]
    return int(i), int(j)


def is_stabilizer_element(code: StabilizerCode, op: PauliOperator) -> bool:
    """True when ``op`` (ignoring phase) lies in the group generated by the checks."""
    if op.n != code.n:
        raise DimensionMismatchError("operator size", code.n, op.n)
    member, _ = gf2.row_space_member(code.symplectic_matrix, GF2Vector(op.symplectic))
    return member


def is_nontrivial_logical(code: StabilizerCode, op: PauliOperator) -> bool:
    """Commutes with every check and is not itself in the check group."""
    return all(commutes(op, c) for c in code.checks) and not is_stabilizer_element(code, op)


def group_product(code: StabilizerCode, op: PauliOperator) -> Optional[Tuple[List[int], PauliOperator]]:
    """
    Express ``op`` as an exact product of checks.

    Returns:
        (check indices, exact product) when ``op`` is in the group up to phase, else None
    """
    member, combination = gf2.row_space_member(code.symplectic_matrix, GF2Vector(op.symplectic))
    if not member:
        return None
    result = PauliOperator.identity(code.n)
    for i in combination:
        result = multiply(result, code.checks[i])
    return combination, result
