"""
Surgery planner: from a measurement request to a certified SurgeryPlan.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Settings, get_settings
from ..constants.measurement_modes import normalize_mode
from ..exceptions import CertificationError, DesiderataError, NotALogicalError, RequestModeError
from ..models.codes import CssCode
from ..models.deformation import DeformedCode, as_deformed
from ..models.pauli import (
    LogicalPauliProduct,
    PauliOperator,
    commutes,
    compatibility_violation,
    disjoint_violation,
    multiply,
    product,
    same_or_identity_compatible,
)
from ..models.plan import (
    Adapter,
    AuxGraph,
    Certification,
    CostLedger,
    LogicalBasis,
    MeasurementRequest,
    ProductMeasurement,
    SurgeryPlan,
    TwistFreeGadget,
    Window,
)
from ..utils import gf2
from ..utils.gf2 import GF2Matrix
from . import gauging
from .branching import build_branch_tree, leaf_certificate, verify_distance_preserved
from .css_codes import (
    commutation_violation,
    direct_sum,
    distance,
    group_product,
    is_stabilizer_element,
    ldpc_audit,
)
from .logical_basis import basis_to_json, logical_basis, representative_for

logger = logging.getLogger(__name__)


# request checks

def logical_commutation_violation(products: Sequence[LogicalPauliProduct], k: int) -> Optional[Tuple[int, int]]:
    ops = [p.to_operator(k) for p in products]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not commutes(ops[i], ops[j]):
                return i, j
    return None


def check_request(request: MeasurementRequest, k: int) -> str:
    """
    Validate a request against its mode.

    Returns:
        The canonical mode name

    Raises:
        RequestModeError: Naming the first pair of products that violates the mode
    """
    mode = normalize_mode(request.mode)
    products = list(request.products)
    if not products:
        raise RequestModeError("request has no products")
    for p in products:
        p.to_operator(k)
    if mode == "disjoint":
        pair = disjoint_violation(products)
        if pair is not None:
            raise RequestModeError(f"products {pair[0]} and {pair[1]} share a logical qubit", pair)
    elif mode == "same-or-identity":
        pair = compatibility_violation(products)
        if pair is not None:
            raise RequestModeError(f"products {pair[0]} and {pair[1]} act differently on a logical qubit", pair)
    else:
        pair = logical_commutation_violation(products, k)
        if pair is not None:
            raise RequestModeError(f"products {pair[0]} and {pair[1]} anticommute", pair)
    return mode


# regular splits

def _gram(a: PauliOperator, b: PauliOperator) -> int:
    """``u_a . v_b`` for ``a = X(u_a) Z(v_a)`` up to phase."""
    return a.x.dot(b.z)


def is_regular(theta: Sequence[PauliOperator]) -> bool:
    """True iff ``u_i . v_j = 0`` for every pair ``i != j``."""
    return all(
        _gram(theta[i], theta[j]) == 0
        for i in range(len(theta)) for j in range(len(theta)) if i != j
    )


def span_equal(a: Sequence[PauliOperator], b: Sequence[PauliOperator]) -> bool:
    """True iff both sets generate the same group up to phases."""
    if not a or not b:
        return not [p for p in list(a) + list(b) if not p.is_identity()]
    ma = GF2Matrix(np.vstack([p.symplectic for p in a]))
    mb = GF2Matrix(np.vstack([p.symplectic for p in b]))
    ra, rb = gf2.rank(ma), gf2.rank(mb)
    return ra == rb == gf2.rank(GF2Matrix.vstack([ma, mb]))


def _regular_split(theta: Sequence[PauliOperator]) -> Tuple[List[Tuple[PauliOperator, int]], List[Tuple[PauliOperator, int]]]:
    """
    Elements of both subsets, each paired with the bitmask of input elements it is a product of.
    """
    pool: List[Tuple[PauliOperator, int]] = [(op, 1 << i) for i, op in enumerate(theta)]
    singles: List[Tuple[PauliOperator, int]] = []
    pairs: List[Tuple[Tuple[PauliOperator, int], Tuple[PauliOperator, int]]] = []

    def combine(x, y):
        return multiply(x[0], y[0]), x[1] ^ y[1]

    while pool:
        pool = [item for item in pool if not item[0].is_identity()]
        if not pool:
            break
        odd = next((i for i, item in enumerate(pool) if _gram(item[0], item[0])), None)
        if odd is not None:
            a = pool.pop(odd)
            singles.append(a)
            pool = [combine(x, a) if _gram(x[0], a[0]) else x for x in pool]
            continue
        a = pool.pop(0)
        partner = next((i for i, x in enumerate(pool) if _gram(a[0], x[0])), None)
        if partner is None:
            singles.append(a)
            continue
        b = pool.pop(partner)
        pairs.append((a, b))
        updated = []
        for x in pool:
            if _gram(x[0], b[0]):
                x = combine(x, a)
            if _gram(x[0], a[0]):
                x = combine(x, b)
            updated.append(x)
        pool = updated
    first = singles + [a for a, _ in pairs]
    second = [b for _, b in pairs]
    return first, second


def regularize(theta: Sequence[PauliOperator]) -> Tuple[List[PauliOperator], List[PauliOperator]]:
    """
    Split a commuting set into two regular subsets generating the same group.

    Raises:
        RequestModeError: If two elements anticommute
    """
    theta = list(theta)
    for i in range(len(theta)):
        for j in range(i + 1, len(theta)):
            if not commutes(theta[i], theta[j]):
                raise RequestModeError(f"elements {i} and {j} anticommute", (i, j))
    first, second = _regular_split(theta)
    first_ops = [op for op, _ in first]
    second_ops = [op for op, _ in second]
    if not (is_regular(first_ops) and is_regular(second_ops)):
        raise RuntimeError("regular split produced an irregular subset")
    if not span_equal(theta, first_ops + second_ops):
        raise RuntimeError("regular split changed the generated group")
    return first_ops, second_ops


def _as_product(op: PauliOperator, offset: int = 0) -> LogicalPauliProduct:
    return LogicalPauliProduct({q + offset: letter for q, letter in op.letters().items()})


def twist_free_decompose(p: LogicalPauliProduct, ancilla_a: Optional[int] = None,
                         ancilla_b: Optional[int] = None, subset: str = "theta1") -> TwistFreeGadget:
    """
    Split ``P = i^(u.v) X(u) Z(v)`` into two products without Y letters.

    An odd ``u.v`` needs the |Y> catalyst ``ancilla_b``. Ancillas default to
    the first logical indices after the product.
    """
    if ancilla_a is None:
        ancilla_a = max(p.indices) + 1
    if ancilla_b is None and p.y_parity:
        ancilla_b = ancilla_a + 1
    letters = p.as_dict()
    u = [i for i, letter in letters.items() if letter in ("X", "Y")]
    v = [i for i, letter in letters.items() if letter in ("Z", "Y")]
    y_count = sum(1 for letter in letters.values() if letter == "Y")
    parity = y_count % 2
    if ancilla_a in letters or (ancilla_b is not None and ancilla_b in letters):
        raise ValueError("ancilla logical overlaps the product")
    first = {i: "X" for i in u}
    second = {i: "Z" for i in v}
    first[ancilla_a] = "X"
    second[ancilla_a] = "X"
    correction = {i: "Z" for i in v}
    correction[ancilla_a] = "X"
    if parity:
        if ancilla_b is None:
            raise ValueError(f"{p} has odd Y parity and needs a catalyst")
        first[ancilla_b] = "X"
        second[ancilla_b] = "Z"
        correction[ancilla_b] = "Z"
    else:
        ancilla_b = None
    return TwistFreeGadget(
        product=p,
        parity=parity,
        ancilla_a=ancilla_a,
        ancilla_b=ancilla_b,
        first=LogicalPauliProduct(first),
        second=LogicalPauliProduct(second),
        correction=LogicalPauliProduct(correction),
        phase=(y_count + parity) % 4,
        subset=subset,
    )


# cost accounting

def cost_constant(max_qubit_degree: int, layers: int) -> int:
    return (max_qubit_degree + 1) + (5 * layers + 1)


def cost_bound(constant: int, total_terms: int, omega: int) -> float:
    """``C T w (ceil(log2 max(T, 2)) + ln(max(w, 2))^3)``."""
    return constant * total_terms * omega * (
        math.ceil(math.log2(max(total_terms, 2))) + math.log(max(omega, 2)) ** 3
    )


def _ledger(code: CssCode, branch_code: DeformedCode, measure_code: DeformedCode, windows: List[Window],
            reps: List[PauliOperator], graphs: List[AuxGraph]) -> CostLedger:
    f = ldpc_audit(code)["max_qubit_degree"]
    layers = max((g.layers for g in graphs), default=1)
    constant = cost_constant(f, layers)
    total_terms = len(reps)
    omega = max((r.weight for r in reps), default=0)
    original_checks = len(as_deformed(code).checks)
    return CostLedger(
        ancilla_qubits=measure_code.n - code.n,
        new_checks=len(measure_code.checks) - original_checks,
        rounds=sum(w.rounds for w in windows),
        total_terms=total_terms,
        omega=omega,
        max_qubit_degree=f,
        layers=layers,
        constant=constant,
        bound=cost_bound(constant, total_terms, omega),
        branch_ancillas=branch_code.n - code.n,
        gauge_ancillas=measure_code.n - branch_code.n,
    )


# planning

def _physical_product(reps: Sequence[PauliOperator], n: int) -> PauliOperator:
    return product([r.extended(n) if r.n < n else r for r in reps], n)


def _direct_ancillas(code: CssCode, reps: Sequence[PauliOperator], occurrences: Sequence[Tuple[int, int, str]],
                     products: Sequence[LogicalPauliProduct], settings: Settings, seed: int) -> Optional[int]:
    """Edge qubits needed if each multi-term product got a single graph over its whole support."""
    total = None
    for pi, prod in enumerate(products):
        terms = [o for o, occ in enumerate(occurrences) if occ[0] == pi]
        if len(terms) < 2:
            continue
        physical = _physical_product([reps[o] for o in terms], code.n)
        try:
            aux = gauging.measure_product_directly(code, physical, settings, seed)
        except (NotALogicalError, DesiderataError) as e:
            logger.debug(f"No direct graph for {prod}: {e}")
            continue
        total = (total or 0) + aux.graph.number_of_edges()
    return total


def _odd_keys(keys) -> List[str]:
    """Keys occurring an odd number of times, in first-seen order."""
    counts: Dict[str, int] = {}
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    return [key for key, c in counts.items() if c % 2]


def _sign_of(ops: Sequence[PauliOperator], target: PauliOperator) -> int:
    """``s`` with ``product(ops) = s * target``; ops are padded to the target size."""
    n = target.n
    recomputed = product([op.extended(n) if op.n < n else op for op in ops], n)
    if recomputed == target:
        return 1
    if recomputed == target.negated():
        return -1
    raise RuntimeError("measured checks do not multiply to the requested product")


def _gauge_graph(
    current: DeformedCode,
    group: str,
    terms: Sequence[int],
    leaf_ops: Sequence[PauliOperator],
    target: PauliOperator,
    settings: Settings,
    graph_seed: int,
    d: Optional[int],
) -> Tuple[AuxGraph, List[Adapter], PauliOperator, int]:
    """
    Auxiliary graph for one product: one graph per term, chained by adapters.

    When no adapter certifies, every term graph is rebuilt from fresh seeds,
    up to ``settings.adapter_retries`` times.

    Returns:
        (graph, adapters, gauged operator, next unused graph seed)

    Raises:
        CertificationError: If the last rebuild still has no certified adapter
    """
    failure: Optional[CertificationError] = None
    for attempt in range(settings.adapter_retries):
        term_graphs = []
        for o, leaf in zip(terms, leaf_ops):
            term_graphs.append(gauging.build_aux_graph(current, leaf, settings, graph_seed, name=f"{group}.{o}"))
            graph_seed += settings.graph_retries
        if len(term_graphs) == 1:
            return term_graphs[0], [], target, graph_seed
        try:
            merged, adapters, product_op = gauging.chain_adapters(current, term_graphs, leaf_ops, settings,
                                                                  distance_hint=d or 1, name=group,
                                                                  seed=graph_seed, distance=d)
            return merged, adapters, product_op, graph_seed
        except CertificationError as e:
            failure = e
            logger.warning(f"No adapter for {group} on graph attempt {attempt}: {e}")
    raise failure


def _schedule(rounds: int, branch_code: DeformedCode, measure_code: DeformedCode, branched: bool,
              products: List[str], single_window: bool) -> List[Window]:
    if not branched:
        return [Window("measure", rounds, measure_code, products)]
    if single_window:
        return [Window("branch+measure", rounds, measure_code, products),
                Window("unbranch", 1, branch_code)]
    return [Window("branch", rounds, branch_code), Window("measure", rounds, measure_code, products),
            Window("unbranch", 1, branch_code)]


def plan(
    code: CssCode,
    request: MeasurementRequest,
    settings: Optional[Settings] = None,
    seed: Optional[int] = None,
    force_branch: bool = False,
    basis: Optional[LogicalBasis] = None,
) -> SurgeryPlan:
    """
    Synthesize the branching and gauging deformations measuring every product of ``request``.

    Args:
        code: Original CSS code
        request: Products and mode
        settings: Bounds and defaults
        seed: Seed for auxiliary graph generation
        force_branch: Branch even representatives that overlap nothing
        basis: Precomputed logical basis

    Returns:
        SurgeryPlan with its certifications filled in; failed certifications
        of the finished deformation are reported, not raised

    Raises:
        RequestModeError: If the request violates its mode
        DesiderataError: If a term gets no auxiliary graph within the retry budget
        CertificationError: If a product gets no certified adapter after every graph rebuild
    """
    settings = settings or get_settings()
    seed = settings.seed if seed is None else seed
    mode = check_request(request, code.k)
    products = list(request.products)
    if mode == "commuting" and not same_or_identity_compatible(products):
        return plan_commuting_set(code, products, settings, seed, force_branch)

    basis = basis or logical_basis(code)
    occurrences: List[Tuple[int, int, str]] = []
    reps: List[PauliOperator] = []
    for pi, prod in enumerate(products):
        for index, letter in prod.terms:
            occurrences.append((pi, index, letter))
            reps.append(representative_for(basis, index, letter))

    dist = distance(code, settings=settings)
    d = dist["distance"]
    tree, branch_code = build_branch_tree(code, reps, basis, force=force_branch, settings=settings)
    logger.info(f"Planning {len(products)} products ({mode}) on {code.name}: {len(reps)} terms, "
                f"{len(tree.branched)} branched")

    current = branch_code
    measurements: List[ProductMeasurement] = []
    graphs: List[AuxGraph] = []
    desiderata: Dict[str, bool] = {}
    graph_seed = seed
    for pi, prod in enumerate(products):
        group = f"p{pi}"
        terms = [o for o, occ in enumerate(occurrences) if occ[0] == pi]
        leaf_ops = [tree.leaves[o].operator.extended(current.n) for o in terms]
        target = product(leaf_ops, current.n)
        physical = _physical_product([reps[o] for o in terms], current.n)
        if is_stabilizer_element(current.stabilizer_code, physical):
            combination = group_product(current.stabilizer_code, physical)
            keys = [current.checks[i].key for i in combination[0]]
            sign = _sign_of([current.checks[i].op for i in combination[0]], physical)
            logger.info(f"Product {prod} is already fixed by earlier measurements")
            measurements.append(ProductMeasurement(prod, group, None, physical, target, keys, sign, terms))
            continue

        merged, adapters, target, graph_seed = _gauge_graph(current, group, terms, leaf_ops, target, settings,
                                                            graph_seed, d)
        report = gauging.check_desiderata(gauging.compute_matchings(merged, current), current, settings, d)
        desiderata[group] = report["passed"]
        bridging = [e for a in adapters for e in a.edges]
        current, merged = gauging.deform_with_gauge(current, merged, target, group, bridging,
                                                    name=f"{code.name}+{group}")
        graphs.append(merged)
        vertex = gauging.vertex_keys(merged, group)
        paths = _odd_keys(k for o in terms for k in tree.leaves[o].path)
        # path checks as they were before any gauging extended them
        ops = [current.record(k).op for k in vertex] + [branch_code.record(k).op for k in paths]
        sign = _sign_of(ops, physical.extended(current.n))
        measurements.append(ProductMeasurement(prod, group, merged, physical, target, vertex + paths, sign,
                                               terms, adapters))

    measure_code = current

    products_text = [str(p) for p in products]
    windows = _schedule(max(d or 1, 1), branch_code, measure_code, not tree.is_trivial, products_text,
                        settings.experimental_single_window)
    result = SurgeryPlan(
        code=code,
        products=products,
        mode=mode,
        basis=basis,
        seed=seed,
        tree=tree,
        branch_code=branch_code,
        measure_code=measure_code,
        measurements=measurements,
        windows=windows,
        distance=d,
    )
    result.ledger = _ledger(code, branch_code, measure_code, windows, reps, graphs)
    result.ledger.direct_ancillas = _direct_ancillas(code, reps, occurrences, products, settings, seed)
    result.certifications = certify(result, settings, desiderata)
    status = "certified" if result.certified else f"failed {result.failed_certifications()}"
    logger.info(f"Plan for {products_text}: {result.ledger.ancilla_qubits} ancilla qubits, {status}")
    return result


def certify(result: SurgeryPlan, settings: Settings, desiderata: Dict[str, bool]) -> Dict[str, Certification]:
    """Recompute every certification of a single-stage plan."""
    code = result.code
    measure_code = result.measure_code
    certs: Dict[str, Certification] = {}
    pair = commutation_violation(measure_code.ops())
    certs["commutation"] = Certification("pass" if pair is None else "fail",
                                         "all checks commute" if pair is None else f"checks {pair} anticommute")

    ops = [p.to_operator(code.k).symplectic for p in result.products]
    expected = code.k - gf2.rank(GF2Matrix(np.vstack(ops)))
    found = measure_code.k
    certs["k_accounting"] = Certification("pass" if found == expected else "fail",
                                          f"k={found}, expected {expected}", {"k": found, "expected": expected})

    if result.tree is not None and not result.tree.is_trivial:
        ok = leaf_certificate(result.tree, result.branch_code)
        certs["leaf_certificate"] = Certification("pass" if ok else "fail", "leaves recomputed")
        kept = result.branch_code.k == code.k
        certs["branch_k"] = Certification("pass" if kept else "fail", f"k={result.branch_code.k}")

    if result.distance is None:
        certs["distance"] = Certification("inconclusive", "code distance exceeds the search cap")
    else:
        certs["distance"] = verify_distance_preserved(measure_code, result.distance, settings)
        if result.tree is not None and not result.tree.is_trivial:
            certs["branch_distance"] = verify_distance_preserved(result.branch_code, result.distance, settings)

    audit = ldpc_audit(measure_code.stabilizer_code, settings.sigma)
    certs["ldpc"] = Certification("pass" if audit["passed"] else "fail",
                                  f"max weight {audit['max_check_weight']}, max degree {audit['max_qubit_degree']}",
                                  {"max_check_weight": audit["max_check_weight"],
                                   "max_qubit_degree": audit["max_qubit_degree"], "sigma": settings.sigma})

    failed = sorted(g for g, ok in desiderata.items() if not ok)
    certs["desiderata"] = Certification("fail" if failed else "pass",
                                        f"failed for {failed}" if failed else f"{len(desiderata)} graphs")

    if result.ledger is not None:
        certs["cost_bound"] = Certification("pass" if result.ledger.within_bound else "fail",
                                            f"{result.ledger.ancilla_qubits} <= {round(result.ledger.bound, 1)}")
    for name, cert in certs.items():
        if cert.status == "fail":
            logger.error(f"Certification {name} failed: {cert.detail}")
    return certs


def require_certified(result: SurgeryPlan) -> None:
    """
    Raises:
        CertificationError: Listing every failed certification
    """
    failed = result.failed_certifications()
    if failed:
        raise CertificationError(f"plan failed certifications: {', '.join(failed)}", failed=tuple(failed))


# commuting sets

def _extended_code(code: CssCode, demand: int, spare: int) -> Tuple[CssCode, int]:
    """Adjoin copies of ``code`` until enough spare logical qubits exist."""
    copies = 0
    extended = code
    while spare < demand:
        if code.k == 0:
            raise ValueError("code has no logical qubits to host ancillas")
        extended = direct_sum(extended, code, name=f"{code.name}x{copies + 2}")
        spare += code.k
        copies += 1
    return extended, copies


def plan_commuting_set(
    code: CssCode,
    theta: Sequence[LogicalPauliProduct],
    settings: Optional[Settings] = None,
    seed: Optional[int] = None,
    force_branch: bool = False,
) -> SurgeryPlan:
    """
    Measure a commuting set through regular splits and twist-free gadgets.

    Stages: ancilla and catalyst preparation, then for each regular subset its
    first split products, its second split products and the Z read-out of its
    A ancillas.
    """
    settings = settings or get_settings()
    seed = settings.seed if seed is None else seed
    theta = list(theta)
    check_request(MeasurementRequest(tuple(theta), "commuting"), code.k)
    if same_or_identity_compatible(theta):
        return plan(code, MeasurementRequest(tuple(theta), "same-or-identity"), settings, seed, force_branch)

    k = code.k
    ops = [p.to_operator(k) for p in theta]
    first, second = _regular_split(ops)
    subsets = [("theta1", item) for item in first] + [("theta2", item) for item in second]

    used = {i for p in theta for i in p.indices}
    demand = len(subsets) + sum(1 for _, (op, _) in subsets if op.y_count % 2)
    free = [i for i in range(k) if i not in used]
    extended, copies = _extended_code(code, demand, len(free))
    free += list(range(k, extended.k))

    gadgets: List[TwistFreeGadget] = []
    cursor = 0
    names: Dict[str, List[str]] = {"theta1": [], "theta2": []}
    reconstruction: Dict[str, List[str]] = {}
    for g, (subset, (op, mask)) in enumerate(subsets):
        split_product = _as_product(op.unsigned())
        a = free[cursor]
        cursor += 1
        b = None
        if split_product.y_parity:
            b = free[cursor]
            cursor += 1
        gadgets.append(twist_free_decompose(split_product, a, b, subset))
        names[subset].append(str(split_product))
        reconstruction[f"g{g}"] = [str(theta[i]) for i in range(len(theta)) if mask >> i & 1]
    ancilla_spec = {f"A{g}": gadget.ancilla_a for g, gadget in enumerate(gadgets)}
    ancilla_spec.update({f"B{g}": gadget.ancilla_b for g, gadget in enumerate(gadgets) if gadget.ancilla_b is not None})
    ancilla_spec["copies"] = copies

    stages: List[SurgeryPlan] = []
    catalysts = [g.ancilla_b for g in gadgets if g.ancilla_b is not None]
    prep = [LogicalPauliProduct({g.ancilla_a: "Z"}) for g in gadgets]
    prep += [LogicalPauliProduct({b: "Y"}) for b in catalysts]
    labels = ["prepare"]
    stages.append(plan(extended, MeasurementRequest(tuple(prep), "disjoint"), settings, seed, force_branch))
    for subset in ("theta1", "theta2"):
        members = [g for g in gadgets if g.subset == subset]
        if not members:
            continue
        for part in ("first", "second"):
            request = MeasurementRequest(tuple(getattr(g, part) for g in members), "same-or-identity")
            stages.append(plan(extended, request, settings, seed, force_branch))
            labels.append(f"{subset}.{part}")
        readout = [LogicalPauliProduct({g.ancilla_a: "Z"}) for g in members]
        stages.append(plan(extended, MeasurementRequest(tuple(readout), "disjoint"), settings, seed, force_branch))
        labels.append(f"{subset}.readout")

    windows: List[Window] = []
    for name, stage in zip(labels, stages):
        for w in stage.windows:
            windows.append(Window(f"{name}:{w.name}", w.rounds, w.code, w.products))

    result = SurgeryPlan(
        code=extended,
        products=theta,
        mode="commuting",
        basis=stages[0].basis,
        seed=seed,
        windows=windows,
        distance=stages[0].distance,
        gadgets=gadgets,
        stages=stages,
        stage_labels=labels,
        theta_split=(names["theta1"], names["theta2"]),
        reconstruction=reconstruction,
        ancilla_spec=ancilla_spec,
    )
    first_ops = [op for op, _ in first]
    second_ops = [op for op, _ in second]
    regular = is_regular(first_ops) and is_regular(second_ops)
    spans = span_equal(ops, first_ops + second_ops)
    ancillas = len(gadgets) + len(catalysts)
    result.certifications = {
        "regular": Certification("pass" if regular else "fail", "both subsets regular"),
        "span_equal": Certification("pass" if spans else "fail", "split generates the requested group"),
        "ancilla_logicals": Certification("pass" if ancillas <= 2 * len(theta) else "fail",
                                          f"{ancillas} ancilla logicals for {len(theta)} products"),
    }
    logger.info(f"Commuting-set plan: {len(first)}+{len(second)} split products, {ancillas} ancilla logicals, "
                f"{copies} adjoined copies")
    return result


def plan_to_json(result: SurgeryPlan) -> dict:
    """Report view of a plan."""
    data = {
        "code": {"name": result.code.name, "n": result.code.n, "k": result.code.k},
        "mode": result.mode,
        "products": [str(p) for p in result.products],
        "seed": result.seed,
        "distance": result.distance,
        "basis": basis_to_json(result.basis),
        "windows": [w.to_json() for w in result.windows],
        "certifications": {name: c.to_json() for name, c in result.certifications.items()},
        "certified": result.certified,
    }
    if result.tree is not None:
        data["tree"] = result.tree.to_json()
    if result.measurements:
        data["measurements"] = [m.to_json() for m in result.measurements]
    if result.ledger is not None:
        data["ledger"] = result.ledger.to_json()
    if result.stages:
        data["theta_split"] = {"theta1": result.theta_split[0], "theta2": result.theta_split[1]}
        data["gadgets"] = [g.to_json() for g in result.gadgets]
        data["reconstruction"] = result.reconstruction
        data["ancillas"] = result.ancilla_spec
        data["stages"] = [plan_to_json(stage) for stage in result.stages]
    return data
