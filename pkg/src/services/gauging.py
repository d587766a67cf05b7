"""
Gauging measurements: auxiliary graphs, their desiderata, thickening and adapters.
"""
import logging
import math
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Set, Tuple, TypedDict, Union

import networkx as nx
import numpy as np

from ..config import Settings, get_settings
from ..constants.pauli_letters import anticommuting_letters
from ..exceptions import CertificationError, DesiderataError, NotALogicalError
from ..models.codes import CssCode, StabilizerCode
from ..models.deformation import DeformationBuilder, DeformedCode, as_deformed
from ..models.pauli import PauliOperator, multiply
from ..models.plan import Adapter, AuxGraph, Edge, edge_key
from ..utils.gf2 import GF2Matrix
from .branching import audit_commutation
from .css_codes import group_product, is_nontrivial_logical

logger = logging.getLogger(__name__)

AnyCode = Union[CssCode, StabilizerCode, DeformedCode]

DESIDERATA_ITEMS = (0, 1, 2, 3, 4)


class CheegerResult(TypedDict):
    """Relative Cheeger constant of a graph with respect to its port vertices."""
    value: Optional[float]
    witness: List[int]
    certified: bool


class DesiderataItem(TypedDict):
    passed: bool
    detail: str
    witness: Optional[list]


class DesiderataReport(TypedDict):
    passed: bool
    failed: List[int]
    items: Dict[int, DesiderataItem]
    cheeger: CheegerResult


# cycles

def _cycle_mask(edges: Sequence[Edge], index: Dict[Edge, int]) -> int:
    mask = 0
    for e in edges:
        mask ^= 1 << index[e]
    return mask


def short_cycle_basis(graph: nx.Graph) -> List[Tuple[Edge, ...]]:
    """
    Minimum-length cycle basis, built from shortest-path candidate cycles.

    Each candidate is a tree path from a root to ``x``, an edge ``(x, y)`` and
    the tree path back from ``y``. Candidates are taken shortest first and kept
    when independent of the ones already chosen.
    """
    edges = sorted(edge_key(a, b) for a, b in graph.edges)
    index = {e: i for i, e in enumerate(edges)}
    components = nx.number_connected_components(graph) if graph.number_of_nodes() else 0
    target_rank = len(edges) - graph.number_of_nodes() + components
    if target_rank == 0:
        return []

    candidates: Dict[int, Tuple[Edge, ...]] = {}
    for root in sorted(graph.nodes):
        paths = nx.single_source_shortest_path(graph, root)
        for a, b in edges:
            if a not in paths or b not in paths:
                continue
            pa, pb = paths[a], paths[b]
            if set(pa) & set(pb) != {root}:
                continue
            cycle = [edge_key(u, v) for u, v in zip(pa, pa[1:])]
            cycle.append(edge_key(a, b))
            cycle.extend(edge_key(u, v) for u, v in zip(reversed(pb), list(reversed(pb))[1:]))
            if len(set(cycle)) != len(cycle) or len(cycle) < 3:
                continue
            mask = _cycle_mask(cycle, index)
            if mask not in candidates or len(cycle) < len(candidates[mask]):
                candidates[mask] = tuple(cycle)

    pivots: Dict[int, int] = {}
    basis: List[Tuple[Edge, ...]] = []
    for mask, cycle in sorted(candidates.items(), key=lambda item: (len(item[1]), item[1])):
        reduced = mask
        while reduced:
            top = reduced.bit_length() - 1
            if top not in pivots:
                break
            reduced ^= pivots[top]
        if reduced:
            pivots[reduced.bit_length() - 1] = reduced
            basis.append(cycle)
            if len(basis) == target_rank:
                break
    if len(basis) != target_rank:
        raise RuntimeError(f"cycle basis has rank {len(basis)}, expected {target_rank}")
    return basis


def _is_closed(graph: nx.Graph, face: Sequence[Edge]) -> bool:
    degree: Dict[int, int] = {}
    for a, b in face:
        if not graph.has_edge(a, b):
            return False
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    return bool(face) and all(d % 2 == 0 for d in degree.values())


def _face_rank(graph: nx.Graph, faces: Sequence[Sequence[Edge]]) -> int:
    index = {e: i for i, e in enumerate(sorted(edge_key(a, b) for a, b in graph.edges))}
    pivots: Dict[int, int] = {}
    for face in faces:
        reduced = _cycle_mask([edge_key(*e) for e in face], index)
        while reduced:
            top = reduced.bit_length() - 1
            if top not in pivots:
                pivots[top] = reduced
                break
            reduced ^= pivots[top]
    return len(pivots)


# matchings

def anticommuting_vertices(aux: AuxGraph, check: PauliOperator) -> List[int]:
    """Non-dummy vertices whose data qubit carries a letter of ``check`` anticommuting with the target."""
    return [
        v for v in aux.ports
        if anticommuting_letters(check.letter(aux.vertex_qubits[v]), aux.letters[v])
    ]


def compute_matchings(aux: AuxGraph, code: AnyCode) -> AuxGraph:
    """
    Pair up, for every check, the vertices it anticommutes with.

    Pairs come from a minimum-weight perfect matching under graph distance,
    and the check's edge set is the sum of the shortest paths joining each pair.

    Returns:
        Copy of ``aux`` with ``matchings`` keyed by check key
    """
    deformed = as_deformed(code)
    lengths = dict(nx.all_pairs_shortest_path_length(aux.graph))
    matchings: Dict[str, List[Edge]] = {}
    for record in deformed.checks:
        hits = anticommuting_vertices(aux, record.op)
        if not hits:
            continue
        if len(hits) % 2:
            raise NotALogicalError(f"check {record.key} anticommutes with the target")
        pairing = nx.Graph()
        for i, a in enumerate(hits):
            for b in hits[i + 1:]:
                pairing.add_edge(a, b, weight=lengths[a][b])
        matched = sorted(tuple(sorted(pair)) for pair in nx.min_weight_matching(pairing))
        gamma: Set[Edge] = set()
        for a, b in matched:
            path = nx.shortest_path(aux.graph, a, b)
            gamma ^= {edge_key(u, v) for u, v in zip(path, path[1:])}
        matchings[record.key] = sorted(gamma)
    return replace(aux, matchings=matchings)


def _boundary(edges: Sequence[Edge]) -> List[int]:
    degree: Dict[int, int] = {}
    for a, b in edges:
        degree[a] = degree.get(a, 0) ^ 1
        degree[b] = degree.get(b, 0) ^ 1
    return sorted(v for v, d in degree.items() if d)


# expansion

def relative_cheeger(
    graph: nx.Graph,
    ports: Sequence[int],
    limit: int = 20,
    samples: int = 2000,
    seed: int = 0,
    distance: Optional[int] = None,
) -> CheegerResult:
    """
    ``min |delta S| / min(d, |S n V0|)`` over vertex sets with ``0 < |S n V0| <= |V0| / 2``.

    Without ``distance`` the cap ``d`` is dropped and the ratio is the plain
    relative Cheeger constant.

    Graphs with at most ``limit`` vertices are enumerated exhaustively with
    vectorized bitmasks; larger ones are sampled and the result is not certified.
    """
    if distance is not None and distance < 1:
        raise ValueError("distance must be at least 1")
    nodes = sorted(graph.nodes)
    position = {v: i for i, v in enumerate(nodes)}
    port_positions = np.array([position[v] for v in ports], dtype=np.int64)
    half = len(ports) // 2
    if half == 0:
        return CheegerResult(value=None, witness=[], certified=True)
    ea = np.array([position[a] for a, _ in graph.edges], dtype=np.int64)
    eb = np.array([position[b] for _, b in graph.edges], dtype=np.int64)

    def evaluate(bits: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        inside = bits[:, port_positions].sum(axis=1)
        cut = (bits[:, ea] ^ bits[:, eb]).sum(axis=1) if ea.size else np.zeros(bits.shape[0], dtype=np.int64)
        valid = (inside > 0) & (inside <= half)
        weight = np.maximum(inside, 1) if distance is None else np.clip(inside, 1, distance)
        ratio = np.where(valid, cut / weight, np.inf)
        return ratio, valid

    best = math.inf
    best_bits: Optional[np.ndarray] = None
    size = len(nodes)
    shifts = np.arange(size, dtype=np.int64)
    if size <= limit:
        chunk = 1 << 16
        for start in range(1, 1 << size, chunk):
            masks = np.arange(start, min(start + chunk, 1 << size), dtype=np.int64)
            bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
            ratio, _ = evaluate(bits)
            i = int(np.argmin(ratio))
            if ratio[i] < best:
                best = float(ratio[i])
                best_bits = bits[i]
        certified = True
    else:
        rng = np.random.default_rng(seed)
        bits = np.zeros((samples, size), dtype=np.uint8)
        for row in range(samples):
            count = int(rng.integers(1, half + 1))
            chosen = rng.choice(port_positions, size=count, replace=False)
            bits[row, chosen] = 1
            others = np.setdiff1d(np.arange(size), port_positions)
            if others.size:
                bits[row, others] = rng.integers(0, 2, size=others.size)
        ratio, _ = evaluate(bits)
        i = int(np.argmin(ratio))
        best, best_bits = float(ratio[i]), bits[i]
        certified = False
        logger.warning(f"Cheeger constant sampled over {samples} sets ({size} vertices): {best:.3f}")
    witness = [nodes[i] for i in np.flatnonzero(best_bits)] if best_bits is not None else []
    return CheegerResult(value=best, witness=witness, certified=certified)


# desiderata

def _congestion(edge_sets: Sequence[Sequence[Edge]]) -> Tuple[int, Optional[Edge]]:
    load: Dict[Edge, int] = {}
    for edges in edge_sets:
        for e in edges:
            load[e] = load.get(e, 0) + 1
    if not load:
        return 0, None
    edge, worst = max(sorted(load.items()), key=lambda item: item[1])
    return worst, edge


def check_desiderata(
    aux: AuxGraph,
    code: Optional[AnyCode] = None,
    settings: Optional[Settings] = None,
    distance: Optional[int] = None,
) -> DesiderataReport:
    """
    Verify the graph conditions for a fault-tolerant gauging measurement.

    Items: 0 connected, 1 bounded degree, 2 short low-congestion matchings,
    3 short low-congestion cycle basis, 4 relative Cheeger constant at least 1.
    With ``code`` given, every matching's boundary is checked against the
    vertices its check anticommutes with. With ``distance`` given, item 4
    caps the port count of a cut at ``distance``.
    """
    settings = settings or get_settings()
    graph = aux.graph
    items: Dict[int, DesiderataItem] = {}

    connected = graph.number_of_nodes() > 0 and nx.is_connected(graph)
    items[0] = DesiderataItem(passed=connected, detail="connected" if connected else "disconnected",
                              witness=None if connected else [sorted(c) for c in nx.connected_components(graph)])

    degree = aux.max_degree()
    worst_vertex = max(sorted(graph.nodes), key=lambda v: graph.degree[v]) if graph.number_of_nodes() else None
    items[1] = DesiderataItem(passed=degree <= settings.degree_bound,
                              detail=f"max degree {degree} (bound {settings.degree_bound})",
                              witness=[worst_vertex] if degree > settings.degree_bound else None)

    problems: List[str] = []
    witness: Optional[list] = None
    deformed = as_deformed(code) if code is not None else None
    for key, gamma in aux.matchings.items():
        if deformed is not None:
            expected = anticommuting_vertices(aux, deformed.record(key).op)
            if _boundary(gamma) != sorted(expected):
                problems.append(f"matching of {key} has the wrong boundary")
                witness = witness or [key]
        if len(gamma) > settings.max_matching_length:
            problems.append(f"matching of {key} has length {len(gamma)}")
            witness = witness or [key]
    load, edge = _congestion(list(aux.matchings.values()))
    if load > settings.matching_congestion:
        problems.append(f"edge {edge} carries {load} matchings")
        witness = witness or [list(edge)]
    items[2] = DesiderataItem(passed=not problems, detail="; ".join(problems) or f"{len(aux.matchings)} matchings",
                              witness=witness)

    problems = []
    witness = None
    for i, face in enumerate(aux.faces):
        if not _is_closed(graph, face):
            problems.append(f"face {i} is not a cycle")
            witness = witness or [i]
        elif len(face) > settings.max_cycle_length:
            problems.append(f"face {i} has length {len(face)}")
            witness = witness or [i]
    expected_rank = graph.number_of_edges() - graph.number_of_nodes() + 1
    found_rank = _face_rank(graph, aux.faces)
    if found_rank != expected_rank or len(aux.faces) != expected_rank:
        problems.append(f"faces span rank {found_rank} of {len(aux.faces)} listed, cycle space has {expected_rank}")
    load, edge = _congestion(aux.faces)
    if load > settings.cycle_congestion:
        problems.append(f"edge {edge} lies on {load} faces")
        witness = witness or [list(edge)]
    items[3] = DesiderataItem(passed=not problems, detail="; ".join(problems) or f"{len(aux.faces)} faces",
                              witness=witness)

    cheeger = relative_cheeger(graph, aux.ports, settings.cheeger_exhaustive_limit,
                               settings.cheeger_samples, seed=aux.seed, distance=distance)
    value = cheeger["value"]
    expanding = value is None or value >= 1
    items[4] = DesiderataItem(passed=expanding,
                              detail=f"relative Cheeger {value if value is None else round(value, 3)}"
                                     f"{'' if cheeger['certified'] else ' (sampled)'}",
                              witness=None if expanding else cheeger["witness"])

    failed = [i for i in DESIDERATA_ITEMS if not items[i]["passed"]]
    return DesiderataReport(passed=not failed, failed=failed, items=items, cheeger=cheeger)


# construction

def thicken(aux: AuxGraph, layers: int) -> AuxGraph:
    """
    Stack ``layers`` copies of the graph joined by vertical edges.

    Only layer 0 keeps data-qubit vertices. Faces are the vertical squares plus
    the original cycles spread round-robin over the layers.
    """
    if layers < 1:
        raise ValueError("layers must be at least 1")
    if layers == 1:
        return aux
    size = aux.graph.number_of_nodes()
    if sorted(aux.graph.nodes) != list(range(size)):
        raise ValueError("thicken expects vertices 0..|V|-1")
    graph = nx.Graph()
    graph.add_nodes_from(range(layers * size))
    for layer in range(layers):
        offset = layer * size
        graph.add_edges_from((a + offset, b + offset) for a, b in aux.edges)
        if layer + 1 < layers:
            graph.add_edges_from((v + offset, v + offset + size) for v in range(size))
    faces: List[Tuple[Edge, ...]] = []
    for layer in range(layers - 1):
        low, high = layer * size, (layer + 1) * size
        for a, b in aux.edges:
            faces.append((
                edge_key(a + low, b + low),
                edge_key(b + low, b + high),
                edge_key(a + high, b + high),
                edge_key(a + low, a + high),
            ))
    for i, face in enumerate(aux.faces):
        offset = (i % layers) * size
        faces.append(tuple(edge_key(a + offset, b + offset) for a, b in face))
    logger.debug(f"Thickened {aux.name} to {layers} layers: {graph.number_of_nodes()} vertices")
    return replace(aux, graph=graph, faces=faces, layers=aux.layers * layers, matchings={}, edge_qubits={})


def _base_graph(weight: int, seed: int) -> nx.Graph:
    if weight <= 4:
        return nx.complete_graph(weight)
    return nx.random_regular_graph(3, weight + weight % 2, seed=seed)


def build_aux_graph(
    code: AnyCode,
    target: PauliOperator,
    settings: Optional[Settings] = None,
    seed: Optional[int] = None,
    name: str = "g",
) -> AuxGraph:
    """
    Build an auxiliary graph for measuring ``target`` and verify its desiderata.

    Vertex ``i`` stands for the ``i``-th qubit of the target's support; an odd
    weight above 4 gets one dummy vertex so that a 3-regular graph exists.
    When only the cycle congestion fails, the graph is thickened.

    Raises:
        DesiderataError: If no attempt within the retry budget passes
    """
    settings = settings or get_settings()
    seed = settings.seed if seed is None else seed
    support = list(target.support)
    if not support:
        raise NotALogicalError("cannot gauge the identity")
    vertex_qubits = {i: q for i, q in enumerate(support)}
    letters = {i: target.letter(q) for i, q in enumerate(support)}
    failed: List[int] = []
    for attempt in range(settings.graph_retries):
        graph = _base_graph(len(support), seed + attempt)
        if not nx.is_connected(graph):
            failed = [0]
            logger.debug(f"Attempt {attempt} for {name}: disconnected")
            continue
        aux = AuxGraph(graph=graph, vertex_qubits=vertex_qubits, letters=letters,
                       faces=short_cycle_basis(graph), seed=seed, attempt=attempt, name=name)
        aux = compute_matchings(aux, code)
        report = check_desiderata(aux, code, settings)
        layers = 2
        while report["failed"] == [3] and layers <= 4:
            thick = compute_matchings(thicken(aux, layers), code)
            report = check_desiderata(thick, code, settings)
            if report["passed"]:
                aux = thick
            layers += 1
        if report["passed"]:
            logger.info(f"Auxiliary graph {name}: {aux.graph.number_of_nodes()} vertices, "
                        f"{aux.graph.number_of_edges()} edges, {len(aux.faces)} faces (attempt {attempt})")
            return aux
        failed = report["failed"]
        logger.debug(f"Attempt {attempt} for {name} failed items {failed}")
    logger.error(f"No auxiliary graph for {name} after {settings.graph_retries} attempts")
    raise DesiderataError(tuple(failed), settings.graph_retries)


def deform_with_gauge(
    code: AnyCode,
    aux: AuxGraph,
    target: PauliOperator,
    group: str,
    adapter_edges: Sequence[Edge] = (),
    name: Optional[str] = None,
) -> Tuple[DeformedCode, AuxGraph]:
    """
    Gauge ``target``: one |+> qubit per edge, a vertex check per vertex, a face
    check per face, and each check extended by X on its matching.

    Returns:
        (deformed code, graph with ``edge_qubits`` filled in)

    Raises:
        NotALogicalError: If ``target`` is not a nontrivial logical of ``code``
        CertificationError: If the number of logical qubits does not drop by one
    """
    parent = as_deformed(code)
    if target.n < parent.n:
        target = target.extended(parent.n)
    if not is_nontrivial_logical(parent.stabilizer_code, target):
        raise NotALogicalError(f"{group}: target is not a nontrivial logical operator")
    aux = compute_matchings(aux, parent)

    builder = DeformationBuilder(parent)
    edge_qubits = {e: builder.add_qubit(f"g[{group}:{e[0]}-{e[1]}]", "+") for e in aux.edges}
    incident: Dict[int, List[Edge]] = {v: [] for v in aux.vertices}
    for a, b in aux.edges:
        incident[a].append((a, b))
        incident[b].append((a, b))
    for v in aux.vertices:
        letters = {edge_qubits[e]: "Z" for e in incident[v]}
        if v in aux.vertex_qubits:
            letters[aux.vertex_qubits[v]] = aux.letters[v]
        builder.add_check(f"Av[{group}:{v}]", letters, "gauge", "vertex", group)
    bridging = {edge_key(*e) for e in adapter_edges}
    for i, face in enumerate(aux.faces):
        provenance = "adapter" if bridging & set(face) else "gauge"
        builder.add_check(f"Bp[{group}:{i}]", {edge_qubits[e]: "X" for e in face}, provenance, "face", group)
    for key, gamma in aux.matchings.items():
        for e in gamma:
            builder.extend_check(key, edge_qubits[e], "X")

    deformed = builder.build(name=name or f"{parent.name}+{group}")
    audit_commutation(deformed)
    if deformed.k != parent.k - 1:
        logger.error(f"Gauging {group} changed k from {parent.k} to {deformed.k}")
        raise CertificationError(f"gauging {group} left k={deformed.k} (expected {parent.k - 1})",
                                 failed=("k_accounting",))
    logger.debug(f"Gauged {group}: {len(edge_qubits)} edge qubits, {len(aux.faces)} faces")
    return deformed, replace(aux, edge_qubits=edge_qubits)


def vertex_keys(aux: AuxGraph, group: str) -> List[str]:
    return [f"Av[{group}:{v}]" for v in aux.vertices]


# adapters

def merge_graphs(left: AuxGraph, right: AuxGraph, name: Optional[str] = None) -> Tuple[AuxGraph, int]:
    """Disjoint union with ``right`` renumbered after ``left``; returns (merged graph, offset)."""
    offset = left.graph.number_of_nodes()
    if sorted(left.graph.nodes) != list(range(offset)):
        raise ValueError("merge expects vertices 0..|V|-1")
    graph = nx.Graph()
    graph.add_nodes_from(range(offset + right.graph.number_of_nodes()))
    graph.add_edges_from(left.graph.edges)
    graph.add_edges_from((a + offset, b + offset) for a, b in right.graph.edges)
    vertex_qubits = dict(left.vertex_qubits)
    letters = dict(left.letters)
    for v, q in right.vertex_qubits.items():
        if q in vertex_qubits.values():
            raise ValueError(f"qubit {q} appears in both graphs")
        vertex_qubits[v + offset] = q
        letters[v + offset] = right.letters[v]
    faces = list(left.faces) + [tuple(edge_key(a + offset, b + offset) for a, b in f) for f in right.faces]
    merged = AuxGraph(graph=graph, vertex_qubits=vertex_qubits, letters=letters, faces=faces,
                      layers=max(left.layers, right.layers), seed=left.seed,
                      name=name or f"{left.name}~{right.name}")
    return merged, offset


def _ports_in_bfs_order(aux: AuxGraph, pool: Sequence[int], rng: Optional[np.random.Generator] = None) -> List[int]:
    pool_set = set(pool)
    candidates = [v for v in aux.ports if v in pool_set]
    if not candidates:
        return []
    root = candidates[0] if rng is None else candidates[int(rng.integers(len(candidates)))]
    return [v for v in nx.bfs_tree(aux.graph, root).nodes if v in pool_set and v in aux.vertex_qubits]


def _join(
    parent: DeformedCode,
    merged_base: AuxGraph,
    offset: int,
    left: AuxGraph,
    right: AuxGraph,
    left_ports: List[int],
    right_ports: List[int],
    p: int,
) -> Tuple[AuxGraph, Adapter]:
    """Merged graph and uncertified adapter using the first ``p`` ports on each side."""
    edges = [edge_key(left_ports[i], right_ports[i]) for i in range(p)]
    graph = merged_base.graph.copy()
    graph.add_edges_from(edges)
    faces: List[Tuple[Edge, ...]] = []
    p_left = np.zeros((max(p - 1, 0), left.graph.number_of_edges()), dtype=np.uint8)
    p_right = np.zeros((max(p - 1, 0), right.graph.number_of_edges()), dtype=np.uint8)
    left_index = {e: i for i, e in enumerate(left.edges)}
    right_index = {e: i for i, e in enumerate(right.edges)}
    for i in range(p - 1):
        path_r = nx.shortest_path(right.graph, right_ports[i] - offset, right_ports[i + 1] - offset)
        path_l = nx.shortest_path(left.graph, left_ports[i + 1], left_ports[i])
        face = [edges[i]]
        for u, v in zip(path_r, path_r[1:]):
            face.append(edge_key(u + offset, v + offset))
            p_right[i, right_index[edge_key(u, v)]] = 1
        face.append(edges[i + 1])
        for u, v in zip(path_l, path_l[1:]):
            face.append(edge_key(u, v))
            p_left[i, left_index[edge_key(u, v)]] = 1
        faces.append(tuple(face))
    merged = replace(merged_base, graph=graph, faces=list(merged_base.faces) + faces)
    merged = compute_matchings(merged, parent)
    t_left = GF2Matrix.identity(p) if p else GF2Matrix.zeros(0, 0)
    adapter = Adapter(
        left_ports=left_ports[:p],
        right_ports=right_ports[:p],
        edges=edges,
        faces=faces,
        t_left=t_left,
        t_right=t_left,
        p_left=GF2Matrix(p_left.reshape(max(p - 1, 0), left.graph.number_of_edges())),
        p_right=GF2Matrix(p_right.reshape(max(p - 1, 0), right.graph.number_of_edges())),
    )
    return merged, adapter


def _certify_adapter(
    parent: DeformedCode,
    merged: AuxGraph,
    adapter: Adapter,
    left_target: PauliOperator,
    right_target: PauliOperator,
    product_target: PauliOperator,
    settings: Settings,
    distance: Optional[int],
) -> Dict[str, bool]:
    checks: Dict[str, bool] = {}
    try:
        deformed, _ = deform_with_gauge(parent, merged, product_target, group="adapter-check",
                                        adapter_edges=adapter.edges)
        checks["k_drops_by_one"] = True
        stab = deformed.stabilizer_code
        checks["product_in_group"] = group_product(stab, product_target.extended(deformed.n)) is not None
        checks["terms_not_in_group"] = all(
            group_product(stab, t.extended(deformed.n) if t.n < deformed.n else t) is None
            for t in (left_target, right_target)
        )
    except CertificationError:
        checks = {"k_drops_by_one": False, "product_in_group": False, "terms_not_in_group": False}
    checks["desiderata"] = check_desiderata(merged, parent, settings, distance)["passed"]
    return checks


def build_adapter(
    code: AnyCode,
    left: AuxGraph,
    right: AuxGraph,
    left_target: PauliOperator,
    right_target: PauliOperator,
    settings: Optional[Settings] = None,
    distance_hint: int = 1,
    left_pool: Optional[Sequence[int]] = None,
    seed: Optional[int] = None,
    distance: Optional[int] = None,
) -> Tuple[AuxGraph, Adapter]:
    """
    Join two auxiliary graphs with ``p`` adapter edges between port vertices.

    Adapter face ``i`` runs along adapter edge ``i``, a path in the right graph,
    adapter edge ``i+1`` and a path back in the left graph. ``p`` starts at
    ``max(ceil(log2 w), distance_hint)`` (capped by the port counts) and grows
    until the merged deformation certifies. The first attempt walks the ports
    breadth first from the lowest port; later attempts start from a port drawn
    with ``seed``.

    Args:
        distance: Code distance capping the Cheeger ratio of the merged graph

    Raises:
        CertificationError: If no attempt within ``settings.adapter_retries`` certifies
    """
    settings = settings or get_settings()
    seed = settings.seed if seed is None else seed
    parent = as_deformed(code)
    merged_base, offset = merge_graphs(left, right)
    pool = list(left_pool) if left_pool is not None else left.ports
    weight = max(left.weight, right.weight, 2)
    product_target = multiply(left_target.extended(parent.n) if left_target.n < parent.n else left_target,
                              right_target.extended(parent.n) if right_target.n < parent.n else right_target)

    last_failure: Tuple[str, ...] = ()
    for attempt in range(settings.adapter_retries):
        rng = np.random.default_rng(seed + attempt) if attempt else None
        left_ports = _ports_in_bfs_order(left, pool, rng)
        right_ports = [v + offset for v in _ports_in_bfs_order(right, right.ports, rng)]
        limit = min(len(left_ports), len(right_ports))
        start = min(limit, max(math.ceil(math.log2(weight)), distance_hint, 1))
        for p in range(start, limit + 1):
            merged, adapter = _join(parent, merged_base, offset, left, right, left_ports, right_ports, p)
            checks = _certify_adapter(parent, merged, adapter, left_target, right_target, product_target,
                                      settings, distance)
            if all(checks.values()):
                adapter.certification = checks
                logger.info(f"Adapter {left.name}~{right.name}: {p} edges, {len(adapter.faces)} faces "
                            f"(attempt {attempt})")
                return merged, adapter
            last_failure = tuple(k for k, ok in checks.items() if not ok)
            logger.debug(f"Adapter attempt {attempt} with p={p} failed {last_failure}")
    logger.error(f"No certified adapter between {left.name} and {right.name} "
                 f"after {settings.adapter_retries} attempts")
    raise CertificationError(f"adapter between {left.name} and {right.name} failed", failed=last_failure)


def chain_adapters(
    code: AnyCode,
    graphs: Sequence[AuxGraph],
    targets: Sequence[PauliOperator],
    settings: Optional[Settings] = None,
    distance_hint: int = 1,
    name: str = "g",
    seed: Optional[int] = None,
    distance: Optional[int] = None,
) -> Tuple[AuxGraph, List[Adapter], PauliOperator]:
    """
    Join ``t`` graphs with ``t - 1`` adapters, each attached to the most recently added graph.

    Every port therefore carries at most two adapters.

    Returns:
        (merged graph, adapters, product of the targets)
    """
    if len(graphs) != len(targets) or not graphs:
        raise ValueError("need one target per graph")
    settings = settings or get_settings()
    seed = settings.seed if seed is None else seed
    parent = as_deformed(code)
    merged = graphs[0]
    combined = targets[0].extended(parent.n) if targets[0].n < parent.n else targets[0]
    adapters: List[Adapter] = []
    last_pool = list(graphs[0].vertices)
    for i, (graph, target) in enumerate(zip(graphs[1:], targets[1:])):
        start = merged.graph.number_of_nodes()
        merged, adapter = build_adapter(parent, merged, graph, combined, target, settings, distance_hint,
                                        left_pool=last_pool, seed=seed + i * settings.adapter_retries,
                                        distance=distance)
        adapters.append(adapter)
        combined = multiply(combined, target.extended(parent.n) if target.n < parent.n else target)
        last_pool = list(range(start, merged.graph.number_of_nodes()))
    merged = replace(merged, name=name)
    return merged, adapters, combined


def measure_product_directly(
    code: AnyCode,
    target: PauliOperator,
    settings: Optional[Settings] = None,
    seed: Optional[int] = None,
) -> AuxGraph:
    """One auxiliary graph over the whole support of a product, without adapters."""
    return build_aux_graph(code, target, settings, seed, name="direct")


def graph_report(aux: AuxGraph, report: Optional[DesiderataReport] = None) -> dict:
    """JSON view of a graph and, optionally, its desiderata."""
    result = aux.to_json()
    result["matchings"] = {key: [list(e) for e in gamma] for key, gamma in aux.matchings.items()}
    if report is not None:
        result["desiderata"] = {
            "passed": report["passed"],
            "failed": report["failed"],
            "items": {str(i): item for i, item in report["items"].items()},
        }
    return result
