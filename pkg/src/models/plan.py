"""
Records produced by the planner: bases, branch trees, auxiliary graphs, adapters and plans.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from ..utils.gf2 import GF2Matrix, GF2Vector
from .codes import CssCode
from .deformation import DeformedCode
from .pauli import LogicalPauliProduct, PauliOperator

Edge = Tuple[int, int]


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a <= b else (b, a)


@dataclass
class LogicalBasis:
    """
    Z-logical representatives ``v_i`` with paired X-logical representatives ``w_i``.

    ``certificate`` holds the pivot columns of the stacked echelon matrix (stabilizer
    rows first, then logical rows); ``m`` is the number of stabilizer rows.
    """

    n: int
    z_reps: List[GF2Vector]
    x_reps: List[GF2Vector] = field(default_factory=list)
    m: int = 0
    certificate: List[int] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.z_reps)

    @property
    def has_x_reps(self) -> bool:
        return len(self.x_reps) == len(self.z_reps)

    @property
    def max_weight(self) -> int:
        weights = [v.weight for v in self.z_reps] + [w.weight for w in self.x_reps]
        return max(weights, default=0)


@dataclass
class Certification:
    """Outcome of a verification: ``pass``, ``fail`` or ``inconclusive``."""

    status: str
    detail: str = ""
    data: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == "pass"

    @property
    def conclusive(self) -> bool:
        return self.status != "inconclusive"

    def to_json(self) -> Dict[str, Any]:
        return {"status": self.status, "detail": self.detail, **self.data}


@dataclass
class Sticker:
    """
    One two-layer sticker of a branch tree.

    ``layer`` is the set of parent-layer qubits it copies; each gets a copy qubit
    and an A check. Each incident parent check gets an edge qubit and a face check.
    """

    sticker_id: str
    level: int
    parent_id: Optional[str]
    rep_indices: List[int]
    layer: List[int]
    letters: Dict[int, str]
    copies: Dict[int, int]
    edge_qubits: Dict[str, int]
    a_checks: Dict[int, str]
    face_checks: Dict[str, str]
    boundary: GF2Matrix
    children: List[str] = field(default_factory=list)

    @property
    def ancilla_count(self) -> int:
        return len(self.copies) + len(self.edge_qubits)

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.sticker_id,
            "level": self.level,
            "parent": self.parent_id,
            "reps": self.rep_indices,
            "layer": self.layer,
            "copies": {str(q): c for q, c in self.copies.items()},
            "edge_qubits": self.edge_qubits,
            "a_checks": {str(q): k for q, k in self.a_checks.items()},
            "face_checks": self.face_checks,
        }


@dataclass
class LeafRecord:
    """
    Leaf of a branch tree: ``rep * product(path checks) = sign * operator``.

    For representatives that were not branched the path is empty and the
    operator is the representative itself.
    """

    rep_index: int
    support: Tuple[int, ...]
    path: Tuple[str, ...]
    sign: int
    operator: PauliOperator
    sticker_id: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "rep": self.rep_index,
            "support": list(self.support),
            "path": list(self.path),
            "sign": self.sign,
            "sticker": self.sticker_id,
        }


@dataclass
class BranchTree:
    """Binary branch tree over the union of the branched representatives."""

    reps: List[PauliOperator]
    letters: Dict[int, str]
    root_support: Tuple[int, ...]
    branched: List[int]
    stickers: Dict[str, Sticker] = field(default_factory=dict)
    leaves: Dict[int, LeafRecord] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return 1 + max((s.level for s in self.stickers.values()), default=-1)

    @property
    def is_trivial(self) -> bool:
        return not self.stickers

    @property
    def ancilla_count(self) -> int:
        return sum(s.ancilla_count for s in self.stickers.values())

    def roots(self) -> List[Sticker]:
        return [s for s in self.stickers.values() if s.parent_id is None]

    def to_json(self) -> Dict[str, Any]:
        return {
            "root_support": list(self.root_support),
            "branched": self.branched,
            "depth": self.depth,
            "stickers": [s.to_json() for s in self.stickers.values()],
            "leaves": {str(i): leaf.to_json() for i, leaf in self.leaves.items()},
        }


@dataclass
class AuxGraph:
    """
    Auxiliary graph for a gauging measurement.

    Vertices are ints. Non-dummy vertices map to data qubits through
    ``vertex_qubits`` and carry the target letter of that qubit. Faces are edge
    tuples. ``edge_qubits`` and ``matchings`` are filled in once the graph is
    attached to a code.
    """

    graph: nx.Graph
    vertex_qubits: Dict[int, int]
    letters: Dict[int, str]
    faces: List[Tuple[Edge, ...]] = field(default_factory=list)
    layers: int = 1
    seed: int = 0
    attempt: int = 0
    name: str = "g"
    matchings: Dict[str, List[Edge]] = field(default_factory=dict)
    edge_qubits: Dict[Edge, int] = field(default_factory=dict)

    @property
    def vertices(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Edge]:
        return sorted(edge_key(a, b) for a, b in self.graph.edges)

    @property
    def ports(self) -> List[int]:
        return sorted(self.vertex_qubits)

    @property
    def dummies(self) -> List[int]:
        return [v for v in self.vertices if v not in self.vertex_qubits]

    @property
    def weight(self) -> int:
        return len(self.vertex_qubits)

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "vertices": self.vertices,
            "dummies": self.dummies,
            "vertex_qubits": {str(v): q for v, q in self.vertex_qubits.items()},
            "edges": [list(e) for e in self.edges],
            "faces": [[list(e) for e in face] for face in self.faces],
            "layers": self.layers,
            "seed": self.seed,
            "attempt": self.attempt,
            "edge_qubits": {f"{a}-{b}": q for (a, b), q in self.edge_qubits.items()},
        }


@dataclass
class Adapter:
    """
    Edges and faces joining two auxiliary graphs.

    Port vertices use the numbering of the merged graph. ``t_left``/``t_right``
    are port-by-adapter-edge incidences; ``p_left``/``p_right`` record, per
    adapter face, the edges it uses inside each graph.
    """

    left_ports: List[int]
    right_ports: List[int]
    edges: List[Edge]
    faces: List[Tuple[Edge, ...]]
    t_left: GF2Matrix
    t_right: GF2Matrix
    p_left: GF2Matrix
    p_right: GF2Matrix
    certification: Dict[str, bool] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.edges)

    def to_json(self) -> Dict[str, Any]:
        return {
            "left_ports": self.left_ports,
            "right_ports": self.right_ports,
            "edges": [list(e) for e in self.edges],
            "faces": [[list(e) for e in face] for face in self.faces],
            "certification": self.certification,
        }


@dataclass
class ProductMeasurement:
    """
    One measured logical product of a plan.

    ``product(check_keys) = sign * representative``, with branch path checks
    taken as they were before gauging extended them. Their eigenvalues do not
    change under gauging, so the measured outcome is ``sign`` times the product
    of the check outcomes. A product that already lies in the check group when
    its turn comes has no graph of its own.
    """

    product: LogicalPauliProduct
    group: str
    graph: Optional[AuxGraph]
    representative: PauliOperator
    target: PauliOperator
    check_keys: List[str]
    sign: int
    leaves: List[int] = field(default_factory=list)
    adapters: List[Adapter] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "product": str(self.product),
            "group": self.group,
            "representative": str(self.representative),
            "checks": self.check_keys,
            "sign": self.sign,
            "leaves": self.leaves,
            "graph": self.graph.to_json() if self.graph is not None else None,
            "adapters": [a.to_json() for a in self.adapters],
        }


@dataclass(frozen=True)
class MeasurementRequest:
    """Logical products to measure together and the mode that constrains them."""

    products: Tuple[LogicalPauliProduct, ...]
    mode: str = "disjoint"

    def to_json(self) -> Dict[str, Any]:
        return {"products": [str(p) for p in self.products], "mode": self.mode}


@dataclass
class TwistFreeGadget:
    """
    Split of ``P = i^(u.v) X(u) Z(v)`` into two Y-free products.

    Even ``u.v``: ``X(u) X_A`` then ``Z(v) X_A``. Odd: ``X(u) X_A X_B`` then
    ``Z(v) X_A Z_B`` with B a |Y> catalyst. The outcome of P is
    ``i^phase * m1 * m2`` and ``correction`` is applied when Z_A reads -1.
    """

    product: LogicalPauliProduct
    parity: int
    ancilla_a: int
    ancilla_b: Optional[int]
    first: LogicalPauliProduct
    second: LogicalPauliProduct
    correction: LogicalPauliProduct
    phase: int
    subset: str = "theta1"

    def to_json(self) -> Dict[str, Any]:
        return {
            "product": str(self.product),
            "parity": self.parity,
            "A": self.ancilla_a,
            "B": self.ancilla_b,
            "first": str(self.first),
            "second": str(self.second),
            "correction": str(self.correction),
            "phase": self.phase,
            "subset": self.subset,
        }


@dataclass
class Window:
    """A block of syndrome rounds on one code."""

    name: str
    rounds: int
    code: Optional[DeformedCode] = None
    products: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "rounds": self.rounds,
            "n": self.code.n if self.code is not None else None,
            "checks": len(self.code.checks) if self.code is not None else None,
            "products": self.products,
        }


@dataclass
class CostLedger:
    """Constructive ancilla accounting and the bound it is compared against."""

    ancilla_qubits: int
    new_checks: int
    rounds: int
    total_terms: int
    omega: int
    max_qubit_degree: int
    layers: int
    constant: int
    bound: float
    branch_ancillas: int = 0
    gauge_ancillas: int = 0
    # edge qubits of one graph per multi-term product, without adapters
    direct_ancillas: Optional[int] = None

    @property
    def within_bound(self) -> bool:
        return self.ancilla_qubits <= self.bound

    def to_json(self) -> Dict[str, Any]:
        return {
            "ancilla_qubits": self.ancilla_qubits,
            "branch_ancillas": self.branch_ancillas,
            "gauge_ancillas": self.gauge_ancillas,
            "direct_ancillas": self.direct_ancillas,
            "new_checks": self.new_checks,
            "rounds": self.rounds,
            "T": self.total_terms,
            "omega": self.omega,
            "f": self.max_qubit_degree,
            "L": self.layers,
            "C": self.constant,
            "bound": round(self.bound, 3),
            "within_bound": self.within_bound,
        }


@dataclass
class SurgeryPlan:
    """Full deformation for one measurement request, with its certifications."""

    code: CssCode
    products: List[LogicalPauliProduct]
    mode: str
    basis: LogicalBasis
    seed: int
    tree: Optional[BranchTree] = None
    branch_code: Optional[DeformedCode] = None
    measure_code: Optional[DeformedCode] = None
    measurements: List[ProductMeasurement] = field(default_factory=list)
    windows: List[Window] = field(default_factory=list)
    ledger: Optional[CostLedger] = None
    certifications: Dict[str, Certification] = field(default_factory=dict)
    distance: Optional[int] = None
    gadgets: List[TwistFreeGadget] = field(default_factory=list)
    stages: List["SurgeryPlan"] = field(default_factory=list)
    stage_labels: List[str] = field(default_factory=list)
    theta_split: Optional[Tuple[List[str], List[str]]] = None
    reconstruction: Dict[str, List[str]] = field(default_factory=dict)
    ancilla_spec: Dict[str, int] = field(default_factory=dict)

    @property
    def is_commuting_set(self) -> bool:
        return bool(self.stages)

    @property
    def certified(self) -> bool:
        own = all(c.status != "fail" for c in self.certifications.values())
        return own and all(stage.certified for stage in self.stages)

    def failed_certifications(self) -> List[str]:
        failed = [name for name, c in self.certifications.items() if c.status == "fail"]
        for i, stage in enumerate(self.stages):
            failed.extend(f"stage{i}.{name}" for name in stage.failed_certifications())
        return failed
