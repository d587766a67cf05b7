"""
Code models: CSS codes, general stabilizer codes and their Tanner graphs.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, TypedDict

import networkx as nx
import numpy as np

from ..exceptions import DimensionMismatchError
from ..utils.gf2 import GF2Matrix, GF2Vector, rank
from .pauli import PauliOperator


@dataclass(frozen=True)
class CssCode:
    """
    CSS code given by its X-check and Z-check matrices.

    Args:
        hx: X checks, one row per check
        hz: Z checks, one row per check
        name: Label used in reports
    """

    hx: GF2Matrix
    hz: GF2Matrix
    name: str = "css"

    def __post_init__(self):
        if self.hx.cols != self.hz.cols:
            raise DimensionMismatchError("hx/hz columns", self.hx.cols, self.hz.cols)

    @property
    def n(self) -> int:
        return self.hx.cols

    @cached_property
    def rank_x(self) -> int:
        return rank(self.hx)

    @cached_property
    def rank_z(self) -> int:
        return rank(self.hz)

    @property
    def k(self) -> int:
        return self.n - self.rank_x - self.rank_z

    def x_checks(self) -> List[PauliOperator]:
        return [PauliOperator.x_type(self.n, self.hx.row_support(i)) for i in range(self.hx.rows)]

    def z_checks(self) -> List[PauliOperator]:
        return [PauliOperator.z_type(self.n, self.hz.row_support(i)) for i in range(self.hz.rows)]

    def to_stabilizer_code(self) -> "StabilizerCode":
        """X checks first, then Z checks."""
        return StabilizerCode(tuple(self.x_checks() + self.z_checks()), self.n, name=self.name)

    def __repr__(self) -> str:
        return f"<CssCode(name='{self.name}', n={self.n}, mx={self.hx.rows}, mz={self.hz.rows})>"


@dataclass(frozen=True)
class StabilizerCode:
    """Stabilizer code given by a list of (commuting) check operators."""

    checks: Tuple[PauliOperator, ...]
    n: int
    name: str = "stabilizer"

    def __post_init__(self):
        object.__setattr__(self, "checks", tuple(self.checks))
        for check in self.checks:
            if check.n != self.n:
                raise DimensionMismatchError("check size", self.n, check.n)

    @classmethod
    def from_css(cls, code: CssCode) -> "StabilizerCode":
        return code.to_stabilizer_code()

    @cached_property
    def symplectic_matrix(self) -> GF2Matrix:
        """Rows ``[x | z]``, one per check."""
        if not self.checks:
            return GF2Matrix.zeros(0, 2 * self.n)
        return GF2Matrix(np.vstack([c.symplectic for c in self.checks]))

    @cached_property
    def rank(self) -> int:
        return rank(self.symplectic_matrix) if self.checks else 0

    @property
    def k(self) -> int:
        return self.n - self.rank

    def __repr__(self) -> str:
        return f"<StabilizerCode(name='{self.name}', n={self.n}, checks={len(self.checks)})>"


class LdpcAudit(TypedDict):
    """Weight audit of a check set."""
    max_check_weight: int
    max_qubit_degree: int
    sigma: Optional[int]
    passed: Optional[bool]


class ValidationReport(TypedDict):
    """Result of validating a CSS code."""
    n: int
    k: int
    audit: LdpcAudit


# labels on Tanner graph edges: [x|z] bits of the check letter on that qubit
EDGE_LABELS = {(1, 0): "[1|0]", (0, 1): "[0|1]", (1, 1): "[1|1]"}
LABEL_BITS = {label: bits for bits, label in EDGE_LABELS.items()}


@dataclass
class TannerGraph:
    """
    Bipartite qubit/check graph.

    Qubit nodes are ``("q", i)``, check nodes ``("c", j)`` with a ``check_type``
    attribute in {X, Z, mixed}; each edge carries the check letter as a label.
    """

    graph: nx.Graph
    n: int
    num_checks: int
    check_types: List[str] = field(default_factory=list)

    def count_by_type(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for t in self.check_types:
            counts[t] = counts.get(t, 0) + 1
        return counts
