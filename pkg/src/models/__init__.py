# Models package initialization
from .pauli import PauliOperator, LogicalPauliProduct
from .codes import CssCode, StabilizerCode, TannerGraph
from .deformation import CheckRecord, DeformedCode, DeformationBuilder
from .plan import (
    AuxGraph,
    BranchTree,
    Certification,
    LogicalBasis,
    ProductMeasurement,
    SurgeryPlan,
)

__all__ = [
    "PauliOperator", "LogicalPauliProduct",
    "CssCode", "StabilizerCode", "TannerGraph",
    "CheckRecord", "DeformedCode", "DeformationBuilder",
    "AuxGraph", "BranchTree", "Certification", "LogicalBasis",
    "ProductMeasurement", "SurgeryPlan",
]
