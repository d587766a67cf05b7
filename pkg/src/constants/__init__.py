# Fixed vocabularies shared by models, services and the CLI
from .pauli_letters import PAULI_LETTERS, PauliLetter, is_valid_pauli_letter, anticommuting_letters
from .measurement_modes import MEASUREMENT_MODES, MeasurementMode, normalize_mode
from .check_provenance import CHECK_PROVENANCES, CHECK_ROLES, CheckProvenance, CheckRole

__all__ = [
    "PAULI_LETTERS",
    "PauliLetter",
    "is_valid_pauli_letter",
    "anticommuting_letters",
    "MEASUREMENT_MODES",
    "MeasurementMode",
    "normalize_mode",
    "CHECK_PROVENANCES",
    "CHECK_ROLES",
    "CheckProvenance",
    "CheckRole",
]
