"""
Measurement request modes.
"""

from typing import List, Literal

MeasurementMode = Literal['disjoint', 'same-or-identity', 'commuting']

MEASUREMENT_MODES: List[str] = ['disjoint', 'same-or-identity', 'commuting']

_ALIASES = {
    'commuting-set': 'commuting',
    'same_or_identity': 'same-or-identity',
}


def normalize_mode(mode: str) -> str:
    """
    Map accepted spellings onto the canonical mode name.

    Args:
        mode: Mode as given by the user

    Returns:
        Canonical mode name

    Raises:
        ValueError: If the mode is unknown
    """
    mode = _ALIASES.get(mode, mode)
    if mode not in MEASUREMENT_MODES:
        raise ValueError(f"Invalid mode '{mode}'. Must be one of: {', '.join(MEASUREMENT_MODES)}")
    return mode
