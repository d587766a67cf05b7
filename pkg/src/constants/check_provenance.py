"""
Provenance and role tags for checks of deformed codes.
"""

from typing import List, Literal

CheckProvenance = Literal['original', 'deformed', 'branch', 'gauge', 'adapter']

CHECK_PROVENANCES: List[str] = ['original', 'deformed', 'branch', 'gauge', 'adapter']

# vertex checks carry the frame or measurement outcome, face checks are cycle checks
CheckRole = Literal['code', 'vertex', 'face']

CHECK_ROLES: List[str] = ['code', 'vertex', 'face']
