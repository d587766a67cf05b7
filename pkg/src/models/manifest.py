"""
File schemas: code manifests, measurement requests, plan files and reports.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from ..constants.measurement_modes import normalize_mode
from .pauli import LogicalPauliProduct

SCHEMA_VERSION = 1


def _resolve(value: str, info: ValidationInfo) -> str:
    base = (info.context or {}).get("base")
    path = Path(value)
    if base is not None and not path.is_absolute():
        path = Path(base) / path
    return str(path)


class Manifest(BaseModel):
    """A code on disk: two check-matrix files and optional extras."""

    name: str
    hx: str
    hz: str
    sigma: Optional[int] = Field(default=None, ge=1)
    basis: Optional[str] = None

    @field_validator("hx", "hz")
    @classmethod
    def matrix_file_exists(cls, v, info: ValidationInfo):
        path = _resolve(v, info)
        if not Path(path).is_file():
            raise ValueError(f"Matrix file not found: {path}")
        return path

    @field_validator("basis")
    @classmethod
    def basis_file_exists(cls, v, info: ValidationInfo):
        if v is None:
            return v
        path = _resolve(v, info)
        if not Path(path).is_file():
            raise ValueError(f"Basis file not found: {path}")
        return path

    @classmethod
    def load(cls, path: str) -> "Manifest":
        """Read a manifest; relative file names are taken relative to the manifest."""
        data = json.loads(Path(path).read_text())
        return cls.model_validate(data, context={"base": str(Path(path).parent)})


class RequestModel(BaseModel):
    """Products to measure, their mode and an optional input eigen-spec for simulation."""

    products: List[str] = Field(min_length=1)
    mode: str = "disjoint"
    spec: Dict[str, int] = Field(default_factory=dict)

    @field_validator("products")
    @classmethod
    def products_parse(cls, v):
        for text in v:
            LogicalPauliProduct.parse(text)
        return v

    @field_validator("mode")
    @classmethod
    def known_mode(cls, v):
        return normalize_mode(v)

    @field_validator("spec")
    @classmethod
    def spec_signs(cls, v):
        for key, sign in v.items():
            LogicalPauliProduct.parse(key)
            if sign not in (1, -1):
                raise ValueError(f"Eigenvalue of {key} must be +1 or -1")
        return v

    def parsed_products(self) -> List[LogicalPauliProduct]:
        return [LogicalPauliProduct.parse(text) for text in self.products]

    @classmethod
    def load(cls, path: str) -> "RequestModel":
        return cls.model_validate(json.loads(Path(path).read_text()))


class PlanFile(BaseModel):
    """
    Everything needed to rebuild a plan deterministically, plus its report.
    """

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    manifest: str
    request: RequestModel
    seed: int
    force_branch: bool = False
    settings: Dict[str, Any] = Field(default_factory=dict)
    report: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("schema_version")
    @classmethod
    def supported_schema(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"Unsupported plan schema {v}")
        return v

    @classmethod
    def load(cls, path: str) -> "PlanFile":
        return cls.model_validate(json.loads(Path(path).read_text()))

    def dump(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


class Report(BaseModel):
    """Envelope of every JSON report the command line writes."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    command: str
    status: str
    data: Dict[str, Any] = Field(default_factory=dict)

    def dump(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)
