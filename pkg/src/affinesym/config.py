"""Pydantic request/response models shared by the CLI and the HTTP service.

A run is described by one RunConfig: a command, exactly one surface source
(catalog name or family block) when the command needs geometry, an optional
flow block, grid/sample counts, a seed, and tolerance overrides.  The same
models validate CLI config files and service request bodies, so both fronts
reject malformed input identically.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

SCHEMA_VERSION = 1

CommandName = Literal["invariants", "classify", "construct", "verify", "flow"]


class CurveConfig(BaseModel):
    gamma1: str
    gamma2: str
    t_range: tuple[float, float]


class SphereConfig(BaseModel):
    name: str
    params: dict[str, float] = Field(default_factory=dict)


class FamilyConfig(BaseModel):
    case: Literal["Case1", "Case2", "Case3"]
    curve: CurveConfig
    sphere: SphereConfig


class SurfaceConfig(BaseModel):
    """Exactly one of `catalog` (+ params) or `family`."""

    catalog: Optional[str] = None
    params: dict[str, float] = Field(default_factory=dict)
    family: Optional[FamilyConfig] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.catalog is None) == (self.family is None):
            raise ValueError("surface needs exactly one of 'catalog' or 'family'")
        return self


class FlowConfig(BaseModel):
    a: float
    eta: float
    mu1: float
    mu2: float
    beta: float = Field(default=1.0, gt=0)
    f: float = 0.0
    lambda_expr: str = "0"
    t_span: tuple[float, float]
    step: float = Field(default=1e-3, gt=0)

    @model_validator(mode="after")
    def _span(self):
        if not self.t_span[1] > self.t_span[0]:
            raise ValueError("t_span must be increasing")
        return self


class ToleranceConfig(BaseModel):
    residual: float = Field(default=1e-6, gt=0)
    drift: float = Field(default=1e-6, gt=0)


class OutputConfig(BaseModel):
    stem: str = "affinesym_out"
    mesh_drop_axis: int = Field(default=3, ge=0, le=3)


class ConfigBody(BaseModel):
    """Everything but the command (service endpoints fix the command)."""

    schema_version: int = SCHEMA_VERSION
    surface: Optional[SurfaceConfig] = None
    flow: Optional[FlowConfig] = None
    grid: Optional[list[int]] = None
    samples: int = Field(default=25, ge=1)
    seed: int = 0
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _grid_positive(self):
        if self.grid is not None:
            if not self.grid or any(c < 1 for c in self.grid):
                raise ValueError("grid counts must be >= 1")
        return self


class RunConfig(ConfigBody):
    command: CommandName

    @model_validator(mode="after")
    def _command_requirements(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        if self.command == "flow":
            if self.flow is None:
                raise ValueError("flow command requires a 'flow' block")
        elif self.surface is None:
            raise ValueError(f"{self.command} requires a 'surface' block")
        if self.command == "construct" and self.surface.family is None:
            raise ValueError("construct requires a 'surface.family' block")
        return self


class RunResult(BaseModel):
    command: CommandName
    status: Literal["ok", "verify_failed", "error"]
    exit_code: int
    report: dict
    files: dict[str, str] = Field(default_factory=dict)


class ErrorInfo(BaseModel):
    type: str
    detail: str
