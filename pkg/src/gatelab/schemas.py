"""Request/response models for the workbench service.

Reports carry a schema version so downstream tooling can pin formats.
Requests name a builtin preset or inline the custom parameter set; exactly
one of the two.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

SCHEMA_VERSION = "gatelab.report/1"

ModelName = Literal["full", "eff_cavity", "eff_diag"]


class CustomParams(BaseModel):
    omega: Optional[float] = None
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    g: float = 1.0
    g_physical: Optional[float] = None
    pair_rate_physical: Optional[float] = None
    t_cavity: Optional[float] = None
    t_relax: Optional[float] = None
    t_motional: Optional[float] = None
    nominal_population: Optional[float] = None


class PresetChoice(BaseModel):
    preset: str = "squid"
    custom: Optional[CustomParams] = None

    @model_validator(mode="after")
    def _custom_iff_named_custom(self):
        if (self.preset == "custom") != (self.custom is not None):
            raise ValueError("pass custom parameters exactly when preset='custom'")
        return self


class RegimeRequest(PresetChoice):
    min_ratio: float = 10.0


class RatioEntry(BaseModel):
    name: str
    value: float
    passes: bool


class RegimeResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: Literal["regime"] = "regime"
    preset: str
    threshold: float
    ratios: list[RatioEntry]
    passed: bool


class CzRequest(PresetChoice):
    model: ModelName = "full"
    n_atoms: int = Field(2, ge=1, le=6)
    n_max: int = Field(4, ge=0, le=16)
    t: Optional[float] = Field(None, description="evolution time, units of 1/g")
    n_samples: int = Field(16, ge=1, le=512)


class TimeseriesRow(BaseModel):
    t: float
    t_seconds: Optional[float]
    phases: list[float]
    leakages: list[float]
    excited_population: float
    photon_population: float
    conditional_phase: Optional[float]


class CzResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: Literal["cz"] = "cz"
    preset: str
    model: Optional[ModelName]
    notes: list[str] = []
    n_atoms: Optional[int] = None
    n_max: Optional[int] = None
    pair_rate: Optional[float] = None
    gate_time: Optional[float] = None
    gate_time_seconds: Optional[float] = None
    gate_time_seconds_cyclic_rate: Optional[float] = None
    t: Optional[float] = None
    fidelity: Optional[float] = None
    max_leakage: Optional[float] = None
    single_qubit_phase: Optional[float] = None
    conditional_phase: Optional[float] = None
    states: Optional[list[str]] = None
    phases: Optional[list[float]] = None
    leakages: Optional[list[float]] = None
    regime_passed: Optional[bool] = None
    timeseries: Optional[list[TimeseriesRow]] = None


class BudgetRequest(PresetChoice):
    n_max: int = Field(4, ge=0, le=16)
    include_measured: bool = True


class BudgetNumbers(BaseModel):
    p_r: Optional[float]
    p_c: Optional[float]
    t_relax_eff_seconds: Optional[float]
    t_cavity_eff_seconds: Optional[float]
    t_gate_seconds: float
    headroom: Optional[float]


class BudgetResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: Literal["budget"] = "budget"
    preset: str
    nominal: BudgetNumbers
    measured: Optional[BudgetNumbers]
    gate_time_seconds_cyclic_rate: Optional[float] = None
    notes: list[str] = []


class FuseRequest(BaseModel):
    recipe: Optional[str] = None
    plan_text: Optional[str] = None
    orbit_cap: int = Field(1_000_000, ge=2)
    statevector: Optional[bool] = None

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.recipe is None) == (self.plan_text is None):
            raise ValueError("pass exactly one of recipe or plan_text")
        return self


class FuseResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: Literal["fuse"] = "fuse"
    recipe: Optional[str]
    n_qubits: int
    description: str
    reconstructed: bool
    status: Literal["equivalent", "not_equivalent", "cap_reached"]
    witness: Optional[list[int]]
    statevector_verified: Optional[bool]
    orbit_explored: int
    final_adjacency: str
    final_dot: str
    target_adjacency: str
    target_dot: str


class SweepRequest(PresetChoice):
    param: Literal["delta-scale", "omega", "n-max", "t"]
    values: list[float] = Field(min_length=1)
    metric: Literal["fidelity", "leakage", "phase", "phase-deviation"]
    model: ModelName = "full"
    n_atoms: int = Field(2, ge=1, le=6)
    n_max: int = Field(4, ge=0, le=16)
    t: Optional[float] = None


class SweepRow(BaseModel):
    value: float
    metric_value: float


class SweepResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: Literal["sweep"] = "sweep"
    preset: str
    param: str
    metric: str
    model: str
    rows: list[SweepRow]


class RecipeEntryModel(BaseModel):
    name: str
    kind: Literal["graph", "plan"]
    n_qubits: int
    description: str
    reconstructed: bool


class RecipesResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: Literal["recipes"] = "recipes"
    entries: list[RecipeEntryModel]


class HealthResponse(BaseModel):
    name: str
    version: str
    schema_version: str = SCHEMA_VERSION
