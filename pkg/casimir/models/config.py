from typing import Annotated, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from casimir.lib.constants import C, ev_to_rad_per_s
from casimir.models.physics import (
    DefectLattice,
    Material,
    PerfectLattice,
    ResponseModel,
    ZeroRelaxation,
)


class FixedTruncation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed"] = "fixed"
    count: int = Field(gt=0)


class AdaptiveTruncation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["adaptive"] = "adaptive"
    tail_rel_tol: float = Field(default=1.0e-13, gt=0.0, lt=1.0)


TruncationPolicy = Annotated[
    Union[FixedTruncation, AdaptiveTruncation],
    Field(discriminator="kind"),
]


class QuadratureConfig(BaseModel):
    """Tolerances, work budget and Matsubara truncation policy"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_tol: float = Field(default=1.0e-8, gt=0.0)
    abs_tol: float = Field(default=1.0e-30, gt=0.0)
    max_nodes: int = Field(default=20_000_000, gt=0)
    l_max_policy: TruncationPolicy = Field(default_factory=AdaptiveTruncation)
    dT_frac: float = Field(default=0.05, gt=0.0, lt=0.5)
    panel_order: int = Field(default=16, ge=4, le=64)
    chunk_size: int = Field(default=2048, ge=16)
    x_switch: float = Field(default=1.0, ge=0.5)
    direct_tau: float = Field(default=0.05, gt=0.0)
    correction_rel_tol: float = Field(default=1.0e-3, gt=0.0, lt=1.0)


class Quantity(BaseModel):
    model_config = ConfigDict(extra="forbid")

    value: float
    unit: str


class MaterialBlock(BaseModel):
    """Material section of a run config"""
    model_config = ConfigDict(extra="forbid")

    omega_p: Union[Quantity, float]
    relaxation: Annotated[
        Union[PerfectLattice, DefectLattice, ZeroRelaxation],
        Field(discriminator="kind"),
    ] = Field(default_factory=ZeroRelaxation)
    v_tr: Union[Quantity, float] = 0.0
    v_l: Union[Quantity, float] = 0.0

    @field_validator("omega_p")
    @classmethod
    def check_frequency_unit(cls, q):
        if isinstance(q, Quantity) and q.unit not in ("eV", "rad/s"):
            raise ValueError(f"omega_p unit must be 'eV' or 'rad/s', got '{q.unit}'")
        return q

    @field_validator("v_tr", "v_l")
    @classmethod
    def check_velocity_unit(cls, q):
        if isinstance(q, Quantity) and q.unit not in ("c", "m/s"):
            raise ValueError(f"velocity unit must be 'c' or 'm/s', got '{q.unit}'")
        return q

    def to_material(self) -> Material:
        omega_p = self.omega_p
        if isinstance(omega_p, Quantity):
            omega_p = ev_to_rad_per_s(omega_p.value) if omega_p.unit == "eV" else omega_p.value

        def velocity(q):
            if isinstance(q, Quantity):
                return q.value * C if q.unit == "c" else q.value
            return q

        return Material(
            omega_p=omega_p,
            relaxation=self.relaxation,
            v_tr=velocity(self.v_tr),
            v_l=velocity(self.v_l),
        )


class Grid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float = Field(gt=0.0)
    stop: float = Field(gt=0.0)
    num: int = Field(ge=1)
    spacing: Literal["linear", "log"] = "log"

    @model_validator(mode="after")
    def check_order(self):
        if self.num > 1 and not self.stop > self.start:
            raise ValueError("grid stop must exceed start")
        return self

    def values(self) -> List[float]:
        if self.num == 1:
            return [self.start]
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.start, self.stop, self.num)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


def _strictly_increasing(values: List[float], name: str) -> List[float]:
    if not values:
        raise ValueError(f"{name} grid is empty")
    for lo, hi in zip(values, values[1:]):
        if not hi > lo:
            raise ValueError(f"{name} values must be strictly increasing")
    return values


class GeometryBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: Optional[float] = Field(default=None, gt=0.0)
    a_values: Optional[List[float]] = None
    a_grid: Optional[Grid] = None

    @model_validator(mode="after")
    def exactly_one(self):
        given = [v is not None for v in (self.a, self.a_values, self.a_grid)]
        if sum(given) != 1:
            raise ValueError("geometry needs exactly one of 'a', 'a_values', 'a_grid'")
        if self.a_values is not None:
            if any(v <= 0 for v in self.a_values):
                raise ValueError("separations must be positive")
            _strictly_increasing(self.a_values, "a")
        return self

    def values(self) -> List[float]:
        if self.a is not None:
            return [self.a]
        if self.a_values is not None:
            return list(self.a_values)
        return self.a_grid.values()


class TemperatureBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    T: Optional[float] = Field(default=None, gt=0.0)
    T_values: Optional[List[float]] = None
    T_grid: Optional[Grid] = None

    @model_validator(mode="after")
    def exactly_one(self):
        given = [v is not None for v in (self.T, self.T_values, self.T_grid)]
        if sum(given) != 1:
            raise ValueError("temperature needs exactly one of 'T', 'T_values', 'T_grid'")
        if self.T_values is not None:
            if any(v <= 0 for v in self.T_values):
                raise ValueError("temperatures must be positive")
            _strictly_increasing(self.T_values, "T")
        return self

    def values(self) -> List[float]:
        if self.T is not None:
            return [self.T]
        if self.T_values is not None:
            return list(self.T_values)
        return self.T_grid.values()


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["csv", "json", "xlsx"] = "csv"
    path: str = "results.csv"
    precision: int = Field(default=12, ge=6, le=17)


class NernstBlock(BaseModel):
    """Low-temperature verification settings"""
    model_config = ConfigDict(extra="forbid")

    tau_min: float = Field(default=1.0e-5, gt=0.0)
    tau_max: float = Field(default=1.0e-3, gt=0.0)
    n_points: int = Field(default=7, ge=5)
    exponent_tol: float = Field(default=0.05, gt=0.0)
    exponent_tol_explicit_tm: float = Field(default=0.1, gt=0.0)
    amplitude_tol: float = Field(default=0.10, gt=0.0)
    amplitude_tol_lge1: float = Field(default=0.15, gt=0.0)
    drude_entropy_tol: float = Field(default=0.05, gt=0.0)
    report_path: Optional[str] = None

    @model_validator(mode="after")
    def check_window(self):
        if not self.tau_max > self.tau_min:
            raise ValueError("tau_max must exceed tau_min")
        return self


class RunConfig(BaseModel):
    """Validated run configuration"""
    model_config = ConfigDict(extra="forbid")

    material: MaterialBlock
    geometry: GeometryBlock
    temperature: TemperatureBlock
    model: Union[ResponseModel, List[ResponseModel]]
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    output: OutputBlock = Field(default_factory=OutputBlock)
    nernst: NernstBlock = Field(default_factory=NernstBlock)

    @field_validator("model")
    @classmethod
    def non_empty_models(cls, value):
        if isinstance(value, list):
            if not value:
                raise ValueError("model list is empty")
            if len(set(value)) != len(value):
                raise ValueError("model list has duplicates")
        return value

    def models(self) -> List[ResponseModel]:
        return list(self.model) if isinstance(self.model, list) else [self.model]

    def echo(self) -> Dict:
        """JSON-ready echo used for provenance and the config hash"""
        return self.model_dump(mode="json")
