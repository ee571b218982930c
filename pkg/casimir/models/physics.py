from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from casimir.lib.constants import C, ev_to_rad_per_s


class PerfectLattice(BaseModel):
    """γ(T) = b·T² from electron-electron scattering"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["perfect-lattice"] = "perfect-lattice"
    b: float = Field(ge=0.0, description="rad/(s K^2)")


class DefectLattice(BaseModel):
    """γ(T) = γ₀, the residual relaxation of a lattice with impurities"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["defect-lattice"] = "defect-lattice"
    gamma0: float = Field(ge=0.0, description="rad/s")


class ZeroRelaxation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["zero"] = "zero"


RelaxationModel = Annotated[
    Union[PerfectLattice, DefectLattice, ZeroRelaxation],
    Field(discriminator="kind"),
]


class ResponseModel(str, Enum):
    IDEAL_METAL = "ideal-metal"
    LOCAL_DRUDE = "local-drude"
    PLASMA = "plasma"
    NONLOCAL_DRUDE = "nonlocal-drude"


class TemperatureMode(str, Enum):
    """Which relaxation enters the reflection coefficients"""
    ZERO_T = "zero-t"
    FINITE_T = "finite-t"


class Polarization(str, Enum):
    TM = "TM"
    TE = "TE"


class Material(BaseModel):
    """Metal described by ω_p, a relaxation law and the two nonlocality velocities"""
    model_config = ConfigDict(frozen=True)

    omega_p: float = Field(gt=0.0, description="plasma frequency, rad/s")
    relaxation: RelaxationModel = Field(default_factory=ZeroRelaxation)
    v_tr: float = Field(default=0.0, ge=0.0, description="transverse velocity, m/s")
    v_l: float = Field(default=0.0, ge=0.0, description="longitudinal velocity, m/s")

    @field_validator("v_tr", "v_l")
    @classmethod
    def below_light_speed(cls, v: float) -> float:
        if v >= C:
            raise ValueError(f"velocity {v} m/s is not below c")
        return v

    @classmethod
    def from_ev(cls, omega_p_ev: float, **kwargs) -> "Material":
        """Build a material with ω_p given as a photon energy in eV"""
        return cls(omega_p=ev_to_rad_per_s(omega_p_ev), **kwargs)

    @classmethod
    def gold(cls, relaxation: Optional[str] = "perfect-lattice") -> "Material":
        """Gold-like defaults from configs/defaults.yml"""
        from casimir.lib.config_loader import get_default_material
        return get_default_material(relaxation)

    def without_nonlocality(self) -> "Material":
        return self.model_copy(update={"v_tr": 0.0, "v_l": 0.0})


class StatePoint(BaseModel):
    """Plate separation and temperature"""
    model_config = ConfigDict(frozen=True)

    a: float = Field(gt=0.0, description="separation, m")
    T: float = Field(ge=0.0, description="temperature, K")
