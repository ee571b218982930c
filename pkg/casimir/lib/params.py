"""
Dimensionless reparameterization of a (separation, temperature, material) triple.

    τ   = 4π k_B T a / (ħ c)        ζ_l = τ l
    ω̃   = 2 a ω_p / c
    ṽ   = v / c
    γ̃   = 2 a γ(T) / c
    b̃   = 2 a b / c                 (perfect lattice, γ̃ = b̃ T²)
    b̃̃   = c ħ² b / (8π² k_B² a)     (perfect lattice, γ̃ = b̃̃ τ²)
"""

import logging
import math

from pydantic import BaseModel, ConfigDict

from casimir.lib.constants import C, HBAR, K_B
from casimir.models.physics import (
    DefectLattice,
    Material,
    PerfectLattice,
    StatePoint,
)

# Set up logging
logger = logging.getLogger(__name__)


class DimensionlessState(BaseModel):
    model_config = ConfigDict(frozen=True)

    tau: float
    omega_p_t: float
    v_tr_t: float
    v_l_t: float
    gamma_t: float
    gamma_zero_t: float
    b_t: float
    b_tt: float


def gamma_at(mat: Material, T: float) -> float:
    """Relaxation rate γ(T) in rad/s"""
    relaxation = mat.relaxation
    if isinstance(relaxation, PerfectLattice):
        return relaxation.b * T * T
    if isinstance(relaxation, DefectLattice):
        return relaxation.gamma0
    return 0.0


def tau_of(a: float, T: float) -> float:
    return 4.0 * math.pi * K_B * T * a / (HBAR * C)


def to_dimensionless(state: StatePoint, mat: Material) -> DimensionlessState:
    """Map a state point and material onto the dimensionless variables"""
    a, T = state.a, state.T
    scale = 2.0 * a / C
    b = mat.relaxation.b if isinstance(mat.relaxation, PerfectLattice) else 0.0
    return DimensionlessState(
        tau=tau_of(a, T),
        omega_p_t=scale * mat.omega_p,
        v_tr_t=mat.v_tr / C,
        v_l_t=mat.v_l / C,
        gamma_t=scale * gamma_at(mat, T),
        gamma_zero_t=scale * gamma_at(mat, 0.0),
        b_t=scale * b,
        b_tt=C * HBAR ** 2 * b / (8.0 * math.pi ** 2 * K_B ** 2 * a),
    )


def from_dimensionless(ds: DimensionlessState, mat: Material) -> StatePoint:
    """Recover (a, T) from τ and ω̃ given the material"""
    a = ds.omega_p_t * C / (2.0 * mat.omega_p)
    T = ds.tau * HBAR * C / (4.0 * math.pi * K_B * a)
    return StatePoint(a=a, T=T)


def default_b_for(gamma0: float, T0: float) -> float:
    """b such that b·T0² = γ₀ (a configuration choice, not a measured value)"""
    if T0 <= 0:
        raise ValueError(f"T0 must be positive, got {T0}")
    return gamma0 / (T0 * T0)
