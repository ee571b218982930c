"""
Lifshitz free energy per unit area at T > 0, its T = 0 limit, and the entropy.

    F  = (k_B T/8πa²) Σ'_l Φ_T(τl)
    E₀ = (ħc/32π²a³) ∫₀^∞ Φ₀(x) dx

with Φ(x) = Σ_α ∫_x^∞ y ln(1 − r_α² e^{−y}) dy. Every value carries an error
estimate built from the panel-rule comparison, the truncated y range and the
Matsubara tail.
"""

import logging
import math
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import integrate

from casimir.lib.constants import C, HBAR, K_B
from casimir.lib.errors import ConvergenceFailure, DomainError, StepUnderflow
from casimir.lib.params import to_dimensionless
from casimir.lib.quadrature import Z_MAX, phi_pair, rule_error, tail_bound
from casimir.lib.reflection import ReflectionParams, reflection_params
from casimir.lib.summation import matsubara_sum
from casimir.models.config import FixedTruncation, QuadratureConfig
from casimir.models.physics import Material, ResponseModel, StatePoint, TemperatureMode

# Set up logging
logger = logging.getLogger(__name__)

_E0_BREAKS = (0.0, 1e-4, 1e-2, 1.0, 5.0, 15.0, Z_MAX)

# Matsubara terms reported one by one; the rest are summed into l_rest
L_TERMS_KEPT = 256


class EnergyResult(BaseModel):
    """
    Energy per unit area in J/m² with its error estimate.

    l_terms holds the weighted contribution of each Matsubara index
    l = 0, 1, ... per polarization (the l = 0 entry already halved), up to
    L_TERMS_KEPT entries; l_rest is the sum over the remaining indices up to
    l_max. Summing l_terms and l_rest gives per_polarization.
    """
    model_config = ConfigDict(frozen=True)

    value: float
    err_est: float
    per_polarization: Dict[str, float]
    l_terms: Dict[str, List[float]] = {"TM": [], "TE": []}
    l_rest: Dict[str, float] = {"TM": 0.0, "TE": 0.0}
    l_max: int = 0
    meta: Dict[str, float] = {}


class EntropyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    err_est: float
    step: float


def thermal_scale(a: float, T: float) -> float:
    """k_B T/(8πa²), the factor in front of the Matsubara sum"""
    return K_B * T / (8.0 * math.pi * a * a)


def zero_t_scale(a: float) -> float:
    """ħc/(32π²a³), the factor in front of the frequency integral"""
    return HBAR * C / (32.0 * math.pi ** 2 * a ** 3)


def check_tolerance(value: float, err_est: float, cfg: QuadratureConfig, what: str) -> None:
    if err_est > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
        raise ConvergenceFailure(
            f"{what}: error estimate {err_est:.3e} exceeds tolerance for value {value:.6e}",
            value=value,
            err_est=err_est,
        )


def check_points(tau: float) -> np.ndarray:
    return np.array([max(tau, 1e-6), 1.0, 5.0])


def free_energy(state: StatePoint, mat: Material, model: ResponseModel,
                cfg: Optional[QuadratureConfig] = None) -> EnergyResult:
    """
    Free energy per unit area of two parallel plates at separation a and temperature T.

    Args:
        state: separation and temperature
        mat: plate material
        model: response model
        cfg: quadrature settings

    Returns:
        EnergyResult with per-polarization parts and the last Matsubara index used

    Raises:
        ConvergenceFailure: error estimate above tolerance or work budget exhausted
    """
    cfg = cfg or QuadratureConfig()
    if state.T == 0:
        return zero_t_energy(state.a, mat, model, cfg)

    ds = to_dimensionless(state, mat)
    tau = ds.tau
    params = reflection_params(ds, model, TemperatureMode.FINITE_T)
    order = cfg.panel_order
    eps_phi = rule_error(params, check_points(tau), order)

    static = phi_pair(np.array([0.0]), params, order)
    head_tm, head_te = 0.5 * float(static.tm[0]), 0.5 * float(static.te[0])

    def evaluate(indices):
        pair = phi_pair(tau * indices.astype(float), params, order, x_min=tau)
        return np.vstack([pair.tm, pair.te])

    policy = cfg.l_max_policy
    try:
        series = matsubara_sum(
            evaluate, 2,
            offset=head_tm + head_te,
            fixed_count=policy.count if isinstance(policy, FixedTruncation) else None,
            tail_rel_tol=getattr(policy, "tail_rel_tol", 1e-13),
            chunk_size=cfg.chunk_size,
            max_terms=cfg.max_nodes,
            keep=L_TERMS_KEPT - 1,
        )
    except ConvergenceFailure as exc:
        scale = thermal_scale(state.a, state.T)
        raise ConvergenceFailure(str(exc), value=None if exc.value is None else scale * exc.value) from exc

    tm = head_tm + float(series.components[0])
    te = head_te + float(series.components[1])
    abs_terms = abs(head_tm + head_te) + series.abs_sum
    y_tail = float(tail_bound(0.0)) * (series.n_terms + 1)
    err = eps_phi * abs_terms + series.tail + y_tail

    scale = thermal_scale(state.a, state.T)
    head = series.head
    l_terms = {
        "TM": [scale * head_tm] + [scale * float(v) for v in head[0]],
        "TE": [scale * head_te] + [scale * float(v) for v in head[1]],
    }
    l_rest = {
        "TM": scale * (float(series.components[0]) - math.fsum(head[0])),
        "TE": scale * (float(series.components[1]) - math.fsum(head[1])),
    }
    result = EnergyResult(
        value=scale * (tm + te),
        err_est=scale * err,
        per_polarization={"TM": scale * tm, "TE": scale * te},
        l_terms=l_terms,
        l_rest=l_rest,
        l_max=series.l_max,
        meta={"tau": tau, "eps_phi": eps_phi, "matsubara_tail": scale * series.tail},
    )
    logger.debug(f"F(a={state.a:.3e}, T={state.T:.3e}, {model.value}) = {result.value:.12e}")
    check_tolerance(result.value, result.err_est, cfg, "free_energy")
    return result


def integrate_phi(params: ReflectionParams, order: int, kinks=()) -> tuple:
    """
    ∫₀^∞ Φ(x) dx per polarization.

    Returns:
        (tm, te, quad_err, eps_phi)
    """
    breaks = sorted(set(_E0_BREAKS) | {k for k in kinks if 0.0 < k < Z_MAX})

    def g(x):
        pair = phi_pair(np.array([x]), params, order)
        return np.array([pair.tm[0], pair.te[0]])

    total = np.zeros(2)
    quad_err = 0.0
    for lo, hi in zip(breaks, breaks[1:]):
        piece, err = integrate.quad_vec(g, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
        total += piece
        quad_err += float(err)
    eps_phi = rule_error(params, np.array([1e-3, 1.0, 5.0]), order)
    # ∫_{Z_MAX}^∞ of the Φ bound (x + 2)e^{−x} per polarization
    beyond = 2.0 * (Z_MAX + 2.0) * math.exp(-Z_MAX)
    return float(total[0]), float(total[1]), quad_err + beyond, eps_phi


def zero_t_energy(a: float, mat: Material, model: ResponseModel,
                  cfg: Optional[QuadratureConfig] = None) -> EnergyResult:
    """
    Casimir energy per unit area at T = 0 with T = 0 reflection coefficients.
    """
    cfg = cfg or QuadratureConfig()
    if not a > 0:
        raise DomainError(f"separation must be positive, got {a}")
    ds = to_dimensionless(StatePoint(a=a, T=0.0), mat)
    params = reflection_params(ds, model, TemperatureMode.ZERO_T)
    tm, te, quad_err, eps_phi = integrate_phi(params, cfg.panel_order, kinks=(params.gamma_t,))

    scale = zero_t_scale(a)
    err = scale * (quad_err + eps_phi * (abs(tm) + abs(te)))
    result = EnergyResult(
        value=scale * (tm + te),
        err_est=err,
        per_polarization={"TM": scale * tm, "TE": scale * te},
        meta={"eps_phi": eps_phi},
    )
    logger.debug(f"E0(a={a:.3e}, {model.value}) = {result.value:.12e}")
    check_tolerance(result.value, result.err_est, cfg, "zero_t_energy")
    return result


def entropy_numeric(state: StatePoint, mat: Material, model: ResponseModel,
                    cfg: Optional[QuadratureConfig] = None) -> EntropyResult:
    """
    S = −∂F/∂T in J/(K·m²).

    E₀ does not depend on T, so the derivative is taken of the thermal
    correction F − E₀, which is computed directly and keeps its precision at
    low temperature. Central differences at h and h/2 are combined by
    Richardson extrapolation.

    Raises:
        StepUnderflow: T + h rounds to T
    """
    from casimir.lib.thermal import thermal_correction

    cfg = cfg or QuadratureConfig()
    T = state.T
    if not T > 0:
        raise DomainError(f"entropy needs T > 0, got {T}")
    h = cfg.dT_frac * T
    if T + 0.5 * h == T or T - 0.5 * h == T:
        raise StepUnderflow(f"temperature step {h:.3e} K underflows at T = {T:.3e} K")

    def delta_f(temperature):
        br = thermal_correction(StatePoint(a=state.a, T=temperature), mat, model, cfg)
        return br.total, br.err_est

    def central(step):
        hi, err_hi = delta_f(T + step)
        lo, err_lo = delta_f(T - step)
        return -(hi - lo) / (2.0 * step), (err_hi + err_lo) / (2.0 * step)

    d_full, err_full = central(h)
    d_half, err_half = central(0.5 * h)
    value = (4.0 * d_half - d_full) / 3.0
    err = abs(d_half - d_full) / 3.0 + (4.0 * err_half + err_full) / 3.0
    logger.debug(f"S(a={state.a:.3e}, T={T:.3e}, {model.value}) = {value:.6e} ± {err:.1e}")
    return EntropyResult(value=value, err_est=err, step=h)
