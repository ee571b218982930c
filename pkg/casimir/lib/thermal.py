"""
Thermal correction F − E₀ split into an explicit part (the change of the
reflection coefficients with T) and an implicit part (the change from the
frequency integral to the Matsubara sum):

    F − E₀ = explicit + implicit
    implicit = (k_B T/8πa²)[Σ'_l Φ₀(τl) − ∫₀^∞ Φ₀(τt) dt]
    explicit = (k_B T/8πa²) Σ'_l ∫_{τl}^∞ y ln[(1 − r_T² e^{−y})/(1 − r_0² e^{−y})] dy

Both parts are computed directly, never as the difference of two converged
energies. Abel–Plana entry points for test functions live here as well.
"""

import logging
import math
from enum import Enum
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import integrate

from casimir.lib.errors import ConvergenceFailure, DegenerateModel, DomainError
from casimir.lib.lifshitz import check_points, thermal_scale
from casimir.lib.params import DimensionlessState, to_dimensionless
from casimir.lib.quadrature import phi_delta_pair, phi_pair, rule_error
from casimir.lib.reflection import reflection_params
from casimir.lib.specfun import zeta
from casimir.lib.summation import (
    Accumulator,
    ordered_map,
    sum_minus_integral,
    tail_sum,
)
from casimir.models.config import QuadratureConfig
from casimir.models.physics import Material, Polarization, ResponseModel, StatePoint, TemperatureMode

# Set up logging
logger = logging.getLogger(__name__)

_EXPLICIT_END = 45.0
_CONTOUR_BREAKS = (0.0, 1.0, 5.0, 40.0)


class PhiMode(str, Enum):
    ZERO_T = "zero-t"
    DEFECT_STATIC = "defect-static"
    FINITE_T = "finite-t"


class PolarizationPair(NamedTuple):
    tm: Union[float, np.ndarray]
    te: Union[float, np.ndarray]


class ImplicitCorrection(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    per_polarization: Dict[str, float]
    err_est: float
    n_cells: int


class ExplicitCorrection(BaseModel):
    model_config = ConfigDict(frozen=True)

    l0: Dict[str, float]
    lge1: Dict[str, float]
    err_est: float

    @property
    def value(self) -> float:
        return sum(self.l0.values()) + sum(self.lge1.values())


class CorrectionBreakdown(BaseModel):
    """F − E₀ and its parts, J/m²"""
    model_config = ConfigDict(frozen=True)

    total: float
    explicit_l0: Dict[str, float]
    explicit_lge1: Dict[str, float]
    implicit: float
    implicit_per_polarization: Dict[str, float]
    implicit_err_est: float
    explicit_err_est: float
    err_est: float


def _check_correction(value: float, err_est: float, cfg: QuadratureConfig, what: str) -> None:
    if err_est > max(cfg.abs_tol, cfg.correction_rel_tol * abs(value)):
        raise ConvergenceFailure(
            f"{what}: error estimate {err_est:.3e} does not resolve value {value:.6e}",
            value=value,
            err_est=err_est,
        )
    if err_est > cfg.rel_tol * abs(value):
        logger.debug(f"{what}: relative error {err_est / abs(value):.1e} above rel_tol")


def _phi_params(ds: DimensionlessState, model: ResponseModel, mode: PhiMode):
    if mode == PhiMode.DEFECT_STATIC and not ds.gamma_zero_t > 0:
        raise DegenerateModel("defect-static mode needs a residual relaxation γ₀ > 0")
    temperature = TemperatureMode.FINITE_T if mode == PhiMode.FINITE_T else TemperatureMode.ZERO_T
    return reflection_params(ds, model, temperature)


def phi(x, ds: DimensionlessState, model: ResponseModel,
        mode: PhiMode = PhiMode.ZERO_T, order: int = 16) -> PolarizationPair:
    """
    Φ_α(x) = ∫_x^∞ y ln(1 − r_α²(ix, y)e^{−y}) dy per polarization.

    zero-t uses the T = 0 coefficients; defect-static is the same set for a
    lattice with defects, whose relaxation does not change below T₀; finite-t
    uses the coefficients at the state's temperature.
    """
    scalar = np.ndim(x) == 0
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0):
        raise DomainError("x must be non-negative")
    pair = phi_pair(x_arr, _phi_params(ds, model, mode), order)
    if scalar:
        return PolarizationPair(float(pair.tm[0]), float(pair.te[0]))
    return PolarizationPair(pair.tm, pair.te)


def implicit_correction(state: StatePoint, mat: Material, model: ResponseModel,
                        cfg: Optional[QuadratureConfig] = None) -> ImplicitCorrection:
    """
    (k_B T/8πa²)[Σ'_l Φ₀(τl) − ∫₀^∞ Φ₀(τt) dt], both polarizations.

    Raises:
        ConvergenceFailure: the error estimate does not resolve the value
    """
    cfg = cfg or QuadratureConfig()
    if not state.T > 0:
        raise DomainError(f"thermal corrections need T > 0, got {state.T}")
    ds = to_dimensionless(state, mat)
    params0 = reflection_params(ds, model, TemperatureMode.ZERO_T)
    order = cfg.panel_order

    def f(x):
        pair = phi_pair(x, params0, order)
        return np.vstack([pair.tm, pair.te])

    kinks = (params0.gamma_t,) if params0.gamma_t > 0 else ()
    result = sum_minus_integral(
        f, ds.tau, 2,
        x_switch=cfg.x_switch,
        direct_tau=cfg.direct_tau,
        kinks=kinks,
        chunk_size=cfg.chunk_size,
        max_cells=cfg.max_nodes,
    )
    eps_phi = rule_error(params0, check_points(ds.tau), order)
    phi0 = float(np.sum(np.abs(f(np.array([0.0])))))
    d_tm, d_te = (float(v) for v in result.components)
    # a smooth rule error largely cancels between sum and integral; rounding does not
    rounding = 4.0 * np.finfo(float).eps * phi0 * math.sqrt(result.n_evals)
    err = eps_phi * abs(d_tm + d_te) + rounding + result.quad_err + result.em_remainder

    scale = thermal_scale(state.a, state.T)
    out = ImplicitCorrection(
        value=scale * (d_tm + d_te),
        per_polarization={"TM": scale * d_tm, "TE": scale * d_te},
        err_est=scale * err,
        n_cells=result.n_cells,
    )
    logger.debug(f"Implicit correction at tau={ds.tau:.3e}: {out.value:.6e} ± {out.err_est:.1e}")
    _check_correction(out.value, out.err_est, cfg, "implicit_correction")
    return out


def explicit_correction(state: StatePoint, mat: Material, model: ResponseModel,
                        cfg: Optional[QuadratureConfig] = None,
                        first_order: bool = False) -> ExplicitCorrection:
    """
    Explicit thermal correction, l = 0 and l ≥ 1 parts per polarization.

    Zero whenever the relaxation rate at T equals its T = 0 value: lattices
    with defects, zero relaxation, the plasma and ideal-metal models. With
    first_order the logarithm is linearised in Δr = r_T − r_0.
    """
    cfg = cfg or QuadratureConfig()
    if not state.T > 0:
        raise DomainError(f"thermal corrections need T > 0, got {state.T}")
    ds = to_dimensionless(state, mat)
    p0 = reflection_params(ds, model, TemperatureMode.ZERO_T)
    p1 = reflection_params(ds, model, TemperatureMode.FINITE_T)
    zero = {"TM": 0.0, "TE": 0.0}
    if p0.ideal or p0.gamma_t == p1.gamma_t:
        return ExplicitCorrection(l0=dict(zero), lge1=dict(zero), err_est=0.0)

    tau = ds.tau
    order = cfg.panel_order

    def h(x):
        pair = phi_delta_pair(x, p0, p1, order, first_order=first_order)
        return np.vstack([pair.tm, pair.te])

    static = h(np.array([0.0]))[:, 0]
    x_l = _EXPLICIT_END if tau > cfg.direct_tau else cfg.x_switch
    n_direct = max(16, int(math.ceil(x_l / tau)))
    if n_direct > cfg.max_nodes:
        raise ConvergenceFailure(f"explicit correction needs {n_direct} terms, budget is {cfg.max_nodes}")

    chunks = [np.arange(lo, min(lo + cfg.chunk_size, n_direct))
              for lo in range(1, n_direct, cfg.chunk_size)]

    def run(indices):
        terms = h(tau * indices.astype(float))
        return [math.fsum(terms[0]), math.fsum(terms[1])]

    totals = [Accumulator(), Accumulator()]
    for sums in ordered_map(run, chunks):
        totals[0].add(sums[0])
        totals[1].add(sums[1])

    em_last = 0.0
    x_c = tau * n_direct
    x_end = x_c
    if x_c < _EXPLICIT_END:
        tail, em_last = tail_sum(h, tau, 2, x_c, x_end=_EXPLICIT_END, order=order)
        totals[0].add(tail[0])
        totals[1].add(tail[1])
        x_end = _EXPLICIT_END

    eps_phi = max(rule_error(p0, check_points(tau), order),
                  _delta_rule_error(p0, p1, check_points(tau), order, first_order))
    lge1 = np.array([totals[0].value, totals[1].value])
    l0 = 0.5 * static
    err = (eps_phi * float(np.sum(np.abs(lge1)) + np.sum(np.abs(l0)))
           + em_last + _remainder_bound(h, tau, x_end))
    scale = thermal_scale(state.a, state.T)
    out = ExplicitCorrection(
        l0={"TM": scale * float(l0[0]), "TE": scale * float(l0[1])},
        lge1={"TM": scale * float(lge1[0]), "TE": scale * float(lge1[1])},
        err_est=scale * err,
    )
    logger.debug(f"Explicit correction at tau={tau:.3e}: {out.value:.6e} ± {out.err_est:.1e}")
    _check_correction(out.value, out.err_est, cfg, "explicit_correction")
    return out


def _delta_rule_error(p0, p1, x_check: np.ndarray, order: int, first_order: bool) -> float:
    """Panel-rule error of the explicit integrand, order n against 2n, relative to its largest value at the check points"""
    coarse = phi_delta_pair(x_check, p0, p1, order, first_order=first_order)
    fine = phi_delta_pair(x_check, p0, p1, 2 * order, first_order=first_order)
    worst = 0.0
    for a, b in ((coarse.tm, fine.tm), (coarse.te, fine.te)):
        scale = max(float(np.max(np.abs(b))), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(a - b))) / scale)
    return worst


def _remainder_bound(h: Callable, tau: float, x_end: float) -> float:
    """
    Bound on Σ_{τl > x_end} |h(τl)| for h falling like x e^{−x}:
    |h(x_end)|·Σ_k (1 + kτ/x_end) e^{−kτ}.
    """
    q = math.exp(-tau)
    edge = float(np.sum(np.abs(h(np.array([x_end])))))
    return edge * q / (1.0 - q) * (1.0 + tau / (x_end * (1.0 - q)))


def thermal_correction(state: StatePoint, mat: Material, model: ResponseModel,
                       cfg: Optional[QuadratureConfig] = None,
                       first_order: bool = False) -> CorrectionBreakdown:
    """F − E₀ assembled from the implicit and explicit parts"""
    cfg = cfg or QuadratureConfig()
    implicit = implicit_correction(state, mat, model, cfg)
    explicit = explicit_correction(state, mat, model, cfg, first_order=first_order)
    total = implicit.value + explicit.value
    return CorrectionBreakdown(
        total=total,
        explicit_l0=explicit.l0,
        explicit_lge1=explicit.lge1,
        implicit=implicit.value,
        implicit_per_polarization=implicit.per_polarization,
        implicit_err_est=implicit.err_est,
        explicit_err_est=explicit.err_est,
        err_est=implicit.err_est + explicit.err_est,
    )


# ---------------------------------------------------------------------------
# Abel–Plana
# ---------------------------------------------------------------------------

def abel_plana_difference(f: Callable, tau: float, cfg: Optional[QuadratureConfig] = None,
                          kinks: Sequence[float] = ()) -> float:
    """
    Σ'_l f(τl) − ∫₀^∞ f(τt) dt for a vectorized real function f on [0, ∞),
    summed cell by cell and closed with Euler–Maclaurin at x_switch.
    """
    cfg = cfg or QuadratureConfig()
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")

    def fv(x):
        return np.asarray(f(x), dtype=float).reshape(1, -1)

    result = sum_minus_integral(
        fv, tau, 1,
        x_switch=cfg.x_switch,
        direct_tau=math.inf,
        kinks=kinks,
        chunk_size=cfg.chunk_size,
        max_cells=cfg.max_nodes,
    )
    return float(result.components[0])


def abel_plana_contour(discontinuity: Callable, tau: float,
                       cfg: Optional[QuadratureConfig] = None,
                       poles: Sequence[Tuple[float, complex]] = ()) -> float:
    """
    i∫₀^∞ D(t)/(e^{2πt} − 1) dt with D(t) = f(iτt) − f(−iτt).

    For real f the discontinuity is imaginary and the integrand reduces to
    −Im D(t)/(e^{2πt} − 1). A simple pole of g(t) = f(τt) at t = iβ with
    residue R adds −2π Im(R)/(e^{2πβ} − 1).

    Args:
        discontinuity: callable t ↦ D(t), complex
        tau: Matsubara spacing
        cfg: tolerances
        poles: (β, R) pairs
    """
    cfg = cfg or QuadratureConfig()
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")

    def integrand(t):
        return -complex(discontinuity(t)).imag / math.expm1(2.0 * math.pi * t)

    breaks = sorted(set(_CONTOUR_BREAKS) | {beta for beta, _ in poles if 0.0 < beta < 40.0})
    total = Accumulator()
    for lo, hi in zip(breaks, breaks[1:]):
        value, err = integrate.quad(integrand, lo, hi, epsabs=1e-16, epsrel=1e-12, limit=400)
        if err > max(1e-10, 1e-6 * abs(value)):
            raise ConvergenceFailure(f"contour integral on [{lo}, {hi}] not converged", value=value, err_est=err)
        total.add(value)
    for beta, residue in poles:
        total.add(-2.0 * math.pi * complex(residue).imag / math.expm1(2.0 * math.pi * beta))
    return total.value


# ---------------------------------------------------------------------------
# Small-x structure of Φ
# ---------------------------------------------------------------------------

def phi_prime_static(ds: DimensionlessState, polarization: Polarization) -> float:
    """
    Φ'(0) for a lattice with defects:

        TM: 4β₀[π²/(6ṽ_l) + 2ζ(3)/γ̃₀],  β₀ = γ̃₀ṽ_l/ω̃²
        TE: (√(πδ₀)/γ̃₀)[(3/2)ζ(5/2) − (γ̃₀/ṽ_t)ζ(3/2)],  δ₀ = γ̃₀/(ṽ_t ω̃²)
    """
    gamma0 = ds.gamma_zero_t
    if not gamma0 > 0:
        raise DegenerateModel("Φ'(0) is finite only with a residual relaxation γ₀ > 0")
    w2 = ds.omega_p_t ** 2
    if polarization == Polarization.TM:
        # β₀/ṽ_l written out so ṽ_l = 0 stays finite
        return 4.0 * gamma0 * math.pi ** 2 / (6.0 * w2) + 8.0 * ds.v_l_t * zeta(3.0).value / w2
    if not ds.v_tr_t > 0:
        raise DegenerateModel("TE slope needs a nonzero transverse velocity")
    delta0 = gamma0 / (ds.v_tr_t * w2)
    return (math.sqrt(math.pi * delta0) / gamma0) * (
        1.5 * zeta(2.5).value - (gamma0 / ds.v_tr_t) * zeta(1.5).value
    )


class SmallXCoefficients(NamedTuple):
    phi0: float          # Φ_TM(0) = Φ_TE(0)
    tm_slope: float      # Φ_TM ≈ phi0 + tm_slope·x
    te_sqrt: float       # Φ_TE ≈ phi0 + te_sqrt·√x


def phi_small_x_coefficients(ds: DimensionlessState) -> SmallXCoefficients:
    """Leading small-x terms of Φ₀ for a perfect lattice"""
    if not ds.v_tr_t > 0:
        raise DegenerateModel("the √x term needs a nonzero transverse velocity")
    w2 = ds.omega_p_t ** 2
    gamma_52 = 0.75 * math.sqrt(math.pi)
    return SmallXCoefficients(
        phi0=-zeta(3.0).value,
        tm_slope=(4.0 * ds.v_l_t / w2) * 2.0 * zeta(3.0).value,
        te_sqrt=(4.0 / (ds.omega_p_t * math.sqrt(ds.v_tr_t))) * gamma_52 * zeta(2.5).value,
    )
