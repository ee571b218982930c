"""
Reflection coefficients at imaginary frequency for all response models.

Notation follows the dimensionless variables of params.py: x = 2aξ/c,
y = 2aq, s = √(y² − x²) = 2a k⊥. Every coefficient is evaluated in a
cancellation-free form:

    A   = (ε^Tr − 1) x² = ω̃²(x + ṽ_t s)/(x + γ̃)
    k   = √(y² + A)
    r_TE = (y − k)/(y + k) = −A/(y + k)²
    g   = x²/(k + s) + s/ε^L
    r_TM = (y − g)/(y + g)

together with 1 − r² = 4ky/(y+k)² (TE) and 4gy/(y+g)² (TM), which the
Lifshitz integrand needs when r² is within rounding of 1.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple, Union

import numpy as np

from casimir.lib.constants import C
from casimir.lib.errors import DomainError
from casimir.lib.params import DimensionlessState
from casimir.lib.response import nonlocal_imag_freq
from casimir.models.physics import Material, Polarization, ResponseModel, TemperatureMode

# Set up logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class ReflectionPair(NamedTuple):
    r_tm: ArrayLike
    r_te: ArrayLike


@dataclass(frozen=True)
class ReflectionParams:
    """Dimensionless inputs of the coefficient kernels for one model and temperature"""
    omega_p_t: float
    v_tr_t: float
    v_l_t: float
    gamma_t: float
    ideal: bool = False


def reflection_params(ds: DimensionlessState, model: ResponseModel,
                      mode: TemperatureMode) -> ReflectionParams:
    """Collapse a dimensionless state onto the parameters a model actually uses"""
    gamma_t = ds.gamma_zero_t if mode == TemperatureMode.ZERO_T else ds.gamma_t
    if model == ResponseModel.IDEAL_METAL:
        return ReflectionParams(ds.omega_p_t, 0.0, 0.0, 0.0, ideal=True)
    if model == ResponseModel.PLASMA:
        return ReflectionParams(ds.omega_p_t, 0.0, 0.0, 0.0)
    if model == ResponseModel.LOCAL_DRUDE:
        return ReflectionParams(ds.omega_p_t, 0.0, 0.0, gamma_t)
    return ReflectionParams(ds.omega_p_t, ds.v_tr_t, ds.v_l_t, gamma_t)


# ---------------------------------------------------------------------------
# Array kernels
# ---------------------------------------------------------------------------

def coefficients(x: np.ndarray, y: np.ndarray, s: np.ndarray,
                 p: ReflectionParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    r_TM, 1 − r_TM², r_TE, 1 − r_TE² for x > 0.

    Args:
        x: dimensionless frequency, strictly positive
        y: dimensionless wave number, y ≥ x
        s: √((y − x)(y + x)), passed in so callers can reuse it
        p: model parameters

    Returns:
        Tuple of four arrays broadcast to the common shape
    """
    if p.ideal:
        shape = np.broadcast(x, y).shape
        return np.ones(shape), np.zeros(shape), -np.ones(shape), np.zeros(shape)

    w2 = p.omega_p_t * p.omega_p_t
    big_a = w2 * (x + p.v_tr_t * s) / (x + p.gamma_t)
    k = np.sqrt(y * y + big_a)
    yk = y + k
    r_te = -big_a / (yk * yk)
    omr2_te = 4.0 * k * y / (yk * yk)

    prod = (x + p.gamma_t) * (x + p.v_l_t * s)
    g = x * x / (k + s) + s * prod / (prod + w2)
    yg = y + g
    r_tm = (y - g) / yg
    omr2_tm = 4.0 * g * y / (yg * yg)
    return r_tm, omr2_tm, r_te, omr2_te


def static_coefficients(y: np.ndarray,
                        p: ReflectionParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Same four arrays at x = 0 from the closed-form limits"""
    y = np.asarray(y, dtype=float)
    if p.ideal:
        return np.ones_like(y), np.zeros_like(y), -np.ones_like(y), np.zeros_like(y)

    w2 = p.omega_p_t * p.omega_p_t
    c = 2.0 * p.gamma_t * p.v_l_t * y
    r_tm = w2 / (w2 + c)
    omr2_tm = c * (2.0 * w2 + c) / ((w2 + c) ** 2)

    if p.gamma_t > 0 and p.v_tr_t > 0:
        delta = p.gamma_t / (p.v_tr_t * w2)
        q = np.sqrt(delta * y)
        root = np.sqrt(1.0 + delta * y)
        den = (root + q) ** 2
        r_te = -1.0 / den
        omr2_te = 4.0 * root * q / den
    elif p.gamma_t > 0:
        # local Drude: the TE mode does not reflect at zero frequency
        r_te = np.zeros_like(y)
        omr2_te = np.ones_like(y)
    elif p.v_tr_t > 0:
        r_te = -np.ones_like(y)
        omr2_te = np.zeros_like(y)
    else:
        k = np.sqrt(y * y + w2)
        yk = y + k
        r_te = -w2 / (yk * yk)
        omr2_te = 4.0 * k * y / (yk * yk)
    return r_tm, omr2_tm, r_te, omr2_te


def delta_coefficients(x: np.ndarray, y: np.ndarray, s: np.ndarray,
                       p0: ReflectionParams, p1: ReflectionParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    r(p1) − r(p0) for both polarizations at x > 0, where p0 and p1 differ
    only in γ̃. Computed from the difference of the inputs, never by
    subtracting the two coefficients.
    """
    if p0.ideal or p0.gamma_t == p1.gamma_t:
        shape = np.broadcast(x, y).shape
        return np.zeros(shape), np.zeros(shape)

    w2 = p0.omega_p_t * p0.omega_p_t
    dgamma = p1.gamma_t - p0.gamma_t
    g0 = x + p0.gamma_t
    g1 = x + p1.gamma_t

    num = x + p0.v_tr_t * s
    a0 = w2 * num / g0
    a1 = w2 * num / g1
    k0 = np.sqrt(y * y + a0)
    k1 = np.sqrt(y * y + a1)
    dk = -w2 * num * dgamma / (g0 * g1) / (k0 + k1)
    dr_te = -2.0 * y * dk / ((y + k1) * (y + k0))

    lon = x + p0.v_l_t * s
    prod0 = g0 * lon
    prod1 = g1 * lon
    gg0 = x * x / (k0 + s) + s * prod0 / (prod0 + w2)
    gg1 = x * x / (k1 + s) + s * prod1 / (prod1 + w2)
    dg = -x * x * dk / ((k0 + s) * (k1 + s)) + s * w2 * dgamma * lon / ((prod1 + w2) * (prod0 + w2))
    dr_tm = -2.0 * y * dg / ((y + gg1) * (y + gg0))
    return dr_tm, dr_te


def static_delta_coefficients(y: np.ndarray, p0: ReflectionParams,
                              p1: ReflectionParams) -> Tuple[np.ndarray, np.ndarray]:
    """r(p1) − r(p0) at x = 0"""
    y = np.asarray(y, dtype=float)
    if p0.ideal or p0.gamma_t == p1.gamma_t:
        return np.zeros_like(y), np.zeros_like(y)

    w2 = p0.omega_p_t * p0.omega_p_t
    c0 = 2.0 * p0.gamma_t * p0.v_l_t * y
    c1 = 2.0 * p1.gamma_t * p0.v_l_t * y
    dr_tm = w2 * (c0 - c1) / ((w2 + c1) * (w2 + c0))

    if p0.gamma_t == 0 and p0.v_tr_t > 0:
        # r0 = −1 exactly, so the difference is 1 + r1
        delta = p1.gamma_t / (p0.v_tr_t * w2)
        q = np.sqrt(delta * y)
        dr_te = 2.0 * q / (np.sqrt(1.0 + delta * y) + q)
    else:
        dr_te = static_coefficients(y, p1)[2] - static_coefficients(y, p0)[2]
    return dr_tm, dr_te


# ---------------------------------------------------------------------------
# Public scalar-friendly operations
# ---------------------------------------------------------------------------

def fresnel_local(xi: ArrayLike, k_perp: ArrayLike, eps: ArrayLike) -> ReflectionPair:
    """
    Fresnel coefficients of a local medium at imaginary frequency.

    Args:
        xi: imaginary frequency in rad/s, ξ ≥ 0
        k_perp: in-plane wave number in 1/m
        eps: permittivity ε(iξ) ≥ 1, may be inf

    Returns:
        ReflectionPair
    """
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if np.any(xi < 0) or np.any(k_perp < 0) or np.any(eps < 1):
        raise DomainError("fresnel_local requires xi ≥ 0, k_perp ≥ 0, eps ≥ 1")
    w2 = (xi / C) ** 2
    q2 = k_perp ** 2 + w2
    if np.any(q2 == 0):
        raise DomainError("xi and k_perp cannot both vanish")

    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.sqrt(q2)
        kl = np.sqrt(k_perp ** 2 + eps * w2)
        r_te = -(eps - 1.0) * w2 / (q + kl) ** 2
        r_tm = (eps - 1.0) * ((eps + 1.0) * k_perp ** 2 + eps * w2) / (eps * q + kl) ** 2
    infinite = np.isinf(eps)
    r_tm = np.where(infinite, 1.0, r_tm)
    r_te = np.where(infinite, -1.0, r_te)
    return ReflectionPair(_scalar(r_tm), _scalar(r_te))


def nonlocal_pair_dimensional(xi: ArrayLike, k_perp: ArrayLike, T: float,
                              mat: Material) -> ReflectionPair:
    """Nonlocal coefficients in SI variables, ξ > 0"""
    eps = nonlocal_imag_freq(xi, k_perp, T, mat)
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    w2 = (xi / C) ** 2
    q = np.sqrt(k_perp ** 2 + w2)
    k_tr = np.sqrt(k_perp ** 2 + eps.eps_tr * w2)
    r_te = -(eps.eps_tr - 1.0) * w2 / (q + k_tr) ** 2
    g = w2 / (k_tr + k_perp) + k_perp / eps.eps_l
    r_tm = (q - g) / (q + g)
    return ReflectionPair(_scalar(r_tm), _scalar(r_te))


def _check_domain(x: np.ndarray, y: np.ndarray, allow_zero: bool) -> None:
    if np.any(x > y):
        raise DomainError("x must not exceed y")
    if allow_zero:
        if np.any(x < 0):
            raise DomainError("x must be non-negative")
    elif np.any(x <= 0):
        raise DomainError("x must be positive; use the static coefficients at x = 0")


def nonlocal_pair_dimensionless(x: ArrayLike, y: ArrayLike, ds: DimensionlessState,
                                temperature_mode: TemperatureMode) -> ReflectionPair:
    """Nonlocal Drude coefficients for 0 < x ≤ y"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_domain(x, y, allow_zero=False)
    p = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, temperature_mode)
    s = np.sqrt((y - x) * (y + x))
    r_tm, _, r_te, _ = coefficients(x, y, s, p)
    return ReflectionPair(_scalar(r_tm), _scalar(r_te))


def _static_gamma(ds: DimensionlessState, mode: TemperatureMode) -> float:
    return ds.gamma_zero_t if mode == TemperatureMode.ZERO_T else ds.gamma_t


def r_tm_static(y: ArrayLike, ds: DimensionlessState,
                temperature_mode: TemperatureMode = TemperatureMode.FINITE_T,
                first_order: bool = False) -> ArrayLike:
    """
    TM coefficient at zero frequency: 1 − 2γ̃ṽ_l y/(ω̃² + 2γ̃ṽ_l y).

    With first_order the linearised form 1 − 2βy, β = γ̃ṽ_l/ω̃², is returned.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("y must be positive")
    gamma_t = _static_gamma(ds, temperature_mode)
    w2 = ds.omega_p_t ** 2
    if first_order:
        beta = gamma_t * ds.v_l_t / w2
        return _scalar(1.0 - 2.0 * beta * y)
    c = 2.0 * gamma_t * ds.v_l_t * y
    return _scalar(1.0 - c / (w2 + c))


def r_te_static(y: ArrayLike, ds: DimensionlessState,
                temperature_mode: TemperatureMode = TemperatureMode.FINITE_T,
                first_order: bool = False) -> ArrayLike:
    """
    TE coefficient at zero frequency:
    −(√(1+δy) − √(δy))/(√(1+δy) + √(δy)), δ = γ̃/(ṽ_t ω̃²).

    With first_order the form −1 + 2√(δy) is returned.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("y must be positive")
    gamma_t = _static_gamma(ds, temperature_mode)
    p = ReflectionParams(ds.omega_p_t, ds.v_tr_t, ds.v_l_t, gamma_t)
    if first_order:
        if ds.v_tr_t == 0:
            raise DomainError("first-order TE form needs a nonzero transverse velocity")
        delta = gamma_t / (ds.v_tr_t * ds.omega_p_t ** 2)
        return _scalar(-1.0 + 2.0 * np.sqrt(delta * y))
    return _scalar(static_coefficients(y, p)[2])


def r_prime_static(y: ArrayLike, ds: DimensionlessState,
                   polarization: Polarization) -> ArrayLike:
    """
    ∂r/∂x at x = 0 for a lattice with defects (γ̃₀ > 0).

        TM: −2β₀(1/ṽ_l + y/γ̃₀) = −2(γ̃₀ + ṽ_l y)/ω̃²
        TE: (√δ₀/γ̃₀)(−γ̃₀/(ṽ_t √y) + √y)
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("y must be positive")
    gamma0 = ds.gamma_zero_t
    if gamma0 <= 0:
        raise DomainError("derivative at zero frequency needs a residual relaxation γ̃₀ > 0")
    w2 = ds.omega_p_t ** 2
    if polarization == Polarization.TM:
        return _scalar(-2.0 * (gamma0 + ds.v_l_t * y) / w2)
    if ds.v_tr_t <= 0:
        raise DomainError("TE derivative needs a nonzero transverse velocity")
    delta0 = gamma0 / (ds.v_tr_t * w2)
    root_y = np.sqrt(y)
    return _scalar(np.sqrt(delta0) / gamma0 * (-gamma0 / (ds.v_tr_t * root_y) + root_y))


def thermal_delta_r(x: ArrayLike, y: ArrayLike, ds: DimensionlessState) -> ReflectionPair:
    """r(ix, y, T) − r(ix, y, 0) for the nonlocal model, 0 ≤ x ≤ y"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_domain(x, y, allow_zero=True)
    p0 = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    p1 = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.FINITE_T)
    x, y = np.broadcast_arrays(x, y)
    dr_tm = np.zeros(x.shape)
    dr_te = np.zeros(x.shape)
    static = x == 0
    if np.any(static):
        dr_tm[static], dr_te[static] = static_delta_coefficients(y[static], p0, p1)
    moving = ~static
    if np.any(moving):
        xm, ym = x[moving], y[moving]
        s = np.sqrt((ym - xm) * (ym + xm))
        dr_tm[moving], dr_te[moving] = delta_coefficients(xm, ym, s, p0, p1)
    return ReflectionPair(_scalar(dr_tm), _scalar(dr_te))


def _scalar(value: np.ndarray) -> ArrayLike:
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value
