"""
Special functions for the asymptotic laws and their validation.

Values come from scipy.special (Cephes zeta and gamma) and mpmath (polylogarithms).
Every function returns a SpecValue carrying an absolute error bound.
"""

import logging
import math
from typing import NamedTuple

import mpmath
import numpy as np
from scipy import integrate, special

from casimir.lib.errors import DomainError

# Set up logging
logger = logging.getLogger(__name__)

# Cephes zeta and gamma are accurate to a few ulp on the real axis
_ULP_FACTOR = 8.0 * np.finfo(float).eps

# Working precision for mpmath evaluations, in decimal digits
_MP_DPS = 30


class SpecValue(NamedTuple):
    value: float
    abs_err: float


def zeta(s: float) -> SpecValue:
    """Riemann zeta ζ(s) for real s > 1"""
    if not s > 1.0:
        raise DomainError(f"zeta requires s > 1, got {s}")
    value = float(special.zeta(s, 1))
    return SpecValue(value, _ULP_FACTOR * abs(value))


def bose_integral(s: float) -> SpecValue:
    """∫₀^∞ y^s/(e^y − 1) dy = Γ(s+1)ζ(s+1)"""
    if not s > 0.0:
        raise DomainError(f"bose_integral requires s > 0, got {s}")
    z = zeta(s + 1.0)
    g = float(special.gamma(s + 1.0))
    value = g * z.value
    return SpecValue(value, abs(g) * z.abs_err + _ULP_FACTOR * abs(value))


def bose_integral_quad(s: float) -> SpecValue:
    """Same integral by adaptive quadrature (cross-check)"""
    if not s > 0.0:
        raise DomainError(f"bose_integral requires s > 0, got {s}")

    def integrand(y):
        return y ** s / math.expm1(y) if y > 0 else 0.0

    head, err_head = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-14, limit=200)
    tail, err_tail = integrate.quad(integrand, 1.0, np.inf, epsabs=0.0, epsrel=1e-14, limit=200)
    return SpecValue(head + tail, err_head + err_tail)


def polylog_half(z: float) -> SpecValue:
    """Li_{1/2}(z) = Σ_{n≥1} zⁿ/√n for 0 < z < 1"""
    if not 0.0 < z < 1.0:
        raise DomainError(f"polylog_half requires 0 < z < 1, got {z}")
    with mpmath.workdps(_MP_DPS):
        value = float(mpmath.polylog(0.5, mpmath.mpf(z)))
    return SpecValue(value, 4.0 * np.finfo(float).eps * abs(value))


def polylog_half_exp(tau: float) -> SpecValue:
    """Li_{1/2}(e^{−τ}) without rounding e^{−τ} first"""
    if not tau > 0.0:
        raise DomainError(f"polylog_half_exp requires tau > 0, got {tau}")
    with mpmath.workdps(_MP_DPS):
        value = float(mpmath.polylog(0.5, mpmath.exp(-mpmath.mpf(tau))))
    return SpecValue(value, 4.0 * np.finfo(float).eps * abs(value))


def polylog_half_small_tau(tau: float) -> float:
    """Leading small-τ form √(π/τ) + ζ(1/2) of Li_{1/2}(e^{−τ})"""
    return math.sqrt(math.pi / tau) + float(mpmath.zeta(0.5))


def bose_weight_integral(p: float) -> SpecValue:
    """∫₀^∞ t^p/(e^{2πt} − 1) dt = Γ(p+1)ζ(p+1)/(2π)^{p+1}"""
    base = bose_integral(p)
    scale = (2.0 * math.pi) ** (p + 1.0)
    return SpecValue(base.value / scale, base.abs_err / scale)


def exp_weight_integral() -> SpecValue:
    """∫₀^∞ t/(e^{2πt} − 1) dt, equal to 1/24"""
    return bose_weight_integral(1.0)


def exp_weight_integral_quad(p: float = 1.0) -> SpecValue:
    """Quadrature cross-check of bose_weight_integral"""

    def integrand(t):
        return t ** p / math.expm1(2.0 * math.pi * t) if t > 0 else 0.0

    value, err = integrate.quad(integrand, 0.0, 12.0, epsabs=1e-17, epsrel=1e-14, limit=200)
    # e^{-2π·12} < 1e-32 bounds the tail
    return SpecValue(value, err + 1e-30)


def ideal_phi_exact(x: float) -> float:
    """
    Both-polarization Φ(x) for r² = 1:
    2∫_x^∞ y ln(1 − e^{−y}) dy = −2[x Li₂(e^{−x}) + Li₃(e^{−x})]
    """
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x}")
    with mpmath.workdps(_MP_DPS):
        q = mpmath.exp(-mpmath.mpf(x))
        value = -2 * (mpmath.mpf(x) * mpmath.polylog(2, q) + mpmath.polylog(3, q))
    return float(value)
