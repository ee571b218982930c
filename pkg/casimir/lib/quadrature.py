"""
Gauss–Legendre panel rules for the y integral and the Φ evaluators built on them.

For a Matsubara argument x the integral over y ∈ [x, ∞) is taken in z = y − x.
The first panel [0, z0] uses z = u² so the √z corner of s = √(z(z + 2x)) is
integrated exactly; geometric panels of ratio 4 follow up to z = 1, then fixed
panels up to Z_MAX. Beyond y = x + Z_MAX the integrand is bounded in closed form.
"""

import logging
import math
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from casimir.lib.reflection import (
    ReflectionParams,
    coefficients,
    delta_coefficients,
    static_coefficients,
    static_delta_coefficients,
)

# Set up logging
logger = logging.getLogger(__name__)

Z_MAX = 40.0
_OUTER_BREAKS = (1.0, 5.0, 20.0, Z_MAX)
_Z0_MIN_EXP = -40
_Z0_MAX_EXP = -4
# first panel resolves only a √z corner, half the order is plenty
_CORNER_ORDER_MIN = 8


class PhiPair(NamedTuple):
    tm: np.ndarray
    te: np.ndarray
    tail: np.ndarray  # bound on the part of the y range that is not integrated


def panel_z0(x_min: float) -> float:
    """Width of the first (substituted) panel for arguments ≥ x_min"""
    if x_min <= 0:
        return 2.0 ** (_Z0_MIN_EXP + 10)
    exponent = math.floor(math.log2(0.01 * x_min))
    return 2.0 ** min(max(exponent, _Z0_MIN_EXP), _Z0_MAX_EXP)


@lru_cache(maxsize=32)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


def _mesh(lo: float, hi: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = _legendre(order)
    half = 0.5 * (hi - lo)
    return lo + half * (t + 1.0), half * w


@lru_cache(maxsize=256)
def z_rule(z0: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite rule on [0, Z_MAX] for the variable z = y − x.

    Args:
        z0: width of the first panel, a power of two below 1
        order: Gauss–Legendre nodes per panel

    Returns:
        (nodes, weights), both read-only
    """
    nodes = []
    weights = []

    # [0, z0] with z = u², dz = 2u du
    u, wu = _mesh(0.0, math.sqrt(z0), max(_CORNER_ORDER_MIN, order // 2))
    nodes.append(u * u)
    weights.append(2.0 * u * wu)

    lo = z0
    while lo < 1.0:
        hi = min(4.0 * lo, 1.0)
        z, w = _mesh(lo, hi, order)
        nodes.append(z)
        weights.append(w)
        lo = hi

    for lo, hi in zip(_OUTER_BREAKS, _OUTER_BREAKS[1:]):
        z, w = _mesh(lo, hi, order)
        nodes.append(z)
        weights.append(w)

    z = np.concatenate(nodes)
    w = np.concatenate(weights)
    z.setflags(write=False)
    w.setflags(write=False)
    return z, w


def tail_bound(x: np.ndarray) -> np.ndarray:
    """|∫_{x+Z_MAX}^∞ y ln(1 − r²e^{−y}) dy| ≤ (Y + 1)e^{−Y}/(1 − e^{−Y}), Y = x + Z_MAX"""
    big_y = np.asarray(x, dtype=float) + Z_MAX
    return (big_y + 1.0) * np.exp(-big_y) / -np.expm1(-big_y)


def log_one_minus(r: np.ndarray, omr2: np.ndarray, y: np.ndarray) -> np.ndarray:
    """ln(1 − r²e^{−y}) without cancellation near r² = 1, y → 0"""
    e = np.exp(-y)
    with np.errstate(invalid="ignore", divide="ignore"):
        far = np.log1p(-r * r * e)
        near = np.log(-np.expm1(-y) + e * omr2)
    return np.where(y > 1.0, far, near)


def _grid(x: np.ndarray, z: np.ndarray):
    xx = x[:, None]
    zz = z[None, :]
    y = xx + zz
    # (y − x)(y + x) = z(z + 2x) with no subtraction
    s = np.sqrt(zz * (zz + 2.0 * xx))
    return xx, y, s


def phi_pair(x, params: ReflectionParams, order: int = 16,
             x_min: Optional[float] = None) -> PhiPair:
    """
    Φ_TM(x) and Φ_TE(x) = ∫_x^∞ y ln(1 − r²(ix, y)e^{−y}) dy for an array of x ≥ 0.

    Args:
        x: one-dimensional array of arguments
        params: reflection parameters of the model
        order: Gauss–Legendre order per panel
        x_min: scale for the first panel; defaults to the smallest positive x
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tm = np.empty(x.shape)
    te = np.empty(x.shape)

    static = x == 0.0
    if np.any(static):
        z, w = z_rule(panel_z0(0.0), order)
        r_tm, omr2_tm, r_te, omr2_te = static_coefficients(z, params)
        tm[static] = np.dot(z * log_one_minus(r_tm, omr2_tm, z), w)
        te[static] = np.dot(z * log_one_minus(r_te, omr2_te, z), w)

    moving = ~static
    if np.any(moving):
        xm = x[moving]
        scale = float(xm.min()) if x_min is None else x_min
        z, w = z_rule(panel_z0(scale), order)
        xx, y, s = _grid(xm, z)
        r_tm, omr2_tm, r_te, omr2_te = coefficients(xx, y, s, params)
        tm[moving] = (y * log_one_minus(r_tm, omr2_tm, y)) @ w
        te[moving] = (y * log_one_minus(r_te, omr2_te, y)) @ w

    return PhiPair(tm, te, tail_bound(x))


def _delta_log(r0, omr2_0, dr, y, first_order: bool):
    """ln[(1 − r1²e^{−y})/(1 − r0²e^{−y})] with r1 = r0 + Δr"""
    if first_order:
        return -2.0 * r0 * dr / (np.expm1(y) + omr2_0)
    d0 = -np.expm1(-y) + np.exp(-y) * omr2_0
    return np.log1p(np.exp(-y) * (-dr * (2.0 * r0 + dr)) / d0)


def phi_delta_pair(x, params0: ReflectionParams, params1: ReflectionParams,
                   order: int = 16, first_order: bool = False,
                   x_min: Optional[float] = None) -> PhiPair:
    """
    ∫_x^∞ y ln[(1 − r1²e^{−y})/(1 − r0²e^{−y})] dy per polarization, where the
    two parameter sets differ only in the relaxation rate. With first_order the
    logarithm is linearised in Δr = r1 − r0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tm = np.zeros(x.shape)
    te = np.zeros(x.shape)
    if params0.ideal or params0.gamma_t == params1.gamma_t:
        return PhiPair(tm, te, np.zeros(x.shape))

    static = x == 0.0
    if np.any(static):
        z, w = z_rule(panel_z0(0.0), order)
        r_tm, omr2_tm, r_te, omr2_te = static_coefficients(z, params0)
        dr_tm, dr_te = static_delta_coefficients(z, params0, params1)
        tm[static] = np.dot(z * _delta_log(r_tm, omr2_tm, dr_tm, z, first_order), w)
        te[static] = np.dot(z * _delta_log(r_te, omr2_te, dr_te, z, first_order), w)

    moving = ~static
    if np.any(moving):
        xm = x[moving]
        scale = float(xm.min()) if x_min is None else x_min
        z, w = z_rule(panel_z0(scale), order)
        xx, y, s = _grid(xm, z)
        r_tm, omr2_tm, r_te, omr2_te = coefficients(xx, y, s, params0)
        dr_tm, dr_te = delta_coefficients(xx, y, s, params0, params1)
        tm[moving] = (y * _delta_log(r_tm, omr2_tm, dr_tm, y, first_order)) @ w
        te[moving] = (y * _delta_log(r_te, omr2_te, dr_te, y, first_order)) @ w

    # the integrand is bounded by the Φ integrand of each endpoint
    return PhiPair(tm, te, 2.0 * tail_bound(x))


def rule_error(params: ReflectionParams, x_check, order: int = 16,
               floor: float = 1e-12) -> float:
    """
    Relative error of the panel rule, estimated by comparing order n against 2n
    at a few arguments. Never below floor.
    """
    x_check = np.atleast_1d(np.asarray(x_check, dtype=float))
    coarse = phi_pair(x_check, params, order)
    fine = phi_pair(x_check, params, 2 * order)
    worst = floor
    for a, b in ((coarse.tm, fine.tm), (coarse.te, fine.te)):
        scale = np.maximum(np.abs(b), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(a - b) / scale)))
    logger.debug(f"Panel rule error at order {order}: {worst:.3e}")
    return worst
