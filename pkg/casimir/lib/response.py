"""
Dielectric response of the plate metal.

Local Drude (and plasma as its γ = 0 case) plus the nonlocal Drude-like pair of
transverse and longitudinal permittivities, at real frequency, at imaginary
Matsubara frequency, and in dimensionless form. The Lifshitz pipeline itself
only uses the dimensionless imaginary-frequency forms; ξ = 0 is handled by the
static reflection coefficients.
"""

import logging
from typing import NamedTuple, Union

import numpy as np

from casimir.lib.constants import C
from casimir.lib.errors import DomainError, ZeroFrequency
from casimir.lib.params import DimensionlessState, gamma_at
from casimir.models.physics import Material

# Set up logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class PermittivityPair(NamedTuple):
    eps_tr: ArrayLike
    eps_l: ArrayLike


def _reject_zero(freq: ArrayLike, name: str) -> None:
    if np.any(np.asarray(freq) == 0):
        raise ZeroFrequency(f"{name} = 0 is a pole of the Drude-like permittivity")


def drude_real_freq(omega: ArrayLike, T: float, mat: Material) -> ArrayLike:
    """ε_D(ω) = 1 − ω_p²/(ω(ω + iγ))"""
    _reject_zero(omega, "omega")
    omega = np.asarray(omega, dtype=complex)
    gamma = gamma_at(mat, T)
    return 1.0 - mat.omega_p ** 2 / (omega * (omega + 1j * gamma))


def drude_imag_freq(xi: ArrayLike, T: float, mat: Material) -> ArrayLike:
    """ε_D(iξ) = 1 + ω_p²/(ξ(ξ + γ)); plasma when γ = 0"""
    _reject_zero(xi, "xi")
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise DomainError("imaginary frequency must be positive")
    gamma = gamma_at(mat, T)
    return 1.0 + mat.omega_p ** 2 / (xi * (xi + gamma))


def nonlocal_real_freq(omega: ArrayLike, k_perp: ArrayLike, T: float,
                       mat: Material) -> PermittivityPair:
    """
    Transverse and longitudinal Drude-like permittivities at real frequency.

    Args:
        omega: angular frequency in rad/s, nonzero
        k_perp: in-plane wave number in 1/m
        T: temperature in K, fixes γ(T)
        mat: material

    Returns:
        Complex PermittivityPair
    """
    _reject_zero(omega, "omega")
    omega = np.asarray(omega, dtype=complex)
    k_perp = np.asarray(k_perp, dtype=float)
    drude = mat.omega_p ** 2 / (omega * (omega + 1j * gamma_at(mat, T)))
    eps_tr = 1.0 - drude * (1.0 + 1j * mat.v_tr * k_perp / omega)
    eps_l = 1.0 - drude / (1.0 + 1j * mat.v_l * k_perp / omega)
    return PermittivityPair(eps_tr, eps_l)


def nonlocal_imag_freq(xi: ArrayLike, k_perp: ArrayLike, T: float,
                       mat: Material) -> PermittivityPair:
    """
    Transverse and longitudinal permittivities at ω = iξ.

    Both are real and exceed 1; ε^Tr grows linearly with k⊥ and ε^L falls
    towards 1.
    """
    _reject_zero(xi, "xi")
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    if np.any(xi < 0) or np.any(k_perp < 0):
        raise DomainError("xi must be positive and k_perp non-negative")
    drude = mat.omega_p ** 2 / (xi * (xi + gamma_at(mat, T)))
    eps_tr = 1.0 + drude * (1.0 + mat.v_tr * k_perp / xi)
    eps_l = 1.0 + drude / (1.0 + mat.v_l * k_perp / xi)
    return PermittivityPair(eps_tr, eps_l)


def nonlocal_dimensionless(x: ArrayLike, y: ArrayLike, ds: DimensionlessState,
                           at_zero_T: bool) -> PermittivityPair:
    """
    Dimensionless permittivities in terms of x = 2aξ/c and y = 2aq.

    With at_zero_T the relaxation is taken at T = 0: zero for a perfect
    lattice and γ̃₀ for a lattice with defects.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be positive; use the static coefficients at x = 0")
    if np.any(x > y):
        raise DomainError("x must not exceed y")
    gamma_t = ds.gamma_zero_t if at_zero_T else ds.gamma_t
    s = np.sqrt((y - x) * (y + x))
    drude = ds.omega_p_t ** 2 / (x * (x + gamma_t))
    eps_tr = 1.0 + drude * (1.0 + ds.v_tr_t * s / x)
    eps_l = 1.0 + drude / (1.0 + ds.v_l_t * s / x)
    return PermittivityPair(eps_tr, eps_l)


def to_dimensionless_arguments(xi: ArrayLike, k_perp: ArrayLike, a: float):
    """(ξ, k⊥) → (x, y) at separation a"""
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    x = 2.0 * a * xi / C
    y = 2.0 * a * np.sqrt(k_perp ** 2 + (xi / C) ** 2)
    return x, y
