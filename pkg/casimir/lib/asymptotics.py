"""
Closed-form low-temperature laws of the thermal correction and the entropy,
and the power-law fitting used to check numerics against them.

All laws are returned as ΔF ≈ amplitude·T^exponent (J/m², T in K) or
S ≈ amplitude·T^exponent (J/(K·m²)).
"""

import logging
import math
import warnings
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from casimir.lib.constants import C, HBAR, K_B
from casimir.lib.errors import (
    DegenerateModel,
    DomainError,
    InsufficientData,
    SeriesDomainWarning,
    SignMixture,
)
from casimir.lib.params import to_dimensionless
from casimir.lib.specfun import zeta
from casimir.models.physics import DefectLattice, Material, PerfectLattice, Polarization, StatePoint

# Set up logging
logger = logging.getLogger(__name__)

MIN_SAMPLES = 5
WINDOW_RATIO = 1e-2
# the three-term entropy series is used up to this κ = c/(ω_p a)
KAPPA_SERIES_MAX = 0.3


class AsymptoticLaw(BaseModel):
    model_config = ConfigDict(frozen=True)

    amplitude: float
    exponent: float
    label: str

    def evaluate(self, T):
        return self.amplitude * np.power(T, self.exponent)


class LawPair(NamedTuple):
    tm: AsymptoticLaw
    te: AsymptoticLaw


class DefectLaws(NamedTuple):
    tm: AsymptoticLaw
    te: AsymptoticLaw
    total: AsymptoticLaw
    entropy: AsymptoticLaw


class FitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    fitted_exponent: float
    fitted_amplitude: float
    r_squared: float
    window: Tuple[float, float]
    residual_max: float
    pinned_amplitude: Optional[float] = None
    n_samples: int = 0


def _zeta(s: float) -> float:
    return zeta(s).value


def _perfect_lattice(mat: Material) -> PerfectLattice:
    if not isinstance(mat.relaxation, PerfectLattice):
        raise DegenerateModel(f"law holds for a perfect lattice, got '{mat.relaxation.kind}'")
    return mat.relaxation


def _need_transverse(mat: Material) -> None:
    if not mat.v_tr > 0:
        raise DegenerateModel("law needs a nonzero transverse velocity v_tr")


# ---------------------------------------------------------------------------
# Perfect lattice, nonlocal Drude
# ---------------------------------------------------------------------------

def perfect_implicit_law(a: float, mat: Material) -> AsymptoticLaw:
    """Leading T^{3/2} term of the implicit correction, carried by the TE √x structure"""
    _perfect_lattice(mat)
    _need_transverse(mat)
    amplitude = -3.0 * C * _zeta(1.5) * _zeta(2.5) * K_B ** 1.5 / (
        32.0 * math.pi * mat.omega_p * a ** 2.5 * math.sqrt(mat.v_tr * HBAR)
    )
    return AsymptoticLaw(amplitude=amplitude, exponent=1.5, label="implicit")


def perfect_total_law(a: float, mat: Material) -> AsymptoticLaw:
    law = perfect_implicit_law(a, mat)
    return law.model_copy(update={"label": "total"})


def perfect_entropy_law(a: float, mat: Material) -> AsymptoticLaw:
    """S = −∂/∂T of the T^{3/2} law"""
    _perfect_lattice(mat)
    _need_transverse(mat)
    amplitude = 9.0 * K_B ** 1.5 * C * _zeta(1.5) * _zeta(2.5) / (
        64.0 * math.pi * mat.omega_p * a ** 2.5 * math.sqrt(mat.v_tr * HBAR)
    )
    return AsymptoticLaw(amplitude=amplitude, exponent=0.5, label="entropy")


def perfect_explicit_l0_laws(a: float, mat: Material) -> LawPair:
    """Static (l = 0) explicit terms: TM ∝ T³, TE ∝ T²"""
    b = _perfect_lattice(mat).b
    _need_transverse(mat)
    tm = K_B * b * mat.v_l * _zeta(3.0) / (4.0 * math.pi * a ** 3 * mat.omega_p ** 2)
    te = 3.0 * K_B * math.sqrt(b) * C * _zeta(2.5) / (
        16.0 * math.sqrt(2.0 * math.pi) * a ** 2.5 * mat.omega_p * math.sqrt(mat.v_tr)
    )
    return LawPair(
        AsymptoticLaw(amplitude=tm, exponent=3.0, label="explicit-l0-TM"),
        AsymptoticLaw(amplitude=te, exponent=2.0, label="explicit-l0-TE"),
    )


def perfect_explicit_lge1_laws(a: float, mat: Material, literal: bool = False) -> LawPair:
    """
    l ≥ 1 explicit terms, both ∝ T².

    The TE amplitude is 3ħc^{3/2}bζ(5/2)/(64πa³ω_p√v_tr). With literal the
    form 3ħcbζ(5/2)/(64πa³ω_p√v_tr) is returned instead; it mixes the
    dimensionless and SI velocity and is kept for comparison only.
    """
    b = _perfect_lattice(mat).b
    _need_transverse(mat)
    tm = HBAR * C * b * mat.v_l * _zeta(3.0) / (8.0 * math.pi ** 2 * a ** 4 * mat.omega_p ** 2)
    c_power = C if literal else C ** 1.5
    te = 3.0 * HBAR * c_power * b * _zeta(2.5) / (
        64.0 * math.pi * a ** 3 * mat.omega_p * math.sqrt(mat.v_tr)
    )
    return LawPair(
        AsymptoticLaw(amplitude=tm, exponent=2.0, label="explicit-lge1-TM"),
        AsymptoticLaw(amplitude=te, exponent=2.0, label="explicit-lge1-TE"),
    )


# ---------------------------------------------------------------------------
# Local Drude
# ---------------------------------------------------------------------------

def drude_entropy_zero(a: float, mat: Material) -> float:
    """
    S(T → 0) of the local Drude model with vanishing relaxation,
    −k_B ζ(3)/(16πa²)·(1 − 4κ + 12κ²) with κ = c/(ω_p a).

    Warns with SeriesDomainWarning when κ exceeds the range of the series.
    """
    if not a > 0:
        raise DomainError(f"separation must be positive, got {a}")
    kappa = C / (mat.omega_p * a)
    if kappa > KAPPA_SERIES_MAX:
        warnings.warn(
            f"kappa = {kappa:.3f} is outside the range of the three-term series",
            SeriesDomainWarning,
            stacklevel=2,
        )
    return -K_B * _zeta(3.0) / (16.0 * math.pi * a * a) * (1.0 - 4.0 * kappa + 12.0 * kappa ** 2)


# ---------------------------------------------------------------------------
# Lattice with defects
# ---------------------------------------------------------------------------

def _defect_lattice(mat: Material) -> DefectLattice:
    relaxation = mat.relaxation
    if not isinstance(relaxation, DefectLattice) or not relaxation.gamma0 > 0:
        raise DegenerateModel("defect laws need a lattice with residual relaxation γ₀ > 0")
    return relaxation


def defect_laws(a: float, mat: Material) -> DefectLaws:
    """
    ΔF ≈ −k_B²T²Φ'_α(0)/(24aħc) per polarization, from the first
    Euler–Maclaurin term of a sum whose summand is analytic at zero.
    The total follows the TE law; the entropy is linear in T.
    """
    from casimir.lib.thermal import phi_prime_static

    _defect_lattice(mat)
    _need_transverse(mat)
    # Φ'(0) depends on a only, any temperature below T₀ gives the same value
    ds = to_dimensionless(StatePoint(a=a, T=0.0), mat)
    factor = -K_B ** 2 / (24.0 * a * HBAR * C)
    tm = factor * phi_prime_static(ds, Polarization.TM)
    te = factor * phi_prime_static(ds, Polarization.TE)
    return DefectLaws(
        tm=AsymptoticLaw(amplitude=tm, exponent=2.0, label="defect-TM"),
        te=AsymptoticLaw(amplitude=te, exponent=2.0, label="defect-TE"),
        total=AsymptoticLaw(amplitude=te, exponent=2.0, label="defect-total"),
        entropy=AsymptoticLaw(amplitude=-2.0 * te, exponent=1.0, label="defect-entropy"),
    )


def defect_sign_change_separation(mat: Material) -> float:
    """Separation where the TE slope Φ'_TE(0), and with it the entropy, changes sign"""
    relaxation = _defect_lattice(mat)
    _need_transverse(mat)
    return 3.0 * _zeta(2.5) * mat.v_tr / (4.0 * _zeta(1.5) * relaxation.gamma0)


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------

def fit_power_law(samples: Sequence[Tuple[float, float]],
                  expected_exponent: Optional[float] = None) -> FitReport:
    """
    Least-squares fit of ln|v| = ln|A| + p ln T.

    Args:
        samples: (T, value) pairs, T strictly increasing, values of one sign
        expected_exponent: if given, the amplitude is also fitted with the
            exponent held at this value

    Raises:
        InsufficientData: fewer than five samples
        SignMixture: values of both signs or zero
        DomainError: temperatures not positive and strictly increasing
    """
    if len(samples) < MIN_SAMPLES:
        raise InsufficientData(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    T = np.array([s[0] for s in samples], dtype=float)
    v = np.array([s[1] for s in samples], dtype=float)
    if np.any(T <= 0) or np.any(np.diff(T) <= 0):
        raise DomainError("temperatures must be positive and strictly increasing")
    signs = np.sign(v)
    if np.any(signs == 0) or not np.all(signs == signs[0]):
        raise SignMixture("fit samples change sign or vanish")
    sign = float(signs[0])

    log_t = np.log(T)
    log_v = np.log(np.abs(v))
    slope, intercept = np.polyfit(log_t, log_v, 1)
    predicted = intercept + slope * log_t
    residual = log_v - predicted
    total = float(np.sum((log_v - log_v.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual ** 2)) / total if total > 0 else 1.0

    pinned = None
    if expected_exponent is not None:
        pinned = sign * math.exp(float(np.mean(log_v - expected_exponent * log_t)))

    report = FitReport(
        fitted_exponent=float(slope),
        fitted_amplitude=sign * math.exp(float(intercept)),
        r_squared=r_squared,
        window=(float(T[0]), float(T[-1])),
        residual_max=float(np.max(np.abs(residual))),
        pinned_amplitude=pinned,
        n_samples=len(T),
    )
    logger.debug(f"Power-law fit: exponent {report.fitted_exponent:.4f}, R² {report.r_squared:.6f}")
    return report


def select_fit_window(T: Sequence[float], values: Sequence[float], errs: Sequence[float],
                      leading: Callable, subleading: Optional[Callable] = None,
                      ratio: float = WINDOW_RATIO) -> List[int]:
    """
    Indices of samples inside the asymptotic window.

    The upper end is the largest T below which |subleading/leading| < ratio;
    the lower end is the smallest T above which err/|value| < ratio.

    Raises:
        InsufficientData: fewer than five samples remain
    """
    T = np.asarray(T, dtype=float)
    values = np.asarray(values, dtype=float)
    errs = np.asarray(errs, dtype=float)

    upper = len(T)
    if subleading is not None:
        lead = np.abs(np.asarray(leading(T), dtype=float))
        sub = np.abs(np.asarray(subleading(T), dtype=float))
        bad = np.nonzero(~(sub < ratio * lead))[0]
        upper = int(bad[0]) if len(bad) else len(T)

    noisy = np.nonzero(~(errs < ratio * np.abs(values)))[0]
    noisy = noisy[noisy < upper]
    lower = int(noisy[-1]) + 1 if len(noisy) else 0

    window = list(range(lower, upper))
    if len(window) < MIN_SAMPLES:
        raise InsufficientData(
            f"only {len(window)} samples inside the asymptotic window (need {MIN_SAMPLES})"
        )
    if lower > 0 or upper < len(T):
        logger.warning(f"Fit window shrunk to T in [{T[lower]:.3e}, {T[upper - 1]:.3e}]")
    return window
