import math

import numpy as np
import pytest

from casimir.lib.asymptotics import (
    KAPPA_SERIES_MAX,
    defect_laws,
    defect_sign_change_separation,
    drude_entropy_zero,
    fit_power_law,
    perfect_entropy_law,
    perfect_explicit_l0_laws,
    perfect_explicit_lge1_laws,
    perfect_implicit_law,
    perfect_total_law,
    select_fit_window,
)
from casimir.lib.constants import C, K_B
from casimir.lib.errors import (
    DegenerateModel,
    DomainError,
    InsufficientData,
    SeriesDomainWarning,
    SignMixture,
)
from casimir.lib.lifshitz import thermal_scale
from casimir.lib.params import tau_of, to_dimensionless
from casimir.lib.thermal import phi_prime_static, phi_small_x_coefficients
from casimir.models.physics import Polarization, StatePoint

ZETA32 = 2.612375348685488


def test_implicit_law_follows_from_square_root_term(gold_perfect, gold_ds):
    a, T = 1e-6, 0.5
    law = perfect_implicit_law(a, gold_perfect)
    coeffs = phi_small_x_coefficients(gold_ds)
    # Σ'√(τl) − ∫√(τt)dt = ζ(−1/2)√τ
    zeta_minus_half = -ZETA32 / (4.0 * math.pi)
    expected = thermal_scale(a, T) * coeffs.te_sqrt * zeta_minus_half * math.sqrt(tau_of(a, T))
    assert law.evaluate(T) == pytest.approx(expected, rel=1e-12)
    assert law.exponent == 1.5
    assert law.amplitude < 0


def test_total_and_entropy_laws(gold_perfect):
    a = 1e-6
    implicit = perfect_implicit_law(a, gold_perfect)
    total = perfect_total_law(a, gold_perfect)
    entropy = perfect_entropy_law(a, gold_perfect)
    assert total.amplitude == implicit.amplitude
    assert total.label == "total"
    # S = −dF/dT
    assert entropy.amplitude == pytest.approx(-1.5 * implicit.amplitude, rel=1e-13)
    assert entropy.exponent == 0.5


def test_explicit_laws_scale_with_separation(gold_perfect):
    near = perfect_explicit_l0_laws(1e-6, gold_perfect)
    far = perfect_explicit_l0_laws(2e-6, gold_perfect)
    assert far.tm.amplitude / near.tm.amplitude == pytest.approx(0.125, rel=1e-13)
    assert far.te.amplitude / near.te.amplitude == pytest.approx(2.0 ** -2.5, rel=1e-13)
    assert (near.tm.exponent, near.te.exponent) == (3.0, 2.0)
    assert near.tm.amplitude > 0 and near.te.amplitude > 0


def test_literal_lge1_form_differs_by_root_c(gold_perfect):
    default = perfect_explicit_lge1_laws(1e-6, gold_perfect)
    literal = perfect_explicit_lge1_laws(1e-6, gold_perfect, literal=True)
    assert default.te.amplitude / literal.te.amplitude == pytest.approx(math.sqrt(C), rel=1e-13)
    assert default.tm.amplitude == literal.tm.amplitude


def test_perfect_laws_need_perfect_lattice_and_velocity(gold_perfect, gold_defect):
    with pytest.raises(DegenerateModel):
        perfect_implicit_law(1e-6, gold_defect)
    with pytest.raises(DegenerateModel):
        perfect_explicit_l0_laws(1e-6, gold_perfect.without_nonlocality())


def test_drude_entropy_at_zero_temperature(gold_perfect):
    s = drude_entropy_zero(1e-6, gold_perfect)
    assert s < 0
    # the correction factor tends to one at large separation
    far = drude_entropy_zero(1e-3, gold_perfect)
    limit = -K_B * 1.2020569031595942 / (16.0 * math.pi * 1e-3 ** 2)
    assert far == pytest.approx(limit, rel=1e-3)


def test_drude_entropy_warns_outside_series_range(gold_perfect):
    kappa_a = C / gold_perfect.omega_p
    assert kappa_a / 1e-9 > KAPPA_SERIES_MAX
    with pytest.warns(SeriesDomainWarning):
        drude_entropy_zero(1e-9, gold_perfect)
    with pytest.raises(DomainError):
        drude_entropy_zero(0.0, gold_perfect)


def test_defect_laws_structure(gold_defect):
    laws = defect_laws(1e-6, gold_defect)
    assert laws.total.amplitude == laws.te.amplitude
    assert laws.entropy.amplitude == -2.0 * laws.te.amplitude
    assert laws.entropy.exponent == 1.0
    assert laws.tm.exponent == laws.te.exponent == 2.0


def test_defect_laws_need_residual_relaxation(gold_perfect):
    with pytest.raises(DegenerateModel):
        defect_laws(1e-6, gold_perfect)
    with pytest.raises(DegenerateModel):
        defect_sign_change_separation(gold_perfect)


def test_sign_change_separation(gold_defect):
    a_sc = defect_sign_change_separation(gold_defect)
    assert a_sc == pytest.approx(2.18e-5, rel=1e-2)
    below = to_dimensionless(StatePoint(a=0.5 * a_sc, T=0.0), gold_defect)
    above = to_dimensionless(StatePoint(a=2.0 * a_sc, T=0.0), gold_defect)
    assert phi_prime_static(below, Polarization.TE) > 0
    assert phi_prime_static(above, Polarization.TE) < 0
    assert defect_laws(0.5 * a_sc, gold_defect).entropy.amplitude > 0
    assert defect_laws(2.0 * a_sc, gold_defect).entropy.amplitude < 0


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------

def _samples(amplitude, exponent, T):
    return [(t, amplitude * t ** exponent) for t in T]


def test_fit_recovers_exact_power_law():
    T = np.logspace(-3, -1, 8)
    report = fit_power_law(_samples(-2.5e-9, 1.5, T), expected_exponent=1.5)
    assert report.fitted_exponent == pytest.approx(1.5, abs=1e-10)
    assert report.fitted_amplitude == pytest.approx(-2.5e-9, rel=1e-9)
    assert report.pinned_amplitude == pytest.approx(-2.5e-9, rel=1e-12)
    assert report.r_squared == pytest.approx(1.0, abs=1e-12)
    assert report.window == (T[0], T[-1])
    assert report.n_samples == 8


def test_fit_tolerates_noise():
    rng = np.random.default_rng(11)
    T = np.logspace(0, 2, 20)
    values = 3.0 * T ** 2 * (1.0 + 0.01 * rng.standard_normal(len(T)))
    report = fit_power_law(list(zip(T, values)))
    assert report.fitted_exponent == pytest.approx(2.0, abs=0.02)
    assert report.pinned_amplitude is None
    assert report.residual_max < 0.05


def test_fit_rejects_bad_samples():
    T = [1.0, 2.0, 3.0, 4.0, 5.0]
    with pytest.raises(InsufficientData):
        fit_power_law(_samples(1.0, 2.0, T[:4]))
    with pytest.raises(SignMixture):
        fit_power_law([(t, (-1) ** i * t) for i, t in enumerate(T)])
    with pytest.raises(SignMixture):
        fit_power_law([(t, 0.0 if i == 2 else t) for i, t in enumerate(T)])
    with pytest.raises(DomainError):
        fit_power_law(_samples(1.0, 2.0, [1.0, 3.0, 2.0, 4.0, 5.0]))


def test_window_selection():
    T = np.logspace(-4, 0, 17)
    values = T ** 1.5
    errs = values * 1e-6
    errs[:2] = values[:2] * 0.1
    window = select_fit_window(T, values, errs,
                               leading=lambda t: t ** 1.5,
                               subleading=lambda t: 0.05 * t ** 2)
    assert window == list(range(2, 11))


def test_window_too_narrow():
    T = np.logspace(-4, 0, 17)
    values = T ** 1.5
    with pytest.raises(InsufficientData):
        select_fit_window(T, values, values * 1e-6,
                          leading=lambda t: t ** 1.5,
                          subleading=lambda t: t ** 2)
