import math

import mpmath
import numpy as np
import pytest

from casimir.lib.constants import C
from casimir.lib.errors import DomainError
from casimir.lib.params import DimensionlessState, to_dimensionless
from casimir.lib.reflection import (
    coefficients,
    fresnel_local,
    nonlocal_pair_dimensional,
    nonlocal_pair_dimensionless,
    r_prime_static,
    r_te_static,
    r_tm_static,
    reflection_params,
    static_coefficients,
    thermal_delta_r,
)
from casimir.lib.response import drude_imag_freq, to_dimensionless_arguments
from casimir.models.physics import Polarization, ResponseModel, StatePoint, TemperatureMode


def _slope(x, values):
    return np.polyfit(np.log(x), np.log(values), 1)[0]


@pytest.mark.parametrize("y", [0.5, 1.0, 5.0, 20.0])
def test_small_frequency_scaling(gold_ds, y):
    p = reflection_params(gold_ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    x = np.geomspace(1e-8, 1e-4, 9)
    s = np.sqrt((y - x) * (y + x))
    _, omr2_tm, _, omr2_te = coefficients(x, np.full_like(x, y), s, p)
    # 1 − r² ≈ 2(1 ∓ r) here, so the slopes are those of r_TM − 1 and r_TE + 1
    assert _slope(x, omr2_tm) == pytest.approx(1.0, abs=0.02)
    assert _slope(x, omr2_te) == pytest.approx(0.5, abs=0.02)


def test_coefficients_within_unit_interval(gold_ds):
    x = np.array([1e-6, 1e-3, 0.1, 1.0, 10.0])
    y = x * 1.5 + 0.2
    r = nonlocal_pair_dimensionless(x, y, gold_ds, TemperatureMode.ZERO_T)
    assert np.all((r.r_tm > 0) & (r.r_tm < 1))
    assert np.all((r.r_te > -1) & (r.r_te < 0))


def test_stable_one_minus_r_squared(gold_ds):
    p = reflection_params(gold_ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    x = np.array([0.3, 2.0])
    y = np.array([0.7, 4.0])
    s = np.sqrt((y - x) * (y + x))
    r_tm, omr2_tm, r_te, omr2_te = coefficients(x, y, s, p)
    np.testing.assert_allclose(omr2_tm, 1.0 - r_tm ** 2, rtol=1e-9)
    np.testing.assert_allclose(omr2_te, 1.0 - r_te ** 2, rtol=1e-9)


def test_dimensional_and_dimensionless_agree(gold_perfect):
    a, T = 7e-7, 150.0
    ds = to_dimensionless(StatePoint(a=a, T=T), gold_perfect)
    xi = np.array([5e12, 1e14, 2e15])
    k = np.array([1e5, 3e6, 4e7])
    x, y = to_dimensionless_arguments(xi, k, a)
    dimensional = nonlocal_pair_dimensional(xi, k, T, gold_perfect)
    dimensionless = nonlocal_pair_dimensionless(x, y, ds, TemperatureMode.FINITE_T)
    np.testing.assert_allclose(dimensional.r_tm, dimensionless.r_tm, rtol=1e-12)
    np.testing.assert_allclose(dimensional.r_te, dimensionless.r_te, rtol=1e-12)


def test_fresnel_matches_high_precision(gold_perfect):
    xi, k = 2.3e14, 4.1e6
    eps = float(drude_imag_freq(xi, 300.0, gold_perfect))
    r = fresnel_local(xi, k, eps)
    with mpmath.workdps(50):
        w = mpmath.mpf(xi) / C
        q = mpmath.sqrt(k ** 2 + w ** 2)
        kl = mpmath.sqrt(k ** 2 + eps * w ** 2)
        r_tm = (eps * q - kl) / (eps * q + kl)
        r_te = (q - kl) / (q + kl)
    assert r.r_tm == pytest.approx(float(r_tm), rel=1e-13)
    assert r.r_te == pytest.approx(float(r_te), rel=1e-13)


def test_fresnel_ideal_metal():
    r = fresnel_local(1e14, 1e6, math.inf)
    assert r.r_tm == 1.0
    assert r.r_te == -1.0
    with pytest.raises(DomainError):
        fresnel_local(0.0, 0.0, 2.0)
    with pytest.raises(DomainError):
        fresnel_local(1e14, 1e6, 0.5)


def test_local_drude_reduces_to_fresnel(gold_perfect):
    local = gold_perfect.without_nonlocality()
    a, T = 1e-6, 300.0
    ds = to_dimensionless(StatePoint(a=a, T=T), local)
    xi, k = 3e13, 2e6
    x, y = to_dimensionless_arguments(xi, k, a)
    nonlocal_form = nonlocal_pair_dimensionless(x, y, ds, TemperatureMode.FINITE_T)
    fresnel = fresnel_local(xi, k, float(drude_imag_freq(xi, T, local)))
    assert nonlocal_form.r_tm == pytest.approx(fresnel.r_tm, rel=1e-12)
    assert nonlocal_form.r_te == pytest.approx(fresnel.r_te, rel=1e-12)


def test_static_limits(gold_perfect):
    cold = to_dimensionless(StatePoint(a=1e-6, T=0.0), gold_perfect)
    warm = to_dimensionless(StatePoint(a=1e-6, T=300.0), gold_perfect)
    y = np.array([0.1, 1.0, 10.0])
    np.testing.assert_array_equal(r_tm_static(y, cold, TemperatureMode.ZERO_T), 1.0)
    np.testing.assert_array_equal(r_te_static(y, cold, TemperatureMode.ZERO_T), -1.0)
    assert np.all(r_tm_static(y, warm) < 1.0)
    assert np.all(r_te_static(y, warm) > -1.0)

    local = to_dimensionless(StatePoint(a=1e-6, T=300.0), gold_perfect.without_nonlocality())
    np.testing.assert_array_equal(r_te_static(y, local), 0.0)
    np.testing.assert_array_equal(r_tm_static(y, local), 1.0)


def test_static_limit_is_reached_continuously(gold_perfect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=100.0), gold_perfect)
    y = 2.0
    moving = nonlocal_pair_dimensionless(1e-12, y, ds, TemperatureMode.FINITE_T)
    assert moving.r_tm == pytest.approx(r_tm_static(y, ds), rel=1e-6)
    assert moving.r_te == pytest.approx(r_te_static(y, ds), rel=1e-6)


def test_plasma_static_te():
    ds = DimensionlessState(tau=0.1, omega_p_t=50.0, v_tr_t=0.0, v_l_t=0.0,
                            gamma_t=0.0, gamma_zero_t=0.0, b_t=0.0, b_tt=0.0)
    p = reflection_params(ds, ResponseModel.PLASMA, TemperatureMode.FINITE_T)
    y = np.array([1.0, 30.0])
    r_te = static_coefficients(y, p)[2]
    expected = (y - np.sqrt(y ** 2 + 2500.0)) / (y + np.sqrt(y ** 2 + 2500.0))
    np.testing.assert_allclose(r_te, expected, rtol=1e-13)


def test_first_order_static_forms(gold_perfect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=1.0), gold_perfect)
    y = np.array([0.5, 2.0])
    np.testing.assert_allclose(r_tm_static(y, ds, first_order=True), r_tm_static(y, ds), atol=1e-15)
    exact = r_te_static(y, ds)
    approx = r_te_static(y, ds, first_order=True)
    delta = ds.gamma_t / (ds.v_tr_t * ds.omega_p_t ** 2)
    # difference is second order in √(δy)
    assert np.all(np.abs(exact - approx) < 4.0 * delta * y)


def test_static_derivative_matches_finite_difference(gold_defect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=0.0), gold_defect)
    y = 1.5
    # TE varies on the scale γ̃₀, TM only on the scale ṽ_l y
    for pol, attr, h in ((Polarization.TM, "r_tm", 1e-6), (Polarization.TE, "r_te", 1e-9)):
        r0 = r_tm_static(y, ds, TemperatureMode.ZERO_T) if pol == Polarization.TM \
            else r_te_static(y, ds, TemperatureMode.ZERO_T)
        rh = getattr(nonlocal_pair_dimensionless(h, y, ds, TemperatureMode.ZERO_T), attr)
        assert (rh - r0) / h == pytest.approx(r_prime_static(y, ds, pol), rel=1e-3)


def test_static_derivative_needs_residual_relaxation(gold_ds):
    with pytest.raises(DomainError):
        r_prime_static(1.0, gold_ds, Polarization.TM)


def test_thermal_delta_matches_direct_difference(gold_perfect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=300.0), gold_perfect)
    x, y = 0.5, 1.0
    warm = nonlocal_pair_dimensionless(x, y, ds, TemperatureMode.FINITE_T)
    cold = nonlocal_pair_dimensionless(x, y, ds, TemperatureMode.ZERO_T)
    delta = thermal_delta_r(x, y, ds)
    assert delta.r_tm == pytest.approx(warm.r_tm - cold.r_tm, abs=1e-12)
    assert delta.r_te == pytest.approx(warm.r_te - cold.r_te, abs=1e-12)


def test_thermal_delta_small_tau_expansion():
    tau, b_tt = 1e-6, 0.73
    ds = DimensionlessState(tau=tau, omega_p_t=91.2, v_tr_t=0.01, v_l_t=0.01,
                            gamma_t=b_tt * tau ** 2, gamma_zero_t=0.0,
                            b_t=0.0, b_tt=b_tt)
    y = 1.0
    delta = thermal_delta_r(tau, y, ds)
    expected = -2.0 * b_tt * tau ** 2 * ds.v_l_t * y / ds.omega_p_t ** 2
    assert delta.r_tm == pytest.approx(expected, rel=1e-3)
    assert delta.r_te > 0


def test_thermal_delta_static_te(gold_perfect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=2.0), gold_perfect)
    y = 3.0
    delta = thermal_delta_r(0.0, y, ds)
    assert delta.r_te == pytest.approx(1.0 + r_te_static(y, ds), rel=1e-12)
    c = 2.0 * ds.gamma_t * ds.v_l_t * y
    assert delta.r_tm == pytest.approx(-c / (ds.omega_p_t ** 2 + c), rel=1e-12)


def test_domain_errors(gold_ds):
    with pytest.raises(DomainError):
        nonlocal_pair_dimensionless(0.0, 1.0, gold_ds, TemperatureMode.ZERO_T)
    with pytest.raises(DomainError):
        thermal_delta_r(2.0, 1.0, gold_ds)
    with pytest.raises(DomainError):
        r_tm_static(0.0, gold_ds)
