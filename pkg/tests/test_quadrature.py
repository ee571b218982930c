import numpy as np
import pytest

from casimir.lib.params import to_dimensionless
from casimir.lib.quadrature import (
    Z_MAX,
    log_one_minus,
    panel_z0,
    phi_delta_pair,
    phi_pair,
    rule_error,
    tail_bound,
    z_rule,
)
from casimir.lib.reflection import ReflectionParams, reflection_params
from casimir.lib.specfun import ideal_phi_exact
from casimir.models.physics import ResponseModel, StatePoint, TemperatureMode

IDEAL = ReflectionParams(91.2, 0.0, 0.0, 0.0, ideal=True)
ZETA3 = 1.2020569031595942


def test_rule_integrates_constants_exactly():
    for z0 in (2.0 ** -30, 2.0 ** -10, 2.0 ** -4):
        z, w = z_rule(z0, 16)
        assert w.sum() == pytest.approx(Z_MAX, rel=1e-13)
        assert np.all(np.diff(z) > 0)
        assert z[-1] < Z_MAX


def test_rule_is_read_only():
    z, w = z_rule(2.0 ** -20, 16)
    with pytest.raises(ValueError):
        z[0] = 1.0


def test_first_panel_width():
    assert panel_z0(1.0) == 2.0 ** -7
    assert panel_z0(1e3) == 2.0 ** -4
    assert panel_z0(1e-20) == 2.0 ** -40
    assert panel_z0(0.0) == 2.0 ** -30


def test_static_ideal_phi_is_minus_zeta3():
    pair = phi_pair(np.array([0.0]), IDEAL)
    assert pair.tm[0] == pytest.approx(-ZETA3, rel=1e-11)
    assert pair.te[0] == pytest.approx(-ZETA3, rel=1e-11)


def test_ideal_phi_matches_closed_form():
    x = np.array([1e-3, 0.5, 3.0, 10.0])
    pair = phi_pair(x, IDEAL)
    for xi, tm, te in zip(x, pair.tm, pair.te):
        exact = ideal_phi_exact(float(xi))
        assert tm + te == pytest.approx(exact, rel=1e-11)


def test_nonlocal_static_phi_equals_ideal(gold_ds):
    # perfect lattice at T = 0 reflects perfectly at zero frequency
    p = reflection_params(gold_ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    pair = phi_pair(np.array([0.0]), p)
    assert pair.tm[0] == pytest.approx(-ZETA3, rel=1e-11)
    assert pair.te[0] == pytest.approx(-ZETA3, rel=1e-11)


def test_real_metal_binds_less_than_ideal(gold_ds):
    p = reflection_params(gold_ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    x = np.array([0.1, 1.0, 5.0])
    metal = phi_pair(x, p)
    ideal = phi_pair(x, IDEAL)
    assert np.all(metal.tm > ideal.tm)
    assert np.all(metal.te > ideal.te)
    assert np.all(metal.tm < 0)


def test_phi_vanishes_far_out(gold_ds):
    p = reflection_params(gold_ds, ResponseModel.PLASMA, TemperatureMode.ZERO_T)
    pair = phi_pair(np.array([45.0]), p)
    assert abs(pair.tm[0]) < 1e-15
    assert abs(pair.te[0]) < 1e-15


def test_tail_bound_is_small_and_decreasing():
    bound = tail_bound(np.array([0.0, 1.0, 10.0]))
    assert np.all(np.diff(bound) < 0)
    assert bound[0] < 1e-15


def test_log_one_minus_agrees_with_naive_form():
    y = np.array([0.3, 1.0, 4.0])
    r = np.array([0.5, -0.7, 0.9])
    expected = np.log(1.0 - r * r * np.exp(-y))
    np.testing.assert_allclose(log_one_minus(r, 1.0 - r * r, y), expected, rtol=1e-13)


def test_rule_error_has_floor(gold_ds):
    p = reflection_params(gold_ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    assert rule_error(p, [1e-3, 1.0, 5.0]) >= 1e-12
    assert rule_error(IDEAL, [0.5]) == 1e-12


def test_delta_phi_matches_difference(gold_perfect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=300.0), gold_perfect)
    p0 = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    p1 = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.FINITE_T)
    x = np.array([0.0, 0.4, 2.0])
    delta = phi_delta_pair(x, p0, p1, x_min=0.4)
    warm = phi_pair(x, p1, x_min=0.4)
    cold = phi_pair(x, p0, x_min=0.4)
    np.testing.assert_allclose(delta.tm, warm.tm - cold.tm, rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(delta.te, warm.te - cold.te, rtol=1e-9, atol=1e-14)


def test_delta_phi_vanishes_without_relaxation_change(gold_defect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=10.0), gold_defect)
    p0 = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.ZERO_T)
    p1 = reflection_params(ds, ResponseModel.NONLOCAL_DRUDE, TemperatureMode.FINITE_T)
    delta = phi_delta_pair(np.array([0.0, 1.0]), p0, p1)
    assert np.all(delta.tm == 0.0)
    assert np.all(delta.te == 0.0)
