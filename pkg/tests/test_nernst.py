import numpy as np
import pytest

from casimir.lib.asymptotics import AsymptoticLaw
from casimir.lib.errors import InsufficientData
from casimir.lib.nernst import check_law, extrapolate_to_zero
from casimir.models.physics import ResponseModel

LAW = AsymptoticLaw(amplitude=-2.0e-9, exponent=1.5, label="implicit")
T = [float(t) for t in np.geomspace(1e-3, 1e-1, 7)]


def test_extrapolate_to_zero_recovers_intercept():
    values = [-3.0e-5 + 2.0e-4 * t for t in T]
    intercept, stderr = extrapolate_to_zero(T, values)
    assert intercept == pytest.approx(-3.0e-5, rel=1e-9)
    assert stderr < 1e-12


def test_extrapolate_to_zero_reports_scatter():
    values = [-3.0e-5 * (1.0 + 0.01 * (-1) ** i) for i in range(len(T))]
    intercept, stderr = extrapolate_to_zero(T, values)
    assert intercept == pytest.approx(-3.0e-5, rel=0.03)
    assert 0.0 < stderr < 1e-6


def test_extrapolate_to_zero_needs_five_samples():
    with pytest.raises(InsufficientData):
        extrapolate_to_zero(T[:4], [1.0] * 4)


def test_check_law_passes_exact_samples():
    values = [LAW.amplitude * t ** LAW.exponent for t in T]
    check = check_law(1e-6, ResponseModel.NONLOCAL_DRUDE, LAW, T, values, [0.0] * len(T),
                      exponent_tol=0.05, amplitude_tol=0.10)
    assert check.passed
    assert check.fitted_exponent == pytest.approx(1.5, abs=1e-9)
    assert check.fitted_amplitude == pytest.approx(LAW.amplitude, rel=1e-9)
    assert check.spread < 1e-9


def test_check_law_spread_follows_scatter():
    values = [LAW.amplitude * t ** LAW.exponent * (1.0 + 0.01 * (-1) ** i) for i, t in enumerate(T)]
    check = check_law(1e-6, ResponseModel.NONLOCAL_DRUDE, LAW, T, values, [0.0] * len(T),
                      exponent_tol=0.05, amplitude_tol=0.10)
    assert check.passed
    assert 0.005 < check.spread < 0.02


def test_check_law_fails_wrong_exponent():
    values = [LAW.amplitude * t ** 2.0 for t in T]
    check = check_law(1e-6, ResponseModel.NONLOCAL_DRUDE, LAW, T, values, [0.0] * len(T),
                      exponent_tol=0.05, amplitude_tol=0.10)
    assert not check.passed
    assert "exponent" in check.note


def test_check_law_reports_too_few_samples():
    values = [LAW.amplitude * t ** LAW.exponent for t in T]
    errs = [abs(v) for v in values[:3]] + [0.0] * (len(T) - 3)
    check = check_law(1e-6, ResponseModel.NONLOCAL_DRUDE, LAW, T, values, errs,
                      exponent_tol=0.05, amplitude_tol=0.10)
    assert not check.passed
    assert check.spread is None
