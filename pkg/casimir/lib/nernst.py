"""
Low-temperature verification: sweep τ over the configured window, fit power
laws to the numeric corrections and compare them with the closed forms.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from casimir.lib import asymptotics
from casimir.lib.constants import C, HBAR, K_B
from casimir.lib.errors import ConvergenceFailure, DegenerateModel, InsufficientData, SignMixture
from casimir.lib.lifshitz import entropy_numeric
from casimir.lib.thermal import thermal_correction
from casimir.models.config import NernstBlock, QuadratureConfig, RunConfig
from casimir.models.physics import DefectLattice, Material, PerfectLattice, ResponseModel, StatePoint

# Set up logging
logger = logging.getLogger(__name__)


class LawCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    a_m: float
    model: str
    label: str
    expected_exponent: Optional[float] = None
    fitted_exponent: Optional[float] = None
    expected_amplitude: Optional[float] = None
    fitted_amplitude: Optional[float] = None
    spread: Optional[float] = None   # relative scatter of the samples about the fit
    passed: bool
    note: str = ""


class NernstReport(BaseModel):
    checks: List[LawCheck]
    temperatures: Dict[str, List[float]]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def temperatures_for(a: float, nernst: NernstBlock) -> List[float]:
    """Temperatures whose τ = 4πk_B T a/(ħc) span [tau_min, tau_max] geometrically"""
    taus = np.geomspace(nernst.tau_min, nernst.tau_max, nernst.n_points)
    return [float(t * HBAR * C / (4.0 * math.pi * K_B * a)) for t in taus]


def check_law(a: float, model: ResponseModel, law: asymptotics.AsymptoticLaw,
              T: Sequence[float], values: Sequence[float], errs: Sequence[float],
              exponent_tol: float, amplitude_tol: float) -> LawCheck:
    """Fit the numeric samples inside the window and compare exponent and amplitude"""
    base = dict(a_m=a, model=model.value, label=law.label,
                expected_exponent=law.exponent, expected_amplitude=law.amplitude)
    try:
        window = asymptotics.select_fit_window(T, values, errs, law.evaluate)
        samples = [(T[i], values[i]) for i in window]
        fit = asymptotics.fit_power_law(samples, expected_exponent=law.exponent)
    except (InsufficientData, SignMixture) as e:
        return LawCheck(**base, passed=False, note=str(e))

    exponent_ok = abs(fit.fitted_exponent - law.exponent) <= exponent_tol
    amplitude_ok = abs(fit.pinned_amplitude / law.amplitude - 1.0) <= amplitude_tol
    note = "" if exponent_ok and amplitude_ok else (
        f"exponent within ±{exponent_tol}: {exponent_ok}, amplitude within ±{amplitude_tol:.0%}: {amplitude_ok}"
    )
    return LawCheck(**base, fitted_exponent=fit.fitted_exponent,
                    fitted_amplitude=fit.pinned_amplitude,
                    spread=fit.residual_max,
                    passed=exponent_ok and amplitude_ok, note=note)


def _series(a: float, T: Sequence[float], mat: Material, model: ResponseModel,
            cfg: QuadratureConfig, entropy: bool = True) -> Dict[str, List[float]]:
    out: Dict[str, List[float]] = {
        k: [] for k in ("total", "total_err", "implicit", "implicit_err", "implicit_TM",
                        "implicit_TE", "l0_TM", "l0_TE", "lge1_TM", "lge1_TE",
                        "explicit_err", "S", "S_err")
    }
    for temperature in T:
        state = StatePoint(a=a, T=temperature)
        br = thermal_correction(state, mat, model, cfg, first_order=False)
        out["total"].append(br.total)
        out["total_err"].append(br.err_est)
        out["implicit"].append(br.implicit)
        out["implicit_err"].append(br.implicit_err_est)
        out["implicit_TM"].append(br.implicit_per_polarization["TM"])
        out["implicit_TE"].append(br.implicit_per_polarization["TE"])
        for pol in ("TM", "TE"):
            out[f"l0_{pol}"].append(br.explicit_l0[pol])
            out[f"lge1_{pol}"].append(br.explicit_lge1[pol])
        out["explicit_err"].append(br.explicit_err_est)
        if entropy:
            s = entropy_numeric(state, mat, model, cfg)
            out["S"].append(s.value)
            out["S_err"].append(s.err_est)
        logger.info(f"a={a:.3e} m T={temperature:.4e} K {model.value}: dF={br.total:.6e}")
    return out


def _perfect_nonlocal(a, T, mat, model, cfg, nernst) -> List[LawCheck]:
    data = _series(a, T, mat, model, cfg)
    l0 = asymptotics.perfect_explicit_l0_laws(a, mat)
    lge1 = asymptotics.perfect_explicit_lge1_laws(a, mat)
    tol_e, tol_a, tol_lge1 = nernst.exponent_tol, nernst.amplitude_tol, nernst.amplitude_tol_lge1
    err = data["explicit_err"]
    return [
        check_law(a, model, asymptotics.perfect_implicit_law(a, mat), T,
                  data["implicit"], data["implicit_err"], tol_e, tol_a),
        check_law(a, model, asymptotics.perfect_total_law(a, mat), T,
                  data["total"], data["total_err"], tol_e, tol_a),
        check_law(a, model, asymptotics.perfect_entropy_law(a, mat), T,
                  data["S"], data["S_err"], tol_e, tol_a),
        check_law(a, model, l0.tm, T, data["l0_TM"], err, nernst.exponent_tol_explicit_tm, tol_a),
        check_law(a, model, l0.te, T, data["l0_TE"], err, tol_e, tol_a),
        check_law(a, model, lge1.tm, T, data["lge1_TM"], err, tol_e, tol_lge1),
        check_law(a, model, lge1.te, T, data["lge1_TE"], err, tol_e, tol_lge1),
    ]


def _defect_nonlocal(a, T, mat, model, cfg, nernst) -> List[LawCheck]:
    data = _series(a, T, mat, model, cfg)
    laws = asymptotics.defect_laws(a, mat)
    tol_e, tol_a = nernst.exponent_tol, nernst.amplitude_tol
    return [
        check_law(a, model, laws.tm, T, data["implicit_TM"], data["implicit_err"], tol_e, tol_a),
        check_law(a, model, laws.te, T, data["implicit_TE"], data["implicit_err"], tol_e, tol_a),
        check_law(a, model, laws.total, T, data["total"], data["total_err"], tol_e, tol_a),
        check_law(a, model, laws.entropy, T, data["S"], data["S_err"], tol_e, tol_a),
    ]


def extrapolate_to_zero(T: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """
    Intercept of a least-squares line through (T, value) and its standard error.

    Raises:
        InsufficientData: fewer than five samples
    """
    if len(T) < asymptotics.MIN_SAMPLES:
        raise InsufficientData(f"need at least {asymptotics.MIN_SAMPLES} samples, got {len(T)}")
    coeffs, cov = np.polyfit(np.asarray(T, dtype=float), np.asarray(values, dtype=float), 1, cov=True)
    return float(coeffs[1]), float(math.sqrt(max(cov[1, 1], 0.0)))


def _local_drude(a, T, mat, model, cfg, nernst) -> List[LawCheck]:
    expected = asymptotics.drude_entropy_zero(a, mat)
    base = dict(a_m=a, model=model.value, label="drude-entropy-zero",
                expected_exponent=0.0, expected_amplitude=expected)
    results = [entropy_numeric(StatePoint(a=a, T=t), mat, model, cfg) for t in T]
    entropies = [s.value for s in results]
    errs = [s.err_est for s in results]
    try:
        window = asymptotics.select_fit_window(T, entropies, errs, lambda t: np.full(np.shape(t), expected))
        T_fit = [T[i] for i in window]
        S_fit = [entropies[i] for i in window]
        intercept, stderr = extrapolate_to_zero(T_fit, S_fit)
        fit = asymptotics.fit_power_law(list(zip(T_fit, S_fit)))
    except (InsufficientData, SignMixture) as e:
        return [LawCheck(**base, passed=False, note=str(e))]

    tol = nernst.drude_entropy_tol
    spread = stderr / abs(expected)
    intercept_ok = abs(intercept / expected - 1.0) <= tol
    spread_ok = spread <= tol
    note = "" if intercept_ok and spread_ok else (
        f"intercept within ±{tol:.0%}: {intercept_ok}, standard error within ±{tol:.0%}: {spread_ok}"
    )
    return [LawCheck(**base, fitted_exponent=fit.fitted_exponent, fitted_amplitude=intercept,
                     spread=spread, passed=intercept_ok and spread_ok, note=note)]


def _plasma(a, T, mat, model, cfg, nernst) -> List[LawCheck]:
    results = [entropy_numeric(StatePoint(a=a, T=t), mat, model, cfg) for t in T]
    entropies = [s.value for s in results]
    try:
        window = asymptotics.select_fit_window(T, entropies, [s.err_est for s in results], np.abs)
        fit = asymptotics.fit_power_law([(T[i], entropies[i]) for i in window])
    except (InsufficientData, SignMixture) as e:
        return [LawCheck(a_m=a, model=model.value, label="plasma-entropy-vanishes",
                         passed=False, note=str(e))]
    return [LawCheck(a_m=a, model=model.value, label="plasma-entropy-vanishes",
                     fitted_exponent=fit.fitted_exponent, spread=fit.residual_max,
                     passed=fit.fitted_exponent > 0,
                     note="entropy vanishes as T -> 0; no relaxation enters this model")]


def verify(config: RunConfig) -> NernstReport:
    """Run every check that applies to the configured material and models"""
    mat = config.material.to_material()
    cfg = config.quadrature
    nernst = config.nernst
    checks: List[LawCheck] = []
    temperatures: Dict[str, List[float]] = {}

    for a in config.geometry.values():
        T = temperatures_for(a, nernst)
        temperatures[f"{a:.6e}"] = T
        for model in config.models():
            relaxation = mat.relaxation
            try:
                if model == ResponseModel.NONLOCAL_DRUDE and isinstance(relaxation, PerfectLattice):
                    checks += _perfect_nonlocal(a, T, mat, model, cfg, nernst)
                elif model == ResponseModel.NONLOCAL_DRUDE and isinstance(relaxation, DefectLattice):
                    checks += _defect_nonlocal(a, T, mat, model, cfg, nernst)
                elif model == ResponseModel.LOCAL_DRUDE and isinstance(relaxation, PerfectLattice):
                    checks += _local_drude(a, T, mat, model, cfg, nernst)
                elif model == ResponseModel.PLASMA:
                    checks += _plasma(a, T, mat, model, cfg, nernst)
                else:
                    logger.warning(f"No low-temperature law applies to {model.value} "
                                   f"with '{relaxation.kind}' relaxation")
            except (ConvergenceFailure, DegenerateModel) as e:
                checks.append(LawCheck(a_m=a, model=model.value, label="sweep",
                                       passed=False, note=str(e)))
    return NernstReport(checks=checks, temperatures=temperatures)


def write_report(report: NernstReport, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"passed": report.passed, **report.model_dump(mode="json")}
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
    logger.info(f"Wrote verification report to {path}")
