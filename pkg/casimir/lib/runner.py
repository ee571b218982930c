"""
Row computation shared by the compute, sweep and verify-nernst commands.
"""

import logging
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

from casimir.lib.errors import ConvergenceFailure
from casimir.lib.lifshitz import EnergyResult, entropy_numeric, free_energy, zero_t_energy
from casimir.lib.output import STATUS_FAILED, STATUS_OK, ResultRow
from casimir.lib.thermal import thermal_correction
from casimir.models.config import QuadratureConfig, RunConfig
from casimir.models.physics import Material, ResponseModel, StatePoint

# Set up logging
logger = logging.getLogger(__name__)

GridPoint = Tuple[float, float, ResponseModel]


def grid_points(config: RunConfig) -> List[GridPoint]:
    """Cartesian grid in a fixed order: separation, then temperature, then model"""
    return [
        (a, T, model)
        for a in config.geometry.values()
        for T in config.temperature.values()
        for model in config.models()
    ]


@lru_cache(maxsize=64)
def _cached_zero_t(a: float, mat: Material, model: ResponseModel,
                   cfg: QuadratureConfig) -> EnergyResult:
    return zero_t_energy(a, mat, model, cfg)


def compute_row(a: float, T: float, model: ResponseModel, mat: Material,
                cfg: QuadratureConfig, hash_value: str) -> ResultRow:
    """
    F, E₀, F − E₀ and S at one grid point. A convergence failure in any
    quantity gives a row flagged 'convergence-failure' carrying whatever was
    computed before it.
    """
    state = StatePoint(a=a, T=T)
    values = {"a_m": a, "T_K": T, "model": model.value, "config_hash": hash_value}
    try:
        energy = free_energy(state, mat, model, cfg)
        values.update(
            F_J_per_m2=energy.value,
            F_TM=energy.per_polarization["TM"],
            F_TE=energy.per_polarization["TE"],
            err_est=energy.err_est,
            l_max_used=energy.l_max,
        )
        values["E0_J_per_m2"] = _cached_zero_t(a, mat, model, cfg).value
        values["dF_J_per_m2"] = thermal_correction(state, mat, model, cfg).total
        values["S_J_per_K_m2"] = entropy_numeric(state, mat, model, cfg).value
        values["status"] = STATUS_OK
    except ConvergenceFailure as e:
        logger.error(f"Convergence failure at a={a:.6e} m, T={T:.6e} K, {model.value}: {e}")
        values["status"] = STATUS_FAILED
    row = ResultRow(**values)
    logger.info(f"a={a:.4e} m T={T:.4e} K {model.value}: F={row.F_J_per_m2} status={row.status}")
    return row


def compute_rows(config: RunConfig, hash_value: str,
                 skip: Optional[Callable[[float, float, str], bool]] = None,
                 on_row: Optional[Callable[[ResultRow], None]] = None) -> List[ResultRow]:
    """
    Rows for every grid point in order.

    Args:
        config: validated run config
        hash_value: config hash stamped on each row
        skip: predicate for grid points already done
        on_row: called with each new row as soon as it is computed
    """
    mat = config.material.to_material()
    rows = []
    for a, T, model in grid_points(config):
        if skip is not None and skip(a, T, model.value):
            logger.debug(f"Skipping completed point a={a:.6e}, T={T:.6e}, {model.value}")
            continue
        row = compute_row(a, T, model, mat, config.quadrature, hash_value)
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return rows
