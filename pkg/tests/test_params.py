import math

import pytest

from casimir.lib.constants import C, HBAR, K_B, constants_hash, constants_table, ev_to_rad_per_s
from casimir.lib.params import (
    default_b_for,
    from_dimensionless,
    gamma_at,
    tau_of,
    to_dimensionless,
)
from casimir.models.physics import DefectLattice, Material, PerfectLattice, StatePoint, ZeroRelaxation


def test_constants_are_exact_si_values():
    assert HBAR == pytest.approx(1.054571817e-34, rel=1e-15)
    assert C == 299792458.0
    assert K_B == pytest.approx(1.380649e-23, rel=1e-15)
    assert set(constants_table()) == {"hbar_J_s", "c_m_per_s", "k_B_J_per_K", "eV_J"}
    assert len(constants_hash()) == 16


def test_ev_conversion():
    # 1 eV ↔ 1.519267447e15 rad/s
    assert ev_to_rad_per_s(1.0) == pytest.approx(1.519267447e15, rel=1e-9)


def test_tau_at_one_micron_room_temperature():
    assert tau_of(1e-6, 300.0) == pytest.approx(1.6459, rel=1e-4)


def test_dimensionless_mapping(gold_perfect):
    ds = to_dimensionless(StatePoint(a=1e-6, T=4.0), gold_perfect)
    assert ds.omega_p_t == pytest.approx(2e-6 * gold_perfect.omega_p / C, rel=1e-14)
    assert ds.v_tr_t == pytest.approx(0.01, rel=1e-14)
    # b chosen so that γ(4 K) = γ₀
    assert ds.gamma_t == pytest.approx(2e-6 * 5.3e10 / C, rel=1e-12)
    assert ds.gamma_zero_t == 0.0
    # γ̃ = b̃̃ τ² and γ̃ = b̃ T²
    assert ds.gamma_t == pytest.approx(ds.b_tt * ds.tau ** 2, rel=1e-12)
    assert ds.gamma_t == pytest.approx(ds.b_t * 16.0, rel=1e-12)


def test_round_trip_through_dimensionless(gold_perfect):
    state = StatePoint(a=3.5e-7, T=12.0)
    back = from_dimensionless(to_dimensionless(state, gold_perfect), gold_perfect)
    assert back.a == pytest.approx(state.a, rel=1e-14)
    assert back.T == pytest.approx(state.T, rel=1e-14)


def test_relaxation_laws():
    omega_p = ev_to_rad_per_s(9.0)
    assert gamma_at(Material(omega_p=omega_p, relaxation=PerfectLattice(b=2.0)), 3.0) == 18.0
    assert gamma_at(Material(omega_p=omega_p, relaxation=DefectLattice(gamma0=7.0)), 3.0) == 7.0
    assert gamma_at(Material(omega_p=omega_p, relaxation=ZeroRelaxation()), 3.0) == 0.0


def test_defect_lattice_has_temperature_independent_relaxation(gold_defect):
    cold = to_dimensionless(StatePoint(a=1e-6, T=0.001), gold_defect)
    assert cold.gamma_t == cold.gamma_zero_t > 0


def test_default_b():
    assert default_b_for(5.3e10, 4.0) == pytest.approx(5.3e10 / 16.0)
    with pytest.raises(ValueError):
        default_b_for(5.3e10, 0.0)


def test_material_validation():
    with pytest.raises(ValueError):
        Material(omega_p=-1.0)
    with pytest.raises(ValueError):
        Material(omega_p=1e16, v_tr=C)
    with pytest.raises(ValueError):
        StatePoint(a=0.0, T=1.0)


def test_gold_defaults(gold_perfect):
    assert gold_perfect.omega_p == pytest.approx(ev_to_rad_per_s(9.0))
    assert gold_perfect.v_tr == pytest.approx(0.01 * C)
    assert gold_perfect.relaxation.b == pytest.approx(5.3e10 / 16.0)
    assert Material.gold("defect-lattice").relaxation.gamma0 == 5.3e10
    local = gold_perfect.without_nonlocality()
    assert local.v_tr == local.v_l == 0.0
    assert math.isclose(local.omega_p, gold_perfect.omega_p)


def test_material_from_ev_matches_gold_plasma_frequency(gold_perfect):
    mat = Material.from_ev(9.0, relaxation=PerfectLattice(b=5.3e10 / 16.0), v_tr=0.01 * C)
    assert mat.omega_p == pytest.approx(gold_perfect.omega_p, rel=1e-12)
    assert mat.relaxation.b == pytest.approx(gold_perfect.relaxation.b)
    assert isinstance(Material.from_ev(9.0).relaxation, ZeroRelaxation)
