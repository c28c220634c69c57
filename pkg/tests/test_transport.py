import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossedfields import dos, transport
from crossedfields.constants import (BOLTZMANN, ELECTRON_MASS,
                                     ELEMENTARY_CHARGE, HBAR, VON_KLITZING)
from crossedfields.errors import IndexOutOfRange, NoConvergence, SingularTensor

MEV = 1e-3 * ELEMENTARY_CHARGE


def narrow_config(B=5.0, gamma_over_hwl=0.05, g=0.0):
    hwl = HBAR * ELEMENTARY_CHARGE * B / (2.0 * ELECTRON_MASS)
    l_mag = math.sqrt(HBAR / (ELEMENTARY_CHARGE * B))
    e_perp = gamma_over_hwl * hwl / (ELEMENTARY_CHARGE * l_mag)
    return dos.FieldConfiguration(B=B, E_perp=e_perp, g_factor=g)


# --- tensors ---------------------------------------------------------------

def test_hall_form_constructor():
    t = transport.Tensor2.hall(xx=2.0, xy=-3.0)
    assert (t.xx, t.xy, t.yx, t.yy) == (2.0, -3.0, 3.0, 2.0)


@settings(max_examples=150, deadline=None)
@given(st.floats(1e-12, 1e6), st.floats(1e-12, 1e6))
def test_rho_from_sigma_hall_form_and_involution(sxx, sxy):
    sigma = transport.Tensor2.hall(sxx, sxy)
    rho = transport.rho_from_sigma(sigma)
    assert rho.yy == rho.xx and rho.yx == -rho.xy
    back = transport.rho_from_sigma(rho)
    assert back.xx == pytest.approx(sigma.xx, rel=1e-12)
    assert back.xy == pytest.approx(sigma.xy, rel=1e-12)


def test_rho_from_sigma_limits():
    rho = transport.rho_from_sigma(transport.Tensor2.hall(0.0, 4.0))
    assert rho.xy == 0.25 and rho.xx == 0.0
    with pytest.raises(SingularTensor):
        transport.rho_from_sigma(transport.Tensor2.hall(0.0, 0.0))


# --- energy-resolved and total conductivities --------------------------------

def test_sigma_energy_structure():
    cfg = narrow_config(gamma_over_hwl=0.2)
    sp = dos.scale(cfg)
    e_peak = sp.drift_shift + HBAR * sp.omega_L
    for tau in (1e-13, 1e-11):
        t = transport.sigma_energy(cfg, e_peak, tau)
        assert t.xy / t.xx == pytest.approx(sp.omega_C * tau, rel=1e-12)
        assert t.yx == -t.xy and t.yy == t.xx
    # gap energy: state suppression exp(-(hwl/Gamma)^2) = exp(-25) here
    t_gap = transport.sigma_energy(cfg, e_peak + HBAR * sp.omega_L, 1e-11)
    assert t_gap.xx < 1e-8 * t.xx
    narrow = narrow_config(gamma_over_hwl=0.05)
    sp_n = dos.scale(narrow)
    t_deep = transport.sigma_energy(narrow, sp_n.drift_shift + 2 * HBAR * sp_n.omega_L, 1e-11)
    assert t_deep.xx == 0.0  # exp(-400) underflows outright
    # tau -> 0 kills every component: sigma_xx ~ tau, sigma_xy ~ tau^2
    ref = transport.sigma_energy(cfg, e_peak, 1e-15)
    small = transport.sigma_energy(cfg, e_peak, 1e-16)
    assert small.xx == pytest.approx(ref.xx / 10.0, rel=1e-3)
    assert small.xy == pytest.approx(ref.xy / 100.0, rel=1e-3)
    assert small.xx < ref.xx and small.xy < ref.xy


def test_sigma_xy_mirrors_idos():
    cfg = narrow_config(gamma_over_hwl=0.1, g=0.5)
    sp = dos.scale(cfg)
    for scaled_e in (0.7, 2.0, 3.3, 6.1):
        mat = transport.MaterialParams(
            tau_EF=1e-11, temperature=0.1, j_x=0.0,
            E_F=sp.drift_shift + scaled_e * HBAR * sp.omega_L)
        expect = ELEMENTARY_CHARGE / cfg.B * dos.idos(cfg, mat.E_F, spin=True)
        assert transport.sigma_xy_total(cfg, mat) == pytest.approx(expect, rel=1e-14)
    # a Fermi level below the whole spectrum carries no transverse response
    empty = transport.MaterialParams(tau_EF=1e-11, temperature=0.1, j_x=0.0,
                                     E_F=-2.0 * HBAR * sp.omega_L)
    assert transport.sigma_xy_total(cfg, empty) == 0.0


def test_sigma_xx_scalings():
    cfg = narrow_config(gamma_over_hwl=0.2)
    sp = dos.scale(cfg)
    e_f = sp.drift_shift + HBAR * sp.omega_L
    mat1 = transport.MaterialParams(tau_EF=1e-11, temperature=0.1, j_x=0.0, E_F=e_f)
    mat2 = transport.MaterialParams(tau_EF=1e-11, temperature=0.2, j_x=0.0, E_F=e_f)
    s1 = transport.sigma_xx_total(cfg, mat1)
    s2 = transport.sigma_xx_total(cfg, mat2)
    assert s2 == pytest.approx(2.0 * s1, rel=1e-12)
    # explicit formula
    wct = sp.omega_C * mat1.tau_EF
    n = dos.spin_dos(cfg, e_f)
    expect = (BOLTZMANN * 0.1 * ELEMENTARY_CHARGE / cfg.B * n * wct / (1 + wct * wct))
    assert s1 == pytest.approx(expect, rel=1e-12)


# --- plateau quantization ------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3])
def test_integer_plateaus_spinless(k):
    cfg = narrow_config(gamma_over_hwl=0.05)
    sp = dos.scale(cfg)
    mat = transport.MaterialParams(
        tau_EF=1e-11, temperature=0.1, j_x=0.0,
        E_F=sp.drift_shift + 2.0 * k * HBAR * sp.omega_L)
    sxy = transport.sigma_xy_total(cfg, mat, spin=False)
    sxx = transport.sigma_xx_total(cfg, mat, spin=False)
    rho = transport.rho_from_sigma(transport.Tensor2.hall(sxx, sxy))
    assert rho.xy == pytest.approx(VON_KLITZING / k, rel=1e-6)
    assert rho.xx / rho.xy <= 1e-6


def test_von_klitzing_value():
    assert VON_KLITZING == pytest.approx(25812.807, abs=1e-3)
    assert VON_KLITZING == pytest.approx(25812.807459, abs=1e-6)


# --- classical Hall line --------------------------------------------------------

def test_classical_rho_xy_linear_in_B():
    n2d = 3e15
    assert transport.classical_rho_xy(4.0, n2d) == pytest.approx(
        2.0 * transport.classical_rho_xy(2.0, n2d), rel=1e-14)
    with pytest.raises(ValueError):
        transport.classical_rho_xy(1.0, 0.0)


def test_classical_rho_xy_free_gas_identity():
    e_f = 1.0 * MEV
    n2d = e_f * ELECTRON_MASS / (2.0 * math.pi * HBAR ** 2)
    got = transport.classical_rho_xy(5.0, n2d)
    expect = 2.0 * math.pi * HBAR ** 2 * 5.0 / (ELEMENTARY_CHARGE * ELECTRON_MASS * e_f)
    assert got == pytest.approx(expect, rel=1e-14)


# --- breakdown ------------------------------------------------------------------

def test_critical_field_values_and_scaling():
    e1 = transport.critical_field(5.0, 1, ELECTRON_MASS)
    assert e1 == pytest.approx(18465.901587167657, rel=1e-12)
    assert e1 == pytest.approx(1.85e4, rel=2e-3)
    assert transport.critical_field(20.0, 1, ELECTRON_MASS) == pytest.approx(8.0 * e1, rel=1e-12)
    ks = [transport.critical_field(5.0, k, ELECTRON_MASS) for k in range(1, 12)]
    assert all(a > b for a, b in zip(ks, ks[1:]))
    with pytest.raises(IndexOutOfRange):
        transport.critical_field(5.0, 0, ELECTRON_MASS)


def test_overlap_ratio_values():
    cfg = dos.FieldConfiguration(B=5.0, E_perp=4000.0)
    assert transport.overlap_ratio(cfg, 1) == pytest.approx(0.21661547263848108, rel=1e-12)
    assert transport.overlap_ratio(cfg, 1) == pytest.approx(0.216, abs=1e-3)
    double = dos.FieldConfiguration(B=5.0, E_perp=8000.0)
    assert transport.overlap_ratio(double, 1) == pytest.approx(
        2.0 * transport.overlap_ratio(cfg, 1), rel=1e-14)
    with pytest.raises(IndexOutOfRange):
        transport.overlap_ratio(cfg, 0)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 20), st.sampled_from([1.0, 5.0, 10.0]))
def test_overlap_at_critical_field_is_one(k, B):
    e_crit = transport.critical_field(B, k, ELECTRON_MASS)
    cfg = dos.FieldConfiguration(B=B, E_perp=e_crit)
    assert abs(transport.overlap_ratio(cfg, k) - 1.0) <= 1e-12


def test_asymptotic_classicality_across_decade():
    # ten times the breakdown field: the staircase hugs the classical line
    e_f = 1.0 * MEV
    n2d = e_f * ELECTRON_MASS / (2.0 * math.pi * HBAR ** 2)
    for b in np.geomspace(0.05, 0.5, 7):
        hwl = HBAR * ELEMENTARY_CHARGE * b / (2.0 * ELECTRON_MASS)
        k_f = max(1, int(round((e_f / hwl - 1.0) / 2.0)))
        cfg = dos.FieldConfiguration(
            B=float(b), E_perp=10.0 * transport.critical_field(float(b), k_f, ELECTRON_MASS))
        mat = transport.MaterialParams(tau_EF=1e-11, temperature=0.1, j_x=0.0, E_F=e_f)
        sxy = transport.sigma_xy_total(cfg, mat, spin=False)
        sxx = transport.sigma_xx_total(cfg, mat, spin=False)
        rho = transport.rho_from_sigma(transport.Tensor2.hall(sxx, sxy))
        classical = transport.classical_rho_xy(float(b), n2d)
        assert abs(rho.xy - classical) / classical <= 0.05


# --- Hall-field fixed point -----------------------------------------------------

FIG2_MAT = transport.MaterialParams(tau_EF=1e-11, temperature=0.1, j_x=0.2,
                                    E_F=0.868 * MEV)


def test_solve_trivial_current():
    mat = transport.MaterialParams(tau_EF=1e-11, temperature=0.1, j_x=0.0, E_F=1 * MEV)
    sol = transport.solve_hall_field(dos.FieldConfiguration(B=5.0), mat)
    assert sol.E_y == 0.0 and sol.method == "trivial"


def test_solve_on_plateau_reaches_quantized_field():
    cfg = dos.FieldConfiguration(B=8.0, g_factor=0.5)
    sol = transport.solve_hall_field(cfg, FIG2_MAT)
    assert sol.E_y == pytest.approx(VON_KLITZING / 2.0 * 0.2, rel=1e-6)
    assert abs(sol.residual) <= max(1e-9 * sol.E_y, 1e-6)


def test_solve_classical_regime_fixed_point():
    # far beyond breakdown the fixed point is the classical closed form
    cfg = dos.FieldConfiguration(B=0.03, g_factor=0.5)
    sol = transport.solve_hall_field(cfg, FIG2_MAT)
    n2d = 2.0 * ELECTRON_MASS * FIG2_MAT.E_F / (2.0 * math.pi * HBAR ** 2)
    expect = transport.classical_rho_xy(0.03, n2d) * FIG2_MAT.j_x
    assert sol.E_y == pytest.approx(expect, rel=5e-3)
    assert abs(sol.residual) <= max(1e-9 * sol.E_y, 1e-6)


def test_solve_warm_start_continuation():
    cfg = dos.FieldConfiguration(B=7.5, g_factor=0.5)
    cold = transport.solve_hall_field(cfg, FIG2_MAT)
    warm = transport.solve_hall_field(cfg, FIG2_MAT, E_y0=cold.E_y)
    assert warm.E_y == pytest.approx(cold.E_y, rel=1e-6)
    assert warm.iterations <= cold.iterations


def test_solve_reports_failure_without_carriers():
    mat = transport.MaterialParams(tau_EF=1e-11, temperature=0.1, j_x=0.2, E_F=-1 * MEV)
    with pytest.raises(NoConvergence):
        transport.solve_hall_field(dos.FieldConfiguration(B=5.0), mat)


def test_solve_bisection_fallback_agrees_with_fixed_point():
    # starving the damped iteration forces the bracketing path; both roads
    # must land on the same root, and the fallback reports what it bracketed
    cfg = dos.FieldConfiguration(B=8.0, g_factor=0.5)
    direct = transport.solve_hall_field(cfg, FIG2_MAT)
    forced = transport.solve_hall_field(cfg, FIG2_MAT, max_iter=1)
    assert forced.method == "bisection"
    assert forced.E_y == pytest.approx(direct.E_y, rel=1e-6)
    assert len(forced.roots) >= 1
    assert any(abs(r - direct.E_y) < 0.2 * direct.E_y for r in forced.roots)
    assert abs(forced.residual) <= max(1e-9 * forced.E_y, 1e-6)


def test_transport_point_bundles_observables():
    from crossedfields import filling
    cfg = dos.FieldConfiguration(B=8.0, g_factor=0.5)
    fs = [p.f for p in filling.plateau_table(0.5, 6)]
    tp = transport.transport_point(cfg, FIG2_MAT, plateau_fs=fs)
    assert tp.plateau_f == 2.0
    assert tp.rho.xy == pytest.approx(VON_KLITZING / 2.0, rel=1e-6)
    assert tp.sigma.xy == pytest.approx(ELEMENTARY_CHARGE * tp.N / 8.0, rel=1e-12)
    assert tp.rho.yx == -tp.rho.xy


def test_match_plateau_tolerance():
    fs = [1.0, 2.0, 2.5]
    assert transport.match_plateau(VON_KLITZING / 2.0 * 1.001, fs) == 2.0
    assert transport.match_plateau(VON_KLITZING / 2.0 * 1.02, fs) is None
    assert transport.match_plateau(VON_KLITZING / 2.35, fs) is None


def test_material_params_validation():
    with pytest.raises(ValueError):
        transport.MaterialParams(tau_EF=0.0, temperature=0.1, j_x=0.0, E_F=1.0)
    with pytest.raises(ValueError):
        transport.MaterialParams(tau_EF=1e-11, temperature=-0.1, j_x=0.0, E_F=1.0)
