import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from fluxmech.core.exceptions import DegenerateParametersError, DomainError
from fluxmech.models.params import DriveParams, MechanicalParams, PhysicalCouplingParams, QubitParams
from fluxmech.services.equations import make_rhs
from fluxmech.services.rotating_frame import (
    bessel_jn,
    bloch_equilibrium,
    coupling_from_physical,
    derive_rotating_frame,
    derive_secondary,
    secondary_arrays,
    with_coupling,
)

QUBIT = QubitParams(gamma1=0.01, gamma2=0.01, sigma_z_eq=-1.0)
MECH = MechanicalParams(omega_m=0.15, gamma_m=2e-3, g=0.01)


def _bessel_series(n: int, x: float, terms: int = 40) -> float:
    return sum((-1) ** k / (math.factorial(k) * math.factorial(k + n)) * (x / 2) ** (2 * k + n) for k in range(terms))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("x", [0.0, 0.7, 1.3, 4.2])
def test_bessel_matches_power_series(n, x):
    assert bessel_jn(n, x) == pytest.approx(_bessel_series(n, x), abs=1e-13)


def test_bessel_vanishes_at_tabulated_zeros():
    for n in range(4):
        np.testing.assert_allclose(bessel_jn(n, jn_zeros(n, 5)), 0.0, atol=1e-12)


def test_bessel_accepts_arrays():
    values = bessel_jn(1, np.array([0.0, 1.0, 2.0]))
    assert values.shape == (3,)
    assert values[0] == 0.0


@pytest.mark.parametrize("n, x", [(-1, 1.0), (1.5, 1.0), (0, math.inf), (0, math.nan)])
def test_bessel_rejects_bad_input(n, x):
    with pytest.raises(DomainError):
        bessel_jn(n, x)


def test_rotating_frame_follows_photon_number():
    drive = DriveParams(eps0_phi_e0=2.05, eps0_phi_e1=1.5, omega_drive=1.0, n_photon=2, delta_gap=0.1)
    delta, delta_n = derive_rotating_frame(drive)
    assert delta == pytest.approx(0.05)
    assert delta_n == pytest.approx(0.1 * _bessel_series(2, 1.5))


def test_secondary_parameters_blue_side():
    d = derive_secondary(-0.1, 0.1, QUBIT, MECH)
    assert d.omega_rabi == pytest.approx(-math.sqrt(0.02))
    assert d.gamma1n == pytest.approx(0.01)
    assert d.gamma2n == pytest.approx(0.01)
    assert d.s_z_eq_bar == pytest.approx(1 / math.sqrt(2))
    assert d.g_interaction == pytest.approx(0.1 * 0.01 * 0.01 / (2 * 0.02 ** 1.5))
    assert d.sigma_detune == pytest.approx(0.15 - math.sqrt(0.02))


def test_interaction_is_even_in_detuning():
    blue = derive_secondary(-0.07, 0.1, QUBIT, MECH)
    red = derive_secondary(0.07, 0.1, QUBIT, MECH)
    assert blue.g_interaction == pytest.approx(red.g_interaction)
    assert blue.g_interaction > 0
    assert blue.s_z_eq_bar == pytest.approx(-red.s_z_eq_bar)


def test_dressed_rates_interpolate_between_bare_rates():
    qubit = QubitParams(gamma1=0.001, gamma2=0.01)
    far = derive_secondary(-10.0, 0.01, qubit, MECH)
    on = derive_secondary(0.0, 0.1, qubit, MECH)
    assert far.gamma1n == pytest.approx(0.001, rel=1e-5)
    assert far.gamma2n == pytest.approx(0.01, rel=1e-5)
    assert on.gamma1n == pytest.approx(0.01)
    assert on.gamma2n == pytest.approx(0.5 * (0.01 + 0.001))


def test_relaxation_free_limit_keeps_unit_ratio():
    d = derive_secondary(-0.1, 0.1, QubitParams(gamma1=0.0, gamma2=0.0), MECH)
    assert d.gamma1n == 0.0
    assert d.s_z_eq_bar == pytest.approx(1 / math.sqrt(2))


def test_degenerate_point_raises():
    with pytest.raises(DegenerateParametersError):
        derive_secondary(0.0, 0.0, QUBIT, MECH)


def test_secondary_arrays_flag_degenerate_points():
    arrays = secondary_arrays(np.array([0.0, 0.1]), np.array([0.0, 0.1]), 0.01, 0.01, -1.0, 0.01)
    np.testing.assert_array_equal(arrays.degenerate, [True, False])
    assert arrays.omega_rabi[0] == 0.0
    assert arrays.g_interaction[0] == 0.0
    assert np.all(np.isfinite(arrays.g_interaction))


def test_with_coupling_scales_interaction():
    d = derive_secondary(-0.1, 0.1, QUBIT, MECH)
    doubled = with_coupling(d, 0.02)
    assert doubled.g == 0.02
    assert doubled.g_interaction == pytest.approx(2 * d.g_interaction)


def test_physical_coupling():
    p = PhysicalCouplingParams(b_field=2.0, length_eff=3e-6, i_cc=1e-6, mass_eff=1e-17, omega_m=2e8)
    x_zpf = math.sqrt(p.hbar / (2 * p.mass_eff * p.omega_m))
    assert coupling_from_physical(p) == pytest.approx(2.0 * 3e-6 * 1e-6 * x_zpf / p.hbar)
    broken = PhysicalCouplingParams.model_construct(b_field=-1.0, length_eff=1.0, i_cc=1.0, mass_eff=1.0, omega_m=1.0, hbar=1.0)
    with pytest.raises(DomainError):
        coupling_from_physical(broken)


def test_bloch_equilibrium_is_a_fixed_point():
    qubit = QubitParams(gamma1=0.01, gamma2=0.03, sigma_z_eq=-0.8)
    s_minus, s_z = bloch_equilibrium(-0.07, 0.05, qubit)
    d = derive_secondary(-0.07, 0.05, qubit, MechanicalParams(omega_m=0.1, gamma_m=1e-3, g=0.0))
    flow = make_rhs(d)(0.0, np.array([s_minus.real, s_minus.imag, s_z, 0.0, 0.0]))
    np.testing.assert_allclose(flow, 0.0, atol=1e-15)
