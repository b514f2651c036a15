import math

import numpy as np
import pytest
from pydantic import ValidationError

from fluxmech.models.params import DriveParams, FluxGridSpec, MechanicalParams, ModelConfig, QubitParams
from fluxmech.models.state import SystemState


def test_qubit_requires_gamma2_at_least_half_gamma1():
    QubitParams(gamma1=0.02, gamma2=0.01)
    with pytest.raises(ValidationError):
        QubitParams(gamma1=0.02, gamma2=0.009)


@pytest.mark.parametrize("field, value", [("gamma1", -0.1), ("gamma1", math.nan), ("sigma_z_eq", 1.5)])
def test_qubit_rejects_out_of_range(field, value):
    kwargs = {"gamma1": 0.01, "gamma2": 0.01, field: value}
    with pytest.raises(ValidationError):
        QubitParams(**kwargs)


def test_mechanics_from_quality_factor():
    mech = MechanicalParams(omega_m=0.128, quality_factor=1e5, g=0.0018)
    assert mech.gamma_m == pytest.approx(1.28e-6)
    assert mech.quality_factor == pytest.approx(1e5)


def test_mechanics_rejects_both_damping_forms():
    with pytest.raises(ValidationError):
        MechanicalParams(omega_m=0.1, gamma_m=1e-3, quality_factor=100.0)


def test_undamped_oscillator_has_infinite_quality():
    assert MechanicalParams(omega_m=0.1, gamma_m=0.0).quality_factor == math.inf


def test_drive_frequency_must_be_positive():
    with pytest.raises(ValidationError):
        DriveParams(eps0_phi_e0=0.0, omega_drive=0.0, delta_gap=0.1)


def test_params_are_frozen_and_strict():
    qubit = QubitParams(gamma1=0.01, gamma2=0.01)
    with pytest.raises(ValidationError):
        qubit.gamma1 = 0.5
    with pytest.raises(ValidationError):
        QubitParams(gamma1=0.01, gamma2=0.01, gamma3=0.0)


def test_model_copies():
    config = ModelConfig(
        drive=DriveParams(eps0_phi_e0=-0.1, delta_gap=0.1),
        qubit=QubitParams(gamma1=0.01, gamma2=0.01),
        mech=MechanicalParams(omega_m=0.14, gamma_m=2e-3),
    )
    coupled = config.with_coupling(0.02)
    assert coupled.mech.g == 0.02
    assert config.mech.g == 0.0
    assert config.with_drive(n_photon=2).drive.n_photon == 2


def test_flux_grid_axes():
    grid = FluxGridSpec(phi_e0_min=0.0, phi_e0_max=4.0, phi_e0_count=161, phi_e1_max=10.0, phi_e1_count=201)
    assert grid.phi_e0_axis()[1] == pytest.approx(0.025)
    assert grid.phi_e1_axis()[-1] == 10.0
    with pytest.raises(ValidationError):
        FluxGridSpec(phi_e0_min=1.0, phi_e0_max=0.0, phi_e0_count=3, phi_e1_max=1.0, phi_e1_count=3)


def test_state_array_layout():
    state = SystemState(0.1 + 0.2j, -0.5, 0.3 - 0.1j)
    np.testing.assert_array_equal(state.to_array(), [0.1, 0.2, -0.5, 0.3, -0.1])
    assert SystemState.from_array(state.to_array()) == state
    assert state.bloch_norm == pytest.approx(4 * 0.05 + 0.25)
    assert state.perturbed(d_alpha=0.01).alpha == pytest.approx(0.31 - 0.1j)
    assert not SystemState(complex(math.nan, 0), 0.0, 0j).is_finite()
