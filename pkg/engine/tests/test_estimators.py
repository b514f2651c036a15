import math

import numpy as np
import pytest

from fluxmech.core.exceptions import EstimationError
from fluxmech.services.estimators import limit_cycle_measure, ringdown_fit


def test_ringdown_recovers_rate_and_frequency(make_trajectory):
    t = np.arange(0.0, 1000.0, 0.05)
    center = 0.02 - 0.01j
    alpha = center + 0.3 * np.exp((-0.005 - 0.5j) * t)
    fit = ringdown_fit(make_trajectory(t, 0j, -1.0, alpha), center=center)
    assert fit.gamma_eff == pytest.approx(0.01, rel=1e-6)
    assert fit.omega_eff == pytest.approx(0.5, rel=1e-9)
    assert fit.residual < 1e-9
    assert fit.n_periods == pytest.approx(0.5 * t[-1] / (2 * math.pi))


def test_ringdown_rejects_wrong_rotation(make_trajectory):
    t = np.arange(0.0, 1000.0, 0.05)
    with pytest.raises(EstimationError):
        ringdown_fit(make_trajectory(t, 0j, -1.0, 0.3 * np.exp(0.5j * t)))


def test_ringdown_needs_enough_periods(make_trajectory):
    t = np.arange(0.0, 100.0, 0.05)
    with pytest.raises(EstimationError):
        ringdown_fit(make_trajectory(t, 0j, -1.0, 0.3 * np.exp(-0.5j * t)))


def test_limit_cycle_of_synthetic_orbit(make_trajectory):
    omega = 0.3
    t = np.arange(0.0, 300 * 2 * math.pi / omega, 2 * math.pi / (64 * omega))
    phase = np.exp(-1j * omega * t)
    traj = make_trajectory(t, 0.2 * phase, -0.3 + 0.01 * np.cos(2 * omega * t), 0.1 + 0.05 * phase)
    cycle = limit_cycle_measure(traj)
    assert cycle.amp_alpha == pytest.approx(0.05, rel=1e-3)
    assert cycle.amp_s_minus == pytest.approx(0.2, rel=1e-3)
    assert cycle.freq == pytest.approx(omega, rel=1e-4)
    assert cycle.mean_s_z == pytest.approx(-0.3, abs=1e-3)
    assert cycle.center_alpha == pytest.approx(0.1, abs=1e-3)
    assert cycle.converged
    assert cycle.n_cycles >= 100
    assert cycle.extrema["s_z_max"] == pytest.approx(-0.29, abs=1e-4)


def test_short_window_is_not_converged(make_trajectory):
    omega = 0.3
    t = np.arange(0.0, 40 * 2 * math.pi / omega, 0.1)
    traj = make_trajectory(t, 0j, -0.3, 0.05 * np.exp(-1j * omega * t))
    cycle = limit_cycle_measure(traj, transient_fraction=0.0)
    assert not cycle.converged
    assert cycle.amp_alpha == pytest.approx(0.05, rel=1e-2)


def test_resting_trajectory_is_a_converged_fixed_point(make_trajectory):
    t = np.linspace(0.0, 100.0, 1001)
    cycle = limit_cycle_measure(make_trajectory(t, 0.1j, -0.7, 0.2 + 0.1j))
    assert cycle.freq == 0.0
    assert cycle.amp_alpha == pytest.approx(0.0, abs=1e-12)
    assert cycle.converged
    assert cycle.mean_s_z == pytest.approx(-0.7)


def test_single_cycle_cannot_be_measured(make_trajectory):
    omega = 0.3
    t = np.linspace(0.0, 1.2 * 2 * math.pi / omega, 200)
    with pytest.raises(EstimationError):
        limit_cycle_measure(make_trajectory(t, 0j, -0.3, 0.05 * np.exp(-1j * omega * t)), transient_fraction=0.0)


def test_transient_fraction_must_leave_samples(make_trajectory):
    t = np.linspace(0.0, 10.0, 100)
    with pytest.raises(EstimationError):
        limit_cycle_measure(make_trajectory(t, 0j, -0.3, 0j), transient_fraction=1.0)


@pytest.mark.parametrize("rate_ratio", [1e-6, 1e-4, 1e-2, 1e-1])
def test_ringdown_recovers_rates_across_decades(make_trajectory, rate_ratio):
    omega = 0.5
    gamma = rate_ratio * omega
    t = np.arange(0.0, 1000.0, 0.05)
    fit = ringdown_fit(make_trajectory(t, 0j, -1.0, 0.3 * np.exp((-0.5 * gamma - 1j * omega) * t)))
    assert fit.gamma_eff == pytest.approx(gamma, rel=1e-6)
    assert fit.omega_eff == pytest.approx(omega, rel=1e-9)
