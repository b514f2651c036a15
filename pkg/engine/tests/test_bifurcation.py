import math

import numpy as np
import pytest

from fluxmech.core.exceptions import ConvergenceError, DomainError, NoInstabilityError, ThresholdNotFoundError
from fluxmech.services import bifurcation
from fluxmech.services.bifurcation import (
    continuation_sweep,
    find_equilibrium,
    g_crit_analytic,
    hopf_threshold,
    limit_cycle_prediction,
)
from fluxmech.services.equations import make_rhs
from fluxmech.services.presets import resonant_config
from fluxmech.services.rotating_frame import derive_params, with_coupling


def test_equilibrium_solves_the_flow(blue):
    d = with_coupling(blue, 0.005)
    eq = find_equilibrium(d)
    assert eq.residual_norm < 1e-12
    np.testing.assert_allclose(make_rhs(d)(0.0, eq.state.to_array()), 0.0, atol=1e-12)
    assert eq.eigenvalues[0].real == eq.max_real_eigenvalue


def test_uncoupled_equilibrium_leaves_oscillator_at_rest(blue):
    eq = find_equilibrium(blue)
    assert eq.state.alpha == 0j
    assert eq.state.s_z == pytest.approx(-1.0 * 0.01 * (1e-4 + 0.01) / (0.01 * (1e-4 + 0.01) + 0.01 * 0.01))
    assert eq.stable


def test_newton_budget_exhaustion_carries_best_iterate(blue):
    d = with_coupling(blue, 0.005)
    with pytest.raises(ConvergenceError) as info:
        find_equilibrium(d, tol=0.0, max_iter=3)
    assert info.value.best is not None


def test_closed_form_threshold(blue):
    expected = math.sqrt(2 * 0.002 * 0.02 * 1e-4 / (blue.s_z_eq_bar * 0.01 * 0.01))
    assert g_crit_analytic(blue) == pytest.approx(expected, rel=1e-9)
    assert g_crit_analytic(blue) == pytest.approx(0.0106365, rel=1e-4)


def test_red_side_has_no_threshold(red):
    with pytest.raises(NoInstabilityError):
        g_crit_analytic(red)
    with pytest.raises(ThresholdNotFoundError):
        hopf_threshold(red, (0.001, 0.05))


def test_stability_changes_across_threshold(blue):
    g_an = g_crit_analytic(blue)
    assert find_equilibrium(with_coupling(blue, 0.5 * g_an)).stable
    assert not find_equilibrium(with_coupling(blue, 2.0 * g_an)).stable


@pytest.mark.parametrize("sigma_units", [-0.2, 0.0, 0.2])
def test_bisected_threshold_matches_closed_form(sigma_units):
    base = derive_params(resonant_config())
    d = derive_params(resonant_config(sigma=sigma_units * base.gamma2n))
    g_an = g_crit_analytic(d)
    threshold = hopf_threshold(d, (0.5 * g_an, 2.0 * g_an))
    assert threshold.g_c == pytest.approx(g_an, rel=0.05)
    assert threshold.frequency == pytest.approx(d.omega_m, rel=0.05)
    assert threshold.transversality > 0


def test_undamped_oscillator_is_unstable_at_any_coupling():
    d = derive_params(resonant_config(gamma_m=0.0))
    assert g_crit_analytic(d) == 0.0
    assert hopf_threshold(d, (0.0, 0.01)).g_c == 0.0


def test_threshold_bracket_validation(blue):
    with pytest.raises(DomainError):
        hopf_threshold(blue, (0.02, 0.01))


def test_prediction_below_threshold(blue):
    g_c = g_crit_analytic(blue)
    prediction = limit_cycle_prediction(blue, 0.5 * g_c)
    assert not prediction.above_threshold
    assert prediction.r_a == 0.0
    assert prediction.cycle_frequency == blue.omega_m


def test_prediction_above_threshold(blue):
    g_c = g_crit_analytic(blue)
    p = limit_cycle_prediction(blue, 1.5 * g_c)
    ratio = 1 / 2.25
    assert p.above_threshold
    assert p.r_a ** 2 == pytest.approx(blue.gamma1n * blue.s_z_eq_bar * (1 - ratio) / (2 * blue.gamma_m))
    assert p.s_cz == pytest.approx(blue.s_z_eq_bar * (ratio - 1))
    assert p.mean_s_z_shift > 0
    assert p.omega_a == pytest.approx(0.0, abs=1e-12)
    assert p.f_sigma == pytest.approx(0.0, abs=1e-12)


def test_frequency_offset_follows_detuning():
    d = derive_params(resonant_config(sigma=0.005))
    p = limit_cycle_prediction(d, 2 * g_crit_analytic(d))
    assert p.omega_a == pytest.approx(d.gamma_m * 0.005 / (2 * d.gamma2n + d.gamma_m))
    assert p.f_sigma > 0
    assert p.cycle_frequency < d.omega_m


def test_prediction_needs_coupling(blue):
    with pytest.raises(DomainError):
        limit_cycle_prediction(blue)


def test_branch_changes_stability_once(blue):
    g_c = hopf_threshold(blue, (0.005, 0.02)).g_c
    factors = [0.6, 0.8, 0.95, 1.05, 1.2, 1.4]
    branch = continuation_sweep(blue, [f * g_c for f in factors], simulate_cycles=False)
    assert not branch.truncated
    assert len(branch.points) == len(factors)
    assert branch.stability_changes == 1
    assert branch.hopf_index == 3
    assert all(point.cycle is None for point in branch.points)


def test_branch_truncates_when_equilibrium_is_lost(blue, monkeypatch):
    solve = bifurcation.find_equilibrium

    def failing(d, guess=None, **kwargs):
        if d.g > 0.012:
            raise ConvergenceError("lost")
        return solve(d, guess, **kwargs)

    monkeypatch.setattr(bifurcation, "find_equilibrium", failing)
    branch = continuation_sweep(blue, [0.004, 0.008, 0.012, 0.016], simulate_cycles=False)
    assert branch.truncated
    assert [p.g for p in branch.points] == [0.004, 0.008, 0.012]
    assert "0.016" in branch.diagnostic


@pytest.mark.parametrize("grid", [[], [0.01, 0.01], [0.02, 0.01]])
def test_branch_grid_validation(blue, grid):
    with pytest.raises(DomainError):
        continuation_sweep(blue, grid)
