"""Numbered end-to-end checks run by ``fluxmech selftest``."""

import logging
import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.signal import find_peaks
from scipy.special import jn_zeros

from ..core.exceptions import ConvergenceError
from ..models.params import MechanicalParams, QubitParams
from ..models.results import LimitCycle
from ..models.state import SystemState
from .bifurcation import continuation_sweep, find_equilibrium, g_crit_analytic, hopf_threshold, limit_cycle_prediction
from .dynamics import SteadyStateBudget, integrate, steady_state
from .equations import eom_jacobian, eom_rhs
from .estimators import ringdown_fit
from .presets import branch_config, damping_map_config, damping_map_grid, resonant_config, response_config
from .response import chi_z, chi_z_numeric, renormalized_mech
from .rotating_frame import derive_params, derive_secondary, with_coupling
from .sweeps import damping_map, response_surface

logger = logging.getLogger(__name__)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0


def _finite_difference_jacobian(state: SystemState, d) -> np.ndarray:
    y = state.to_array()
    jac = np.empty((5, 5))
    for i in range(5):
        h = 1e-6 * max(1.0, abs(y[i]))
        up, down = y.copy(), y.copy()
        up[i] += h
        down[i] -= h
        f_up = eom_rhs(SystemState.from_array(up), d).to_array()
        f_down = eom_rhs(SystemState.from_array(down), d).to_array()
        jac[:, i] = (f_up - f_down) / (2.0 * h)
    return jac


def check_jacobian(quick: bool) -> tuple[bool, dict]:
    rng = np.random.default_rng(20240501)
    n_params, n_states = (5, 10) if quick else (20, 100)
    worst = 0.0
    for _ in range(n_params):
        gamma1 = rng.uniform(0.0, 0.05)
        qubit = QubitParams(gamma1=gamma1, gamma2=gamma1 / 2 + rng.uniform(0.0, 0.05), sigma_z_eq=rng.uniform(-1, 1))
        mech = MechanicalParams(omega_m=rng.uniform(0.05, 0.5), gamma_m=rng.uniform(0.0, 0.01), g=rng.uniform(-0.05, 0.05))
        d = derive_secondary(rng.uniform(-0.3, 0.3), rng.uniform(0.01, 0.3), qubit, mech)
        for _ in range(n_states):
            state = SystemState(
                complex(*rng.uniform(-0.5, 0.5, 2)), float(rng.uniform(-1, 1)), complex(*rng.uniform(-2, 2, 2))
            )
            analytic = eom_jacobian(state, d)
            numeric = _finite_difference_jacobian(state, d)
            worst = max(worst, float(np.max(np.abs(analytic - numeric)) / np.max(np.abs(analytic))))
    return worst < 1e-6, {"max_relative_error": worst, "cases": n_params * n_states}


def _norm_drift(d, state0: SystemState, t_end: float, rtol: float) -> tuple[float, int]:
    traj = integrate(state0, d, (0.0, t_end), tol=(rtol, 1e-3 * rtol))
    norm = traj.bloch_norm()
    return float(np.max(np.abs(norm - norm[0])) / norm[0]), traj.stats.n_accepted


def check_conservation(quick: bool) -> tuple[bool, dict]:
    base = resonant_config(gamma1=0.0, gamma2=0.0)
    d = derive_params(base.with_coupling(0.1 * base.mech.omega_m))
    state0 = SystemState(0.3 + 0.1j, -0.8, 0.5 + 0j)
    periods = 100 if quick else 1000
    t_end = periods * 2.0 * math.pi / d.omega_m
    tight, steps = _norm_drift(d, state0, t_end, 1e-10)
    loose, _ = _norm_drift(d, state0, t_end, 1e-8)
    bound = 10.0 * 1e-10
    passed = tight < bound and tight < loose
    return passed, {"drift_rtol_1e-10": tight, "drift_rtol_1e-8": loose, "steps": steps, "bound": bound}


def _oracle_points(quick: bool) -> list[tuple[float, float]]:
    omegas = [0.02, 0.1, 0.1414, 0.25] if quick else [0.005, 0.02, 0.05, 0.1, 0.13, 0.1414, 0.16, 0.25]
    deltas = [-0.1] if quick else [-0.1, 0.1]
    return [(delta, omega) for delta in deltas for omega in omegas]


def check_oracle(quick: bool) -> tuple[bool, dict]:
    worst_far, worst_near = 0.0, 0.0
    for delta, omega in _oracle_points(quick):
        d = derive_params(response_config("long_coherence", delta=delta))
        analytic = chi_z(omega, d)
        numeric = chi_z_numeric(omega, d)
        error = abs(numeric - analytic) / abs(analytic)
        near_pole = abs(omega - abs(d.omega_rabi)) <= 3 * d.gamma2n or abs(omega - d.gamma1n) <= 3 * d.gamma1n
        if near_pole:
            worst_near = max(worst_near, error)
        else:
            worst_far = max(worst_far, error)
    passed = worst_far < 0.05 and worst_near < 0.15
    return passed, {"worst_away_from_poles": worst_far, "worst_near_poles": worst_near}


def ringdown_case(delta: float, sigma_units: float, t_end: float = 10000.0) -> dict:
    """Perturb the equilibrium and compare the fitted decay with the renormalized oscillator."""
    blue = derive_params(resonant_config(gamma_m=2e-4, delta=-abs(delta)))
    sigma = sigma_units * blue.gamma2n
    blue = derive_params(resonant_config(sigma=sigma, gamma_m=2e-4, delta=-abs(delta)))
    g = 0.3 * g_crit_analytic(blue)
    d = derive_params(resonant_config(sigma=sigma, gamma_m=2e-4, delta=delta, g=g))

    eq = find_equilibrium(d)
    traj = integrate(eq.state.perturbed(d_alpha=0.01), d, (0.0, t_end), tol=(1e-10, 1e-12))
    fit = ringdown_fit(traj, transient_fraction=0.1, center=eq.state.alpha)
    expected = renormalized_mech(d)
    shift_expected = 0.5 * d.g * expected.chi.real
    return {
        "delta": delta,
        "sigma": sigma,
        "gamma_eff": fit.gamma_eff,
        "gamma_m_tilde": expected.gamma_m_tilde,
        "gamma_error": abs(fit.gamma_eff - expected.gamma_m_tilde) / expected.gamma_m_tilde,
        "shift": fit.omega_eff - d.omega_m,
        "shift_expected": shift_expected,
        "shift_error": abs(fit.omega_eff - d.omega_m - shift_expected) / abs(shift_expected),
        "anti_damped": fit.gamma_eff < d.gamma_m,
    }


def check_ringdown(quick: bool) -> tuple[bool, dict]:
    cases = [(-0.1, 1.0), (0.1, 1.0)] if quick else [(-0.1, 1.0), (-0.1, -1.0), (-0.1, 2.0), (0.1, 1.0), (0.1, -1.0), (0.1, 2.0)]
    results = [ringdown_case(delta, s) for delta, s in cases]
    passed = all(
        r["gamma_error"] < 0.05 and r["shift_error"] < 0.10 and r["anti_damped"] == (r["delta"] < 0) for r in results
    )
    return passed, {"cases": results}


def check_hopf(quick: bool) -> tuple[bool, dict]:
    factors = [0.0, 0.2] if quick else [-0.2, -0.1, 0.0, 0.1, 0.2]
    rows = []
    for factor in factors:
        d0 = derive_params(resonant_config())
        d = derive_params(resonant_config(sigma=factor * d0.gamma2n))
        analytic = g_crit_analytic(d)
        numeric = hopf_threshold(d, (0.5 * analytic, 2.0 * analytic)).g_c
        rows.append({"sigma": d.sigma_detune, "analytic": analytic, "numeric": numeric, "error": abs(numeric - analytic) / analytic})
    return all(r["error"] < 0.05 for r in rows), {"points": rows}


def _cycle_budget() -> SteadyStateBudget:
    return SteadyStateBudget(window_periods=100.0, max_windows=120)


def measure_cycle(d, g: float, kick: float | None = None):
    """Long-time cycle at coupling g, started from the predicted amplitude."""
    dg = with_coupling(d, g)
    eq = find_equilibrium(dg)
    prediction = limit_cycle_prediction(dg)
    if kick is None:
        kick = prediction.r_a if prediction.above_threshold else 1e-3
    outcome = steady_state(dg, eq.state.perturbed(d_alpha=kick), _cycle_budget())
    if not isinstance(outcome, LimitCycle):
        raise ConvergenceError(f"no limit cycle at g={g:.6g}: {outcome}")
    return dg, eq, prediction, outcome.measurement


def check_cycle_amplitude(quick: bool) -> tuple[bool, dict]:
    d = derive_params(resonant_config())
    g_an = g_crit_analytic(d)
    g_c = hopf_threshold(d, (0.5 * g_an, 2.0 * g_an)).g_c
    # margin x = g^2/g_c^2 - 1, so g/g_c stays within (1, 1.1]
    margins = np.array([0.02, 0.04, 0.08] if quick else [0.01, 0.02, 0.04, 0.08, 0.12])
    scale = d.gamma1n * d.s_z_eq_bar / (2.0 * d.gamma_m)
    measured = []
    for x in margins:
        kick = math.sqrt(scale * x / (1.0 + x))
        _, _, _, cycle = measure_cycle(d, g_c * math.sqrt(1.0 + x), kick=kick)
        measured.append(cycle.amp_alpha)
    slope = float(np.polyfit(np.log(margins), np.log(measured), 1)[0])

    dg, eq, prediction, cycle = measure_cycle(d, 1.05 * g_an)
    amp_error = abs(cycle.amp_alpha - prediction.r_a) / prediction.r_a
    shift = cycle.mean_s_z - eq.state.s_z
    shift_error = abs(shift - prediction.mean_s_z_shift) / abs(prediction.mean_s_z_shift)
    passed = abs(slope - 0.5) <= 0.05 and amp_error < 0.15 and shift_error < 0.25
    return passed, {
        "log_log_slope": slope,
        "amplitudes": measured,
        "r_a_measured": cycle.amp_alpha,
        "r_a_predicted": prediction.r_a,
        "r_a_error": amp_error,
        "mean_s_z_shift": shift,
        "mean_s_z_shift_predicted": prediction.mean_s_z_shift,
        "shift_error": shift_error,
    }


def check_frequency_linearity(quick: bool) -> tuple[bool, dict]:
    sigmas = np.linspace(-0.007, 0.007, 3 if quick else 5)
    offsets = []
    for sigma in sigmas:
        d = derive_params(resonant_config(sigma=float(sigma)))
        _, _, _, cycle = measure_cycle(d, 1.05 * g_crit_analytic(d))
        offsets.append(d.omega_m - cycle.freq)
    slope, intercept = np.polyfit(sigmas, offsets, 1)
    fitted = slope * sigmas + intercept
    ss_res = float(np.sum((np.asarray(offsets) - fitted) ** 2))
    ss_tot = float(np.sum((np.asarray(offsets) - np.mean(offsets)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    d0 = derive_params(resonant_config())
    return r_squared > 0.95, {
        "r_squared": r_squared,
        "slope": float(slope),
        "slope_predicted": d0.gamma_m / (2.0 * d0.gamma2n + d0.gamma_m),
        "offsets": offsets,
    }


def check_damping_map(quick: bool) -> tuple[bool, dict]:
    grid = damping_map_grid(phi_e1_count=101 if quick else 201)
    tile = damping_map(grid, damping_map_config())
    values, phi0, phi1 = tile.values, tile.x_axis, tile.y_axis
    step0 = phi0[1] - phi0[0]
    floor = 1e-6 * float(np.max(np.abs(values)))

    # mirrored columns about each integer bias
    agree = total = 0
    for n in range(1, int(phi0[-1])):
        centre = int(round(n / step0))
        for k in range(1, int(round(0.5 / step0))):
            left, right = values[:, centre - k], values[:, centre + k]
            mask = (np.abs(left) > floor) & (np.abs(right) > floor)
            total += int(mask.sum())
            agree += int(np.sum(np.sign(left[mask]) == -np.sign(right[mask])))
    antisymmetry = agree / total if total else 0.0

    step1 = phi1[1] - phi1[0]
    misses = []
    for n in range(4):
        # detuning -0.1 from resonance n; the bias axis starts at 0, so n = 0 uses +0.1
        bias = n - 0.1 if n > 0 else 0.1
        column = int(round((bias - phi0[0]) / step0))
        profile = np.abs(values[:, column])
        minima, _ = find_peaks(-profile)
        found = phi1[minima]
        zeros = jn_zeros(n, 6)
        for z in zeros[(zeros > phi1[0]) & (zeros < phi1[-1] - step1)]:
            if found.size == 0 or np.min(np.abs(found - z)) > step1:
                misses.append({"n": n, "zero": float(z)})
    passed = antisymmetry >= 0.99 and not misses
    return passed, {"antisymmetry": antisymmetry, "pixels": total, "missed_nulls": misses}


def check_branch(quick: bool) -> tuple[bool, dict]:
    d = derive_params(branch_config())
    g_an = g_crit_analytic(d)
    g_c = hopf_threshold(d, (0.5 * g_an, 2.0 * g_an)).g_c
    factors = [0.6, 0.9, 1.1, 1.25] if quick else [0.6, 0.8, 0.9, 1.1, 1.25, 1.4]
    branch = continuation_sweep(d, [f * g_c for f in factors], budget=_cycle_budget())

    amplitudes = []
    for point in branch.points:
        if point.equilibrium.stable:
            outcome = steady_state(with_coupling(d, point.g), point.equilibrium.state.perturbed(d_alpha=1e-3), _cycle_budget())
            amplitudes.append(outcome.measurement.amp_alpha if isinstance(outcome, LimitCycle) else 0.0)
        else:
            amplitudes.append(point.cycle.amp_alpha if point.cycle else 0.0)
    onset = next((i for i, a in enumerate(amplitudes) if a > 1e-4), None)
    hopf = branch.hopf_index
    passed = (
        not branch.truncated
        and branch.stability_changes == 1
        and hopf is not None
        and onset is not None
        and abs(onset - hopf) <= 1
    )
    return passed, {"hopf_index": hopf, "onset_index": onset, "amplitudes": amplitudes, "g_c": g_c}


def check_determinism(quick: bool) -> tuple[bool, dict]:
    from ..repositories import ResponseRepository, TileRepository

    grid = damping_map_grid(phi_e0_count=41, phi_e1_count=31 if quick else 61)
    config = damping_map_config()
    surface_config = response_config("long_coherence")
    omegas = np.linspace(0.001, 0.3, 120)
    deltas = np.linspace(-0.3, 0.3, 25)
    digests = {}
    with tempfile.TemporaryDirectory() as tmp:
        for workers in (1, 4):
            out = Path(tmp) / f"w{workers}"
            tile_path = TileRepository(out).save(damping_map(grid, config, workers=workers), "check")
            surface_path = ResponseRepository(out).save(response_surface(deltas, omegas, surface_config, workers=workers), "check")
            digests[workers] = (tile_path.read_bytes(), surface_path.read_bytes())
    identical = digests[1] == digests[4]
    return identical, {"identical": identical}


CRITERIA: dict[int, tuple[str, Callable[[bool], tuple[bool, dict]]]] = {
    1: ("jacobian consistency", check_jacobian),
    2: ("bloch norm conservation", check_conservation),
    3: ("response oracle agreement", check_oracle),
    4: ("ring-down vs renormalized oscillator", check_ringdown),
    5: ("hopf threshold vs closed form", check_hopf),
    6: ("cycle amplitude above threshold", check_cycle_amplitude),
    7: ("cycle frequency linear in detuning", check_frequency_linearity),
    8: ("damping map structure", check_damping_map),
    9: ("branch stability change", check_branch),
    10: ("determinism across workers", check_determinism),
}


def run_acceptance(quick: bool = False, only: set[int] | None = None) -> list[CriterionResult]:
    results = []
    for number, (name, check) in CRITERIA.items():
        if only and number not in only:
            continue
        logger.info(f"[selftest] {number}. {name}")
        started = time.perf_counter()
        try:
            passed, details = check(quick)
        except Exception as exc:
            logger.exception(f"[selftest] {number} raised")
            passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
        elapsed = time.perf_counter() - started
        logger.info(f"[selftest] {number} {'PASS' if passed else 'FAIL'} in {elapsed:.1f}s")
        results.append(CriterionResult(number, name, bool(passed), details, elapsed))
    return results
