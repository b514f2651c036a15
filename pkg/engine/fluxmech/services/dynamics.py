"""Time integration and steady-state classification."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from ..core.config import DEFAULT_ATOL, DEFAULT_RTOL, SAMPLES_PER_PERIOD
from ..core.exceptions import DomainError, EstimationError, IntegrationError
from ..models.params import DerivedParams
from ..models.results import FixedPoint, LimitCycle, SteadyState, Undetermined
from ..models.state import IntegrationStats, SystemState, Trajectory
from .equations import Rhs, make_rhs
from .estimators import limit_cycle_measure

logger = logging.getLogger(__name__)

# DOP853 evaluates the right-hand side twelve times per attempted step
# and three more for each dense-output interpolant
_STAGES = 12
_DENSE_EXTRA = 3

MAX_RTOL = 1e-2


@dataclass(frozen=True)
class SteadyStateBudget:
    window_periods: float = 100.0
    max_windows: int = 40
    fixed_tol: float = 1e-8
    settle_tol: float = 1e-6
    contraction: float = 0.8
    cycle_rtol: float = 1e-3
    amplitude_floor: float = 1e-7
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL


def default_sample_dt(d: DerivedParams, samples_per_period: int = SAMPLES_PER_PERIOD) -> float:
    """Sampling step resolving the fastest of omega_m and |Omega_R|."""
    fastest = max(d.omega_m, abs(d.omega_rabi), abs(d.delta))
    return 2.0 * math.pi / (samples_per_period * fastest)


def solve_sampled(
    rhs: Rhs,
    y0: np.ndarray,
    sample_times: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float = np.inf,
    first_step: float | None = None,
) -> tuple[np.ndarray, IntegrationStats, str | None]:
    """Integrate with Dormand-Prince 8(5,3) and read dense output at ``sample_times``.

    Returns the sampled rows (possibly fewer than requested), the step
    statistics and a failure message or None.
    """
    y0 = np.asarray(y0, dtype=float)
    t0, t1 = float(sample_times[0]), float(sample_times[-1])
    out = np.empty((len(sample_times), len(y0)))
    out[0] = y0
    filled = 1
    if t1 == t0:
        return out[:1], IntegrationStats("DOP853", rtol, atol, 0, 0, 0), None

    solver = DOP853(rhs, t0, y0, t1, rtol=rtol, atol=atol, max_step=max_step, first_step=first_step)
    accepted = dense_calls = 0
    failure = None
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            failure = f"step failure at t={solver.t:.6g}: {message}"
            break
        accepted += 1
        if not np.all(np.isfinite(solver.y)):
            failure = f"non-finite state at t={solver.t:.6g}"
            break
        upto = int(np.searchsorted(sample_times, solver.t, side="right"))
        if upto > filled:
            dense = solver.dense_output()
            dense_calls += 1
            out[filled:upto] = dense(sample_times[filled:upto]).T
            filled = upto

    initial_evals = 1 if first_step is not None else 2
    attempts = max(0, (solver.nfev - initial_evals - _DENSE_EXTRA * dense_calls) // _STAGES)
    stats = IntegrationStats(
        method="DOP853",
        rtol=rtol,
        atol=atol,
        n_accepted=accepted,
        n_rejected=max(0, attempts - accepted),
        nfev=solver.nfev,
        message=failure or "ok",
    )
    return out[:filled], stats, failure


def integrate(
    state0: SystemState,
    d: DerivedParams,
    t_span: tuple[float, float],
    tol: tuple[float, float] = (DEFAULT_RTOL, DEFAULT_ATOL),
    sample_dt: float | None = None,
    max_step: float = np.inf,
) -> Trajectory:
    t0, t1 = (float(t) for t in t_span)
    rtol, atol = tol
    if not state0.is_finite():
        raise DomainError("initial state must be finite")
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 < t0:
        raise DomainError(f"invalid time span {t_span}")
    if rtol <= 0 or atol <= 0:
        raise DomainError("tolerances must be positive")
    if rtol > MAX_RTOL:
        raise DomainError(f"rtol {rtol:g} is looser than {MAX_RTOL:g}")
    dt = sample_dt or default_sample_dt(d)
    if dt <= 0:
        raise DomainError("sample_dt must be positive")

    count = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    times = t0 + dt * np.arange(count)
    coords, stats, failure = solve_sampled(make_rhs(d), state0.to_array(), times, rtol, atol, max_step)
    logger.debug(
        f"Integrated t=[{t0:.6g}, {t1:.6g}] accepted={stats.n_accepted} rejected={stats.n_rejected} nfev={stats.nfev}"
    )
    trajectory = Trajectory(times[: len(coords)], coords, stats, partial=failure is not None)
    if failure is not None:
        logger.warning(f"Integration stopped early: {failure}")
        raise IntegrationError(failure, partial=trajectory, t_fail=float(trajectory.times[-1]))
    return trajectory


def _variation(coords: np.ndarray) -> float:
    """Largest half peak-to-peak swing over all coordinates."""
    return float(np.max(0.5 * (coords.max(axis=0) - coords.min(axis=0))))


def _projected_change(variations: list[float]) -> float:
    """Change still to come if the last two window-to-window steps keep contracting geometrically.

    A steady exponential decay projects its whole remaining amplitude; steps
    that flip sign are treated as noise around a settled value.
    """
    v0, v1, v2 = variations[-3:]
    d1, d2 = v1 - v0, v2 - v1
    if d1 == 0.0 or d2 * d1 < 0.0:
        return abs(d2)
    q = d2 / d1
    if q >= 1.0:
        return math.inf
    return abs(d2) * q / (1.0 - q)


def steady_state(d: DerivedParams, state0: SystemState, budget: SteadyStateBudget | None = None) -> SteadyState:
    """Integrate window by window until the motion settles or the budget runs out."""
    budget = budget or SteadyStateBudget()
    period = 2.0 * math.pi / d.omega_m
    window = budget.window_periods * period
    state = state0
    t = 0.0
    variations: list[float] = []
    previous: Trajectory | None = None

    for k in range(budget.max_windows):
        traj = integrate(state, d, (t, t + window), tol=(budget.rtol, budget.atol))
        state, t = traj.final_state, float(traj.times[-1])
        v = _variation(traj.coords)
        variations.append(v)

        if v <= budget.fixed_tol:
            logger.debug(f"Steady state: fixed point after {k + 1} windows (variation {v:.3g})")
            return FixedPoint(state, v)
        if len(variations) >= 4 and v <= budget.settle_tol:
            ratios = [variations[i] / variations[i - 1] for i in range(-3, 0)]
            if all(r <= budget.contraction for r in ratios):
                logger.debug(f"Steady state: contracting to a fixed point after {k + 1} windows")
                return FixedPoint(state, v)
        if len(variations) >= 3 and v > budget.amplitude_floor:
            steps = np.abs(np.diff(variations[-3:])) / v
            flat = bool(np.all(steps < budget.cycle_rtol)) and _projected_change(variations) < budget.cycle_rtol * v
            if flat:
                joined = Trajectory(
                    np.concatenate([previous.times, traj.times[1:]]),
                    np.vstack([previous.coords, traj.coords[1:]]),
                    traj.stats,
                )
                try:
                    measurement = limit_cycle_measure(joined, transient_fraction=0.0)
                except EstimationError as exc:
                    logger.debug(f"Cycle measurement deferred: {exc}")
                else:
                    logger.debug(f"Steady state: limit cycle after {k + 1} windows (amp {measurement.amp_alpha:.4g})")
                    return LimitCycle(measurement, state)
        previous = traj

    logger.warning(f"Steady state undetermined after {budget.max_windows} windows")
    return Undetermined("window budget exhausted", tuple(variations), state)
