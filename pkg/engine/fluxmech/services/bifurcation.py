"""Equilibria, their stability, and the self-oscillation (Hopf) threshold."""

import logging
import math
from typing import Iterable

import numpy as np
from scipy.optimize import bisect

from ..core.exceptions import (
    ConvergenceError,
    DomainError,
    IntegrationError,
    NoInstabilityError,
    ThresholdNotFoundError,
)
from ..models.params import DerivedParams
from ..models.results import (
    BranchData,
    BranchPoint,
    EquilibriumPoint,
    HopfThreshold,
    LimitCycle,
    LimitCyclePrediction,
)
from ..models.state import SystemState
from .dynamics import SteadyStateBudget, steady_state
from .equations import make_jacobian, make_rhs
from .rotating_frame import bloch_equilibrium, qubit_of, with_coupling

logger = logging.getLogger(__name__)


def decoupled_guess(d: DerivedParams) -> SystemState:
    """Bloch fixed point with the oscillator displaced by the static force."""
    s_minus, s_z = bloch_equilibrium(d.delta, d.delta_n, qubit_of(d))
    alpha = -d.g * s_z / complex(2.0 * d.omega_m, -d.gamma_m)
    return SystemState(s_minus, s_z, alpha)


def _sorted_eigenvalues(jac: np.ndarray) -> np.ndarray:
    eig = np.linalg.eigvals(jac)
    return eig[np.lexsort((eig.imag, -eig.real))]


def find_equilibrium(
    d: DerivedParams,
    guess: SystemState | None = None,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> EquilibriumPoint:
    """Damped Newton iteration on the real right-hand side."""
    rhs, jacobian = make_rhs(d), make_jacobian(d)
    y = (guess or decoupled_guess(d)).to_array()
    f = rhs(0.0, y)
    norm = float(np.max(np.abs(f)))
    best_y, best_norm = y, norm
    iterations = 0

    while norm >= tol and iterations < max_iter:
        iterations += 1
        try:
            step = np.linalg.solve(jacobian(y), -f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian at iteration {iterations}", best=SystemState.from_array(best_y)) from exc
        lam = 1.0
        while True:
            y_new = y + lam * step
            f_new = rhs(0.0, y_new)
            norm_new = float(np.max(np.abs(f_new)))
            if norm_new < norm or lam < 1e-4:
                break
            lam *= 0.5
        y, f, norm = y_new, f_new, norm_new
        if norm < best_norm:
            best_y, best_norm = y, norm

    if not norm < tol:
        raise ConvergenceError(
            f"Newton residual {best_norm:.3g} above {tol:.1g} after {max_iter} iterations",
            best=SystemState.from_array(best_y),
        )
    eigenvalues = _sorted_eigenvalues(jacobian(y))
    return EquilibriumPoint(SystemState.from_array(y), eigenvalues, norm, iterations)


def hopf_threshold(d: DerivedParams, g_range: tuple[float, float], rtol: float = 1e-6) -> HopfThreshold:
    """Bisect the coupling at which the leading eigenvalue crosses the imaginary axis."""
    g_lo, g_hi = (float(g) for g in g_range)
    if not 0 <= g_lo < g_hi:
        raise DomainError(f"g_range must satisfy 0 <= g_lo < g_hi, got {g_range}")
    guesses: dict[str, SystemState] = {}

    def leading(g: float) -> EquilibriumPoint:
        eq = find_equilibrium(with_coupling(d, g), guess=guesses.get("last"))
        guesses["last"] = eq.state
        return eq

    def growth(g: float) -> float:
        return leading(g).max_real_eigenvalue

    f_lo, f_hi = growth(g_lo), growth(g_hi)
    root_atol = 1e-14
    if abs(f_lo) <= root_atol and f_hi > 0:
        g_c = g_lo
    elif f_lo < 0 < f_hi or f_hi < 0 < f_lo:
        g_c = bisect(growth, g_lo, g_hi, xtol=0.1 * rtol * g_hi, rtol=0.1 * rtol)
    else:
        raise ThresholdNotFoundError(
            f"max Re(eigenvalue) does not change sign on [{g_lo:.6g}, {g_hi:.6g}] ({f_lo:.3g}, {f_hi:.3g})"
        )

    eq = leading(g_c)
    frequency = float(abs(eq.eigenvalues[0].imag))
    h = 1e-4 * g_c if g_c > 0 else 1e-6 * g_hi
    left = max(g_c - h, 0.0)
    slope = (growth(g_c + h) - growth(left)) / (g_c + h - left)
    logger.info(f"Hopf threshold g_c={g_c:.8g} frequency={frequency:.6g} transversality={slope:.4g}")
    return HopfThreshold(g_c=float(g_c), frequency=frequency, transversality=float(slope), bracket=(g_lo, g_hi))


def g_crit_analytic(d: DerivedParams) -> float:
    """Closed-form self-oscillation threshold on the blue side."""
    if d.s_z_eq_bar <= 0:
        raise NoInstabilityError(f"dressed inversion {d.s_z_eq_bar:.3g} <= 0: oscillator is damped, not driven")
    if d.delta_n == 0 or d.gamma2n <= 0:
        raise NoInstabilityError("no dressed coupling channel")
    return math.sqrt(
        2.0 * d.gamma_m * d.omega_rabi ** 2 * (d.gamma2n ** 2 + d.sigma_detune ** 2)
        / (d.s_z_eq_bar * d.gamma2n * d.delta_n ** 2)
    )


def limit_cycle_prediction(d: DerivedParams, g: float | None = None) -> LimitCyclePrediction:
    """Cycle amplitudes, inversion shift and frequency offset above threshold."""
    g = d.g if g is None else float(g)
    if g == 0:
        raise DomainError("limit-cycle prediction needs g != 0")
    g_c = g_crit_analytic(d)
    sigma, b = d.sigma_detune, d.gamma2n
    omega_a = d.gamma_m * sigma / (2.0 * b + d.gamma_m)
    f_sigma = math.atan(2.0 * sigma / (2.0 * b + d.gamma_m))
    projection = d.dressed_projection
    base_s_z = projection * d.s_z_eq_bar

    above = abs(g) > g_c
    if not above:
        return LimitCyclePrediction(
            g=g, g_crit=g_c, above_threshold=False, r_s=0.0, r_a=0.0, s_cz=0.0,
            omega_a=omega_a, f_sigma=f_sigma, cycle_frequency=d.omega_m,
            mean_s_z_shift=0.0, mean_s_z=base_s_z,
        )

    ratio = (g_c / g) ** 2
    r_s = 0.5 * d.s_z_eq_bar * math.sqrt(d.gamma1n / b) * (g_c / abs(g)) * math.sqrt(1.0 - ratio)
    r_a = math.sqrt(d.gamma1n * d.s_z_eq_bar * (1.0 - ratio) / (2.0 * d.gamma_m)) if d.gamma_m > 0 else math.inf
    s_cz = d.s_z_eq_bar * (ratio - 1.0)
    return LimitCyclePrediction(
        g=g,
        g_crit=g_c,
        above_threshold=True,
        r_s=r_s,
        r_a=r_a,
        s_cz=s_cz,
        omega_a=omega_a,
        f_sigma=f_sigma,
        cycle_frequency=d.omega_m - omega_a,
        mean_s_z_shift=projection * s_cz,
        mean_s_z=base_s_z + projection * s_cz,
    )


def _cycle_start(d: DerivedParams, eq: EquilibriumPoint) -> SystemState:
    kick = 1e-3
    try:
        prediction = limit_cycle_prediction(d)
    except (NoInstabilityError, DomainError):
        prediction = None
    if prediction is not None and prediction.above_threshold and math.isfinite(prediction.r_a):
        kick = max(kick, prediction.r_a)
    return eq.state.perturbed(d_alpha=kick)


def continuation_sweep(
    d: DerivedParams,
    g_grid: Iterable[float],
    simulate_cycles: bool = True,
    budget: SteadyStateBudget | None = None,
) -> BranchData:
    """Warm-started equilibrium branch in g, with measured cycles past the Hopf point."""
    grid = [float(g) for g in g_grid]
    if not grid:
        raise DomainError("g grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("g grid must be strictly increasing")

    points: list[BranchPoint] = []
    guess: SystemState | None = None
    for g in grid:
        dg = with_coupling(d, g)
        try:
            eq = find_equilibrium(dg, guess=guess)
        except ConvergenceError as exc:
            message = f"equilibrium lost at g={g:.6g}: {exc}"
            logger.warning(f"Branch truncated: {message}")
            return BranchData(points, truncated=True, diagnostic=message)
        guess = eq.state

        cycle = None
        if simulate_cycles and not eq.stable:
            try:
                outcome = steady_state(dg, _cycle_start(dg, eq), budget)
            except IntegrationError as exc:
                logger.warning(f"Cycle integration failed at g={g:.6g}: {exc}")
                outcome = None
            if isinstance(outcome, LimitCycle):
                cycle = outcome.measurement
            else:
                logger.warning(f"No settled cycle at g={g:.6g}")
        points.append(BranchPoint(g=g, equilibrium=eq, cycle=cycle))
        logger.debug(f"Branch g={g:.6g} stable={eq.stable} max_re={eq.max_real_eigenvalue:.3g}")

    return BranchData(points)
