import logging
import math

import numpy as np

from ..core.exceptions import EstimationError
from ..models.results import LimitCycleMeasurement, RingdownFit
from ..models.state import Trajectory

logger = logging.getLogger(__name__)


def _window(traj: Trajectory, transient_fraction: float) -> Trajectory:
    if not 0.0 <= transient_fraction < 1.0:
        raise EstimationError(f"transient_fraction must lie in [0, 1), got {transient_fraction}")
    window = traj.tail(1.0 - transient_fraction)
    if len(window) < 8:
        raise EstimationError(f"only {len(window)} samples after discarding the transient")
    return window


def ringdown_fit(
    traj: Trajectory,
    transient_fraction: float = 0.0,
    center: complex = 0j,
    min_periods: float = 50.0,
) -> RingdownFit:
    """Fit alpha(t) - center ~ A exp((-gamma/2 - i omega) t).

    The carrier comes from a linear fit of the unwrapped phase; the decay
    rate from a linear fit of the log of the demodulated envelope.
    """
    window = _window(traj, transient_fraction)
    t = window.times - window.times[0]
    signal = window.alpha - center
    amplitude = np.abs(signal)
    if np.any(amplitude == 0.0) or not np.all(np.isfinite(amplitude)):
        raise EstimationError("signal touches zero or is not finite")

    phase = np.unwrap(np.angle(signal))
    phase_slope, _ = np.polyfit(t, phase, 1)
    omega_eff = -phase_slope
    n_periods = omega_eff * t[-1] / (2.0 * math.pi)
    if omega_eff <= 0:
        raise EstimationError("signal does not rotate clockwise: not an oscillator ring-down")
    if n_periods < min_periods:
        raise EstimationError(f"trajectory spans {n_periods:.1f} periods, need at least {min_periods}")

    envelope = np.log(np.abs(signal * np.exp(1j * omega_eff * t)))
    slope, intercept = np.polyfit(t, envelope, 1)
    residual = float(np.sqrt(np.mean((envelope - (slope * t + intercept)) ** 2)))
    return RingdownFit(gamma_eff=float(-2.0 * slope), omega_eff=float(omega_eff), residual=residual, n_periods=float(n_periods))


def _upward_crossings(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    idx = np.nonzero((x[:-1] < 0.0) & (x[1:] >= 0.0))[0]
    frac = -x[idx] / (x[idx + 1] - x[idx])
    return t[idx] + frac * (t[idx + 1] - t[idx])


def _radius_per_cycle(t: np.ndarray, z: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """(max |z| + min |z|) / 2 within each cycle; exact for circular orbits."""
    radius = np.abs(z)
    bounds = np.searchsorted(t, edges)
    out = [
        0.5 * (radius[lo:hi].max() + radius[lo:hi].min())
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    return np.asarray(out)


def limit_cycle_measure(
    traj: Trajectory,
    transient_fraction: float = 0.5,
    min_cycles: int = 100,
    amplitude_floor: float = 1e-9,
    variation_tol: float = 0.01,
) -> LimitCycleMeasurement:
    """Amplitude, frequency and mean inversion of a self-sustained oscillation.

    Amplitudes are radii of the orbits of alpha and s_minus about their
    time means. A trajectory resting at a fixed point reports zero
    amplitude and counts as converged.
    """
    window = _window(traj, transient_fraction)
    t = window.times
    alpha, s_minus, s_z = window.alpha, window.s_minus, window.s_z
    center_alpha = complex(alpha.mean())
    center_s = complex(s_minus.mean())
    a = alpha - center_alpha
    s = s_minus - center_s

    extrema = {
        "s_z_max": float(s_z.max()),
        "s_z_min": float(s_z.min()),
        "abs_alpha_max": float(np.abs(alpha).max()),
        "abs_alpha_min": float(np.abs(alpha).min()),
        "re_alpha_max": float(alpha.real.max()),
        "re_alpha_min": float(alpha.real.min()),
        "abs_s_minus_max": float(np.abs(s_minus).max()),
        "abs_s_minus_min": float(np.abs(s_minus).min()),
    }
    mean_s_z = float(s_z.mean())

    crossings = _upward_crossings(t, a.real)
    swing = float(np.abs(a).max())
    if swing <= amplitude_floor * (1.0 + abs(center_alpha)) or len(crossings) < 2:
        if swing > amplitude_floor * (1.0 + abs(center_alpha)):
            raise EstimationError("oscillating signal with fewer than two cycles in the window")
        return LimitCycleMeasurement(
            amp_alpha=swing,
            amp_s_minus=float(np.abs(s).max()),
            mean_s_z=mean_s_z,
            freq=0.0,
            converged=True,
            amp_variation=0.0,
            n_cycles=0,
            center_alpha=center_alpha,
            extrema=extrema,
        )

    radii = _radius_per_cycle(t, a, crossings)
    radii_s = _radius_per_cycle(t, s, crossings)
    amp_alpha = float(radii.mean())
    variation = float((radii.max() - radii.min()) / amp_alpha) if amp_alpha > 0 else 0.0

    # coarse frequency from crossings, refined by a phase regression
    freq = 2.0 * math.pi / float(np.mean(np.diff(crossings)))
    phase = np.unwrap(np.angle(a))
    slope, _ = np.polyfit(t - t[0], phase, 1)
    if abs(abs(slope) - freq) < 0.1 * freq:
        freq = abs(float(slope))

    n_cycles = len(radii)
    converged = variation < variation_tol and n_cycles >= min_cycles
    if not converged:
        logger.debug(f"Cycle not converged: variation={variation:.3g} cycles={n_cycles}")
    return LimitCycleMeasurement(
        amp_alpha=amp_alpha,
        amp_s_minus=float(radii_s.mean()),
        mean_s_z=mean_s_z,
        freq=freq,
        converged=converged,
        amp_variation=variation,
        n_cycles=n_cycles,
        center_alpha=center_alpha,
        extrema=extrema,
    )
