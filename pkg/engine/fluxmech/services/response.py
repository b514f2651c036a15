"""Linear response of the dressed qubit to oscillator motion."""

import logging
import math

import numpy as np
from scipy.signal import find_peaks

from ..core.exceptions import ConvergenceError, DomainError, IntegrationError, SingularityError
from ..models.params import DerivedParams, MechanicalParams
from ..models.results import ResponseCurves, ResponseResult
from .bifurcation import find_equilibrium
from .dynamics import solve_sampled
from .equations import make_driven_qubit_rhs
from .rotating_frame import derive_secondary, qubit_of

logger = logging.getLogger(__name__)


def chi_z_kernel(omega, omega_rabi, g_interaction, gamma1n, gamma2n, gamma2):
    """Factorised response -2 Omega G (2 gamma2 - i w) / poles, broadcast over arrays."""
    omega = np.asarray(omega, dtype=float)
    den = (gamma1n - 1j * omega) * (gamma2n - 1j * (omega - omega_rabi)) * (gamma2n - 1j * (omega + omega_rabi))
    if np.any(den == 0):
        raise SingularityError("response evaluated exactly on an undamped pole")
    return -2.0 * omega_rabi * g_interaction * (2.0 * gamma2 - 1j * omega) / den


def _scalar(value):
    return complex(value) if np.ndim(value) == 0 else value


def chi_z(omega, d: DerivedParams):
    return _scalar(chi_z_kernel(omega, d.omega_rabi, d.g_interaction, d.gamma1n, d.gamma2n, d.gamma2))


def chi_z_linearized(omega, d: DerivedParams):
    """Exact linear response of the Bloch equations, without pole factorisation."""
    omega = np.asarray(omega, dtype=float)
    gamma1, gamma2, delta, delta_n = d.gamma1, d.gamma2, d.delta, d.delta_n
    a = gamma2 - 1j * omega
    static = gamma1 * (gamma2 ** 2 + delta ** 2) + delta_n ** 2 * gamma2
    den = (gamma1 - 1j * omega) * (a ** 2 + delta ** 2) + delta_n ** 2 * a
    if static == 0 or np.any(den == 0):
        raise SingularityError("linearized response undefined without relaxation")
    num = delta_n ** 2 * d.g * delta * gamma1 * d.sigma_z_eq * (2.0 * gamma2 - 1j * omega) / static
    return _scalar(num / den)


def chi_z_sas(omega, d: DerivedParams):
    """Sideband (Stokes/anti-Stokes) Lorentzian form of the response."""
    omega = np.asarray(omega, dtype=float)
    g, w, om = d.g_interaction, d.gamma2n, d.omega_rabi
    plus = w ** 2 + (omega + om) ** 2
    minus = w ** 2 + (omega - om) ** 2
    im = g * (w / plus - w / minus)
    re = g * ((omega + om) / plus + (omega - om) / minus)
    return _scalar(re + 1j * im)


def renormalized_mech(d: DerivedParams, mech: MechanicalParams | None = None) -> ResponseResult:
    if mech is not None:
        d = derive_secondary(d.delta, d.delta_n, qubit_of(d), mech)
    chi = chi_z(d.omega_m, d)
    return ResponseResult(
        chi=chi,
        gamma_m_tilde=d.gamma_m - d.g * chi.imag,
        omega_m_tilde=d.omega_m + 0.5 * d.g * chi.real,
    )


def default_alpha0(d: DerivedParams) -> float:
    if d.g == 0:
        return 1e-4
    raw = 1e-4 * abs(d.delta_n) / abs(d.g)
    alpha0 = float(np.clip(raw, 1e-8, 1e-2))
    if alpha0 != raw:
        logger.warning(f"Drive amplitude clipped to {alpha0:.3g} (unclipped {raw:.3g})")
    return alpha0


def chi_z_numeric(
    omega: float,
    d: DerivedParams,
    alpha0: float | None = None,
    cycles: int = 20,
    settle: float = 10.0,
    samples_per_cycle: int = 64,
    tol: tuple[float, float] = (1e-10, 1e-13),
) -> complex:
    """Response measured by driving the qubit block with a prescribed alpha(t).

    alpha(t) = alpha_eq + alpha0 exp(-i omega t); after ``settle`` relaxation
    times, s_z is projected onto exp(-i omega t) over the trailing two thirds
    of the run, on whole cycles only.
    """
    if omega <= 0 or not math.isfinite(omega):
        raise DomainError(f"omega must be positive, got {omega}")
    gamma_min = min(d.gamma1n, d.gamma2n)
    if gamma_min <= 0:
        raise ConvergenceError("transients never decay without relaxation")
    alpha0 = default_alpha0(d) if alpha0 is None else float(alpha0)
    if alpha0 <= 0:
        raise DomainError("alpha0 must be positive")

    equilibrium = find_equilibrium(d)
    alpha_eq = equilibrium.state.alpha
    start = equilibrium.state.to_array()[:3]

    period = 2.0 * math.pi / omega
    n_window = max(int(cycles), math.ceil(2.0 * settle / gamma_min / period))
    n_window += n_window % 2
    t_end = 1.5 * n_window * period
    t_w0 = t_end - n_window * period
    n_samples = n_window * samples_per_cycle
    window_times = t_w0 + period * np.arange(n_samples + 1) / samples_per_cycle
    sample_times = np.concatenate([[0.0], window_times])

    def alpha_of_t(t: float) -> complex:
        return alpha_eq + alpha0 * complex(math.cos(omega * t), -math.sin(omega * t))

    rhs = make_driven_qubit_rhs(d, alpha_of_t)
    coords, stats, failure = solve_sampled(rhs, start, sample_times, rtol=tol[0], atol=tol[1])
    if failure is not None:
        raise IntegrationError(failure)

    # drop t=0 and the closing sample of the last cycle
    s_z = coords[1:-1, 2]
    t = window_times[:-1]
    weighted = s_z * np.exp(1j * omega * t)
    half = n_samples // 2
    chi = complex(weighted.mean()) / alpha0
    first = complex(weighted[:half].mean()) / alpha0
    second = complex(weighted[half:].mean()) / alpha0

    floor = 10.0 * tol[1] / alpha0
    if abs(first - second) > 0.01 * abs(chi) + floor:
        raise ConvergenceError(
            f"projection drifts between half windows ({abs(first - second):.3g} vs |chi|={abs(chi):.3g})",
            best=chi,
        )
    logger.debug(f"chi_z_numeric(omega={omega:.6g}) = {chi:.6g} over {n_window} cycles, nfev={stats.nfev}")
    return chi


def response_curves(omega_grid, d: DerivedParams) -> ResponseCurves:
    omega = np.asarray(omega_grid, dtype=float)
    if omega.size == 0:
        raise DomainError("omega grid is empty")
    chi = np.atleast_1d(chi_z(omega, d))
    peaks, _ = find_peaks(np.abs(chi.imag))
    return ResponseCurves(omega=omega, chi=chi, peak_omegas=omega[peaks])
