"""Dressed-qubit parameters in the frame rotating with the n-th photon resonance."""

import logging
import math
from typing import NamedTuple

import numpy as np
from scipy.special import jv

from ..core.exceptions import DegenerateParametersError, DomainError
from ..models.params import (
    DerivedParams,
    DriveParams,
    MechanicalParams,
    ModelConfig,
    PhysicalCouplingParams,
    QubitParams,
)

logger = logging.getLogger(__name__)


class SecondaryArrays(NamedTuple):
    omega_rabi: np.ndarray
    gamma1n: np.ndarray
    gamma2n: np.ndarray
    g_interaction: np.ndarray
    s_z_eq_bar: np.ndarray
    degenerate: np.ndarray


def bessel_jn(n: int, x):
    """Bessel function of the first kind J_n for integer order n >= 0.

    Accepts a scalar or an array; J_n(0) is 1 for n = 0 and 0 otherwise.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {n!r}")
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("Bessel argument must be finite")
    result = jv(int(n), values)
    return float(result) if result.ndim == 0 else result


def derive_rotating_frame(drive: DriveParams) -> tuple[float, float]:
    """Return (delta, delta_n) for the drive's photon number."""
    delta = drive.eps0_phi_e0 - drive.n_photon * drive.omega_drive
    delta_n = drive.delta_gap * bessel_jn(drive.n_photon, drive.eps0_phi_e1 / drive.omega_drive)
    return delta, delta_n


def secondary_arrays(delta, delta_n, gamma1: float, gamma2: float, sigma_z_eq: float, g: float) -> SecondaryArrays:
    """Vectorized dressed rates, interaction and inversion.

    Points where delta and delta_n both vanish are flagged ``degenerate``
    and filled with zeros.
    """
    delta = np.asarray(delta, dtype=float)
    delta_n = np.asarray(delta_n, dtype=float)
    omega_sq = delta ** 2 + delta_n ** 2
    degenerate = omega_sq == 0.0
    safe_sq = np.where(degenerate, 1.0, omega_sq)

    # dressed splitting takes the sign of delta, positive at delta = 0
    omega_rabi = np.where(delta < 0, -1.0, 1.0) * np.sqrt(safe_sq)
    gamma1n = (delta ** 2 * gamma1 + delta_n ** 2 * gamma2) / safe_sq
    gamma2n = gamma2 - 0.5 * delta_n ** 2 * (gamma2 - gamma1) / safe_sq

    # gamma1/gamma1n -> 1 in the relaxation-free limit
    if gamma1 == 0.0 and gamma2 == 0.0:
        ratio = np.ones_like(gamma1n)
    else:
        ratio = np.where(gamma1n > 0, gamma1 / np.where(gamma1n > 0, gamma1n, 1.0), 0.0)

    # signed cube: G is even in delta
    g_interaction = -delta * delta_n ** 2 * sigma_z_eq * g * ratio / (2.0 * omega_rabi ** 3)
    s_z_eq_bar = delta * sigma_z_eq * ratio / np.abs(omega_rabi)

    zero = np.zeros_like(safe_sq)
    return SecondaryArrays(
        omega_rabi=np.where(degenerate, zero, omega_rabi),
        gamma1n=np.where(degenerate, zero, gamma1n),
        gamma2n=np.where(degenerate, zero, gamma2n),
        g_interaction=np.where(degenerate, zero, g_interaction),
        s_z_eq_bar=np.where(degenerate, zero, s_z_eq_bar),
        degenerate=degenerate,
    )


def derive_secondary(delta: float, delta_n: float, qubit: QubitParams, mech: MechanicalParams) -> DerivedParams:
    if delta == 0.0 and delta_n == 0.0:
        raise DegenerateParametersError("delta and delta_n are both zero: dressed splitting undefined")
    arrays = secondary_arrays(delta, delta_n, qubit.gamma1, qubit.gamma2, qubit.sigma_z_eq, mech.g)
    omega_rabi = float(arrays.omega_rabi)
    return DerivedParams(
        delta=float(delta),
        delta_n=float(delta_n),
        omega_rabi=omega_rabi,
        gamma1n=float(arrays.gamma1n),
        gamma2n=float(arrays.gamma2n),
        g_interaction=float(arrays.g_interaction),
        s_z_eq_bar=float(arrays.s_z_eq_bar),
        sigma_detune=mech.omega_m - abs(omega_rabi),
        gamma1=qubit.gamma1,
        gamma2=qubit.gamma2,
        sigma_z_eq=qubit.sigma_z_eq,
        omega_m=mech.omega_m,
        gamma_m=mech.gamma_m,
        g=mech.g,
    )


def derive_params(config: ModelConfig) -> DerivedParams:
    delta, delta_n = derive_rotating_frame(config.drive)
    derived = derive_secondary(delta, delta_n, config.qubit, config.mech)
    logger.debug(
        f"Derived delta={delta:.6g} delta_n={delta_n:.6g} omega_rabi={derived.omega_rabi:.6g} "
        f"sigma={derived.sigma_detune:.3g}"
    )
    return derived


def qubit_of(d: DerivedParams) -> QubitParams:
    return QubitParams(gamma1=d.gamma1, gamma2=d.gamma2, sigma_z_eq=d.sigma_z_eq)


def with_coupling(d: DerivedParams, g: float) -> DerivedParams:
    """Same operating point with a different coupling strength."""
    mech = MechanicalParams(omega_m=d.omega_m, gamma_m=d.gamma_m, g=g)
    return derive_secondary(d.delta, d.delta_n, qubit_of(d), mech)


def coupling_from_physical(p: PhysicalCouplingParams) -> float:
    """Magnetomotive coupling B l I_cc x_zpf / hbar as an angular frequency."""
    values = (p.b_field, p.length_eff, p.i_cc, p.mass_eff, p.omega_m, p.hbar)
    if any(v <= 0 or not math.isfinite(v) for v in values):
        raise DomainError("physical coupling inputs must be finite and strictly positive")
    x_zpf = math.sqrt(p.hbar / (2.0 * p.mass_eff * p.omega_m))
    return p.b_field * p.length_eff * p.i_cc * x_zpf / p.hbar


def bloch_equilibrium(delta: float, delta_n: float, qubit: QubitParams) -> tuple[complex, float]:
    """Uncoupled qubit fixed point (s_minus, s_z) in the rotating frame."""
    gamma1, gamma2, sigma = qubit.gamma1, qubit.gamma2, qubit.sigma_z_eq
    dephase = gamma2 ** 2 + delta ** 2
    denom = gamma1 * dephase + delta_n ** 2 * gamma2
    if denom == 0.0 or dephase == 0.0:
        # no unique fixed point without relaxation
        return 0j, sigma
    s_z = gamma1 * sigma * dephase / denom
    s_minus = 0.5j * delta_n * s_z / complex(gamma2, delta)
    return s_minus, s_z
