"""Semiclassical equations of motion in real coordinates.

State vector layout is (Re s_minus, Im s_minus, s_z, Re alpha, Im alpha).
With s_minus = x + i y, alpha = p + i q and u = 2p:

    dx/dt = -gamma2 x + (delta + g u) y
    dy/dt = -gamma2 y - (delta + g u) x + delta_n s_z / 2
    ds_z/dt = -gamma1 (s_z - sigma_z_eq) - 2 delta_n y
    dp/dt = omega_m q - gamma_m p / 2
    dq/dt = -omega_m p - gamma_m q / 2 - g s_z / 2
"""

from typing import Callable

import numpy as np

from ..models.params import DerivedParams
from ..models.state import SystemState

Rhs = Callable[[float, np.ndarray], np.ndarray]


def make_rhs(d: DerivedParams) -> Rhs:
    gamma1, gamma2, delta, delta_n = d.gamma1, d.gamma2, d.delta, d.delta_n
    sigma, g, omega_m, half_gm = d.sigma_z_eq, d.g, d.omega_m, 0.5 * d.gamma_m
    half_dn, half_g = 0.5 * d.delta_n, 0.5 * d.g

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x, yy, z, p, q = y
        shift = delta + 2.0 * g * p
        return np.array(
            [
                -gamma2 * x + shift * yy,
                -gamma2 * yy - shift * x + half_dn * z,
                -gamma1 * (z - sigma) - 2.0 * delta_n * yy,
                omega_m * q - half_gm * p,
                -omega_m * p - half_gm * q - half_g * z,
            ]
        )

    return rhs


def make_jacobian(d: DerivedParams) -> Callable[[np.ndarray], np.ndarray]:
    gamma1, gamma2, delta, delta_n = d.gamma1, d.gamma2, d.delta, d.delta_n
    g, omega_m, half_gm = d.g, d.omega_m, 0.5 * d.gamma_m

    def jacobian(y: np.ndarray) -> np.ndarray:
        x, yy, _, p, _ = y
        shift = delta + 2.0 * g * p
        return np.array(
            [
                [-gamma2, shift, 0.0, 2.0 * g * yy, 0.0],
                [-shift, -gamma2, 0.5 * delta_n, -2.0 * g * x, 0.0],
                [0.0, -2.0 * delta_n, -gamma1, 0.0, 0.0],
                [0.0, 0.0, 0.0, -half_gm, omega_m],
                [0.0, 0.0, -0.5 * g, -omega_m, -half_gm],
            ]
        )

    return jacobian


def make_driven_qubit_rhs(d: DerivedParams, alpha_of_t: Callable[[float], complex]) -> Rhs:
    """Qubit block driven by a prescribed oscillator amplitude."""
    gamma1, gamma2, delta, delta_n, sigma, g = d.gamma1, d.gamma2, d.delta, d.delta_n, d.sigma_z_eq, d.g
    half_dn = 0.5 * delta_n

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x, yy, z = y
        shift = delta + 2.0 * g * alpha_of_t(t).real
        return np.array(
            [
                -gamma2 * x + shift * yy,
                -gamma2 * yy - shift * x + half_dn * z,
                -gamma1 * (z - sigma) - 2.0 * delta_n * yy,
            ]
        )

    return rhs


def eom_rhs(state: SystemState, d: DerivedParams) -> SystemState:
    """Time derivative of ``state``, returned in state form."""
    return SystemState.from_array(make_rhs(d)(0.0, state.to_array()))


def eom_jacobian(state: SystemState, d: DerivedParams) -> np.ndarray:
    """Analytic 5x5 Jacobian of the real-coordinate right-hand side."""
    return make_jacobian(d)(state.to_array())
