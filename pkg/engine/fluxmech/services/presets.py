"""Named parameter sets used by the self-test suite and the CLI."""

import math

from ..models.params import DriveParams, FluxGridSpec, MechanicalParams, ModelConfig, QubitParams

# qubit decay presets (gamma1, gamma2) for the response-curve families
DECAY_PRESETS: dict[str, tuple[float, float]] = {
    "long_coherence": (0.001, 0.01),
    "intermediate": (0.05, 0.1),
    "short_coherence": (0.1, 0.5),
}


def resonant_config(
    sigma: float = 0.0,
    gamma_m: float = 2e-3,
    g: float = 0.0,
    delta: float = -0.1,
    delta_gap: float = 0.1,
    gamma1: float = 0.01,
    gamma2: float = 0.01,
    sigma_z_eq: float = -1.0,
) -> ModelConfig:
    """Single-photon-free operating point with omega_m = |Omega_R| + sigma.

    Negative ``delta`` is the blue (self-oscillating) side.
    """
    omega_rabi = math.hypot(delta, delta_gap)
    return ModelConfig(
        drive=DriveParams(eps0_phi_e0=delta, eps0_phi_e1=0.0, omega_drive=1.0, n_photon=0, delta_gap=delta_gap),
        qubit=QubitParams(gamma1=gamma1, gamma2=gamma2, sigma_z_eq=sigma_z_eq),
        mech=MechanicalParams(omega_m=omega_rabi + sigma, gamma_m=gamma_m, g=g),
    )


def response_config(preset: str = "long_coherence", delta: float = -0.1, g: float = 0.0018) -> ModelConfig:
    gamma1, gamma2 = DECAY_PRESETS[preset]
    return resonant_config(gamma1=gamma1, gamma2=gamma2, delta=delta, g=g, gamma_m=1e-3)


def damping_map_config() -> ModelConfig:
    """High-Q oscillator below the dressed gap, strongly dephased qubit."""
    return ModelConfig(
        drive=DriveParams(eps0_phi_e0=0.0, eps0_phi_e1=0.0, omega_drive=1.0, n_photon=0, delta_gap=0.1),
        qubit=QubitParams(gamma1=0.014, gamma2=0.714, sigma_z_eq=-1.0),
        mech=MechanicalParams(omega_m=0.128, quality_factor=1e5, g=0.0018),
    )


def damping_map_grid(phi_e0_count: int = 161, phi_e1_count: int = 201, n_max: int = 4) -> FluxGridSpec:
    return FluxGridSpec(
        phi_e0_min=0.0,
        phi_e0_max=4.0,
        phi_e0_count=phi_e0_count,
        phi_e1_min=0.0,
        phi_e1_max=10.0,
        phi_e1_count=phi_e1_count,
        n_max=n_max,
    )


def branch_config(gamma_m: float = 2e-3) -> ModelConfig:
    """Blue-detuned point with omega_m = 1.1 |Omega_R|."""
    omega_rabi = math.hypot(0.1, 0.1)
    return resonant_config(sigma=0.1 * omega_rabi, gamma_m=gamma_m)
