import numpy as np
import pytest

from fluxmech.models.state import IntegrationStats, Trajectory
from fluxmech.services.presets import resonant_config, response_config
from fluxmech.services.rotating_frame import derive_params


@pytest.fixture
def blue():
    """Canonical blue-detuned point tuned onto the dressed splitting."""
    return derive_params(resonant_config())


@pytest.fixture
def red():
    return derive_params(resonant_config(delta=0.1))


@pytest.fixture
def long_coherence():
    return derive_params(response_config("long_coherence"))


@pytest.fixture
def make_trajectory():
    def build(times, s_minus, s_z, alpha) -> Trajectory:
        times = np.asarray(times, dtype=float)
        s_minus = np.broadcast_to(np.asarray(s_minus, dtype=complex), times.shape)
        s_z = np.broadcast_to(np.asarray(s_z, dtype=float), times.shape)
        alpha = np.broadcast_to(np.asarray(alpha, dtype=complex), times.shape)
        coords = np.column_stack([s_minus.real, s_minus.imag, s_z, alpha.real, alpha.imag])
        return Trajectory(times, coords, IntegrationStats("synthetic", 0.0, 0.0, 0, 0, 0))

    return build
