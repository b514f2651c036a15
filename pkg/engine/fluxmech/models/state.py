from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Real coordinate layout shared by the integrator, Jacobian and CSV export
RE_S, IM_S, S_Z, RE_A, IM_A = range(5)
COORDINATE_NAMES = ("re_s_minus", "im_s_minus", "s_z", "re_alpha", "im_alpha")


@dataclass(frozen=True)
class SystemState:
    """Qubit coherence s_minus, inversion s_z and oscillator amplitude alpha."""

    s_minus: complex
    s_z: float
    alpha: complex

    def to_array(self) -> np.ndarray:
        return np.array([self.s_minus.real, self.s_minus.imag, self.s_z, self.alpha.real, self.alpha.imag])

    @classmethod
    def from_array(cls, y) -> "SystemState":
        return cls(complex(y[RE_S], y[IM_S]), float(y[S_Z]), complex(y[RE_A], y[IM_A]))

    @property
    def bloch_norm(self) -> float:
        """4|s_minus|^2 + s_z^2, conserved without relaxation."""
        return 4.0 * abs(self.s_minus) ** 2 + self.s_z ** 2

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.to_array())))

    def perturbed(self, d_alpha: complex = 0j, d_s_minus: complex = 0j, d_s_z: float = 0.0) -> "SystemState":
        return SystemState(self.s_minus + d_s_minus, self.s_z + d_s_z, self.alpha + d_alpha)


@dataclass(frozen=True)
class IntegrationStats:
    method: str
    rtol: float
    atol: float
    n_accepted: int
    n_rejected: int
    nfev: int
    message: str = ""


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled solution; ``coords`` has one row per sample time."""

    times: np.ndarray
    coords: np.ndarray
    stats: IntegrationStats
    partial: bool = False

    def __len__(self) -> int:
        return len(self.times)

    @cached_property
    def s_minus(self) -> np.ndarray:
        return self.coords[:, RE_S] + 1j * self.coords[:, IM_S]

    @cached_property
    def s_z(self) -> np.ndarray:
        return self.coords[:, S_Z]

    @cached_property
    def alpha(self) -> np.ndarray:
        return self.coords[:, RE_A] + 1j * self.coords[:, IM_A]

    @property
    def states(self) -> list[SystemState]:
        return [SystemState.from_array(row) for row in self.coords]

    def state_at(self, index: int) -> SystemState:
        return SystemState.from_array(self.coords[index])

    @property
    def final_state(self) -> SystemState:
        return self.state_at(-1)

    def bloch_norm(self) -> np.ndarray:
        return 4.0 * np.abs(self.s_minus) ** 2 + self.s_z ** 2

    def tail(self, fraction: float) -> "Trajectory":
        """Keep the trailing ``fraction`` of samples."""
        start = int(len(self.times) * (1.0 - fraction))
        return Trajectory(self.times[start:], self.coords[start:], self.stats, self.partial)
