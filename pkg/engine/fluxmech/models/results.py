from dataclasses import dataclass, field

import numpy as np

from fluxmech.models.state import SystemState


@dataclass(frozen=True)
class RingdownFit:
    gamma_eff: float
    omega_eff: float
    residual: float
    n_periods: float


@dataclass(frozen=True)
class LimitCycleMeasurement:
    amp_alpha: float
    amp_s_minus: float
    mean_s_z: float
    freq: float
    converged: bool
    amp_variation: float
    n_cycles: int
    center_alpha: complex
    extrema: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class FixedPoint:
    state: SystemState
    variation: float


@dataclass(frozen=True)
class LimitCycle:
    measurement: LimitCycleMeasurement
    final_state: SystemState


@dataclass(frozen=True)
class Undetermined:
    reason: str
    variations: tuple[float, ...] = ()
    final_state: SystemState | None = None


SteadyState = FixedPoint | LimitCycle | Undetermined


@dataclass(frozen=True)
class ResponseResult:
    chi: complex
    gamma_m_tilde: float
    omega_m_tilde: float


@dataclass(frozen=True, eq=False)
class ResponseCurves:
    omega: np.ndarray
    chi: np.ndarray
    peak_omegas: np.ndarray


@dataclass(frozen=True, eq=False)
class EquilibriumPoint:
    state: SystemState
    eigenvalues: np.ndarray
    residual_norm: float
    iterations: int

    @property
    def stable(self) -> bool:
        return bool(np.all(self.eigenvalues.real < 0))

    @property
    def max_real_eigenvalue(self) -> float:
        return float(np.max(self.eigenvalues.real))


@dataclass(frozen=True)
class HopfThreshold:
    g_c: float
    frequency: float
    transversality: float
    bracket: tuple[float, float]


@dataclass(frozen=True)
class LimitCyclePrediction:
    g: float
    g_crit: float
    above_threshold: bool
    r_s: float
    r_a: float
    s_cz: float
    omega_a: float
    f_sigma: float
    cycle_frequency: float
    mean_s_z_shift: float
    mean_s_z: float


@dataclass(frozen=True)
class BranchPoint:
    g: float
    equilibrium: EquilibriumPoint
    cycle: LimitCycleMeasurement | None = None


@dataclass(frozen=True)
class BranchData:
    points: list[BranchPoint]
    truncated: bool = False
    diagnostic: str | None = None

    @property
    def hopf_index(self) -> int | None:
        """Index of the first unstable point following a stable one."""
        for i in range(1, len(self.points)):
            if self.points[i - 1].equilibrium.stable and not self.points[i].equilibrium.stable:
                return i
        return None

    @property
    def stability_changes(self) -> int:
        flags = [p.equilibrium.stable for p in self.points]
        return sum(1 for a, b in zip(flags, flags[1:]) if a != b)


@dataclass(frozen=True, eq=False)
class MapTile:
    """Gridded result; every layer has shape (len(y_axis), len(x_axis))."""

    quantity: str
    x_label: str
    y_label: str
    x_axis: np.ndarray
    y_axis: np.ndarray
    layers: dict[str, np.ndarray]
    parameters: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return self.layers[self.quantity]

    def normalization(self) -> dict[str, dict[str, float]]:
        out = {}
        for name, layer in self.layers.items():
            lo, hi = float(np.min(layer)), float(np.max(layer))
            out[name] = {"min": lo, "max": hi, "scale": max(abs(lo), abs(hi))}
        return out

    def normalized(self, layer: str | None = None) -> np.ndarray:
        """Layer divided by its largest magnitude; all-zero layers stay zero."""
        values = self.layers[layer or self.quantity]
        scale = float(np.max(np.abs(values)))
        return values / scale if scale > 0 else np.zeros_like(values)


@dataclass(frozen=True)
class RunManifest:
    command: str
    version: str
    config_hash: str
    config: dict
    wall_time: float
    outputs: list[str]
    status: str = "ok"
    summary: dict = field(default_factory=dict)
