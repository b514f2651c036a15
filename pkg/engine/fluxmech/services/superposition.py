from abc import ABC, abstractmethod

import numpy as np

from ..core.exceptions import DomainError


class SuperpositionRule(ABC):
    """Decides which photon resonances contribute at each flux point."""

    name: str = ""

    @abstractmethod
    def include(self, delta_n: np.ndarray, omega_drive: float) -> np.ndarray:
        """Boolean mask, same shape as the per-resonance detunings ``delta_n``."""
        pass


class NearestResonanceWindow(SuperpositionRule):
    """Only the resonance with -omega_d/2 < delta_n <= omega_d/2.

    The half-open window gives every flux point exactly one n; a point on
    a window edge goes to the lower n.
    """

    name = "nearest"

    def include(self, delta_n: np.ndarray, omega_drive: float) -> np.ndarray:
        half = 0.5 * omega_drive
        return (delta_n > -half) & (delta_n <= half)


class AllResonances(SuperpositionRule):
    """Every n up to n_max, including far-detuned tails."""

    name = "all"

    def include(self, delta_n: np.ndarray, omega_drive: float) -> np.ndarray:
        return np.ones_like(delta_n, dtype=bool)


RULES: dict[str, type[SuperpositionRule]] = {
    NearestResonanceWindow.name: NearestResonanceWindow,
    AllResonances.name: AllResonances,
}


def get_rule(name: str) -> SuperpositionRule:
    try:
        return RULES[name]()
    except KeyError:
        raise DomainError(f"unknown superposition rule {name!r}; choose from {sorted(RULES)}") from None
