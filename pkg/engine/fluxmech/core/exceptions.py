"""Error taxonomy shared by services, repositories and the CLI."""

from typing import Any


class FluxMechError(Exception):
    """Base class for every error raised by the engine."""

    exit_code = 3


class DomainError(FluxMechError, ValueError):
    """An input lies outside the domain of an operation."""

    exit_code = 2


class DegenerateParametersError(DomainError):
    """Rotating-frame parameters leave the dressed splitting undefined."""

    exit_code = 3


class SingularityError(DomainError):
    """An analytic formula is evaluated exactly on a pole."""

    exit_code = 3


class NoInstabilityError(DomainError):
    """The equilibrium inversion gives no self-oscillation threshold."""

    exit_code = 3


class ConfigError(FluxMechError):
    """Malformed or invalid run configuration."""

    exit_code = 2

    def __init__(self, message: str, path: str | None = None, line: int | None = None, field: str | None = None):
        self.path = path
        self.line = line
        self.field = field
        where = ":".join(str(p) for p in (path, line) if p is not None)
        prefix = f"{where}: " if where else ""
        suffix = f" [{field}]" if field else ""
        super().__init__(f"{prefix}{message}{suffix}")


class IntegrationError(FluxMechError):
    """The integrator could not continue; carries the partial trajectory."""

    def __init__(self, message: str, partial: Any = None, t_fail: float | None = None):
        self.partial = partial
        self.t_fail = t_fail
        super().__init__(message)


class ConvergenceError(FluxMechError):
    """An iterative solver or estimator did not converge; carries the best iterate."""

    def __init__(self, message: str, best: Any = None):
        self.best = best
        super().__init__(message)


class ThresholdNotFoundError(FluxMechError):
    """No stability change inside the requested coupling bracket."""


class EstimationError(FluxMechError):
    """A trajectory is too short or too degenerate for the requested fit."""


class ArtifactIOError(FluxMechError):
    """An output artifact could not be read or written."""

    exit_code = 4
