"""Run configuration: YAML sections, --set overrides, hashing and manifest replay."""

import copy
import hashlib
import json
import logging
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from fluxmech.core.config import DEFAULT_ATOL, DEFAULT_RTOL
from fluxmech.core.exceptions import ArtifactIOError, ConfigError
from fluxmech.models.params import (
    DriveParams,
    FluxGridSpec,
    MechanicalParams,
    ModelConfig,
    PhysicalCouplingParams,
    QubitParams,
)

logger = logging.getLogger(__name__)


class RunSettings(BaseModel):
    """Flat ``run`` section shared by every subcommand."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    # simulate
    t_start: float = 0.0
    t_end: float = Field(20000.0, gt=0)
    rtol: float = Field(DEFAULT_RTOL, gt=0)
    atol: float = Field(DEFAULT_ATOL, gt=0)
    sample_dt: float | None = Field(None, gt=0)
    initial: Literal["equilibrium", "custom"] = "equilibrium"
    kick_alpha: float = 1e-3
    s_minus_re: float = 0.0
    s_minus_im: float = 0.0
    s_z: float = -1.0
    alpha_re: float = 0.0
    alpha_im: float = 0.0

    # response
    omega_min: float = Field(1e-3, gt=0)
    omega_max: float = Field(0.3, gt=0)
    omega_count: int = Field(300, ge=1)
    delta_min: float | None = None
    delta_max: float | None = None
    delta_count: int = Field(1, ge=1)
    oracle_points: int = Field(0, ge=0)

    # bifurcate
    g_min: float = Field(0.0, ge=0)
    g_max: float = Field(0.05, gt=0)
    g_count: int = Field(21, ge=2)
    simulate_cycles: bool = True

    # map
    phi_e0_min: float = 0.0
    phi_e0_max: float = 4.0
    phi_e0_count: int = Field(161, ge=2)
    phi_e1_min: float = 0.0
    phi_e1_max: float = 10.0
    phi_e1_count: int = Field(201, ge=2)
    n_max: int = Field(4, ge=0)
    rule: Literal["nearest", "all"] = "nearest"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    unit_scale: float = Field(1.0, gt=0)
    drive: DriveParams
    qubit: QubitParams
    mech: MechanicalParams
    coupling: PhysicalCouplingParams | None = None
    run: RunSettings = RunSettings()

    @model_validator(mode="before")
    @classmethod
    def _resolve_physical_coupling(cls, data):
        """Fill mech.g from the coupling section when g is not given directly."""
        if not isinstance(data, dict) or not data.get("coupling"):
            return data
        mech = data.get("mech")
        if not isinstance(mech, dict) or "g" in mech:
            return data
        from fluxmech.services.rotating_frame import coupling_from_physical

        physical = PhysicalCouplingParams.model_validate(data["coupling"])
        data = dict(data)
        data["mech"] = {**mech, "g": coupling_from_physical(physical) / float(data.get("unit_scale", 1.0))}
        return data

    def model(self) -> ModelConfig:
        return ModelConfig(drive=self.drive, qubit=self.qubit, mech=self.mech, unit_scale=self.unit_scale)

    def flux_grid(self) -> FluxGridSpec:
        r = self.run
        return FluxGridSpec(
            phi_e0_min=r.phi_e0_min,
            phi_e0_max=r.phi_e0_max,
            phi_e0_count=r.phi_e0_count,
            phi_e1_min=r.phi_e1_min,
            phi_e1_max=r.phi_e1_max,
            phi_e1_count=r.phi_e1_count,
            n_max=r.n_max,
        )

    def resolved(self) -> dict:
        return self.model_dump(mode="json")


def payload_hash(payload: dict) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON form."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def config_hash(config: RunConfig) -> str:
    return payload_hash(config.resolved())


def _key_lines(text: str) -> dict[tuple[str, ...], int]:
    """1-based line of every mapping key, by dotted path."""
    lines: dict[tuple[str, ...], int] = {}

    def walk(node, prefix: tuple[str, ...]) -> None:
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                path = prefix + (str(key.value),)
                lines[path] = key.start_mark.line + 1
                walk(value, path)

    try:
        walk(yaml.compose(text), ())
    except yaml.YAMLError:
        pass
    return lines


def apply_overrides(raw: dict, overrides: list[str] | tuple[str, ...]) -> dict:
    """Apply ``section.key=value`` assignments; values are parsed as YAML scalars."""
    data = copy.deepcopy(raw)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} is not of the form section.key=value", field=key or None)
        parts = key.strip().split(".")
        target = data
        for part in parts[:-1]:
            node = target.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override inside scalar {part!r}", field=key)
            target = node
        target[parts[-1]] = yaml.safe_load(value) if value.strip() else None
    return data


def parse_run_config(text: str, overrides=(), source: str | None = None) -> RunConfig:
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"malformed configuration: {problem}", path=source, line=mark.line + 1 if mark else None) from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping of sections", path=source)

    prefix: tuple[str, ...] = ()
    if "config" in raw and "config_hash" in raw:
        logger.info(f"Replaying manifest {source} (hash {raw['config_hash'][:12]})")
        raw, prefix = raw["config"], ("config",)

    raw = apply_overrides(raw, overrides)
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = tuple(str(p) for p in error["loc"])
        lines = _key_lines(text)
        line = next((lines[prefix + loc[:n]] for n in range(len(loc), 0, -1) if prefix + loc[:n] in lines), None)
        more = f" (+{exc.error_count() - 1} more)" if exc.error_count() > 1 else ""
        raise ConfigError(f"{error['msg']}{more}", path=source, line=line, field=".".join(loc)) from exc


def load_run_config(path: Path | str, overrides=()) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"cannot read configuration {path}: {exc}") from exc
    return parse_run_config(text, overrides, source=str(path))
