import argparse
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from fluxmech.core import config
from fluxmech.core.runconfig import RunConfig, config_hash, load_run_config
from fluxmech.models.results import RunManifest
from fluxmech.repositories import ManifestRepository

logger = logging.getLogger(__name__)


def flag_overrides(args: argparse.Namespace, mapping: dict[str, str]) -> list[str]:
    """Turn command flags that were given into ``section.key=value`` overrides."""
    overrides = []
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        overrides.append(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}")
    return overrides


@dataclass
class RunSession:
    """One CLI invocation: resolved config, output location and manifest."""

    command: str
    config: RunConfig
    output_dir: Path
    workers: int
    started: float = field(default_factory=time.perf_counter)

    @classmethod
    def open(cls, command: str, args: argparse.Namespace, extra: list[str] | None = None) -> "RunSession":
        overrides = list(args.set or []) + list(extra or [])
        run_config = load_run_config(args.config, overrides)
        output_dir = Path(args.output_dir or config.OUTPUT_DIR)
        session = cls(command, run_config, output_dir, args.workers or config.WORKERS)
        logger.info(f"[{command}] config hash {session.hash[:12]}, output to {output_dir}")
        return session

    @property
    def hash(self) -> str:
        return config_hash(self.config)

    @property
    def tag(self) -> str:
        return self.hash[:12]

    def finish(self, outputs: list[Path], summary: dict | None = None, status: str = "ok") -> Path:
        manifest = RunManifest(
            command=self.command,
            version=config.VERSION,
            config_hash=self.hash,
            config=self.config.resolved(),
            wall_time=round(time.perf_counter() - self.started, 3),
            outputs=[Path(p).name for p in outputs],
            status=status,
            summary=summary or {},
        )
        path = ManifestRepository(self.output_dir, self.command).save(manifest, self.tag)
        logger.info(f"[{self.command}] manifest {path}")
        return path
