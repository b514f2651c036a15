import json
import logging
from pathlib import Path
from typing import Generic, TypeVar

import numpy as np
import pandas as pd

from fluxmech.core.config import FLOAT_FORMAT
from fluxmech.core.exceptions import ArtifactIOError

T = TypeVar("T")

logger = logging.getLogger(__name__)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc}") from exc
    logger.info(f"Wrote {path} ({len(frame)} rows)")
    return path


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def write_json(payload: dict, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")
    except (OSError, TypeError) as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc}") from exc
    return path


def read_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ArtifactIOError(f"cannot read {path}: {exc}") from exc


class BaseRepository(Generic[T]):
    """Persists one kind of result as a CSV artifact under ``output_dir``."""

    suffix = ".csv"

    def __init__(self, output_dir: Path | str, stem: str):
        self.output_dir = Path(output_dir)
        self.stem = stem

    def path_for(self, tag: str) -> Path:
        return self.output_dir / f"{self.stem}-{tag}{self.suffix}"

    def to_frame(self, item: T) -> pd.DataFrame:
        raise NotImplementedError

    def save(self, item: T, tag: str) -> Path:
        return write_csv(self.to_frame(item), self.path_for(tag))

    def load(self, path: Path | str) -> pd.DataFrame:
        try:
            return pd.read_csv(path, float_precision="round_trip")
        except (OSError, ValueError) as exc:
            raise ArtifactIOError(f"cannot read {path}: {exc}") from exc
