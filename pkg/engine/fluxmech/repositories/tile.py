import hashlib
from pathlib import Path

import numpy as np
import pandas as pd

from fluxmech.models.results import MapTile
from fluxmech.repositories.base import BaseRepository, write_csv, write_json


class TileRepository(BaseRepository[MapTile]):
    """Long-format CSV (x, y, layers...) plus a JSON sidecar."""

    def __init__(self, output_dir, stem: str = "map"):
        super().__init__(output_dir, stem)

    def to_frame(self, item: MapTile) -> pd.DataFrame:
        x_grid, y_grid = np.meshgrid(item.x_axis, item.y_axis)
        columns = {item.x_label: x_grid.ravel(), item.y_label: y_grid.ravel()}
        for name, layer in item.layers.items():
            columns[name] = layer.ravel()
        return pd.DataFrame(columns)

    def sidecar_path(self, tag: str) -> Path:
        return self.output_dir / f"{self.stem}-{tag}.json"

    def save(self, item: MapTile, tag: str) -> Path:
        path = write_csv(self.to_frame(item), self.path_for(tag))
        sidecar = {
            "quantity": item.quantity,
            "x": {"label": item.x_label, "min": float(item.x_axis[0]), "max": float(item.x_axis[-1]), "count": len(item.x_axis)},
            "y": {"label": item.y_label, "min": float(item.y_axis[0]), "max": float(item.y_axis[-1]), "count": len(item.y_axis)},
            "parameters": item.parameters,
            "normalization": item.normalization(),
            "csv": path.name,
            "sha256": hashlib.sha256(path.read_bytes()).hexdigest(),
        }
        write_json(sidecar, self.sidecar_path(tag))
        return path
