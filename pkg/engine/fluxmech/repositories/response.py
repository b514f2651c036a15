import numpy as np
import pandas as pd

from fluxmech.models.results import MapTile, ResponseCurves
from fluxmech.repositories.base import BaseRepository, write_csv

RESPONSE_COLUMNS = ["omega", "delta", "re_chi", "im_chi", "abs_chi", "arg_chi"]


class ResponseRepository(BaseRepository[MapTile | ResponseCurves]):
    """Response tables in (omega, delta, Re, Im, |chi|, arg chi) layout."""

    def __init__(self, output_dir, stem: str = "response"):
        super().__init__(output_dir, stem)

    def to_frame(self, item, delta: float | None = None) -> pd.DataFrame:
        if isinstance(item, ResponseCurves):
            omega = item.omega
            chi = item.chi
            deltas = np.full(omega.shape, np.nan if delta is None else delta)
        else:
            omega_grid, delta_grid = np.meshgrid(item.x_axis, item.y_axis)
            omega, deltas = omega_grid.ravel(), delta_grid.ravel()
            chi = (item.layers["re_chi"] + 1j * item.layers["im_chi"]).ravel()
        return pd.DataFrame(
            {
                "omega": omega,
                "delta": deltas,
                "re_chi": chi.real,
                "im_chi": chi.imag,
                "abs_chi": np.abs(chi),
                "arg_chi": np.angle(chi),
            },
            columns=RESPONSE_COLUMNS,
        )

    def save(self, item, tag: str, delta: float | None = None, extra: dict | None = None):
        frame = self.to_frame(item, delta)
        for name, values in (extra or {}).items():
            frame[name] = values
        return write_csv(frame, self.path_for(tag))
