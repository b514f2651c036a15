import math

import pandas as pd

from fluxmech.models.results import BranchData
from fluxmech.models.state import COORDINATE_NAMES
from fluxmech.repositories.base import BaseRepository

CYCLE_COLUMNS = ("cycle_s_z_max", "cycle_s_z_min", "cycle_abs_alpha_max", "cycle_abs_alpha_min", "cycle_amp_alpha", "cycle_freq")


class BranchRepository(BaseRepository[BranchData]):
    def __init__(self, output_dir, stem: str = "branch"):
        super().__init__(output_dir, stem)

    def to_frame(self, item: BranchData) -> pd.DataFrame:
        rows = []
        for point in item.points:
            eq = point.equilibrium
            row = {"g": point.g, "stable": int(eq.stable)}
            row.update(dict(zip(COORDINATE_NAMES, eq.state.to_array())))
            for k, value in enumerate(eq.eigenvalues):
                row[f"eig_re_{k}"] = value.real
                row[f"eig_im_{k}"] = value.imag
            cycle = point.cycle
            if cycle is None:
                row.update({name: math.nan for name in CYCLE_COLUMNS})
            else:
                row.update(
                    {
                        "cycle_s_z_max": cycle.extrema["s_z_max"],
                        "cycle_s_z_min": cycle.extrema["s_z_min"],
                        "cycle_abs_alpha_max": cycle.extrema["abs_alpha_max"],
                        "cycle_abs_alpha_min": cycle.extrema["abs_alpha_min"],
                        "cycle_amp_alpha": cycle.amp_alpha,
                        "cycle_freq": cycle.freq,
                    }
                )
            rows.append(row)
        return pd.DataFrame(rows)
