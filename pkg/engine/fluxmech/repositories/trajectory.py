import pandas as pd

from fluxmech.models.state import COORDINATE_NAMES, Trajectory
from fluxmech.repositories.base import BaseRepository


class TrajectoryRepository(BaseRepository[Trajectory]):
    def __init__(self, output_dir, stem: str = "trajectory"):
        super().__init__(output_dir, stem)

    def to_frame(self, item: Trajectory) -> pd.DataFrame:
        frame = pd.DataFrame(item.coords, columns=list(COORDINATE_NAMES))
        frame.insert(0, "t", item.times)
        return frame
