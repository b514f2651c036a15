from .branch import BranchRepository
from .manifest import ManifestRepository
from .response import ResponseRepository
from .tile import TileRepository
from .trajectory import TrajectoryRepository

__all__ = ["BranchRepository", "ManifestRepository", "ResponseRepository", "TileRepository", "TrajectoryRepository"]
