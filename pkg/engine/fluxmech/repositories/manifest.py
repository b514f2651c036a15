from dataclasses import asdict
from pathlib import Path

from fluxmech.models.results import RunManifest
from fluxmech.repositories.base import BaseRepository, read_json, write_json


class ManifestRepository(BaseRepository[RunManifest]):
    suffix = ".manifest.json"

    def __init__(self, output_dir, stem: str = "run"):
        super().__init__(output_dir, stem)

    def save(self, item: RunManifest, tag: str) -> Path:
        return write_json(asdict(item), self.path_for(tag))

    def load(self, path: Path | str) -> RunManifest:
        return RunManifest(**read_json(Path(path)))
