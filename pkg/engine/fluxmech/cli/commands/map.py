import argparse

from fluxmech.cli.commands._shared import require_config
from fluxmech.cli.session import RunSession, flag_overrides
from fluxmech.repositories import TileRepository
from fluxmech.services.superposition import get_rule
from fluxmech.services.sweeps import damping_map

FLAGS = {
    "phi_e0_min": "run.phi_e0_min",
    "phi_e0_max": "run.phi_e0_max",
    "phi_e0_count": "run.phi_e0_count",
    "phi_e1_min": "run.phi_e1_min",
    "phi_e1_max": "run.phi_e1_max",
    "phi_e1_count": "run.phi_e1_count",
    "n_max": "run.n_max",
    "rule": "run.rule",
}


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("map", parents=[common], help="Damping correction over the flux drive plane")
    parser.add_argument("--phi0-min", dest="phi_e0_min", type=float)
    parser.add_argument("--phi0-max", dest="phi_e0_max", type=float)
    parser.add_argument("--phi0-count", dest="phi_e0_count", type=int)
    parser.add_argument("--phi1-min", dest="phi_e1_min", type=float)
    parser.add_argument("--phi1-max", dest="phi_e1_max", type=float)
    parser.add_argument("--phi1-count", dest="phi_e1_count", type=int)
    parser.add_argument("--n-max", dest="n_max", type=int)
    parser.add_argument("--rule", choices=["nearest", "all"])
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    require_config(args)
    session = RunSession.open("map", args, flag_overrides(args, FLAGS))
    repository = TileRepository(session.output_dir, stem="damping-map")
    tile = damping_map(session.config.flux_grid(), session.config.model(), get_rule(session.config.run.rule), session.workers)
    path = repository.save(tile, session.tag)
    normalization = tile.normalization()[tile.quantity]
    session.finish([path, repository.sidecar_path(session.tag)], {"normalization": normalization})
    return 0
