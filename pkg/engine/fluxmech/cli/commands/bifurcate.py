import argparse
import logging

import numpy as np

from fluxmech.cli.commands._shared import require_config
from fluxmech.cli.session import RunSession, flag_overrides
from fluxmech.core.exceptions import NoInstabilityError, ThresholdNotFoundError
from fluxmech.repositories import BranchRepository
from fluxmech.repositories.base import write_json
from fluxmech.services.bifurcation import continuation_sweep, g_crit_analytic, hopf_threshold
from fluxmech.services.rotating_frame import derive_params

logger = logging.getLogger(__name__)

FLAGS = {"g_min": "run.g_min", "g_max": "run.g_max", "g_count": "run.g_count", "simulate_cycles": "run.simulate_cycles"}


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("bifurcate", parents=[common], help="Equilibrium branch and Hopf threshold in g")
    parser.add_argument("--g-min", dest="g_min", type=float)
    parser.add_argument("--g-max", dest="g_max", type=float)
    parser.add_argument("--g-count", dest="g_count", type=int)
    parser.add_argument("--no-cycles", dest="simulate_cycles", action="store_const", const=False, default=None)
    parser.set_defaults(handler=run)


def threshold_summary(d, g_range: tuple[float, float]) -> dict:
    summary: dict = {"g_crit_analytic": None, "g_c_numeric": None, "hopf_frequency": None, "transversality": None}
    try:
        summary["g_crit_analytic"] = g_crit_analytic(d)
    except NoInstabilityError as exc:
        summary["note_analytic"] = str(exc)
    try:
        threshold = hopf_threshold(d, g_range)
    except ThresholdNotFoundError as exc:
        summary["note_numeric"] = str(exc)
    else:
        summary.update(
            g_c_numeric=threshold.g_c,
            hopf_frequency=threshold.frequency,
            transversality=threshold.transversality,
        )
    return summary


def run(args: argparse.Namespace) -> int:
    require_config(args)
    session = RunSession.open("bifurcate", args, flag_overrides(args, FLAGS))
    r = session.config.run
    d = derive_params(session.config.model())
    grid = np.linspace(r.g_min, r.g_max, r.g_count)

    branch = continuation_sweep(d, grid, simulate_cycles=r.simulate_cycles)
    branch_path = BranchRepository(session.output_dir).save(branch, session.tag)
    summary = threshold_summary(d, (r.g_min, r.g_max))
    summary.update(truncated=branch.truncated, diagnostic=branch.diagnostic, hopf_index=branch.hopf_index)
    threshold_path = write_json(summary, session.output_dir / f"threshold-{session.tag}.json")
    session.finish([branch_path, threshold_path], summary)
    return 0
