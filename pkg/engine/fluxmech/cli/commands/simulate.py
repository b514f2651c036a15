import argparse
import logging

from fluxmech.cli.commands._shared import require_config
from fluxmech.cli.session import RunSession, flag_overrides
from fluxmech.core.exceptions import EstimationError, IntegrationError
from fluxmech.models.state import SystemState
from fluxmech.repositories import TrajectoryRepository
from fluxmech.services.bifurcation import find_equilibrium
from fluxmech.services.dynamics import integrate
from fluxmech.services.estimators import limit_cycle_measure
from fluxmech.services.rotating_frame import derive_params

logger = logging.getLogger(__name__)

FLAGS = {"t_end": "run.t_end", "rtol": "run.rtol", "atol": "run.atol", "sample_dt": "run.sample_dt", "initial": "run.initial"}


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("simulate", parents=[common], help="Integrate the coupled equations of motion")
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--rtol", type=float)
    parser.add_argument("--atol", type=float)
    parser.add_argument("--sample-dt", dest="sample_dt", type=float)
    parser.add_argument("--initial", choices=["equilibrium", "custom"])
    parser.set_defaults(handler=run)


def initial_state(session: RunSession, d) -> SystemState:
    r = session.config.run
    if r.initial == "custom":
        return SystemState(complex(r.s_minus_re, r.s_minus_im), r.s_z, complex(r.alpha_re, r.alpha_im))
    return find_equilibrium(d).state.perturbed(d_alpha=r.kick_alpha)


def run(args: argparse.Namespace) -> int:
    require_config(args)
    session = RunSession.open("simulate", args, flag_overrides(args, FLAGS))
    r = session.config.run
    d = derive_params(session.config.model())
    repository = TrajectoryRepository(session.output_dir)

    try:
        trajectory = integrate(initial_state(session, d), d, (r.t_start, r.t_end), (r.rtol, r.atol), r.sample_dt)
    except IntegrationError as exc:
        outputs = []
        if exc.partial is not None and len(exc.partial):
            outputs.append(repository.save(exc.partial, f"{session.tag}-partial"))
        session.finish(outputs, {"error": str(exc), "t_fail": exc.t_fail}, status="failed")
        raise

    path = repository.save(trajectory, session.tag)
    final = trajectory.final_state
    summary = {
        "n_accepted": trajectory.stats.n_accepted,
        "n_rejected": trajectory.stats.n_rejected,
        "nfev": trajectory.stats.nfev,
        "final_state": [final.s_minus.real, final.s_minus.imag, final.s_z, final.alpha.real, final.alpha.imag],
    }
    try:
        cycle = limit_cycle_measure(trajectory, min_cycles=10)
    except EstimationError as exc:
        logger.info(f"No cycle summary: {exc}")
    else:
        summary["cycle"] = {
            "amp_alpha": cycle.amp_alpha,
            "amp_s_minus": cycle.amp_s_minus,
            "mean_s_z": cycle.mean_s_z,
            "freq": cycle.freq,
            "converged": cycle.converged,
        }
    session.finish([path], summary)
    return 0
