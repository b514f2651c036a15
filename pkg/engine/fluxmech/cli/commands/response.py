import argparse
import logging

import numpy as np

from fluxmech.cli.commands._shared import require_config
from fluxmech.cli.session import RunSession, flag_overrides
from fluxmech.repositories import ResponseRepository
from fluxmech.services.presets import DECAY_PRESETS
from fluxmech.services.response import chi_z_numeric, renormalized_mech, response_curves
from fluxmech.services.rotating_frame import derive_params
from fluxmech.services.sweeps import response_surface, run_rows

logger = logging.getLogger(__name__)

FLAGS = {
    "omega_min": "run.omega_min",
    "omega_max": "run.omega_max",
    "omega_count": "run.omega_count",
    "delta_min": "run.delta_min",
    "delta_max": "run.delta_max",
    "delta_count": "run.delta_count",
    "oracle_points": "run.oracle_points",
}

# frequencies checked by --oracle
ORACLE_POINTS = 12


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("response", parents=[common], help="Tabulate the qubit response function")
    parser.add_argument("--omega-min", dest="omega_min", type=float)
    parser.add_argument("--omega-max", dest="omega_max", type=float)
    parser.add_argument("--omega-count", dest="omega_count", type=int)
    parser.add_argument("--delta-min", dest="delta_min", type=float)
    parser.add_argument("--delta-max", dest="delta_max", type=float)
    parser.add_argument("--delta-count", dest="delta_count", type=int)
    parser.add_argument("--oracle-points", dest="oracle_points", type=int, help="Grid points checked by forced simulation")
    parser.add_argument(
        "--oracle",
        dest="oracle_points",
        action="store_const",
        const=ORACLE_POINTS,
        help=f"Check {ORACLE_POINTS} grid points by forced simulation",
    )
    parser.add_argument("--preset", choices=sorted(DECAY_PRESETS), help="Qubit decay rates (gamma1, gamma2)")
    parser.set_defaults(handler=run)


def _preset_overrides(name: str | None) -> list[str]:
    if name is None:
        return []
    gamma1, gamma2 = DECAY_PRESETS[name]
    return [f"qubit.gamma1={gamma1!r}", f"qubit.gamma2={gamma2!r}"]


def run(args: argparse.Namespace) -> int:
    require_config(args)
    session = RunSession.open("response", args, _preset_overrides(args.preset) + flag_overrides(args, FLAGS))
    r = session.config.run
    model = session.config.model()
    d = derive_params(model)
    omegas = np.linspace(r.omega_min, r.omega_max, r.omega_count)
    repository = ResponseRepository(session.output_dir)
    mech = renormalized_mech(d)
    summary = {
        "chi_at_omega_m": [mech.chi.real, mech.chi.imag],
        "gamma_m_tilde": mech.gamma_m_tilde,
        "omega_m_tilde": mech.omega_m_tilde,
        "sideband_resolution": d.sideband_resolution,
    }

    if r.delta_count > 1 and r.delta_min is not None and r.delta_max is not None:
        deltas = np.linspace(r.delta_min, r.delta_max, r.delta_count)
        surface = response_surface(deltas, omegas, model, session.workers)
        path = repository.save(surface, session.tag)
        session.finish([path], summary)
        return 0

    curves = response_curves(omegas, d)
    extra = {}
    if r.oracle_points > 0:
        picks = np.unique(np.linspace(0, len(omegas) - 1, r.oracle_points).round().astype(int))

        def oracle_row(i: int) -> np.ndarray:
            chi = chi_z_numeric(float(omegas[picks[i]]), d)
            return np.array([chi.real, chi.imag])

        measured = run_rows(oracle_row, len(picks), session.workers)
        re_col = np.full(len(omegas), np.nan)
        im_col = np.full(len(omegas), np.nan)
        re_col[picks], im_col[picks] = measured[:, 0], measured[:, 1]
        extra = {"re_chi_numeric": re_col, "im_chi_numeric": im_col}
        logger.info(f"Oracle evaluated at {len(picks)} frequencies")

    path = repository.save(curves, session.tag, delta=d.delta, extra=extra)
    summary["peak_omegas"] = [float(w) for w in curves.peak_omegas]
    session.finish([path], summary)
    return 0
