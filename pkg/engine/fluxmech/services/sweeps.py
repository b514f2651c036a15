"""Gridded sweeps: damping maps over the flux drive and response surfaces."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from ..core.config import WORKERS
from ..core.exceptions import DomainError
from ..models.params import FluxGridSpec, ModelConfig
from ..models.results import MapTile
from .response import chi_z_kernel
from .rotating_frame import bessel_jn, derive_rotating_frame, secondary_arrays
from .superposition import NearestResonanceWindow, SuperpositionRule

logger = logging.getLogger(__name__)


def run_rows(compute_row: Callable[[int], np.ndarray], n_rows: int, workers: int | None = None) -> np.ndarray:
    """Evaluate rows independently and stack them in index order."""
    workers = workers or WORKERS
    if workers <= 1 or n_rows <= 1:
        rows = [compute_row(i) for i in range(n_rows)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(compute_row, range(n_rows)))
    return np.vstack(rows)


def _model_parameters(config: ModelConfig) -> dict:
    return config.model_dump(mode="json")


def damping_map(
    grid: FluxGridSpec,
    config: ModelConfig,
    rule: SuperpositionRule | None = None,
    workers: int | None = None,
) -> MapTile:
    """Mechanical damping correction -g Im chi_z(omega_m) over (eps0 phi_e0, eps0 phi_e1).

    Rows follow the drive amplitude axis, columns the bias axis. Bias and
    drive offsets in ``config.drive`` are ignored; the grid supplies them.
    """
    rule = rule or NearestResonanceWindow()
    drive, qubit, mech = config.drive, config.qubit, config.mech
    omega_d = drive.omega_drive
    phi0 = grid.phi_e0_axis()
    phi1 = grid.phi_e1_axis()

    def compute_row(i: int) -> np.ndarray:
        total = np.zeros_like(phi0)
        for n in range(grid.n_max + 1):
            delta = phi0 - n * omega_d
            mask = rule.include(delta, omega_d)
            if not np.any(mask):
                continue
            delta_n = drive.delta_gap * bessel_jn(n, phi1[i] / omega_d)
            arrays = secondary_arrays(delta, delta_n, qubit.gamma1, qubit.gamma2, qubit.sigma_z_eq, mech.g)
            chi = chi_z_kernel(
                mech.omega_m, arrays.omega_rabi, arrays.g_interaction, arrays.gamma1n, arrays.gamma2n, qubit.gamma2
            )
            total += np.where(mask & ~arrays.degenerate, -mech.g * chi.imag, 0.0)
        return total

    values = run_rows(compute_row, len(phi1), workers)
    logger.info(f"Damping map {values.shape} rule={rule.name} range=[{values.min():.4g}, {values.max():.4g}]")
    return MapTile(
        quantity="delta_gamma_m",
        x_label="eps0_phi_e0",
        y_label="eps0_phi_e1",
        x_axis=phi0,
        y_axis=phi1,
        layers={"delta_gamma_m": values},
        parameters={"model": _model_parameters(config), "grid": grid.model_dump(), "rule": rule.name},
    )


def response_surface(delta_grid, omega_grid, config: ModelConfig, workers: int | None = None) -> MapTile:
    """chi_z over (omega, delta) at the configured dressed gap Delta_n."""
    delta_axis = np.asarray(delta_grid, dtype=float)
    omega_axis = np.asarray(omega_grid, dtype=float)
    if delta_axis.size == 0 or omega_axis.size == 0:
        raise DomainError("response surface needs non-empty delta and omega grids")
    qubit, mech = config.qubit, config.mech
    _, delta_n = derive_rotating_frame(config.drive)

    def compute_row(i: int) -> np.ndarray:
        arrays = secondary_arrays(delta_axis[i], delta_n, qubit.gamma1, qubit.gamma2, qubit.sigma_z_eq, mech.g)
        if bool(arrays.degenerate):
            return np.zeros_like(omega_axis, dtype=complex)
        return chi_z_kernel(
            omega_axis, arrays.omega_rabi, arrays.g_interaction, arrays.gamma1n, arrays.gamma2n, qubit.gamma2
        )

    chi = run_rows(compute_row, len(delta_axis), workers)
    return MapTile(
        quantity="im_chi",
        x_label="omega",
        y_label="delta",
        x_axis=omega_axis,
        y_axis=delta_axis,
        layers={
            "re_chi": chi.real,
            "im_chi": chi.imag,
            "abs_chi": np.abs(chi),
            "arg_chi": np.angle(chi),
        },
        parameters={"model": _model_parameters(config), "delta_n": float(delta_n)},
    )
