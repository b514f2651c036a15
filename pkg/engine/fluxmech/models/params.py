"""Validated, immutable parameter records.

All frequencies and rates are expressed in units of the drive frequency
unless a configuration carries a ``unit_scale``.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class DriveParams(_Frozen):
    """External flux drive and qubit gap."""

    eps0_phi_e0: float
    eps0_phi_e1: float = 0.0
    omega_drive: float = Field(1.0, gt=0)
    n_photon: int = Field(0, ge=0)
    delta_gap: float = Field(..., ge=0)


class QubitParams(_Frozen):
    gamma1: float = Field(..., ge=0)
    gamma2: float = Field(..., ge=0)
    sigma_z_eq: float = Field(-1.0, ge=-1.0, le=1.0)

    @model_validator(mode="after")
    def _check_dephasing(self) -> "QubitParams":
        if self.gamma2 < self.gamma1 / 2:
            raise ValueError(f"gamma2={self.gamma2} must be >= gamma1/2={self.gamma1 / 2}")
        return self


class MechanicalParams(_Frozen):
    """Oscillator frequency, damping and qubit coupling.

    ``quality_factor`` may be given instead of ``gamma_m``.
    """

    omega_m: float = Field(..., gt=0)
    gamma_m: float = Field(..., ge=0)
    g: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def _from_quality_factor(cls, data):
        if isinstance(data, dict) and "quality_factor" in data:
            data = dict(data)
            q = data.pop("quality_factor")
            if "gamma_m" in data:
                raise ValueError("give either gamma_m or quality_factor, not both")
            if q is None or float(q) <= 0:
                raise ValueError("quality_factor must be positive")
            data["gamma_m"] = float(data["omega_m"]) / float(q)
        return data

    @property
    def quality_factor(self) -> float:
        return self.omega_m / self.gamma_m if self.gamma_m > 0 else math.inf


class PhysicalCouplingParams(_Frozen):
    """Dimensionful inputs for the magnetomotive coupling (SI by default)."""

    b_field: float = Field(..., gt=0)
    length_eff: float = Field(..., gt=0)
    i_cc: float = Field(..., gt=0)
    mass_eff: float = Field(..., gt=0)
    omega_m: float = Field(..., gt=0)
    hbar: float = Field(1.054571817e-34, gt=0)


class ModelConfig(_Frozen):
    drive: DriveParams
    qubit: QubitParams
    mech: MechanicalParams
    unit_scale: float = Field(1.0, gt=0)

    def with_coupling(self, g: float) -> "ModelConfig":
        return self.model_copy(update={"mech": self.mech.model_copy(update={"g": float(g)})})

    def with_drive(self, **changes) -> "ModelConfig":
        return self.model_copy(update={"drive": self.drive.model_copy(update=changes)})


class DerivedParams(_Frozen):
    """Rotating-frame quantities together with the inputs they came from."""

    delta: float
    delta_n: float
    omega_rabi: float
    gamma1n: float
    gamma2n: float
    g_interaction: float
    s_z_eq_bar: float
    sigma_detune: float

    gamma1: float
    gamma2: float
    sigma_z_eq: float
    omega_m: float
    gamma_m: float
    g: float

    @property
    def dressed_projection(self) -> float:
        """Lab-frame s_z carried by one unit of dressed inversion."""
        return self.delta / abs(self.omega_rabi)

    @property
    def sideband_resolution(self) -> float:
        return self.omega_m / self.gamma2n if self.gamma2n > 0 else math.inf


class FluxGridSpec(_Frozen):
    """Bias/amplitude grid for damping maps."""

    phi_e0_min: float
    phi_e0_max: float
    phi_e0_count: int = Field(..., ge=2)
    phi_e1_min: float = 0.0
    phi_e1_max: float
    phi_e1_count: int = Field(..., ge=2)
    n_max: int = Field(4, ge=0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "FluxGridSpec":
        if self.phi_e0_max <= self.phi_e0_min or self.phi_e1_max <= self.phi_e1_min:
            raise ValueError("grid ranges must be increasing")
        return self

    def phi_e0_axis(self) -> np.ndarray:
        return np.linspace(self.phi_e0_min, self.phi_e0_max, self.phi_e0_count)

    def phi_e1_axis(self) -> np.ndarray:
        return np.linspace(self.phi_e1_min, self.phi_e1_max, self.phi_e1_count)
