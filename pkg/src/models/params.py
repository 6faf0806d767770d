import math
from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict, Field, field_validator

if TYPE_CHECKING:
    from src.domain.spinspace import SpinBasis


class ModelParams(BaseModel):
    """
    Dimensionless constants of the kicked two-component condensate.

    The interaction is stored as g_c = gL and the perturbation as
    sigma = epsilon / hbar_eff, so one parameter set describes the same
    classical regime for every atom number. The basis-dependent values
    g and epsilon are always derived on demand.
    """

    model_config = ConfigDict(frozen=True)

    mu: float = 1.0
    g_c: float
    K: float
    T: float = Field(default=1.0, gt=0.0)
    sigma: float = Field(default=0.0, ge=0.0)

    @field_validator("mu", "g_c", "K", "T", "sigma")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    def g(self, basis: "SpinBasis") -> float:
        return self.g_c / basis.L_float

    def epsilon(self, basis: "SpinBasis") -> float:
        return self.sigma * basis.hbar_eff

    def with_coupling(self, K: float) -> "ModelParams":
        return self.model_copy(update={"K": K})

    def with_sigma(self, sigma: float) -> "ModelParams":
        return self.model_copy(update={"sigma": sigma})


class SphereAngle(BaseModel):
    """Point (theta, phi) on the Bloch sphere; theta=pi is the lowest-weight pole."""

    model_config = ConfigDict(frozen=True)

    theta: float = Field(ge=0.0, le=math.pi)
    phi: float = Field(default=0.0, ge=0.0, lt=2.0 * math.pi)

    @classmethod
    def wrapped(cls, theta: float, phi: float) -> "SphereAngle":
        """Build an angle, clipping theta to [0, pi] and wrapping phi into [0, 2pi)."""
        phi = math.fmod(phi, 2.0 * math.pi)
        if phi < 0.0:
            phi += 2.0 * math.pi
        if phi >= 2.0 * math.pi:
            phi = 0.0
        return cls(theta=min(max(theta, 0.0), math.pi), phi=phi)

    @property
    def alpha(self) -> complex:
        """Displacement parameter (pi - theta)/2 * exp(-i phi)."""
        return 0.5 * (math.pi - self.theta) * complex(math.cos(self.phi), -math.sin(self.phi))
