from dataclasses import dataclass

from app.models.simulation import SimParams
from app.sphere.fields import (
    StreamFunction,
    VelocityGrid,
    stream_from_vorticity,
    velocity_from_stream,
    vorticity_from_stream,
)
from app.sphere.geometry import Grid, build_grid
from app.sphere.harmonics import GAUGE_TOLERANCE, SpectralScalar
from app.utils.errors import GaugeViolationError, InvalidParameterError


def grid_for(params: SimParams) -> Grid:
    return build_grid(params.L, params.a, params.dealias)


@dataclass(frozen=True, eq=False)
class SimState:
    """Spectral vorticity at time t; the stream function and velocity are derived views"""

    t: float
    zeta: SpectralScalar
    params: SimParams

    def __post_init__(self):
        if self.zeta.L != self.params.L or self.zeta.a != self.params.a:
            raise InvalidParameterError(
                f"vorticity (L={self.zeta.L}, a={self.zeta.a}) does not match parameters "
                f"(L={self.params.L}, a={self.params.a})"
            )
        magnitude = float(abs(self.zeta.coeffs[0, 0]))
        # total vorticity on a closed surface vanishes
        if magnitude > GAUGE_TOLERANCE:
            raise GaugeViolationError(magnitude, GAUGE_TOLERANCE)

    @classmethod
    def from_stream(cls, psi: StreamFunction, params: SimParams, t: float = 0.0) -> "SimState":
        return cls(t=t, zeta=vorticity_from_stream(psi), params=params)

    @property
    def grid(self) -> Grid:
        return grid_for(self.params)

    def stream(self) -> StreamFunction:
        return stream_from_vorticity(self.zeta)

    def velocity(self) -> VelocityGrid:
        return velocity_from_stream(self.stream(), self.grid)
