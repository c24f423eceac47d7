from pathlib import Path
from typing import List

from app.models.simulation import ModeInit, RossbyRequest, RossbyResult, RunConfig, SimParams
from app.services.simulation_service import initial_stream
from app.sphere.diagnostics import phase_drift
from app.sphere.dynamics import run
from app.sphere.state import SimState
from app.utils.log import get_logger

logger = get_logger(__name__)

RELATIVE_TOLERANCE = 0.01
ABSOLUTE_TOLERANCE = 1e-6


def predicted_drift(l: int, omega: float) -> float:
    """Retrograde longitudinal drift -2 omega / (l(l+1)) of a linear harmonic mode"""
    return -2.0 * omega / (l * (l + 1))


class RossbyService:
    """Single-mode inviscid runs measuring the longitudinal precession of the mode"""

    def measure(self, request: RossbyRequest) -> RossbyResult:
        m = abs(request.m)
        config = RunConfig(
            sim=SimParams(L=request.L, mu_s=0.0, omega=request.omega, dt=request.dt, t_end=request.T),
            init=ModeInit(l=request.l, m=m, amplitude=request.amplitude),
        )
        times: List[float] = []
        coeffs: List[complex] = []

        def track(state: SimState, index: int) -> None:
            times.append(state.t)
            coeffs.append(complex(state.zeta.coeffs[request.l, m]))

        logger.info("rossby run: l=%d m=%d omega=%g T=%g", request.l, m, request.omega, request.T)
        run(config.sim, initial_stream(config), cadence=max(config.sim.n_steps, 1), on_step=track)

        measured = phase_drift(times, coeffs, m)
        predicted = predicted_drift(request.l, request.omega)
        if predicted == 0.0:
            error = abs(measured)
            passed = error <= ABSOLUTE_TOLERANCE
        else:
            error = abs(measured - predicted) / abs(predicted)
            passed = error <= RELATIVE_TOLERANCE
        return RossbyResult(
            l=request.l,
            m=request.m,
            omega=request.omega,
            measured_drift=measured,
            predicted_drift=predicted,
            relative_error=error,
            passed=passed,
        )

    @staticmethod
    def render(result: RossbyResult) -> str:
        return "\n".join(
            [
                f"l = {result.l}",
                f"m = {result.m}",
                f"omega = {result.omega!r}",
                f"measured_drift = {result.measured_drift!r}",
                f"predicted_drift = {result.predicted_drift!r}",
                f"relative_error = {result.relative_error!r}",
                f"passed = {str(result.passed).lower()}",
            ]
        ) + "\n"

    def write(self, result: RossbyResult, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(result))
        return path
