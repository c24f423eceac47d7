"""
Vorticity form of the rotating-sphere momentum equation and its time integration.

    d zeta/dt = -J(psi, zeta + f_c) + d_l zeta,    f_c = 2 omega cos phi,
    d_l = -mu_s (l(l+1) - 2) / a^2

The diffusion is propagated exactly through integrating factors, the advection of the
absolute vorticity with classical RK4.
"""

from typing import Callable, Iterable, List, Optional, Union

import numpy as np

from app.models.simulation import DiagnosticsRecord, SimParams
from app.sphere.diagnostics import momentum_forcing, record
from app.sphere.fields import StreamFunction, VelocityGrid, helmholtz_project
from app.sphere.geometry import Grid, GridScalar, coriolis_parameter
from app.sphere.harmonics import SpectralScalar, analyze, degrees, first_derivatives
from app.sphere.state import SimState
from app.utils.errors import DivergenceError, InvalidParameterError, StepSizeError

COURANT_LIMIT = 0.5

Observer = Callable[[DiagnosticsRecord], None]


def jacobian(A: SpectralScalar, B: SpectralScalar, grid: Grid) -> SpectralScalar:
    """(1/(a^2 sin phi)) (dA/dphi dB/dtheta - dA/dtheta dB/dphi), products formed on the grid"""
    a_theta, a_phi = first_derivatives(A, grid)
    b_theta, b_phi = first_derivatives(B, grid)
    sin = grid.column(grid.sin_phi)
    values = (a_phi * b_theta - a_theta * b_phi) / (grid.a ** 2 * sin)
    return analyze(GridScalar(values=values, grid=grid))


def planetary_vorticity(grid: Grid, omega: float) -> SpectralScalar:
    return analyze(coriolis_parameter(grid, omega))


def diffusion_symbol(params: SimParams, l: Union[int, np.ndarray]):
    l = np.asarray(l, dtype=float)
    if np.any(l < 0) or np.any(l > params.L):
        raise InvalidParameterError(f"degree must lie in [0, {params.L}], got {l.tolist()}")
    # +0.0 turns the l = 1 value into an exact positive zero
    rate = -params.mu_s * (l * (l + 1.0) - 2.0) / params.a ** 2 + 0.0
    return float(rate) if np.ndim(rate) == 0 else rate


def _advective_tendency(zeta: SpectralScalar, params: SimParams, grid: Grid, f_c: SpectralScalar) -> SpectralScalar:
    psi = StreamFunction.gauged(zeta.scaled_by_degree(_stream_factor(grid)))
    tendency = -jacobian(psi.psi, zeta + f_c, grid)
    tendency.coeffs[0, 0] = 0.0
    return tendency


def _stream_factor(grid: Grid) -> np.ndarray:
    l = degrees(grid.L)
    factor = np.zeros_like(l)
    factor[1:] = grid.a ** 2 / (l[1:] * (l[1:] + 1.0))
    return factor


def rhs_vorticity(state: SimState) -> SpectralScalar:
    grid = state.grid
    params = state.params
    advective = _advective_tendency(state.zeta, params, grid, planetary_vorticity(grid, params.omega))
    diffusive = state.zeta.scaled_by_degree(diffusion_symbol(params, degrees(params.L)))
    tendency = advective + diffusive
    tendency.coeffs[0, 0] = 0.0
    return tendency


def rhs_velocity_oracle(state: SimState) -> VelocityGrid:
    """-P_H(nabla_u u + C u - mu_s (Delta + kappa) u) evaluated directly in velocity form"""
    return -helmholtz_project(momentum_forcing(state))


def admissible_step(state: SimState) -> float:
    """Largest dt with dt * max over nodes of |u_theta|/(a sin phi dtheta), |u_phi|/(a dphi) <= 0.5"""
    grid = state.grid
    u = state.velocity()
    sin = grid.column(grid.sin_phi)
    rates = np.maximum(
        np.abs(u.u_theta_hat) / (grid.a * sin * grid.dtheta),
        np.abs(u.u_phi_hat) / (grid.a * grid.dphi),
    )
    peak = float(np.max(rates))
    if not np.isfinite(peak):
        return 0.0
    return np.inf if peak == 0.0 else COURANT_LIMIT / peak


def check_step_size(state: SimState) -> None:
    admissible = admissible_step(state)
    if state.params.dt > admissible:
        raise StepSizeError(state.params.dt, admissible)


def step(state: SimState) -> SimState:
    """One integrating-factor RK4 step"""
    check_step_size(state)
    params = state.params
    grid = state.grid
    dt = params.dt
    f_c = planetary_vorticity(grid, params.omega)
    d = diffusion_symbol(params, degrees(params.L))
    full = np.exp(d * dt)
    half = np.exp(d * dt / 2.0)

    def N(z: SpectralScalar) -> SpectralScalar:
        return _advective_tendency(z, params, grid, f_c)

    zeta = state.zeta
    k1 = N(zeta)
    k2 = N((zeta + (dt / 2.0) * k1).scaled_by_degree(half))
    k3 = N(zeta.scaled_by_degree(half) + (dt / 2.0) * k2)
    k4 = N(zeta.scaled_by_degree(full) + dt * k3.scaled_by_degree(half))
    increment = k1.scaled_by_degree(full) + 2.0 * (k2 + k3).scaled_by_degree(half) + k4
    new_zeta = zeta.scaled_by_degree(full) + (dt / 6.0) * increment
    new_zeta.coeffs[0, 0] = 0.0
    return SimState(t=state.t + dt, zeta=new_zeta, params=params)


def run(
    params: SimParams,
    init: StreamFunction,
    observers: Iterable[Observer] = (),
    cadence: int = 1,
    on_step: Optional[Callable[[SimState, int], None]] = None,
) -> List[DiagnosticsRecord]:
    """Advance floor(t_end/dt) steps, recording at step 0 and every `cadence` steps

    on_step, when given, sees every state (step 0 included) before it is recorded.
    """
    if cadence < 1:
        raise InvalidParameterError(f"diagnostics cadence must be >= 1, got {cadence}")
    if init.L != params.L or init.a != params.a:
        raise InvalidParameterError(
            f"initial stream function (L={init.L}, a={init.a}) does not match parameters (L={params.L}, a={params.a})"
        )
    observers = list(observers)
    state = SimState.from_stream(init, params)
    records: List[DiagnosticsRecord] = []

    def emit(current: SimState) -> None:
        entry = record(current)
        records.append(entry)
        for observer in observers:
            observer(entry)

    if on_step is not None:
        on_step(state, 0)
    emit(state)
    for index in range(1, params.n_steps + 1):
        last_good = state.t
        state = step(state)
        if not state.zeta.is_finite():
            raise DivergenceError(last_good)
        if on_step is not None:
            on_step(state, index)
        if index % cadence == 0:
            emit(state)
    return records
