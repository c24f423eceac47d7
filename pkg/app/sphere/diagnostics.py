"""
Observables along trajectories and the fits made on them.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from app.models.simulation import DiagnosticsRecord
from app.sphere.fields import (
    VelocityGrid,
    apply_K,
    contract_gradient,
    covariant_gradient_from_potentials,
    deformation_norm_sq,
    divergence,
    divergence_on_grid,
    h1_norm_sq,
    inner_product,
    killing_basis,
    norm_sq,
    project_onto_E,
    vector_laplacian_kappa,
    velocity_from_stream,
)
from app.sphere.geometry import GridScalar
from app.sphere.harmonics import SpectralScalar, invert_laplacian, synthesize
from app.sphere.state import SimState
from app.utils.errors import DegenerateFitError, PreconditionError

KORN_DEGENERACY = 1e-14
ORTHOGONALITY_TOLERANCE = 1e-10


def l1_amplitudes(psi: SpectralScalar) -> Tuple[float, float, float]:
    """|psi_{1,-1}|, |psi_{1,0}|, |psi_{1,1}|

    psi is real, so psi_{1,-1} = -conj(psi_{1,1}) and the first and last entries always agree.
    They measure the size of the tilt, not its direction: an x-tilt and a y-tilt of the same
    rate give the same triple.
    """
    tilted = float(abs(psi.coeffs[1, 1]))
    return (tilted, float(abs(psi.coeffs[1, 0])), tilted)


def record(state: SimState) -> DiagnosticsRecord:
    grid = state.grid
    psi = state.stream()
    u = velocity_from_stream(psi, grid)
    c_z, residual = project_onto_E(u)
    return DiagnosticsRecord(
        t=state.t,
        energy=norm_sq(u),
        enstrophy=grid.a ** 2 * state.zeta.power(),
        c_z=c_z,
        amp_l1=l1_amplitudes(psi.psi),
        deformation=deformation_norm_sq(u),
        residual=math.sqrt(max(norm_sq(residual), 0.0)),
        div_max=divergence_on_grid(u).max_norm(),
    )


def momentum_forcing(state: SimState) -> VelocityGrid:
    """nabla_u u + C u - mu_s (Delta + kappa) u for the current velocity"""
    grid = state.grid
    params = state.params
    psi = state.stream()
    u = velocity_from_stream(psi, grid)
    tensor = covariant_gradient_from_potentials(psi, SpectralScalar.zeros(grid.L, grid.a), grid)
    advection = contract_gradient(tensor, u)
    coriolis = grid.column(-2.0 * params.omega * grid.cos_phi) * apply_K(u)
    return advection + coriolis - params.mu_s * vector_laplacian_kappa(u)


def recover_pressure(state: SimState) -> GridScalar:
    """Mean-zero pressure with grad pi = -(nabla_u u + C u - mu_s (Delta + kappa) u) up to its divergence-free part"""
    forcing = momentum_forcing(state)
    return synthesize(-invert_laplacian(divergence(forcing)), state.grid)


def fit_log_rate(times: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """Least-squares rate r of values ~ exp(r t) and the r^2 of the log-linear fit"""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size < 2:
        raise DegenerateFitError(f"need at least two samples to fit a rate, got {t.size}")
    if np.any(~np.isfinite(y)) or np.any(y <= 0.0):
        raise DegenerateFitError("values must be positive and finite over the fit window")
    if np.ptp(t) == 0.0:
        raise DegenerateFitError("fit window has zero time extent")
    log_y = np.log(y)
    fit = stats.linregress(t, log_y)
    r_squared = 1.0 if np.ptp(log_y) == 0.0 else float(fit.rvalue ** 2)
    return float(fit.slope), r_squared


def _window(records: Sequence[DiagnosticsRecord], window: Optional[Tuple[float, float]]):
    if window is None:
        return list(records)[len(records) // 2:]
    t1, t2 = window
    return [r for r in records if t1 <= r.t <= t2]


def fit_decay_rate(
    records: Sequence[DiagnosticsRecord],
    window: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float]:
    """(alpha, r^2) for residual ~ exp(-alpha t); default window is the trailing half of the samples"""
    selected = _window(records, window)
    rate, r_squared = fit_log_rate([r.t for r in selected], [r.residual for r in selected])
    return -rate, r_squared


def l1_amplitude_rate(
    records: Sequence[DiagnosticsRecord],
    window: Optional[Tuple[float, float]] = None,
) -> float:
    """Growth rate of the tilted (m = +-1) l = 1 amplitude"""
    selected = _window(records, window)
    rate, _ = fit_log_rate([r.t for r in selected], [r.amp_l1[2] for r in selected])
    return rate


def phase_drift(times: Sequence[float], coeffs: Sequence[complex], m: int) -> float:
    """Longitudinal drift d(arg coeff)/dt / m from the unwrapped phase history"""
    if m == 0:
        raise DegenerateFitError("zonal modes (m = 0) have no longitudinal phase")
    t = np.asarray(times, dtype=float)
    if t.size < 2:
        raise DegenerateFitError(f"need at least two samples to fit a drift, got {t.size}")
    phase = np.unwrap(np.angle(np.asarray(coeffs, dtype=complex)))
    return float(stats.linregress(t, phase).slope) / m


def energy_balance_error(records: Sequence[DiagnosticsRecord], mu_s: float) -> float:
    """Worst relative mismatch of d/dt residual^2 against -4 mu_s ||D||^2 by centered differences"""
    if len(records) < 3:
        raise DegenerateFitError("energy balance needs at least three records")
    t = np.array([r.t for r in records])
    r2 = np.array([r.residual ** 2 for r in records])
    d = np.array([r.deformation for r in records])
    rate = (r2[2:] - r2[:-2]) / (t[2:] - t[:-2])
    predicted = -4.0 * mu_s * d[1:-1]
    scale = np.maximum(np.abs(predicted), np.finfo(float).tiny)
    return float(np.max(np.abs(rate - predicted) / scale))


def korn_quotient(u: VelocityGrid) -> float:
    """(||u||^2 + ||grad u||^2) / ||D_u||^2 on fields orthogonal to z_z; inf when D_u vanishes

    Orthogonality is tested as |(u|z_z)| <= 1e-10 * max(1, ||u|| ||z_z||): the absolute bound
    for unit-scale fields, relative for larger ones.
    """
    z_z = killing_basis(u.grid).z_z
    overlap = abs(inner_product(u, z_z))
    scale = max(1.0, math.sqrt(norm_sq(u) * norm_sq(z_z)))
    if overlap > ORTHOGONALITY_TOLERANCE * scale:
        raise PreconditionError(f"field is not orthogonal to z_z: |(u|z_z)| = {overlap:.3e}")
    deformation = deformation_norm_sq(u)
    if deformation <= KORN_DEGENERACY:
        return math.inf
    return h1_norm_sq(u) / deformation
