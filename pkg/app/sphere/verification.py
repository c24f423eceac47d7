"""
Self-checking suite of the differential-geometric identities the solver relies on.

Every check draws random band-limited fields (degree <= L/2, so products of two fields
and their derivatives stay exactly representable on the grid) and reports the worst
relative violation over its trials.
"""

import math
from typing import Callable, List, Tuple

import numpy as np

from app.models.simulation import IdentityReport, SimParams
from app.sphere import fields
from app.sphere.dynamics import rhs_velocity_oracle
from app.sphere.fields import (
    StreamFunction,
    VelocityGrid,
    apply_K,
    covariant_derivative,
    covariant_gradient,
    deformation_inner,
    divergence,
    gradient,
    helmholtz_decompose,
    helmholtz_project,
    inner_product,
    killing_basis,
    norm_sq,
    pointwise_inner,
    rotation,
    rotation_stream,
    scalar_field,
    vector_laplacian_kappa,
    velocity_from_potentials,
)
from app.sphere.geometry import Grid, build_grid
from app.sphere.harmonics import SpectralScalar, laplacian, random_band_limited, synthesize
from app.sphere.state import SimState
from app.utils.errors import InvalidParameterError

MIN_DEGREE = 4
DEFAULT_TRIALS = 20
TINY = 1e-300

Check = Callable[[Grid, np.random.Generator, int], float]


def _ratio(error: float, scale: float) -> float:
    ratio = error / max(scale, TINY)
    # non-finite errors must surface as failures through max()
    return ratio if math.isfinite(ratio) else math.inf


def _norm(u: VelocityGrid) -> float:
    return math.sqrt(max(norm_sq(u), 0.0))


def _band(grid: Grid) -> int:
    return max(2, grid.L // 2)


def random_scalar(grid: Grid, rng: np.random.Generator, min_degree: int = 1) -> SpectralScalar:
    return random_band_limited(grid.L, grid.a, _band(grid), rng, min_degree=min_degree)


def random_stream(grid: Grid, rng: np.random.Generator) -> StreamFunction:
    return StreamFunction(random_scalar(grid, rng))


def random_field(grid: Grid, rng: np.random.Generator) -> VelocityGrid:
    return velocity_from_potentials(random_stream(grid, rng), random_scalar(grid, rng), grid)


def random_solenoidal(grid: Grid, rng: np.random.Generator) -> VelocityGrid:
    return fields.velocity_from_stream(random_stream(grid, rng), grid)


def check_rotation_operator(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        u, v = random_field(grid, rng), random_field(grid, rng)
        su, sv = u.max_norm(), v.max_norm()
        twice = apply_K(apply_K(u)) + u
        worst = max(
            worst,
            _ratio(twice.max_norm(), su),
            _ratio(float(np.max(np.abs(pointwise_inner(apply_K(u), u)))), su * su),
            _ratio(
                float(np.max(np.abs(pointwise_inner(apply_K(u), v) + pointwise_inner(u, apply_K(v))))),
                su * sv,
            ),
        )
    return worst


def check_rot_grad(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        h = random_scalar(grid, rng)
        curl = rotation(gradient(h, grid))
        worst = max(worst, _ratio(curl.max_abs(), laplacian(h).max_abs()))
    return worst


def check_divergence_theorem(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    """(div u | h) + (u | grad h) = 0, and (nabla_v u + (div v) u | w) + (u | nabla_v w) = 0"""
    worst = 0.0
    for _ in range(trials):
        u, v, w = (random_field(grid, rng) for _ in range(3))
        h = random_scalar(grid, rng, min_degree=0)
        h_values = synthesize(h, grid).values
        div_u = synthesize(divergence(u), grid).values
        grad_h = gradient(h, grid)
        lhs = grid.integrate(div_u * h_values) + inner_product(u, grad_h)
        scale = math.sqrt(grid.integrate(div_u ** 2) * grid.integrate(h_values ** 2)) + _norm(u) * _norm(grad_h)
        worst = max(worst, _ratio(abs(lhs), scale))

        div_v = synthesize(divergence(v), grid).values
        transport = covariant_derivative(u, v)
        stretched = u * div_v
        along = covariant_derivative(w, v)
        lhs = inner_product(transport + stretched, w) + inner_product(u, along)
        scale = (_norm(transport) + _norm(stretched)) * _norm(w) + _norm(u) * _norm(along)
        worst = max(worst, _ratio(abs(lhs), scale))
    return worst


def check_deformation_identity(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    """((Delta + kappa) u | v) = -2 (D_u | D_v) on divergence-free fields"""
    worst = 0.0
    for _ in range(trials):
        u, v = random_solenoidal(grid, rng), random_solenoidal(grid, rng)
        lap = vector_laplacian_kappa(u)
        lhs = inner_product(lap, v) + 2.0 * deformation_inner(u, v)
        worst = max(worst, _ratio(abs(lhs), _norm(lap) * _norm(v)))
    return worst


def killing_form(u: VelocityGrid) -> np.ndarray:
    """g^{jk} u^i_{|k} + g^{ik} u^j_{|k}, made dimensionless by sqrt(g_ii g_jj)"""
    grid = u.grid
    tensor = covariant_gradient(u)
    h = np.stack([grid.a * grid.column(grid.sin_phi) * np.ones(grid.shape), grid.a * np.ones(grid.shape)])
    form = np.empty_like(tensor)
    for i in range(2):
        for j in range(2):
            form[i, j] = (tensor[i, j] / h[j] ** 2 + tensor[j, i] / h[i] ** 2) * h[i] * h[j]
    return form


def check_killing_fields(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    basis = killing_basis(grid)
    candidates = list(basis.as_tuple())
    while len(candidates) < trials:
        candidates.append(basis.combine(rng.standard_normal(3)))
    worst = 0.0
    for z in candidates[:max(trials, 3)]:
        worst = max(worst, _ratio(float(np.max(np.abs(killing_form(z)))), z.max_norm() / grid.a))
    return worst


def check_coriolis_potential(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    """C(c z_z) = grad h* with h* = -a^2 c omega cos^2 phi"""
    worst = 0.0
    z_z = killing_basis(grid).z_z
    cos = grid.column(grid.cos_phi)
    for _ in range(trials):
        c, omega = rng.uniform(0.5, 2.0, size=2) * rng.choice([-1.0, 1.0], size=2)
        coriolis = (-2.0 * omega * cos) * apply_K(c * z_z)
        potential = np.broadcast_to(-grid.a ** 2 * c * omega * cos ** 2, grid.shape)
        mismatch = coriolis - gradient(scalar_field(np.array(potential), grid), grid)
        worst = max(worst, _ratio(mismatch.max_norm(), coriolis.max_norm()))
    return worst


def check_helmholtz(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        u, v = random_field(grid, rng), random_field(grid, rng)
        psi, chi = helmholtz_decompose(u)
        rebuilt = velocity_from_potentials(psi, chi, grid)
        projected = helmholtz_project(u)
        twice = helmholtz_project(projected)
        symmetry = inner_product(projected, v) - inner_product(u, helmholtz_project(v))
        worst = max(
            worst,
            _ratio((u - rebuilt).max_norm(), u.max_norm()),
            _ratio((twice - projected).max_norm(), u.max_norm()),
            _ratio(abs(symmetry), _norm(u) * _norm(v)),
        )
    return worst


def check_killing_transport(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    """nabla_u v + nabla_v u = -grad (u|v)_g for Killing u, v"""
    basis = killing_basis(grid)
    generators = basis.as_tuple()
    pairs = [(generators[i], generators[j]) for i in range(3) for j in range(i, 3)]
    while len(pairs) < trials:
        pairs.append((basis.combine(rng.standard_normal(3)), basis.combine(rng.standard_normal(3))))
    worst = 0.0
    for u, v in pairs[:max(trials, len(generators))]:
        lhs = covariant_derivative(v, u) + covariant_derivative(u, v)
        rhs = -gradient(scalar_field(pointwise_inner(u, v), grid), grid)
        scale = u.max_norm() * v.max_norm() / grid.a
        worst = max(worst, _ratio((lhs - rhs).max_norm(), scale))
    return worst


def check_equilibrium(grid: Grid, rng: np.random.Generator, trials: int) -> float:
    worst = 0.0
    for _ in range(trials):
        c = rng.uniform(-2.0, 2.0)
        omega = rng.uniform(-2.0, 2.0)
        mu_s = rng.uniform(1e-3, 0.1)
        params = SimParams(L=grid.L, a=grid.a, omega=omega, mu_s=mu_s, dealias=grid.dealias)
        state = SimState.from_stream(rotation_stream((0.0, 0.0, 1.0), c, grid), params)
        tendency = rhs_velocity_oracle(state)
        scale = grid.a * abs(c) * (abs(c) + abs(omega)) + mu_s * abs(c) / grid.a
        worst = max(worst, _ratio(tendency.max_norm(), scale))
    return worst


CHECKS: List[Tuple[str, Check, bool]] = [
    ("rotation operator K", check_rotation_operator, False),
    ("rot grad h = 0", check_rot_grad, False),
    ("divergence theorem", check_divergence_theorem, False),
    ("deformation identity", check_deformation_identity, True),
    ("Killing equations", check_killing_fields, False),
    ("Coriolis potential of z_z", check_coriolis_potential, False),
    ("Helmholtz projection", check_helmholtz, False),
    ("Killing transport", check_killing_transport, False),
    ("equilibrium stationarity", check_equilibrium, True),
]


def tolerances(L: int) -> Tuple[float, float]:
    """(first-order tolerance, second-derivative tolerance)"""
    return (1e-8, 1e-6) if L >= 8 else (1e-6, 1e-6)


def run_identity_suite(L: int, a: float = 1.0, seed: int = 7, trials: int = DEFAULT_TRIALS) -> List[IdentityReport]:
    if L < MIN_DEGREE:
        raise InvalidParameterError(f"identity suite needs L >= {MIN_DEGREE}, got {L}")
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    grid = build_grid(L, a)
    rng = np.random.default_rng(seed)
    first_order, second_order = tolerances(L)
    reports = []
    for name, check, uses_second_derivatives in CHECKS:
        tolerance = second_order if uses_second_derivatives else first_order
        error = float(check(grid, rng, trials))
        reports.append(
            IdentityReport(
                name=name,
                max_error=error,
                trials=trials,
                tolerance=tolerance,
                passed=bool(error <= tolerance),
            )
        )
    return reports
