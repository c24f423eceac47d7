"""
Tangent vector fields on the sphere of radius a.

Fields are stored by their physical components in the orthonormal frame
e_theta = (1/(a sin phi)) d/dtheta (east) and e_phi = (1/a) d/dphi (south).
Differential operators go through the scalar potentials of the Helmholtz split
u = K grad psi + grad chi, so every derivative is evaluated spectrally.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from app.sphere.geometry import (
    ChristoffelTable,
    Grid,
    GridScalar,
    christoffel_symbols,
    rotation_velocity,
)
from app.sphere.harmonics import (
    GAUGE_TOLERANCE,
    SpectralScalar,
    analyze,
    degrees,
    first_derivatives,
    fourier_coefficients,
    invert_laplacian,
    laplacian,
    synthesize,
    synthesize_derivatives,
    tables_for,
)
from app.utils.errors import GaugeViolationError, InvalidParameterError


@dataclass(frozen=True, eq=False)
class VelocityGrid:
    """Tangent field by its physical components on the nodes of a grid"""

    u_theta_hat: np.ndarray
    u_phi_hat: np.ndarray
    grid: Grid

    # numpy operands defer to the reflected operators below
    __array_ufunc__ = None

    def __post_init__(self):
        for name in ("u_theta_hat", "u_phi_hat"):
            if np.shape(getattr(self, name)) != self.grid.shape:
                raise InvalidParameterError(
                    f"{name} shape {np.shape(getattr(self, name))} does not match grid {self.grid.shape}"
                )

    @classmethod
    def zeros(cls, grid: Grid) -> "VelocityGrid":
        return cls(np.zeros(grid.shape), np.zeros(grid.shape), grid)

    @classmethod
    def from_coordinates(cls, u_theta: np.ndarray, u_phi: np.ndarray, grid: Grid) -> "VelocityGrid":
        sin = grid.column(grid.sin_phi)
        return cls(grid.a * sin * u_theta, grid.a * u_phi, grid)

    @property
    def u_theta(self) -> np.ndarray:
        """Coordinate component u^theta"""
        return self.u_theta_hat / (self.grid.a * self.grid.column(self.grid.sin_phi))

    @property
    def u_phi(self) -> np.ndarray:
        """Coordinate component u^phi"""
        return self.u_phi_hat / self.grid.a

    def _check(self, other: "VelocityGrid") -> None:
        if not self.grid.same_as(other.grid):
            raise InvalidParameterError("vector fields live on different grids")

    def __add__(self, other: "VelocityGrid") -> "VelocityGrid":
        self._check(other)
        return VelocityGrid(self.u_theta_hat + other.u_theta_hat, self.u_phi_hat + other.u_phi_hat, self.grid)

    def __sub__(self, other: "VelocityGrid") -> "VelocityGrid":
        self._check(other)
        return VelocityGrid(self.u_theta_hat - other.u_theta_hat, self.u_phi_hat - other.u_phi_hat, self.grid)

    def __neg__(self) -> "VelocityGrid":
        return VelocityGrid(-self.u_theta_hat, -self.u_phi_hat, self.grid)

    def __mul__(self, factor) -> "VelocityGrid":
        # scalar or per-node factor
        return VelocityGrid(self.u_theta_hat * factor, self.u_phi_hat * factor, self.grid)

    __rmul__ = __mul__

    def speed(self) -> np.ndarray:
        return np.hypot(self.u_theta_hat, self.u_phi_hat)

    def max_norm(self) -> float:
        return float(np.max(self.speed()))


@dataclass(frozen=True, eq=False)
class StreamFunction:
    """Mean-zero stream function psi of the divergence-free field K grad psi"""

    psi: SpectralScalar

    def __post_init__(self):
        magnitude = float(abs(self.psi.coeffs[0, 0]))
        if magnitude > GAUGE_TOLERANCE:
            raise GaugeViolationError(magnitude, GAUGE_TOLERANCE)

    @classmethod
    def gauged(cls, psi: SpectralScalar) -> "StreamFunction":
        """Drop the (0,0) component, which carries no velocity"""
        coeffs = psi.coeffs.copy()
        coeffs[0, 0] = 0.0
        return cls(SpectralScalar(coeffs, psi.L, psi.a))

    @property
    def L(self) -> int:
        return self.psi.L

    @property
    def a(self) -> float:
        return self.psi.a


@dataclass(frozen=True, eq=False)
class KillingBasis:
    """Rotation generators about the x, y and z axes"""

    z_x: VelocityGrid
    z_y: VelocityGrid
    z_z: VelocityGrid

    def as_tuple(self) -> Tuple[VelocityGrid, VelocityGrid, VelocityGrid]:
        return (self.z_x, self.z_y, self.z_z)

    def combine(self, coefficients: Sequence[float]) -> VelocityGrid:
        cx, cy, cz = coefficients
        return cx * self.z_x + cy * self.z_y + cz * self.z_z


@lru_cache(maxsize=16)
def killing_basis(grid: Grid) -> KillingBasis:
    generators = [
        VelocityGrid(*rotation_velocity(axis, 1.0, grid), grid)
        for axis in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    ]
    return KillingBasis(*generators)


def rotation_stream(axis: Sequence[float], c: float, grid: Grid) -> StreamFunction:
    """Stream function -c a^2 (n . x/a) of the rigid rotation c (n x X), from its l = 1 coefficients"""
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise InvalidParameterError("rotation axis must be nonzero")
    nx, ny, nz = n / norm
    coeffs = np.zeros((grid.L + 1, grid.L + 1), dtype=complex)
    scale = -c * grid.a ** 2
    coeffs[1, 0] = scale * nz * np.sqrt(4.0 * np.pi / 3.0)
    coeffs[1, 1] = scale * np.sqrt(2.0 * np.pi / 3.0) * complex(-nx, ny)
    return StreamFunction(SpectralScalar(coeffs, grid.L, grid.a))


def apply_K(u: VelocityGrid) -> VelocityGrid:
    """Quarter turn of every tangent vector: (u_theta, u_phi) -> (u_phi, -u_theta)"""
    return VelocityGrid(u.u_phi_hat.copy(), -u.u_theta_hat, u.grid)


def gradient(h: SpectralScalar, grid: Grid) -> VelocityGrid:
    d_theta, d_phi = first_derivatives(h, grid)
    sin = grid.column(grid.sin_phi)
    return VelocityGrid(d_theta / (grid.a * sin), d_phi / grid.a, grid)


def velocity_from_stream(psi: StreamFunction, grid: Grid) -> VelocityGrid:
    d_theta, d_phi = first_derivatives(psi.psi, grid)
    sin = grid.column(grid.sin_phi)
    return VelocityGrid(d_phi / grid.a, -d_theta / (grid.a * sin), grid)


def velocity_from_potentials(psi: StreamFunction, chi: SpectralScalar, grid: Grid) -> VelocityGrid:
    return velocity_from_stream(psi, grid) + gradient(chi, grid)


def vorticity_from_stream(psi: StreamFunction) -> SpectralScalar:
    return -laplacian(psi.psi)


def stream_from_vorticity(zeta: SpectralScalar) -> StreamFunction:
    return StreamFunction(invert_laplacian(-zeta))


def _weak_divergence(v_theta_hat: np.ndarray, v_phi_hat: np.ndarray, grid: Grid) -> SpectralScalar:
    # div_lm = -(1/a^2) * integral of (v | grad conj(Y_lm)), by exact quadrature
    tables = tables_for(grid)
    f_theta = fourier_coefficients(v_theta_hat, grid)
    f_phi = fourier_coefficients(v_phi_hat, grid)
    orders = degrees(grid.L)[None, :]
    w = grid.weights
    term_theta = np.einsum("j,jlm,jm->lm", w / grid.sin_phi, tables.p, f_theta) * (-1j * orders)
    term_phi = np.einsum("j,jlm,jm->lm", w, tables.dp, f_phi)
    coeffs = -(term_theta + term_phi) / grid.a
    coeffs[:, 0] = coeffs[:, 0].real
    coeffs[0, 0] = 0.0
    return SpectralScalar(coeffs, grid.L, grid.a)


def divergence(u: VelocityGrid) -> SpectralScalar:
    return _weak_divergence(u.u_theta_hat, u.u_phi_hat, u.grid)


def rotation(u: VelocityGrid) -> SpectralScalar:
    """rot u = div(K u)"""
    return _weak_divergence(u.u_phi_hat, -u.u_theta_hat, u.grid)


def helmholtz_decompose(u: VelocityGrid) -> Tuple[StreamFunction, SpectralScalar]:
    psi = StreamFunction(invert_laplacian(-rotation(u)))
    chi = invert_laplacian(divergence(u))
    return psi, chi


def helmholtz_project(u: VelocityGrid) -> VelocityGrid:
    psi, _ = helmholtz_decompose(u)
    return velocity_from_stream(psi, u.grid)


def _christoffels(grid: Grid, christoffels: Optional[ChristoffelTable]) -> np.ndarray:
    table = christoffels if christoffels is not None else christoffel_symbols(grid)
    return table.as_array()


def covariant_gradient_from_potentials(
    psi: StreamFunction,
    chi: SpectralScalar,
    grid: Grid,
    christoffels: Optional[ChristoffelTable] = None,
) -> np.ndarray:
    """Mixed tensor u^i_{|j} = d_j u^i + G^i_jk u^k of u = K grad psi + grad chi, shape (2, 2, n_phi, n_theta)"""
    p = synthesize_derivatives(psi.psi, grid)
    x = synthesize_derivatives(chi, grid)
    s = grid.column(grid.sin_phi)
    c = grid.column(grid.cos_phi)
    a2 = grid.a ** 2

    u_theta = (p.d_phi / s + x.d_theta / s ** 2) / a2
    u_phi = (-p.d_theta / s + x.d_phi) / a2

    partial = np.empty((2, 2) + grid.shape)
    partial[0, 0] = (p.d_theta_phi / s + x.d_theta_theta / s ** 2) / a2
    partial[0, 1] = (
        p.d_phi_phi / s - c * p.d_phi / s ** 2 + x.d_theta_phi / s ** 2 - 2.0 * c * x.d_theta / s ** 3
    ) / a2
    partial[1, 0] = (-p.d_theta_theta / s + x.d_theta_phi) / a2
    partial[1, 1] = (-p.d_theta_phi / s + c * p.d_theta / s ** 2 + x.d_phi_phi) / a2

    gamma = _christoffels(grid, christoffels)
    return partial + np.einsum("ijkpq,kpq->ijpq", gamma, np.stack([u_theta, u_phi]))


def covariant_gradient(u: VelocityGrid, christoffels: Optional[ChristoffelTable] = None) -> np.ndarray:
    psi, chi = helmholtz_decompose(u)
    return covariant_gradient_from_potentials(psi, chi, u.grid, christoffels)


def orthonormal_gradient(tensor: np.ndarray, grid: Grid) -> np.ndarray:
    """Frame components (h_i / h_j) u^i_{|j} with h_theta = a sin phi, h_phi = a"""
    sin = grid.column(grid.sin_phi)
    frame = tensor.copy()
    frame[0, 1] = tensor[0, 1] * sin
    frame[1, 0] = tensor[1, 0] / sin
    return frame


def deformation_tensor(u: VelocityGrid, christoffels: Optional[ChristoffelTable] = None) -> np.ndarray:
    """D_u = (grad u + grad u^T)/2 in the orthonormal frame"""
    frame = orthonormal_gradient(covariant_gradient(u, christoffels), u.grid)
    return 0.5 * (frame + frame.transpose(1, 0, 2, 3))


def deformation_inner(u: VelocityGrid, v: VelocityGrid) -> float:
    u._check(v)
    return u.grid.integrate(np.sum(deformation_tensor(u) * deformation_tensor(v), axis=(0, 1)))


def deformation_norm_sq(u: VelocityGrid) -> float:
    d = deformation_tensor(u)
    return u.grid.integrate(np.sum(d * d, axis=(0, 1)))


def gradient_norm_sq(u: VelocityGrid) -> float:
    frame = orthonormal_gradient(covariant_gradient(u), u.grid)
    return u.grid.integrate(np.sum(frame * frame, axis=(0, 1)))


def covariant_derivative(u: VelocityGrid, v: VelocityGrid, christoffels: Optional[ChristoffelTable] = None) -> VelocityGrid:
    """nabla_v u, i.e. u^i_{|j} v^j"""
    u._check(v)
    return contract_gradient(covariant_gradient(u, christoffels), v)


def contract_gradient(tensor: np.ndarray, v: VelocityGrid) -> VelocityGrid:
    components = np.einsum("ijpq,jpq->ipq", tensor, np.stack([v.u_theta, v.u_phi]))
    return VelocityGrid.from_coordinates(components[0], components[1], v.grid)


def vector_laplacian_kappa(u: VelocityGrid) -> VelocityGrid:
    """(Delta + kappa) u with the Bochner Laplacian, equal to 2 div D_u + grad div u"""
    psi, chi = helmholtz_decompose(u)
    kappa = u.grid.kappa
    stream = laplacian(psi.psi) + 2.0 * kappa * psi.psi
    potential = laplacian(chi) + 2.0 * kappa * chi
    return velocity_from_potentials(StreamFunction(stream), potential, u.grid)


def pointwise_inner(u: VelocityGrid, v: VelocityGrid) -> np.ndarray:
    u._check(v)
    return u.u_theta_hat * v.u_theta_hat + u.u_phi_hat * v.u_phi_hat


def inner_product(u: VelocityGrid, v: VelocityGrid) -> float:
    return u.grid.integrate(pointwise_inner(u, v))


def norm_sq(u: VelocityGrid) -> float:
    return inner_product(u, u)


def h1_norm_sq(u: VelocityGrid) -> float:
    return norm_sq(u) + gradient_norm_sq(u)


def project_onto_E(u: VelocityGrid) -> Tuple[float, VelocityGrid]:
    """Split u = c z_z + residual with the residual orthogonal to z_z"""
    z_z = killing_basis(u.grid).z_z
    c = inner_product(u, z_z) / norm_sq(z_z)
    return c, u - c * z_z


def scalar_field(values: np.ndarray, grid: Grid) -> SpectralScalar:
    return analyze(GridScalar(values=values, grid=grid))


def divergence_on_grid(u: VelocityGrid) -> GridScalar:
    return synthesize(divergence(u), u.grid)
