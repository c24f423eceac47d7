"""
Discrete sphere: Gauss-Legendre colatitudes times uniform longitudes, quadrature,
Coriolis parameter and Christoffel symbols.

Conventions: colatitude phi (0 at the north pole), longitude theta, index 0 <-> theta,
index 1 <-> phi. Metric diag(a^2 sin^2 phi, a^2), Gaussian curvature 1/a^2.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
import scipy.fft as fft

from app.utils.errors import InvalidParameterError

NEWTON_TOLERANCE = 1e-15
NEWTON_MAX_ITERATIONS = 100


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes (descending in [-1, 1]) and weights by Newton iteration"""
    if n < 1:
        raise InvalidParameterError(f"number of Gauss nodes must be >= 1, got {n}")
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(NEWTON_MAX_ITERATIONS):
        p, dp = _legendre_with_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOLERANCE:
            break
    p, dp = _legendre_with_derivative(n, x)
    if np.max(np.abs(p / dp)) > 1e-14:
        raise InvalidParameterError(f"Gauss-Legendre iteration did not converge for n={n}")
    # exact mirror symmetry x -> -x
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_with_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _legendre_with_derivative(n: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    p0 = np.ones_like(x)
    p1 = x.copy()
    if n == 0:
        return p0, np.zeros_like(x)
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature-ready discretization of the sphere of radius a, truncated at degree L"""

    L: int
    a: float
    n_phi: int
    n_theta: int
    phi_nodes: np.ndarray
    weights: np.ndarray
    theta_nodes: np.ndarray
    dealias: bool = True

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_phi, self.n_theta)

    @property
    def cos_phi(self) -> np.ndarray:
        return np.cos(self.phi_nodes)

    @property
    def sin_phi(self) -> np.ndarray:
        return np.sin(self.phi_nodes)

    @property
    def kappa(self) -> float:
        return 1.0 / self.a ** 2

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    @property
    def dphi(self) -> float:
        return float(np.min(np.diff(self.phi_nodes)))

    @property
    def area(self) -> float:
        return self.a ** 2 * self.dtheta * self.n_theta * float(np.sum(self.weights))

    def column(self, values: np.ndarray) -> np.ndarray:
        """Broadcast a per-colatitude array against the (n_phi, n_theta) node layout"""
        return np.asarray(values)[:, None]

    def integrate(self, values: np.ndarray) -> float:
        """Discrete surface integral of nodal values"""
        values = np.asarray(values)
        return float(self.a ** 2 * self.dtheta * np.sum(self.weights[:, None] * values))

    def same_as(self, other: "Grid") -> bool:
        return (
            self is other
            or (self.L == other.L and self.a == other.a and self.shape == other.shape)
        )


@dataclass(frozen=True, eq=False)
class GridScalar:
    """Real scalar field sampled on the nodes of a grid"""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        if np.shape(self.values) != self.grid.shape:
            raise InvalidParameterError(
                f"field shape {np.shape(self.values)} does not match grid {self.grid.shape}"
            )

    def mean(self) -> float:
        return self.grid.integrate(self.values) / self.grid.area

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class ChristoffelTable:
    """Nonzero Christoffel symbols per node: G^0_01 = G^0_10 = cot phi, G^1_00 = -sin phi cos phi"""

    theta_theta_phi: np.ndarray
    phi_theta_theta: np.ndarray

    def as_array(self) -> np.ndarray:
        """Full table gamma[i, j, k] = G^i_jk with node axes last"""
        shape = self.theta_theta_phi.shape
        gamma = np.zeros((2, 2, 2) + shape)
        gamma[0, 0, 1] = self.theta_theta_phi
        gamma[0, 1, 0] = self.theta_theta_phi
        gamma[1, 0, 0] = self.phi_theta_theta
        return gamma


def dealiased_sizes(L: int) -> Tuple[int, int]:
    n_theta = fft.next_fast_len(3 * L + 1)
    n_phi = -(-(3 * L + 1) // 2)
    return n_phi, n_theta


@lru_cache(maxsize=64)
def build_grid(L: int, a: float = 1.0, dealias: bool = True) -> Grid:
    """Gauss grid for truncation L; with dealias the 3/2-rule sizes keep quadratic products exact"""
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise InvalidParameterError(f"truncation degree L must be an integer >= 2, got {L!r}")
    if not a > 0:
        raise InvalidParameterError(f"sphere radius a must be positive, got {a!r}")

    if dealias:
        n_phi, n_theta = dealiased_sizes(int(L))
    else:
        n_phi, n_theta = int(L) + 1, fft.next_fast_len(2 * int(L) + 2)

    x, w = gauss_legendre(n_phi)
    phi = np.arccos(x)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    for arr in (phi, theta):
        arr.setflags(write=False)
    return Grid(
        L=int(L), a=float(a), n_phi=n_phi, n_theta=n_theta,
        phi_nodes=phi, weights=w, theta_nodes=theta, dealias=dealias,
    )


def node_mesh(grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    """(phi, theta) arrays of shape grid.shape"""
    phi, theta = np.meshgrid(grid.phi_nodes, grid.theta_nodes, indexing="ij")
    return phi, theta


def coriolis_parameter(grid: Grid, omega: float) -> GridScalar:
    """f_c = 2 omega cos(phi): the planetary vorticity advected by the flow"""
    values = np.broadcast_to(grid.column(2.0 * omega * grid.cos_phi), grid.shape).copy()
    return GridScalar(values=values, grid=grid)


def christoffel_symbols(grid: Grid) -> ChristoffelTable:
    cos, sin = grid.cos_phi, grid.sin_phi
    cot = np.broadcast_to(grid.column(cos / sin), grid.shape).copy()
    sc = np.broadcast_to(grid.column(-sin * cos), grid.shape).copy()
    return ChristoffelTable(theta_theta_phi=cot, phi_theta_theta=sc)


def rotation_velocity(axis: Sequence[float], c: float, grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal-frame components of the rigid rotation c * (n x X) on the sphere

    The axis is normalized; for n = e_z this is c * d/dtheta.
    """
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise InvalidParameterError("rotation axis must be nonzero")
    nx, ny, nz = n / norm
    phi, theta = node_mesh(grid)
    a = grid.a
    u_theta = c * a * (nz * np.sin(phi) - np.cos(phi) * (nx * np.cos(theta) + ny * np.sin(theta)))
    u_phi = c * a * (ny * np.cos(theta) - nx * np.sin(theta))
    return u_theta, u_phi
