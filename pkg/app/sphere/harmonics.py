"""
Scalar spherical-harmonic analysis and synthesis on the Gauss grid.

Coefficients use orthonormal, Condon-Shortley phased harmonics Y_lm on the unit sphere and
are stored for 0 <= m <= l <= L in a complex (L+1, L+1) table indexed [l, m]; negative
orders follow from a_{l,-m} = (-1)^m conj(a_lm). A real field is therefore
h = sum_l a_l0 Y_l0 + 2 Re sum_{m>0} a_lm Y_lm.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.fft as fft

from app.sphere.geometry import Grid, GridScalar, gauss_legendre
from app.utils.errors import GaugeViolationError, InvalidParameterError

GAUGE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralScalar:
    """Spherical-harmonic coefficient table of a real scalar field"""

    coeffs: np.ndarray
    L: int
    a: float

    __array_ufunc__ = None

    def __post_init__(self):
        if np.shape(self.coeffs) != (self.L + 1, self.L + 1):
            raise InvalidParameterError(
                f"coefficient table must have shape {(self.L + 1, self.L + 1)}, got {np.shape(self.coeffs)}"
            )

    @classmethod
    def zeros(cls, L: int, a: float) -> "SpectralScalar":
        return cls(np.zeros((L + 1, L + 1), dtype=complex), L, a)

    def _check(self, other: "SpectralScalar") -> None:
        if self.L != other.L or self.a != other.a:
            raise InvalidParameterError(
                f"spectral fields differ in truncation or radius: (L={self.L}, a={self.a}) vs (L={other.L}, a={other.a})"
            )

    def __add__(self, other: "SpectralScalar") -> "SpectralScalar":
        self._check(other)
        return SpectralScalar(self.coeffs + other.coeffs, self.L, self.a)

    def __sub__(self, other: "SpectralScalar") -> "SpectralScalar":
        self._check(other)
        return SpectralScalar(self.coeffs - other.coeffs, self.L, self.a)

    def __neg__(self) -> "SpectralScalar":
        return SpectralScalar(-self.coeffs, self.L, self.a)

    def __mul__(self, factor: float) -> "SpectralScalar":
        return SpectralScalar(self.coeffs * factor, self.L, self.a)

    __rmul__ = __mul__

    def scaled_by_degree(self, factors: np.ndarray) -> "SpectralScalar":
        """Multiply every (l, m) coefficient by factors[l]"""
        return SpectralScalar(self.coeffs * np.asarray(factors)[:, None], self.L, self.a)

    def power(self) -> float:
        """Sum of |a_lm|^2 over all orders, m > 0 counted twice; equals (1/a^2) * integral of h^2"""
        weights = np.full(self.L + 1, 2.0)
        weights[0] = 1.0
        return float(np.sum(weights[None, :] * np.abs(self.coeffs) ** 2))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))


def degrees(L: int) -> np.ndarray:
    return np.arange(L + 1, dtype=float)


def triangular_mask(L: int) -> np.ndarray:
    l, m = np.meshgrid(np.arange(L + 1), np.arange(L + 1), indexing="ij")
    return m <= l


@dataclass(frozen=True)
class LegendreTables:
    """Fully normalized P_lm(cos phi_j) and its first and second phi-derivatives, shape (n_phi, L+1, L+1)"""

    p: np.ndarray
    dp: np.ndarray
    d2p: np.ndarray


def associated_legendre(L: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre functions with Condon-Shortley phase by the (l-1, l-2) recurrence"""
    x = np.asarray(x, dtype=float)
    sin = np.sqrt(1.0 - x * x)
    p = np.zeros((x.size, L + 1, L + 1))
    pmm = np.full(x.size, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(L + 1):
        if m > 0:
            pmm = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin * pmm
        p[:, m, m] = pmm
        if m < L:
            p[:, m + 1, m] = np.sqrt(2.0 * m + 3.0) * x * pmm
        for l in range(m + 2, L + 1):
            a_lm = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b_lm = -np.sqrt(
                (2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m) / ((2.0 * l - 3.0) * (l * l - m * m))
            )
            p[:, l, m] = a_lm * x * p[:, l - 1, m] + b_lm * p[:, l - 2, m]
    return p


@lru_cache(maxsize=32)
def legendre_tables(L: int, n_phi: int) -> LegendreTables:
    x, _ = gauss_legendre(n_phi)
    sin = np.sqrt(1.0 - x * x)[:, None, None]
    cos = x[:, None, None]
    p = associated_legendre(L, x)

    l = degrees(L)[None, :, None]
    m = degrees(L)[None, None, :]
    c_lm = np.sqrt(np.clip((2.0 * l + 1.0) * (l * l - m * m), 0.0, None) / np.maximum(2.0 * l - 1.0, 1.0))
    p_lower = np.zeros_like(p)
    p_lower[:, 1:, :] = p[:, :-1, :]
    dp = (l * cos * p - c_lm * p_lower) / sin
    dp[:, 0, :] = 0.0
    # associated Legendre equation in phi
    d2p = -(cos / sin) * dp - (l * (l + 1.0) - m * m / (sin * sin)) * p

    mask = triangular_mask(L)[None, :, :]
    for table in (p, dp, d2p):
        table *= mask
        table.setflags(write=False)
    return LegendreTables(p=p, dp=dp, d2p=d2p)


def tables_for(grid: Grid) -> LegendreTables:
    return legendre_tables(grid.L, grid.n_phi)


def fourier_coefficients(values: np.ndarray, grid: Grid) -> np.ndarray:
    """(2 pi / n_theta) * sum_k values e^{-i m theta_k} for m = 0..L, shape (n_phi, L+1)"""
    spectrum = fft.rfft(np.asarray(values, dtype=float), axis=1)
    return spectrum[:, : grid.L + 1] * grid.dtheta


def fourier_synthesis(orders: np.ndarray, grid: Grid) -> np.ndarray:
    """Real field G_0 + 2 Re sum_{m>0} G_m e^{i m theta} from per-latitude orders of shape (n_phi, L+1)"""
    padded = np.zeros((grid.n_phi, grid.n_theta // 2 + 1), dtype=complex)
    padded[:, : grid.L + 1] = orders
    return fft.irfft(padded, n=grid.n_theta, axis=1) * grid.n_theta


def analyze(h: GridScalar) -> SpectralScalar:
    """Gauss-Legendre + discrete Fourier projection onto Y_lm; exact for degree <= L inputs"""
    grid = h.grid
    tables = tables_for(grid)
    f = fourier_coefficients(h.values, grid)
    coeffs = np.einsum("j,jlm,jm->lm", grid.weights, tables.p, f)
    coeffs[:, 0] = coeffs[:, 0].real
    return SpectralScalar(coeffs, grid.L, grid.a)


def _check_truncation(s: SpectralScalar, grid: Grid) -> None:
    if s.L != grid.L:
        raise InvalidParameterError(f"spectral truncation L={s.L} does not match grid L={grid.L}")


def _synthesize_with(coeffs: np.ndarray, table: np.ndarray, grid: Grid) -> np.ndarray:
    orders = np.einsum("lm,jlm->jm", coeffs, table)
    return fourier_synthesis(orders, grid)


def synthesize(s: SpectralScalar, grid: Grid) -> GridScalar:
    _check_truncation(s, grid)
    values = _synthesize_with(s.coeffs, tables_for(grid).p, grid)
    return GridScalar(values=values, grid=grid)


@dataclass(frozen=True)
class ScalarDerivatives:
    """Nodal value and coordinate derivatives of a band-limited scalar"""

    value: np.ndarray
    d_theta: np.ndarray
    d_phi: np.ndarray
    d_theta_theta: np.ndarray
    d_theta_phi: np.ndarray
    d_phi_phi: np.ndarray


def first_derivatives(s: SpectralScalar, grid: Grid):
    """(d/dtheta, d/dphi) of s on the grid"""
    _check_truncation(s, grid)
    tables = tables_for(grid)
    im = 1j * degrees(s.L)[None, :]
    d_theta = _synthesize_with(s.coeffs * im, tables.p, grid)
    d_phi = _synthesize_with(s.coeffs, tables.dp, grid)
    return d_theta, d_phi


def synthesize_derivatives(s: SpectralScalar, grid: Grid) -> ScalarDerivatives:
    _check_truncation(s, grid)
    tables = tables_for(grid)
    im = 1j * degrees(s.L)[None, :]
    return ScalarDerivatives(
        value=_synthesize_with(s.coeffs, tables.p, grid),
        d_theta=_synthesize_with(s.coeffs * im, tables.p, grid),
        d_phi=_synthesize_with(s.coeffs, tables.dp, grid),
        d_theta_theta=_synthesize_with(s.coeffs * im * im, tables.p, grid),
        d_theta_phi=_synthesize_with(s.coeffs * im, tables.dp, grid),
        d_phi_phi=_synthesize_with(s.coeffs, tables.d2p, grid),
    )


def laplacian_symbol(L: int, a: float) -> np.ndarray:
    l = degrees(L)
    return -l * (l + 1.0) / a ** 2


def laplacian(s: SpectralScalar) -> SpectralScalar:
    return s.scaled_by_degree(laplacian_symbol(s.L, s.a))


def invert_laplacian(s: SpectralScalar) -> SpectralScalar:
    """Inverse Laplace-Beltrami on the mean-zero subspace; the (0,0) output is set to 0"""
    magnitude = float(abs(s.coeffs[0, 0]))
    if magnitude > GAUGE_TOLERANCE:
        raise GaugeViolationError(magnitude, GAUGE_TOLERANCE)
    symbol = laplacian_symbol(s.L, s.a)
    inverse = np.zeros_like(symbol)
    inverse[1:] = 1.0 / symbol[1:]
    return s.scaled_by_degree(inverse)


def truncate(s: SpectralScalar, degree: int) -> SpectralScalar:
    coeffs = s.coeffs.copy()
    coeffs[degree + 1:, :] = 0.0
    return SpectralScalar(coeffs, s.L, s.a)


def random_band_limited(
    L: int,
    a: float,
    degree: int,
    rng: np.random.Generator,
    slope: float = 0.0,
    amplitude: float = 1.0,
    min_degree: int = 0,
) -> SpectralScalar:
    """Random real field with content in min_degree <= l <= degree and |a_lm| ~ amplitude * l^slope"""
    if degree > L:
        raise InvalidParameterError(f"band limit {degree} exceeds truncation {L}")
    coeffs = (rng.standard_normal((L + 1, L + 1)) + 1j * rng.standard_normal((L + 1, L + 1))) / np.sqrt(2.0)
    coeffs[:, 0] = coeffs[:, 0].real * np.sqrt(2.0)
    l = degrees(L)
    envelope = amplitude * np.where(l > 0, np.maximum(l, 1.0) ** slope, 1.0)
    envelope[:min_degree] = 0.0
    coeffs = coeffs * envelope[:, None] * triangular_mask(L)
    return truncate(SpectralScalar(coeffs, L, a), degree)


def from_coefficients(entries: dict, L: int, a: float, base: Optional[SpectralScalar] = None) -> SpectralScalar:
    """Build a table from {(l, m): value} with m >= 0"""
    coeffs = np.zeros((L + 1, L + 1), dtype=complex) if base is None else base.coeffs.copy()
    for (l, m), value in entries.items():
        if not 0 <= m <= l <= L:
            raise InvalidParameterError(f"invalid harmonic index (l={l}, m={m}) for L={L}")
        coeffs[l, m] = value if m > 0 else complex(value).real
    return SpectralScalar(coeffs, L, a)

