import numpy as np
import pytest

from app.sphere.geometry import GridScalar, build_grid, node_mesh
from app.sphere.harmonics import (
    SpectralScalar,
    analyze,
    from_coefficients,
    invert_laplacian,
    laplacian,
    legendre_tables,
    random_band_limited,
    synthesize,
    synthesize_derivatives,
    truncate,
)
from app.utils.errors import GaugeViolationError, InvalidParameterError


def _y21_real(phi, theta):
    """2 Re Y_21 with Condon-Shortley phase"""
    return -2.0 * np.sqrt(15.0 / (8.0 * np.pi)) * np.sin(phi) * np.cos(phi) * np.cos(theta)


def test_analyze_constant(grid):
    """h = 1 has only the (0,0) coefficient sqrt(4 pi)"""
    s = analyze(GridScalar(np.ones(grid.shape), grid))
    assert abs(s.coeffs[0, 0] - np.sqrt(4.0 * np.pi)) <= 1e-12
    rest = s.coeffs.copy()
    rest[0, 0] = 0.0
    assert np.max(np.abs(rest)) <= 1e-12


def test_analyze_closed_form_harmonic(grid):
    phi, theta = node_mesh(grid)
    s = analyze(GridScalar(_y21_real(phi, theta), grid))
    assert abs(s.coeffs[2, 1] - 1.0) <= 1e-12
    rest = s.coeffs.copy()
    rest[2, 1] = 0.0
    assert np.max(np.abs(rest)) <= 1e-12


def test_round_trip_band_limited(grid, rng):
    s = random_band_limited(grid.L, grid.a, grid.L, rng)
    h = synthesize(s, grid)
    again = analyze(h)
    assert np.max(np.abs(again.coeffs - s.coeffs)) <= 1e-11 * s.max_abs()
    assert np.max(np.abs(synthesize(again, grid).values - h.values)) <= 1e-11 * h.max_norm()


def test_round_trip_without_dealiasing(rng):
    """The linear-exact grid still represents degree-L fields exactly"""
    grid = build_grid(12, dealias=False)
    s = random_band_limited(grid.L, grid.a, grid.L, rng)
    again = analyze(synthesize(s, grid))
    assert np.max(np.abs(again.coeffs - s.coeffs)) <= 1e-11 * s.max_abs()


def test_synthesize_zero_and_y10(grid):
    zero = SpectralScalar.zeros(grid.L, grid.a)
    assert np.all(synthesize(zero, grid).values == 0.0)

    s = from_coefficients({(1, 0): 2.5}, grid.L, grid.a)
    phi, _ = node_mesh(grid)
    expected = 2.5 * np.sqrt(3.0 / (4.0 * np.pi)) * np.cos(phi)
    assert np.max(np.abs(synthesize(s, grid).values - expected)) <= 1e-13


def test_synthesize_linear(grid, rng):
    s1 = random_band_limited(grid.L, grid.a, 10, rng)
    s2 = random_band_limited(grid.L, grid.a, 10, rng)
    lhs = synthesize(s1 + s2, grid).values
    rhs = synthesize(s1, grid).values + synthesize(s2, grid).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_synthesize_truncation_mismatch(grid):
    with pytest.raises(InvalidParameterError):
        synthesize(SpectralScalar.zeros(8, 1.0), grid)


def test_parseval(rng):
    """sum |a_lm|^2 (m > 0 twice) equals (1/a^2) times the integral of h^2"""
    grid = build_grid(15, 2.0)
    s = random_band_limited(grid.L, grid.a, grid.L, rng)
    h = synthesize(s, grid).values
    assert abs(s.power() - grid.integrate(h ** 2) / grid.a ** 2) <= 1e-10 * s.power()


def test_legendre_tables_orthonormal():
    """2 pi sum_j w_j P_lm P_l'm = delta_ll'"""
    L = 12
    grid = build_grid(L)
    p = legendre_tables(L, grid.n_phi).p
    for m in range(L + 1):
        gram = 2.0 * np.pi * np.einsum("j,jl,jk->lk", grid.weights, p[:, :, m], p[:, :, m])
        expected = np.diag([1.0 if l >= m else 0.0 for l in range(L + 1)])
        assert np.max(np.abs(gram - expected)) <= 1e-12


def test_synthesized_derivatives_closed_form(grid):
    phi, theta = node_mesh(grid)
    c10 = np.sqrt(3.0 / (4.0 * np.pi))
    d = synthesize_derivatives(from_coefficients({(1, 0): 1.0}, grid.L, grid.a), grid)
    assert np.max(np.abs(d.value - c10 * np.cos(phi))) <= 1e-13
    assert np.max(np.abs(d.d_phi + c10 * np.sin(phi))) <= 1e-13
    assert np.max(np.abs(d.d_phi_phi + c10 * np.cos(phi))) <= 1e-12
    assert np.max(np.abs(d.d_theta)) <= 1e-15

    c21 = 2.0 * np.sqrt(15.0 / (8.0 * np.pi))
    d = synthesize_derivatives(from_coefficients({(2, 1): 1.0}, grid.L, grid.a), grid)
    assert np.max(np.abs(d.d_theta - c21 * np.sin(phi) * np.cos(phi) * np.sin(theta))) <= 1e-13
    assert np.max(np.abs(d.d_theta_theta - c21 * np.sin(phi) * np.cos(phi) * np.cos(theta))) <= 1e-13
    assert np.max(np.abs(d.d_phi + c21 * np.cos(2.0 * phi) * np.cos(theta))) <= 1e-12
    assert np.max(np.abs(d.d_theta_phi - c21 * np.cos(2.0 * phi) * np.sin(theta))) <= 1e-12
    assert np.max(np.abs(d.d_phi_phi - 2.0 * c21 * np.sin(2.0 * phi) * np.cos(theta))) <= 1e-11


def test_laplacian_symbol(grid):
    s = from_coefficients({(0, 0): 3.0, (1, 0): 1.0}, grid.L, grid.a)
    lap = laplacian(s)
    assert lap.coeffs[0, 0] == 0.0
    assert lap.coeffs[1, 0] == -2.0
    scaled = laplacian(from_coefficients({(3, 2): 1.0}, 8, 2.0))
    assert abs(scaled.coeffs[3, 2] + 12.0 / 4.0) <= 1e-15


def test_invert_laplacian(grid, rng):
    s = random_band_limited(grid.L, grid.a, grid.L, rng)
    back = invert_laplacian(laplacian(s))
    expected = s.coeffs.copy()
    expected[0, 0] = 0.0
    assert np.max(np.abs(back.coeffs - expected)) <= 1e-11 * s.max_abs()

    assert np.all(invert_laplacian(SpectralScalar.zeros(grid.L, grid.a)).coeffs == 0.0)
    y32 = invert_laplacian(from_coefficients({(3, 2): 1.0}, grid.L, 1.0))
    assert abs(y32.coeffs[3, 2] + 1.0 / 12.0) <= 1e-15


def test_invert_laplacian_rejects_mean(grid):
    with pytest.raises(GaugeViolationError) as exc_info:
        invert_laplacian(from_coefficients({(0, 0): 1e-3}, grid.L, grid.a))
    assert exc_info.value.magnitude == pytest.approx(1e-3)


def test_random_band_limited_content(grid):
    first = random_band_limited(grid.L, grid.a, 6, np.random.default_rng(3), min_degree=2)
    second = random_band_limited(grid.L, grid.a, 6, np.random.default_rng(3), min_degree=2)
    assert np.array_equal(first.coeffs, second.coeffs)
    assert np.all(first.coeffs[:2] == 0.0)
    assert np.all(first.coeffs[7:] == 0.0)
    assert np.all(first.coeffs[:, 0].imag == 0.0)
    upper = np.triu(np.ones((grid.L + 1, grid.L + 1), dtype=bool), k=1)
    assert np.all(first.coeffs[upper] == 0.0)
    with pytest.raises(InvalidParameterError):
        random_band_limited(grid.L, grid.a, grid.L + 1, np.random.default_rng(3))


def test_truncate(grid, rng):
    s = random_band_limited(grid.L, grid.a, grid.L, rng)
    t = truncate(s, 4)
    assert np.all(t.coeffs[5:] == 0.0)
    assert np.array_equal(t.coeffs[:5], s.coeffs[:5])


def test_random_band_limited_respects_band(rng):
    s = random_band_limited(12, 1.0, 6, rng, min_degree=2)
    assert np.all(s.coeffs[:2] == 0.0)
    assert np.all(s.coeffs[7:] == 0.0)
    assert np.all(np.abs(s.coeffs[2:7, 0]) > 0.0)
