import numpy as np
import pytest

import app.sphere.dynamics as dynamics
from app.models.simulation import SimParams
from app.sphere.diagnostics import energy_balance_error, fit_decay_rate
from app.sphere.dynamics import (
    admissible_step,
    check_step_size,
    diffusion_symbol,
    jacobian,
    planetary_vorticity,
    rhs_velocity_oracle,
    rhs_vorticity,
    run,
    step,
)
from app.sphere.fields import (
    StreamFunction,
    inner_product,
    killing_basis,
    rotation,
    rotation_stream,
    velocity_from_stream,
)
from app.sphere.harmonics import SpectralScalar, from_coefficients, random_band_limited
from app.sphere.state import SimState, grid_for
from app.utils.errors import DivergenceError, GaugeViolationError, InvalidParameterError, StepSizeError


def _equilibrium(params, c=1.0):
    return SimState.from_stream(rotation_stream((0.0, 0.0, 1.0), c, grid_for(params)), params)


def _random_state(params, amplitude=0.02, degree=5, seed=11):
    psi = random_band_limited(params.L, params.a, degree, np.random.default_rng(seed), amplitude=amplitude, min_degree=1)
    return SimState.from_stream(StreamFunction(psi), params)


def test_diffusion_symbol():
    params = SimParams(mu_s=1.0, a=1.0)
    assert diffusion_symbol(params, 1) == 0.0
    assert diffusion_symbol(params, 2) == -4.0
    assert diffusion_symbol(params, 0) == 2.0
    scaled = diffusion_symbol(SimParams(mu_s=0.5, a=2.0), np.arange(4))
    assert np.allclose(scaled, [0.25, 0.0, -0.5, -1.25], rtol=0.0, atol=1e-15)


def test_diffusion_symbol_rejects_degrees_outside_truncation():
    params = SimParams(L=15, mu_s=1.0)
    assert diffusion_symbol(params, 15) == -238.0
    for l in (-1, 16):
        with pytest.raises(InvalidParameterError):
            diffusion_symbol(params, l)
    with pytest.raises(InvalidParameterError):
        diffusion_symbol(params, np.arange(17))


def test_jacobian_vanishing_cases(grid, rng):
    A = random_band_limited(grid.L, grid.a, 7, rng, min_degree=1)
    assert jacobian(A, A, grid).max_abs() <= 1e-10

    constant = from_coefficients({(0, 0): 3.0}, grid.L, grid.a)
    assert jacobian(A, constant, grid).max_abs() <= 1e-10

    psi_z = rotation_stream((0.0, 0.0, 1.0), 1.0, grid).psi
    assert jacobian(psi_z, planetary_vorticity(grid, 1.0), grid).max_abs() <= 1e-10


def test_jacobian_antisymmetric(grid, rng):
    A = random_band_limited(grid.L, grid.a, 7, rng, min_degree=1)
    B = random_band_limited(grid.L, grid.a, 7, rng, min_degree=1)
    total = jacobian(A, B, grid) + jacobian(B, A, grid)
    assert total.max_abs() <= 1e-11 * jacobian(A, B, grid).max_abs()


def test_planetary_vorticity_is_degree_one(grid):
    f_c = planetary_vorticity(grid, 1.5)
    assert f_c.coeffs[1, 0].real == pytest.approx(2.0 * 1.5 * np.sqrt(4.0 * np.pi / 3.0), rel=1e-13)
    rest = f_c.coeffs.copy()
    rest[1, 0] = 0.0
    assert np.max(np.abs(rest)) <= 1e-13


def test_state_rejects_mismatch_and_mean(grid):
    params = SimParams(L=15)
    with pytest.raises(InvalidParameterError):
        SimState(t=0.0, zeta=SpectralScalar.zeros(8, 1.0), params=params)
    with pytest.raises(GaugeViolationError):
        SimState(t=0.0, zeta=from_coefficients({(0, 0): 1.0}, 15, 1.0), params=params)


def test_equilibrium_tendency_vanishes(quiet_params):
    state = _equilibrium(quiet_params)
    assert rhs_vorticity(state).max_abs() <= 1e-10
    assert rhs_velocity_oracle(state).max_norm() <= 1e-8


def test_zero_state_tendency(quiet_params):
    state = SimState(t=0.0, zeta=SpectralScalar.zeros(15, 1.0), params=quiet_params)
    assert rhs_vorticity(state).max_abs() == 0.0
    assert step(state).zeta.max_abs() == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_vorticity_form_matches_velocity_oracle(seed):
    """rot of the projected momentum tendency equals the spectral vorticity tendency"""
    params = SimParams(L=15, mu_s=0.05, omega=1.3, a=1.0)
    state = _random_state(params, amplitude=0.1, degree=7, seed=seed)
    expected = rhs_vorticity(state)
    measured = rotation(rhs_velocity_oracle(state))
    assert (measured - expected).max_abs() <= 1e-8 * expected.max_abs()


def test_vorticity_form_matches_velocity_oracle_on_larger_sphere():
    params = SimParams(L=12, mu_s=0.2, omega=-0.7, a=2.5)
    state = _random_state(params, amplitude=0.3, degree=6, seed=5)
    expected = rhs_vorticity(state)
    measured = rotation(rhs_velocity_oracle(state))
    assert (measured - expected).max_abs() <= 1e-8 * expected.max_abs()


def test_tilted_rotation_is_steady_without_coriolis():
    params = SimParams(L=15, mu_s=0.3, omega=0.0)
    grid = grid_for(params)
    state = SimState.from_stream(rotation_stream((1.0, 0.0, 0.0), 1.0, grid), params)
    assert rhs_velocity_oracle(state).max_norm() <= 1e-8


def test_coriolis_tendency_of_tilted_rotation_is_orthogonal():
    """With rotation z_x precesses: nonzero tendency, orthogonal to z_x"""
    params = SimParams(L=15, mu_s=0.0, omega=1.0)
    grid = grid_for(params)
    state = SimState.from_stream(rotation_stream((1.0, 0.0, 0.0), 1.0, grid), params)
    tendency = rhs_velocity_oracle(state)
    z_x = killing_basis(grid).z_x
    assert tendency.max_norm() > 0.1
    assert abs(inner_product(tendency, z_x)) <= 1e-10 * tendency.max_norm()


def test_step_size_bound():
    params = SimParams(L=15, dt=1.0, mu_s=0.0)
    state = _equilibrium(params, c=100.0)
    admissible = admissible_step(state)
    assert admissible < 1.0
    with pytest.raises(StepSizeError) as exc_info:
        step(state)
    assert exc_info.value.dt == 1.0
    assert exc_info.value.admissible_dt == pytest.approx(admissible)


def test_step_size_of_rest_state(quiet_params):
    state = SimState(t=0.0, zeta=SpectralScalar.zeros(15, 1.0), params=quiet_params)
    assert admissible_step(state) == np.inf
    check_step_size(state)


def test_equilibrium_is_stationary_over_long_runs():
    """1000 steps of c z_z leave the vorticity unchanged"""
    params = SimParams(L=15, mu_s=0.01, omega=1.0, dt=1e-2)
    state = _equilibrium(params)
    start = state.zeta
    for _ in range(1000):
        state = step(state)
    assert (state.zeta - start).max_abs() <= 1e-8 * start.max_abs()
    assert state.t == pytest.approx(10.0)


def test_step_keeps_mean_zero(quiet_params):
    state = step(_random_state(quiet_params))
    assert state.zeta.coeffs[0, 0] == 0.0


def test_run_record_count(quiet_params):
    init = rotation_stream((0.0, 0.0, 1.0), 1.0, grid_for(quiet_params))
    assert len(run(quiet_params.model_copy(update={"t_end": 0.0}), init)) == 1

    params = SimParams(L=15, t_end=0.1, dt=1e-2)
    records = run(params, init, cadence=3)
    assert [round(r.t, 12) for r in records] == [0.0, 0.03, 0.06, 0.09]
    with pytest.raises(InvalidParameterError):
        run(params, init, cadence=0)


def test_run_rejects_mismatched_init(quiet_params):
    init = rotation_stream((0.0, 0.0, 1.0), 1.0, grid_for(SimParams(L=8)))
    with pytest.raises(InvalidParameterError):
        run(quiet_params, init)


def test_run_observers_and_step_hook(quiet_params):
    params = quiet_params.model_copy(update={"t_end": 0.05})
    seen, steps = [], []
    init = rotation_stream((0.0, 0.0, 1.0), 1.0, grid_for(params))
    records = run(params, init, observers=[seen.append], on_step=lambda state, index: steps.append(index))
    assert seen == records
    assert steps == [0, 1, 2, 3, 4, 5]


def test_equilibrium_energy_constant():
    params = SimParams(L=15, mu_s=0.05, omega=1.0, dt=1e-2, t_end=1.0)
    records = run(params, rotation_stream((0.0, 0.0, 1.0), 1.0, grid_for(params)))
    energies = np.array([r.energy for r in records])
    assert np.max(np.abs(energies - energies[0])) <= 1e-8 * energies[0]


def test_viscous_run_energy_decays_and_zonal_part_is_conserved():
    params = SimParams(L=15, mu_s=0.05, omega=1.0, dt=1e-2, t_end=2.0)
    grid = grid_for(params)
    psi = random_band_limited(15, 1.0, 5, np.random.default_rng(3), amplitude=0.02, min_degree=2)
    psi = psi + rotation_stream((0.0, 0.0, 1.0), 0.5, grid).psi
    records = run(params, StreamFunction(psi))
    energies = np.array([r.energy for r in records])
    assert np.all(np.diff(energies) <= 1e-10 * energies[0])
    residuals = np.array([r.residual for r in records])
    assert np.all(np.diff(residuals) <= 1e-10 * residuals[0])
    c_z = np.array([r.c_z for r in records])
    assert np.max(np.abs(c_z - c_z[0])) <= 1e-6 * abs(c_z[0])
    assert c_z[0] == pytest.approx(0.5, rel=1e-10)


def test_energy_balance():
    """d/dt residual^2 = -4 mu_s ||D||^2 along the trajectory"""
    params = SimParams(L=15, mu_s=0.01, omega=1.0, dt=1e-2, t_end=1.0)
    psi = random_band_limited(15, 1.0, 5, np.random.default_rng(8), amplitude=0.02, min_degree=2)
    records = run(params, StreamFunction(psi))
    assert energy_balance_error(records, params.mu_s) <= 1e-4


def test_inviscid_nonrotating_run_conserves_energy_and_enstrophy():
    params = SimParams(L=15, mu_s=0.0, omega=0.0, dt=1e-2, t_end=1.0)
    psi = random_band_limited(15, 1.0, 5, np.random.default_rng(4), amplitude=0.02, min_degree=1)
    records = run(params, StreamFunction(psi))
    for name in ("energy", "enstrophy"):
        values = np.array([getattr(r, name) for r in records])
        assert np.max(np.abs(values - values[0])) <= 1e-6 * values[0]


def test_single_mode_decay_rate():
    """A small (5,3) mode decays in L2 at mu_s (l(l+1) - 2) / a^2"""
    params = SimParams(L=15, mu_s=0.01, omega=1.0, dt=1e-2, t_end=4.0)
    init = StreamFunction(from_coefficients({(5, 3): 1e-4}, 15, 1.0))
    records = run(params, init, cadence=10)
    alpha, r_squared = fit_decay_rate(records)
    assert alpha == pytest.approx(0.28, rel=0.05)
    assert r_squared > 0.999


def test_pure_precession_keeps_amplitude():
    """A lone (2,1) mode only rotates in longitude when mu_s = 0"""
    params = SimParams(L=15, mu_s=0.0, omega=1.0, dt=1e-2, t_end=1.0)
    state = SimState.from_stream(StreamFunction(from_coefficients({(2, 1): 1e-4}, 15, 1.0)), params)
    start = abs(state.zeta.coeffs[2, 1])
    for _ in range(params.n_steps):
        state = step(state)
    assert abs(abs(state.zeta.coeffs[2, 1]) - start) <= 1e-6 * start
    phase = np.angle(state.zeta.coeffs[2, 1])
    assert phase == pytest.approx(-1.0 / 3.0, rel=1e-3)


def test_blow_up_raises_divergence(monkeypatch, quiet_params):
    def broken_step(state):
        zeta = state.zeta.coeffs.copy()
        zeta[2, 0] = np.nan
        return SimState(t=state.t + state.params.dt, zeta=SpectralScalar(zeta, state.zeta.L, state.zeta.a), params=state.params)

    monkeypatch.setattr(dynamics, "step", broken_step)
    init = rotation_stream((0.0, 0.0, 1.0), 1.0, grid_for(quiet_params))
    with pytest.raises(DivergenceError) as exc_info:
        run(quiet_params, init)
    assert exc_info.value.last_good_time == 0.0


def test_velocity_view_of_state(quiet_params):
    state = _equilibrium(quiet_params, c=2.0)
    z_z = killing_basis(state.grid).z_z
    assert (state.velocity() - 2.0 * z_z).max_norm() <= 1e-13
    assert (velocity_from_stream(state.stream(), state.grid) - state.velocity()).max_norm() == 0.0
