"""
Pytest configuration and fixtures for testing
"""

import os

# Set testing environment before any imports
os.environ["ENVIRONMENT"] = "testing"

import numpy as np
import pytest

from app.models.simulation import DiagnosticsRecord, SimParams
from app.sphere.fields import StreamFunction, velocity_from_potentials, velocity_from_stream
from app.sphere.geometry import build_grid
from app.sphere.harmonics import random_band_limited


@pytest.fixture
def grid():
    """Dealiased grid at the default truncation"""
    return build_grid(15, 1.0)


@pytest.fixture
def small_grid():
    return build_grid(8, 1.0)


@pytest.fixture
def rng():
    """Deterministic generator for random band-limited fields"""
    return np.random.default_rng(20240607)


@pytest.fixture
def random_stream(grid, rng):
    return StreamFunction(random_band_limited(grid.L, grid.a, 7, rng, min_degree=1))


@pytest.fixture
def random_solenoidal(grid, random_stream):
    return velocity_from_stream(random_stream, grid)


@pytest.fixture
def random_field(grid, rng):
    psi = StreamFunction(random_band_limited(grid.L, grid.a, 7, rng, min_degree=1))
    chi = random_band_limited(grid.L, grid.a, 7, rng, min_degree=1)
    return velocity_from_potentials(psi, chi, grid)


@pytest.fixture
def quiet_params():
    """Weakly nonlinear viscous parameters at L=15"""
    return SimParams(L=15, mu_s=0.05, omega=1.0, dt=1e-2, t_end=1.0)


def make_record(t, residual, amp=1.0):
    return DiagnosticsRecord(
        t=t, energy=residual ** 2, enstrophy=0.0, c_z=0.0,
        amp_l1=(amp, 0.0, amp), deformation=0.0, residual=residual, div_max=0.0,
    )


def write_config(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path
