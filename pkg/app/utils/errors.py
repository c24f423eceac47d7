"""
Exception hierarchy shared by the numerical kernels, the services and both outer surfaces
"""

from typing import Optional


class SphereFlowError(Exception):
    """Base class for all simulator errors"""


class InvalidParameterError(SphereFlowError, ValueError):
    """A parameter is outside its admissible range or two inputs do not match"""


class GaugeViolationError(SphereFlowError, ValueError):
    """A source handed to the inverse Laplacian has a nonzero mean"""

    def __init__(self, magnitude: float, tolerance: float):
        self.magnitude = magnitude
        self.tolerance = tolerance
        super().__init__(
            f"mean-zero gauge violated: |(0,0) coefficient| = {magnitude:.3e} exceeds {tolerance:.1e}"
        )


class StepSizeError(SphereFlowError):
    """The time step violates the advective stability bound"""

    def __init__(self, dt: float, admissible_dt: float):
        self.dt = dt
        self.admissible_dt = admissible_dt
        super().__init__(f"time step dt={dt:.4g} exceeds the admissible dt={admissible_dt:.4g}")


class DivergenceError(SphereFlowError):
    """The solution blew up (non-finite spectral coefficients)"""

    def __init__(self, last_good_time: Optional[float]):
        self.last_good_time = last_good_time
        super().__init__(f"numerical divergence; last finite state at t={last_good_time}")


class DegenerateFitError(SphereFlowError, ValueError):
    """A decay-rate fit was requested on data it cannot be fitted to"""


class PreconditionError(SphereFlowError, ValueError):
    """An operation was called on an input outside its domain"""


class ConfigError(SphereFlowError):
    """A run or sweep configuration file could not be read or validated"""
