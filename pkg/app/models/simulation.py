from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings


class SimParams(BaseModel):
    """Physical and numerical parameters of one simulation"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    L: int = Field(15, ge=2, le=255)
    mu_s: float = Field(0.01, ge=0.0)
    omega: float = 1.0
    a: float = Field(1.0, gt=0.0)
    dt: float = Field(1e-2, gt=0.0)
    t_end: float = Field(10.0, ge=0.0)
    dealias: bool = True

    @property
    def n_steps(self) -> int:
        return int(self.t_end / self.dt + 1e-9)


class EquilibriumInit(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["equilibrium"] = "equilibrium"
    c: float = 1.0


class TiltedRotationInit(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["tilted_rotation"] = "tilted_rotation"
    axis: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    c: float = 1.0

    @field_validator("axis")
    @classmethod
    def axis_nonzero(cls, v):
        if all(component == 0.0 for component in v):
            raise ValueError("rotation axis must be nonzero")
        return v


class ModeInit(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["mode"] = "mode"
    l: int = Field(2, ge=1)
    m: int = Field(1, ge=0)
    amplitude: float = 1e-4

    @model_validator(mode="after")
    def order_within_degree(self):
        if self.m > self.l:
            raise ValueError(f"order m={self.m} exceeds degree l={self.l}")
        return self


class RandomInit(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["random"] = "random"
    seed: int = 1
    spectrum_slope: float = -1.0
    amplitude: float = Field(0.05, gt=0.0)
    max_degree: int = Field(5, ge=1)
    include_tilt: bool = True


InitSpec = Annotated[
    Union[EquilibriumInit, TiltedRotationInit, ModeInit, RandomInit],
    Field(discriminator="kind"),
]


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: str = "out"
    cadence: int = Field(default_factory=lambda: settings.DIAGNOSTICS_CADENCE, ge=1)


class RunConfig(BaseModel):
    """Everything that determines one run"""

    model_config = ConfigDict(extra="forbid")

    sim: SimParams = Field(default_factory=SimParams)
    init: InitSpec = Field(default_factory=EquilibriumInit)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def init_fits_truncation(self):
        degree = getattr(self.init, "l", None) or getattr(self.init, "max_degree", None)
        if degree is not None and degree > self.sim.L:
            raise ValueError(f"initial condition degree {degree} exceeds truncation L={self.sim.L}")
        return self


class SweepGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega: List[float] = Field(min_length=1)
    mu_s: List[float] = Field(min_length=1)


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    base: RunConfig
    sweep: SweepGrid


class DiagnosticsRecord(BaseModel):
    """Scalar observables of one state"""

    model_config = ConfigDict(frozen=True)

    t: float
    energy: float
    enstrophy: float
    c_z: float
    amp_l1: Tuple[float, float, float]
    deformation: float
    residual: float
    div_max: float

    @classmethod
    def csv_header(cls) -> List[str]:
        return [
            "t", "energy", "enstrophy", "c_z",
            "amp_l1_m-1", "amp_l1_m0", "amp_l1_m+1",
            "deformation", "residual", "div_max",
        ]

    def csv_row(self) -> List[float]:
        return [
            self.t, self.energy, self.enstrophy, self.c_z,
            *self.amp_l1,
            self.deformation, self.residual, self.div_max,
        ]


class RunSummary(BaseModel):
    status: str = "ok"
    steps: int
    records: int
    t_final: float
    initial_c_z: float
    final_c_z: float
    initial_residual: float
    final_residual: float
    alpha: Optional[float] = None
    r_squared: Optional[float] = None
    amp_l1: Tuple[float, float, float]
    l1_rate: Optional[float] = None
    wall_time: float


class IdentityReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    max_error: float
    trials: int
    tolerance: float
    passed: bool = Field(alias="pass")


class RossbyResult(BaseModel):
    l: int
    m: int
    omega: float
    measured_drift: float
    predicted_drift: float
    relative_error: float
    passed: bool


class SweepRow(BaseModel):
    omega: float
    mu_s: float
    status: str
    final_c_z: Optional[float] = None
    final_residual: Optional[float] = None
    alpha: Optional[float] = None
    r_squared: Optional[float] = None
    amp_l1: Optional[Tuple[float, float, float]] = None

    @classmethod
    def csv_header(cls) -> List[str]:
        return [
            "omega", "mu_s", "status", "final_c_z", "final_residual", "alpha", "r_squared",
            "amp_l1_m-1", "amp_l1_m0", "amp_l1_m+1",
        ]

    def csv_row(self) -> list:
        amps = list(self.amp_l1) if self.amp_l1 is not None else ["", "", ""]
        optional = [
            "" if value is None else value
            for value in (self.final_c_z, self.final_residual, self.alpha, self.r_squared)
        ]
        return [self.omega, self.mu_s, self.status, *optional, *amps]


class RossbyRequest(BaseModel):
    """Single-mode precession experiment"""

    model_config = ConfigDict(extra="forbid")

    l: int = Field(2, ge=1)
    m: int = 1
    omega: float = 1.0
    T: float = Field(20.0, gt=0.0)
    L: int = Field(15, ge=2)
    dt: float = Field(1e-2, gt=0.0)
    amplitude: float = Field(1e-4, gt=0.0)

    @model_validator(mode="after")
    def mode_is_resolved(self):
        if not 0 < abs(self.m) <= self.l:
            raise ValueError(f"need 0 < |m| <= l, got l={self.l}, m={self.m}")
        if self.l > self.L:
            raise ValueError(f"degree l={self.l} exceeds truncation L={self.L}")
        return self
