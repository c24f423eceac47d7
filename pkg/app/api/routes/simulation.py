from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query

from app.config import settings
from app.models.simulation import RossbyRequest, RunConfig
from app.services.rossby_service import RossbyService
from app.services.simulation_service import SimulationService
from app.services.verification_service import VerificationService
from app.utils.errors import DivergenceError, SphereFlowError, StepSizeError

router = APIRouter(prefix=settings.API_V1_STR, tags=["simulation"])

# Singleton instances for dependencies
_simulation_service = SimulationService()
_verification_service = VerificationService()
_rossby_service = RossbyService()


# Dependency injection
def get_simulation_service():
    return _simulation_service


def get_verification_service():
    return _verification_service


def get_rossby_service():
    return _rossby_service


def _http_error(e: SphereFlowError) -> HTTPException:
    status = 422 if isinstance(e, (DivergenceError, StepSizeError)) else 400
    return HTTPException(status_code=status, detail=str(e))


@router.get("/verify")
def verify(
    L: int = Query(settings.DEFAULT_DEGREE),
    a: float = Query(settings.DEFAULT_RADIUS),
    seed: Optional[int] = Query(None),
    verification_service: VerificationService = Depends(get_verification_service),
):
    """Run the identity suite"""
    if L < settings.VERIFY_MIN_DEGREE:
        raise HTTPException(status_code=400, detail=f"L must be >= {settings.VERIFY_MIN_DEGREE}")
    try:
        reports = verification_service.verify(L, a, settings.DEFAULT_SEED if seed is None else seed)
    except SphereFlowError as e:
        raise _http_error(e)
    return {
        "reports": [report.model_dump(by_alias=True) for report in reports],
        "all_passed": verification_service.all_passed(reports),
    }


@router.post("/simulations/run")
def run_simulation(config: RunConfig, simulation_service: SimulationService = Depends(get_simulation_service)):
    """Run a simulation and return its diagnostics (no files are written)"""
    if config.sim.n_steps > settings.API_MAX_STEPS:
        raise HTTPException(
            status_code=400,
            detail=f"run needs {config.sim.n_steps} steps, the HTTP limit is {settings.API_MAX_STEPS}",
        )
    try:
        records, summary = simulation_service.execute(config)
    except SphereFlowError as e:
        raise _http_error(e)
    return {
        "status": "success",
        "summary": summary.model_dump(),
        "records": [entry.model_dump() for entry in records],
    }


@router.post("/simulations/rossby")
def rossby(request: RossbyRequest, rossby_service: RossbyService = Depends(get_rossby_service)):
    """Measure the precession drift of a single harmonic mode"""
    steps = int(request.T / request.dt + 1e-9)
    if steps > settings.API_MAX_STEPS:
        raise HTTPException(status_code=400, detail=f"experiment needs {steps} steps, the HTTP limit is {settings.API_MAX_STEPS}")
    try:
        result = rossby_service.measure(request)
    except SphereFlowError as e:
        raise _http_error(e)
    return result.model_dump()
