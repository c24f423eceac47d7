import csv
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple, Union

from app.config import settings
from app.models.simulation import RunConfig, SimParams, SweepConfig, SweepRow
from app.services.simulation_service import SimulationService
from app.utils.errors import SphereFlowError
from app.utils.log import get_logger

logger = get_logger(__name__)


def cell_config(base: RunConfig, omega: float, mu_s: float) -> RunConfig:
    sim = SimParams.model_validate({**base.sim.model_dump(), "omega": omega, "mu_s": mu_s})
    return RunConfig(sim=sim, init=base.init, output=base.output)


def cell_directory(out_dir: Path, omega: float, mu_s: float) -> Path:
    return out_dir / f"omega={omega!r}_mu_s={mu_s!r}"


def run_cell(payload: Tuple[dict, float, float, Optional[str]]) -> SweepRow:
    """Run one (omega, mu_s) cell; failures are reported in the row, not raised"""
    base, omega, mu_s, out_dir = payload
    service = SimulationService()
    try:
        config = cell_config(RunConfig.model_validate(base), omega, mu_s)
        if out_dir is None:
            _, summary = service.execute(config)
        else:
            summary = service.run(config, cell_directory(Path(out_dir), omega, mu_s))
    except (SphereFlowError, ValueError, OSError) as e:
        logger.warning("sweep cell omega=%g mu_s=%g failed: %s", omega, mu_s, e)
        return SweepRow(omega=omega, mu_s=mu_s, status=f"error: {e}")
    return SweepRow(
        omega=omega,
        mu_s=mu_s,
        status="ok",
        final_c_z=summary.final_c_z,
        final_residual=summary.final_residual,
        alpha=summary.alpha,
        r_squared=summary.r_squared,
        amp_l1=summary.amp_l1,
    )


class SweepService:
    """Independent runs over an (omega, mu_s) grid"""

    def __init__(self, workers: int = 1):
        self.workers = max(1, workers)

    @staticmethod
    def cells(config: SweepConfig) -> List[Tuple[float, float]]:
        return sorted({(omega, mu_s) for omega in config.sweep.omega for mu_s in config.sweep.mu_s})

    def run(self, config: SweepConfig, out_dir: Optional[Union[str, Path]] = None) -> List[SweepRow]:
        target = None if out_dir is None else str(out_dir)
        base = config.base.model_dump()
        payloads = [(base, omega, mu_s, target) for omega, mu_s in self.cells(config)]
        logger.info("sweep: %d cells on %d worker(s)", len(payloads), self.workers)
        if self.workers == 1 or len(payloads) == 1:
            rows = [run_cell(payload) for payload in payloads]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                rows = list(pool.map(run_cell, payloads))
        return sorted(rows, key=lambda row: (row.omega, row.mu_s))

    @staticmethod
    def all_ok(rows: List[SweepRow]) -> bool:
        return all(row.status == "ok" for row in rows)

    def write(self, rows: List[SweepRow], out_dir: Union[str, Path]) -> Path:
        path = Path(out_dir) / settings.SWEEP_FILENAME
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(SweepRow.csv_header())
            for row in rows:
                writer.writerow(row.csv_row())
        return path
