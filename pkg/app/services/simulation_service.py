import csv
import time
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
from jinja2 import Environment, FileSystemLoader

from app.config import settings
from app.models.simulation import (
    DiagnosticsRecord,
    EquilibriumInit,
    ModeInit,
    RandomInit,
    RunConfig,
    RunSummary,
    TiltedRotationInit,
)
from app.sphere.dynamics import Observer, run
from app.sphere.diagnostics import fit_decay_rate, l1_amplitude_rate
from app.sphere.fields import StreamFunction, rotation_stream
from app.sphere.harmonics import from_coefficients, random_band_limited
from app.sphere.state import grid_for
from app.utils.errors import DegenerateFitError, InvalidParameterError
from app.utils.log import get_logger

logger = get_logger(__name__)

TEMPLATES_DIR = Path(__file__).resolve().parents[2] / "templates"


def initial_stream(config: RunConfig) -> StreamFunction:
    """Stream function of the configured initial condition"""
    grid = grid_for(config.sim)
    spec = config.init
    if isinstance(spec, EquilibriumInit):
        return rotation_stream((0.0, 0.0, 1.0), spec.c, grid)
    if isinstance(spec, TiltedRotationInit):
        return rotation_stream(spec.axis, spec.c, grid)
    if isinstance(spec, ModeInit):
        return StreamFunction(from_coefficients({(spec.l, spec.m): spec.amplitude}, grid.L, grid.a))
    if isinstance(spec, RandomInit):
        rng = np.random.default_rng(spec.seed)
        psi = random_band_limited(
            grid.L, grid.a, spec.max_degree, rng,
            slope=spec.spectrum_slope, amplitude=spec.amplitude, min_degree=1,
        )
        if not spec.include_tilt:
            psi.coeffs[1, 1] = 0.0
        return StreamFunction(psi)
    raise InvalidParameterError(f"unsupported initial condition {spec!r}")


class SimulationService:
    """Runs one configured simulation and writes its time series and summary"""

    def __init__(self, templates_dir: Path = TEMPLATES_DIR):
        self.jinja_env = Environment(loader=FileSystemLoader(str(templates_dir)), keep_trailing_newline=True)

    def execute(
        self,
        config: RunConfig,
        observers: Iterable[Observer] = (),
    ) -> Tuple[List[DiagnosticsRecord], RunSummary]:
        logger.info(
            "run start: init=%s L=%d omega=%g mu_s=%g dt=%g t_end=%g",
            config.init.kind, config.sim.L, config.sim.omega, config.sim.mu_s, config.sim.dt, config.sim.t_end,
        )

        def progress(entry: DiagnosticsRecord) -> None:
            logger.debug("t=%.4f energy=%.6e residual=%.6e c_z=%.12g", entry.t, entry.energy, entry.residual, entry.c_z)

        started = time.perf_counter()
        records = run(
            config.sim,
            initial_stream(config),
            observers=[progress, *observers],
            cadence=config.output.cadence,
        )
        summary = self.summarize(records, config, time.perf_counter() - started)
        logger.info(
            "run finished: %d steps, final residual %.3e, alpha %s",
            summary.steps, summary.final_residual, summary.alpha,
        )
        return records, summary

    def summarize(self, records: List[DiagnosticsRecord], config: RunConfig, wall_time: float) -> RunSummary:
        first, last = records[0], records[-1]
        try:
            alpha, r_squared = fit_decay_rate(records)
        except DegenerateFitError:
            alpha, r_squared = None, None
        try:
            l1_rate = l1_amplitude_rate(records)
        except DegenerateFitError:
            l1_rate = None
        return RunSummary(
            steps=config.sim.n_steps,
            records=len(records),
            t_final=last.t,
            initial_c_z=first.c_z,
            final_c_z=last.c_z,
            initial_residual=first.residual,
            final_residual=last.residual,
            alpha=alpha,
            r_squared=r_squared,
            amp_l1=last.amp_l1,
            l1_rate=l1_rate,
            wall_time=wall_time,
        )

    def write_timeseries(self, records: List[DiagnosticsRecord], path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(DiagnosticsRecord.csv_header())
            for entry in records:
                writer.writerow([repr(float(value)) for value in entry.csv_row()])
        return path

    def render_summary(self, summary: RunSummary, config: RunConfig) -> str:
        template = self.jinja_env.get_template("summary.txt.j2")
        return template.render(summary=summary, config=config)

    def write_summary(self, summary: RunSummary, config: RunConfig, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render_summary(summary, config))
        return path

    def run(self, config: RunConfig, out_dir: Optional[Union[str, Path]] = None) -> RunSummary:
        out = Path(out_dir if out_dir is not None else config.output.dir)
        records, summary = self.execute(config)
        self.write_timeseries(records, out / settings.TIMESERIES_FILENAME)
        self.write_summary(summary, config, out / settings.SUMMARY_FILENAME)
        logger.info("wrote %s and %s to %s", settings.TIMESERIES_FILENAME, settings.SUMMARY_FILENAME, out)
        return summary
