"""
Run and sweep configuration files.

A run file is flat `key = value` text with dotted sections, e.g.

    sim.L = 15
    sim.mu_s = 0.05
    init.kind = random
    init.seed = 1
    output.cadence = 10
    sweep.omega = 0, 1

It is read with python-dotenv and validated into RunConfig / SweepConfig.
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError

from app.models.simulation import RunConfig, SweepConfig
from app.utils.errors import ConfigError

SECTIONS = ("sim", "init", "output", "sweep")
LIST_KEYS = {("init", "axis"), ("sweep", "omega"), ("sweep", "mu_s")}

RawSections = Dict[str, Dict[str, Union[str, List[str]]]]


def read_config_file(path: Union[str, Path]) -> RawSections:
    """Group the file's keys by section; list-valued keys are split on commas"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    try:
        raw = dotenv_values(path, interpolate=False)
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read configuration file {path}: {e}") from e

    sections: RawSections = {}
    unknown = []
    for key, value in raw.items():
        section, _, name = key.partition(".")
        if section not in SECTIONS or not name:
            unknown.append(key)
            continue
        if value is None or value == "":
            raise ConfigError(f"{path}: key '{key}' has no value")
        if (section, name) in LIST_KEYS:
            value = [item.strip() for item in value.split(",") if item.strip()]
        sections.setdefault(section, {})[name] = value
    if unknown:
        raise ConfigError(f"{path}: unknown keys {', '.join(sorted(unknown))} (expected sections {', '.join(SECTIONS)})")
    return sections


def _validate(model: type, data: dict, source: str) -> BaseModel:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or '<root>'}: {error['msg']}"
            for error in e.errors()
        )
        raise ConfigError(f"{source}: invalid configuration: {problems}") from e


def _run_payload(sections: RawSections, seed: Optional[int]) -> dict:
    payload = {key: dict(sections.get(key, {})) for key in ("sim", "init", "output")}
    if seed is not None and payload["init"].get("kind") == "random":
        payload["init"]["seed"] = seed
    return {key: value for key, value in payload.items() if value}


def load_run_config(path: Union[str, Path], seed: Optional[int] = None) -> RunConfig:
    sections = read_config_file(path)
    if "sweep" in sections:
        raise ConfigError(f"{path}: sweep.* keys belong in a sweep configuration")
    return _validate(RunConfig, _run_payload(sections, seed), str(path))


def load_sweep_config(path: Union[str, Path], seed: Optional[int] = None) -> SweepConfig:
    sections = read_config_file(path)
    if "sweep" not in sections:
        raise ConfigError(f"{path}: a sweep configuration needs sweep.omega and sweep.mu_s")
    data = {"base": _run_payload(sections, seed), "sweep": sections["sweep"]}
    return _validate(SweepConfig, data, str(path))
