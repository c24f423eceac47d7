from typing import List

from pydantic_settings import BaseSettings, SettingsConfigDict


class BaseConfig(BaseSettings):
    """Base configuration class with common settings"""

    model_config = SettingsConfigDict(env_prefix="SPHERE_", env_file=".env", extra="ignore")

    # Project Configuration
    PROJECT_NAME: str = "Rotating Sphere Flow Simulator"
    VERSION: str = "1.0.0"
    API_V1_STR: str = "/api/v1"

    # CORS Configuration
    BACKEND_CORS_ORIGINS: List[str] = ["http://localhost:3000", "http://localhost:8080"]

    # Logging
    LOG_LEVEL: str = "INFO"

    # Identity suite defaults
    DEFAULT_DEGREE: int = 15
    DEFAULT_RADIUS: float = 1.0
    DEFAULT_SEED: int = 7
    VERIFY_MIN_DEGREE: int = 4
    VERIFY_TRIALS: int = 20

    # Simulation defaults
    DIAGNOSTICS_CADENCE: int = 1
    FFT_WORKERS: int = 1

    # Output files
    TIMESERIES_FILENAME: str = "timeseries.csv"
    SUMMARY_FILENAME: str = "summary.txt"
    SWEEP_FILENAME: str = "sweep.csv"
    ROSSBY_FILENAME: str = "rossby.txt"

    # HTTP surface
    API_MAX_STEPS: int = 20000
