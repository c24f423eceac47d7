from typing import List

from app.config.base import BaseConfig


class ProductionConfig(BaseConfig):
    """Production (batch / server) environment configuration"""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Production CORS (restrictive)
    BACKEND_CORS_ORIGINS: List[str] = []

    # Longer runs are allowed behind the API in production
    API_MAX_STEPS: int = 200000
    FFT_WORKERS: int = 4
