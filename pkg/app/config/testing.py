from typing import List

from app.config.base import BaseConfig


class TestingConfig(BaseConfig):
    """Testing environment configuration - minimal and fast"""

    # Logging
    LOG_LEVEL: str = "DEBUG"

    # CORS (permissive for testing)
    BACKEND_CORS_ORIGINS: List[str] = ["*"]

    # Keep HTTP-triggered runs short
    API_MAX_STEPS: int = 5000
