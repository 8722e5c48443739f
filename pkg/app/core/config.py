"""Attribution bidding simulator configuration settings."""
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults, overridable through the environment or a ``.env`` file."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Service info
    SERVICE_NAME: str = "attribution-bidding"
    VERSION: str = "1.0.0"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Log files
    LOG_DELIMITER: str = "\t"
    DAY_SECONDS: int = 86400
    ATTRIBUTION_WINDOW_DAYS: int = 30

    # Sliding split
    TRAIN_DAYS: int = 21
    TEST_DAYS: int = 7

    # Attribution model fit
    LAMBDA_MIN: float = 1e-12
    LAMBDA_MAX: float = 1.0
    FIT_TOLERANCE: float = 1e-6
    FIT_MAX_ITER: int = 200
    MIN_SAMPLES_PER_ADVERTISER: int = 100

    # Conversion model
    DEFAULT_HASH_BITS: int = 18
    DEFAULT_L2: float = 1.0
    LBFGS_MAX_ITER: int = 500
    LBFGS_TOLERANCE: float = 1e-5

    # Metrics
    BOOTSTRAP_RESAMPLES: int = 100
    BOOTSTRAP_QUANTILE: float = 0.05

    # Runs
    DEFAULT_SEED: int = 20240101
    WORKERS: int = 1  # split pairs evaluated concurrently
    OUTPUT_DIR: str = "runs/latest"

    @property
    def attribution_window_seconds(self) -> int:
        return self.ATTRIBUTION_WINDOW_DAYS * self.DAY_SECONDS


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
