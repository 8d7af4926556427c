from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional
import logging


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_prefix="FRAPPE_", extra="ignore")

    # Logging
    log_level: str = "INFO"

    # Reproducibility
    DEFAULT_SEED: int = 20240101

    # Worker pool for bench plans (joblib n_jobs semantics, -1 = all cores)
    N_JOBS: int = 1

    # Results
    RESULTS_DIR: str = "results"
    RESULTS_FORMAT: str = "csv"  # "csv" or "json"

    # Experiment defaults
    DEFAULT_REPLICATIONS: int = 10
    DEFAULT_DELTA: float = 1e-3

    # Optional default plan file picked up by `bench` when --config is absent
    DEFAULT_PLAN: Optional[str] = None


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once for CLI entry points."""
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


settings = Settings()
