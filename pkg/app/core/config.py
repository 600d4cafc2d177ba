from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
from typing import Dict, Any, Optional
from functools import lru_cache
import os


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.
    Automatically loads from .env file if present.
    """
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="allow"
    )

    PROJECT_NAME: str = "gpcal"

    # Parallelism
    GPC_WORKERS: Optional[int] = Field(
        default=None,
        description="Worker count used when --workers is not given (default: available cores)"
    )
    GPC_JOBLIB_BACKEND: str = Field(
        default="loky",
        description="joblib backend for the replicate map"
    )

    # Reproducibility
    GPC_DEFAULT_SEED: int = Field(
        default=20240501,
        description="Master seed used when --seed is not given"
    )

    # Output / logging
    GPC_OUT_DIR: str = Field(default="results", description="Default output directory")
    GPC_LOG_LEVEL: str = Field(default="INFO", description="Root log level")

    def resolve_workers(self, requested: Optional[int] = None) -> int:
        """
        Returns the worker count for the replicate map.

        Precedence: explicit request > GPC_WORKERS > available parallelism.
        """
        if requested is not None:
            return max(1, int(requested))
        if self.GPC_WORKERS is not None:
            return max(1, int(self.GPC_WORKERS))
        return os.cpu_count() or 1

    def get_parallel_config(self, workers: Optional[int] = None) -> Dict[str, Any]:
        """
        Returns keyword arguments for joblib.Parallel.

        Example usage:
            ```python
            from joblib import Parallel
            from app.core.config import settings

            Parallel(**settings.get_parallel_config(4))
            ```
        """
        return {
            "n_jobs": self.resolve_workers(workers),
            "backend": self.GPC_JOBLIB_BACKEND,
        }


@lru_cache()
def get_settings() -> Settings:
    """
    GPC_* settings from the environment and .env, read once per process.

    Environment changes made after import need get_settings.cache_clear().
    """
    return Settings()


# Shared by the CLI defaults, the parallel map and the results store
settings = get_settings()
