# src/utils/config.py
from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

# .env in the working directory may set FELKIT_* defaults; real env vars win.
load_dotenv(override=False)


@dataclass(frozen=True)
class Settings:
    """Process-wide settings read from the environment."""

    log_level: str = "WARNING"
    jobs: int = 1

    @classmethod
    def from_env(cls) -> Settings:
        return cls(
            log_level=os.getenv("FELKIT_LOG_LEVEL", "WARNING").upper(),
            jobs=int(os.getenv("FELKIT_JOBS", "1")),
        )


def get_settings() -> Settings:
    return Settings.from_env()
