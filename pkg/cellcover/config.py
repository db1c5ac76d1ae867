"""Toolkit configuration: defaults plus explicit overrides, never the process environment."""
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from cellcover import __version__
from cellcover.models.schemas import CoverConfig, SearchBounds


class Settings(BaseSettings):
    model_config = SettingsConfigDict(extra="ignore")

    @classmethod
    def settings_customise_sources(cls, settings_cls, init_settings, env_settings,
                                   dotenv_settings, file_secret_settings):
        # Results must not depend on the environment.
        return (init_settings,)

    # App
    app_name: str = "cellcover"
    version: str = __version__
    log_level: str = "WARNING"
    report_dir: Optional[Path] = None

    # Oracle
    oracle_bounds: SearchBounds = Field(default_factory=SearchBounds)

    # Three-prime construction
    default_cover: CoverConfig = Field(default_factory=CoverConfig)


@lru_cache
def get_settings() -> Settings:
    return Settings()
