from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from app.constants import DEFAULT_MAX_WORKERS, SLOW_CYCLE_THRESHOLD_MS
from app.models.requests import GraphOptions, PatchConfig, SolverKind, SolverOptions


class SslSection(BaseModel):
    """Semi-supervised classification defaults (MNIST recipe)."""

    graph: GraphOptions = Field(default_factory=lambda: GraphOptions(k_sparsify=20, r_sigma=10))
    label_count: int = 70
    stratified: bool = True


class InpaintSection(BaseModel):
    """Patch-graph inpainting defaults (image recipe)."""

    graph: GraphOptions = Field(default_factory=lambda: GraphOptions(k_sparsify=50, r_sigma=20))
    outer_iters: int = 10
    rate: float = 0.1


class ColorizeSection(BaseModel):
    """Colorization defaults; a single graph is built from the gray image."""

    graph: GraphOptions = Field(default_factory=lambda: GraphOptions(k_sparsify=50, r_sigma=20))
    rate: float = 0.01


class RuntimeSection(BaseModel):
    log_level: str = "INFO"
    max_workers: int = Field(default=DEFAULT_MAX_WORKERS, ge=1)  # concurrent channel / class solves
    slow_cycle_ms: float = Field(default=SLOW_CYCLE_THRESHOLD_MS, gt=0)  # warn when one outer cycle exceeds this


class Settings(BaseSettings):
    """Application settings loaded from environment variables and an optional TOML file."""

    solver: SolverKind = SolverKind.WNTV
    seed: int = 0

    solver_options: SolverOptions = Field(default_factory=SolverOptions)
    patch: PatchConfig = Field(default_factory=PatchConfig)
    ssl: SslSection = Field(default_factory=SslSection)
    inpaint: InpaintSection = Field(default_factory=InpaintSection)
    colorize: ColorizeSection = Field(default_factory=ColorizeSection)
    runtime: RuntimeSection = Field(default_factory=RuntimeSection)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="WNTV_",
        env_nested_delimiter="__",
        case_sensitive=False,
        populate_by_name=True,
        extra="ignore",
    )


def load_settings(config_path: Optional[Union[str, Path]] = None) -> Settings:
    """Build settings; values from the TOML file win over environment variables."""
    if config_path is None:
        return Settings()
    file_values = TomlConfigSettingsSource(Settings, toml_file=Path(config_path))()
    return Settings(**file_values)


# Global settings instance
settings = Settings()
