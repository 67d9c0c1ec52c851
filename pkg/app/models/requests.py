"""Validated option models for solvers, graphs, patches and runs."""
from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SolverKind(str, Enum):
    """Interpolation models available to every pipeline."""

    GL = "GL"
    WNLL = "WNLL"
    NTV = "NTV"
    WNTV = "WNTV"


class SolverOptions(BaseModel):
    """Split Bregman and conjugate-gradient parameters."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    lam: float = Field(default=1.0, gt=0, alias="lambda", description="Bregman penalty lambda")
    mu: Optional[float] = Field(default=None, gt=0, description="Label weight; None means |V|/|S|")
    max_bregman_iters: int = Field(default=50, ge=1)
    bregman_tol: float = Field(default=1e-4, gt=0, lt=1)
    cg_tol: float = Field(default=1e-6, gt=0, lt=1)
    cg_max_iters: int = Field(default=1000, ge=1)

    def resolve_mu(self, n: int, labeled: int) -> float:
        return self.mu if self.mu is not None else n / labeled


class GraphOptions(BaseModel):
    """kNN sparsification and self-tuning bandwidth."""

    model_config = ConfigDict(frozen=True)

    k_sparsify: int = Field(default=20, ge=1)
    r_sigma: int = Field(default=10, ge=1)
    method: Literal["brute", "tree"] = "brute"

    @model_validator(mode="after")
    def validate_r_sigma(self):
        if self.r_sigma > self.k_sparsify:
            raise ValueError(f"r_sigma ({self.r_sigma}) must not exceed k_sparsify ({self.k_sparsify})")
        return self


class PatchConfig(BaseModel):
    """Patch geometry; lambda1/lambda2 default to the observed-intensity scales."""

    model_config = ConfigDict(frozen=True)

    s1: int = Field(default=11, ge=1)
    s2: int = Field(default=11, ge=1)
    semi_local: bool = True
    lambda1: Optional[float] = Field(default=None, ge=0)
    lambda2: Optional[float] = Field(default=None, ge=0)

    @field_validator("s1", "s2")
    @classmethod
    def validate_odd(cls, v):
        """Every patch needs a central pixel."""
        if v % 2 == 0:
            raise ValueError(f"patch side must be odd, got {v}")
        return v


class InpaintOptions(BaseModel):
    """Outer-loop parameters for patch-graph inpainting and colorization."""

    model_config = ConfigDict(frozen=True)

    outer_iters: int = Field(default=10, ge=1)
    rng_seed: int = 0
    solver: SolverKind = SolverKind.WNTV
    solver_options: SolverOptions = Field(default_factory=SolverOptions)
    patch_config: PatchConfig = Field(default_factory=PatchConfig)
    graph: GraphOptions = Field(default_factory=lambda: GraphOptions(k_sparsify=50, r_sigma=20))


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, after config file and flag merging."""

    model_config = ConfigDict(frozen=True)

    command: Literal["ssl", "inpaint", "colorize"]
    solver: SolverKind = SolverKind.WNTV
    graph: GraphOptions
    solver_options: SolverOptions = Field(default_factory=SolverOptions)
    patch: PatchConfig = Field(default_factory=PatchConfig)
    outer_iters: int = Field(default=10, ge=1)
    seed: int = 0
    rate: Optional[float] = Field(default=None, gt=0, le=1)

    dataset: Literal["mnist", "blobs"] = "mnist"
    label_count: Optional[int] = Field(default=None, ge=1)
    subset: Optional[int] = Field(default=None, ge=1, description="Stratified subset size for desk-scale runs")
    stratified: bool = True

    input: Optional[Path] = None
    mask: Optional[Path] = None
    truth: Optional[Path] = None
    labels_path: Optional[Path] = None
    samples: Optional[Path] = None
    output: Optional[Path] = None
    metrics: Optional[Path] = None
    summary: Optional[Path] = None

    def inpaint_options(self) -> InpaintOptions:
        return InpaintOptions(
            outer_iters=self.outer_iters,
            rng_seed=self.seed,
            solver=self.solver,
            solver_options=self.solver_options,
            patch_config=self.patch,
            graph=self.graph,
        )
