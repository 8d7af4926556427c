"""
Hyperparameter models for FRAPPE and the baseline solvers.
"""

from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Bandwidth sparsity used when neither the config nor the caller knows s.
DEFAULT_BANDWIDTH_SPARSITY = 10


class KernelName(str, Enum):
    BIWEIGHT = "biweight"
    UNIFORM = "uniform"
    EPANECHNIKOV = "epanechnikov"
    TRIWEIGHT = "triweight"


class AlgorithmName(str, Enum):
    FRAPPE = "frappe"
    FRAPPE_NONPRIVATE = "frappe-nonprivate"
    SGP_LAD = "sgp_lad"
    GP_LASSO = "gp_lasso"
    DP_IGHT = "dp_ight"

    @property
    def selector(self) -> str:
        """'sparsity' for hard-threshold methods, 'lambda' otherwise."""
        return "sparsity" if self is AlgorithmName.DP_IGHT else "lambda"


class BandwidthSchedule(BaseModel):
    """Rule producing h_v for each outer loop.

    kind="decay":  h_v = sqrt(s log N / N) + s^(-1/2) * decay^((v+1)/2)
    kind="fixed":  h_v = value
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["decay", "fixed"] = "decay"
    decay: float = Field(default=0.9, gt=0, lt=1)
    sparsity: Optional[int] = Field(default=None, ge=1)
    value: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _fixed_needs_value(self) -> "BandwidthSchedule":
        if self.kind == "fixed" and self.value is None:
            raise ValueError("a fixed bandwidth schedule needs a positive value")
        return self


class FrappeConfig(BaseModel):
    """All hyperparameters of the FRAPPE double loop."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    outer_iters: int = Field(default=10, ge=1)
    inner_iters: int = Field(default=50, ge=1)
    # None -> 1 / (2L) with L from power iteration on X'X/N
    step_size: Optional[float] = Field(default=None, gt=0)
    subsample_size: int = Field(default=200, ge=1)
    # Empty -> data-driven grid (see evaluation.selection.default_lambda_grid)
    lambda_grid: List[float] = Field(default_factory=list)
    grid_size: int = Field(default=20, ge=1)
    elastic_net: Tuple[float, float] = (0.01, 0.1)
    clip_weight: float = Field(default=40.0, gt=0)
    # None -> max observed row norm of the training data
    clip_row: Optional[float] = Field(default=None, gt=0)
    # c_f(0): enters the gradient bound G and is the default density floor
    density_floor: float = Field(default=0.01, gt=0)
    # Explicit floor for the noisy density estimate; None -> density_floor
    kde_floor: Optional[float] = Field(default=None, gt=0)
    kernel: KernelName = KernelName.BIWEIGHT
    bandwidth: BandwidthSchedule = Field(default_factory=BandwidthSchedule)
    init_step: float = Field(default=1.0, gt=0)
    init_max_iter: int = Field(default=2000, ge=1)
    init_tol: float = Field(default=1e-7, gt=0)
    power_iters: int = Field(default=100, ge=1)
    # Mechanism seed: last element of every fit stream key, data draws ignore it
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("lambda_grid")
    @classmethod
    def _grid_positive(cls, v: List[float]) -> List[float]:
        if any(lam <= 0 for lam in v):
            raise ValueError("lambda_grid values must be positive")
        return v

    @field_validator("elastic_net")
    @classmethod
    def _elastic_net_positive(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError(f"elastic_net penalties must be positive, got {v}")
        return v

    @property
    def floor(self) -> float:
        return self.kde_floor if self.kde_floor is not None else self.density_floor

    @property
    def total_iters(self) -> int:
        return self.outer_iters * self.inner_iters


class BaselineConfig(BaseModel):
    """Configuration for one baseline fit; carries exactly one selector value."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    algorithm: AlgorithmName
    total_iters: int = Field(default=500, ge=1)
    step_size: Optional[float] = Field(default=None, gt=0)
    lambda_value: Optional[float] = Field(default=None, ge=0)
    sparsity_target: Optional[int] = Field(default=None, ge=1)
    clip_weight: float = Field(default=40.0, gt=0)
    clip_row: Optional[float] = Field(default=None, gt=0)
    # Square-loss baselines only; None -> max observed |y|
    clip_response: Optional[float] = Field(default=None, gt=0)
    power_iters: int = Field(default=100, ge=1)

    @model_validator(mode="after")
    def _one_selector(self) -> "BaselineConfig":
        if self.algorithm not in (AlgorithmName.SGP_LAD, AlgorithmName.GP_LASSO, AlgorithmName.DP_IGHT):
            raise ValueError(f"{self.algorithm.value} is not a baseline algorithm")
        has_lambda = self.lambda_value is not None
        has_sparsity = self.sparsity_target is not None
        if has_lambda == has_sparsity:
            raise ValueError("exactly one of lambda_value / sparsity_target must be set")
        if self.algorithm.selector == "sparsity" and not has_sparsity:
            raise ValueError(f"{self.algorithm.value} is selected by sparsity_target")
        if self.algorithm.selector == "lambda" and not has_lambda:
            raise ValueError(f"{self.algorithm.value} is selected by lambda_value")
        return self


class BaselineOverrides(BaseModel):
    """Plan-level baseline settings shared by every baseline fit."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    total_iters: Optional[int] = Field(default=None, ge=1)
    step_size: Optional[float] = Field(default=None, gt=0)
    power_iters: int = Field(default=100, ge=1)
