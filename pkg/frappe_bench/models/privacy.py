"""
Privacy budget and noise-scale models.
"""

from enum import Enum
import math
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

EVEN_SPLIT: Tuple[float, float, float] = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


class Stage(str, Enum):
    """The three noise-injection stages, in the order their budgets are split."""

    INIT = "init"
    KDE = "kde"
    GRAD = "grad"

    @property
    def index(self) -> int:
        return list(Stage).index(self)


class PrivacyBudget(BaseModel):
    """(epsilon, delta) with a three-way split across init / kde / grad stages."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0)
    delta: float = Field(gt=0, lt=1)
    stage_split: Tuple[float, float, float] = EVEN_SPLIT

    @field_validator("stage_split")
    @classmethod
    def _split_is_partition(cls, v: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(w <= 0 for w in v):
            raise ValueError(f"stage_split components must be positive, got {v}")
        if abs(sum(v) - 1.0) > 1e-12:
            raise ValueError(f"stage_split must sum to 1, got {sum(v)!r}")
        return v

    def share(self, stage: Stage) -> float:
        return self.stage_split[stage.index]

    @property
    def is_even_split(self) -> bool:
        return all(abs(w - 1.0 / 3.0) <= 1e-12 for w in self.stage_split)


class NoiseScales(BaseModel):
    """Gaussian-mechanism variances for the three stages.

    sigma_kde_sq is indexed by outer loop: sigma_kde_sq[v - 1] belongs to h_v.
    """

    model_config = ConfigDict(frozen=True)

    sigma_init_sq: float
    sigma_kde_sq: List[float]
    sigma_grad_sq: float
    gradient_bound: float
    bandwidths: List[float]

    @model_validator(mode="after")
    def _all_positive_finite(self) -> "NoiseScales":
        values = [self.sigma_init_sq, self.sigma_grad_sq, self.gradient_bound, *self.sigma_kde_sq]
        for value in values:
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"noise scales must be positive and finite, got {value!r}")
        if len(self.sigma_kde_sq) != len(self.bandwidths):
            raise ValueError("one kde variance is required per outer loop bandwidth")
        return self

    def kde_variance(self, v: int) -> float:
        """Variance of the stage-2 perturbation at outer loop v (1-based)."""
        return self.sigma_kde_sq[v - 1]
