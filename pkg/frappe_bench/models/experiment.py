"""
Experiment models: synthetic data specs, metric reports, bench plans and results.
"""

from enum import Enum
import itertools
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from frappe_bench.models.privacy import EVEN_SPLIT
from frappe_bench.models.solver_config import (
    AlgorithmName,
    BaselineOverrides,
    FrappeConfig,
    KernelName,
)


class NoiseFamily(str, Enum):
    NORMAL = "normal"
    STUDENT_T = "student_t"
    CAUCHY = "cauchy"


class Scenario(str, Enum):
    NOISE_TABLE = "noise-table"
    DIMENSION_TABLE = "dimension-table"
    SPARSITY_SWEEP = "sparsity-sweep"
    EPSILON_SWEEP = "epsilon-sweep"
    TIME_VS_MSE = "time-vs-mse"
    REAL_DATA = "real-data"
    KERNEL_SWEEP = "kernel-sweep"
    SPLIT_SWEEP = "split-sweep"
    INIT_SIZE_SWEEP = "init-size-sweep"
    ITERATIONS_SWEEP = "iterations-sweep"


class SyntheticSpec(BaseModel):
    """Linear model y = X beta* + e with AR-structured Gaussian covariates."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_samples: int = Field(ge=1)
    n_features: int = Field(ge=1)
    sparsity: int = Field(ge=1)
    noise_family: NoiseFamily = NoiseFamily.NORMAL
    covariance_base: float = Field(default=0.1, gt=-1, lt=1)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _sparsity_fits(self) -> "SyntheticSpec":
        if self.sparsity > self.n_features:
            raise ValueError(f"sparsity {self.sparsity} exceeds dimension {self.n_features}")
        return self


class MetricReport(BaseModel):
    """Accuracy and support-recovery scores for one fitted weight vector."""

    model_config = ConfigDict(frozen=True)

    mse_weights: Optional[float] = None
    mse_pred: Optional[float] = None
    mae_pred: Optional[float] = None
    f1: Optional[float] = Field(default=None, ge=0, le=1)
    precision: Optional[float] = Field(default=None, ge=0, le=1)
    recall: Optional[float] = Field(default=None, ge=0, le=1)
    sparsity: int = Field(ge=0)


class DataOptions(BaseModel):
    """Real-data CSV ingestion options."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    path: str
    response_column: Any = 0  # column name or 0-based position
    delimiter: str = ","
    normalize: bool = True
    normalize_response: bool = False
    split_fraction: float = Field(default=0.8, gt=0, lt=1)


class GridSpec(BaseModel):
    """Axes of the experiment grid; None means "use the scenario preset"."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_samples: Optional[List[int]] = None
    n_features: Optional[List[int]] = None
    sparsity: Optional[List[int]] = None
    epsilon: Optional[List[float]] = None
    noise: Optional[List[NoiseFamily]] = None
    kernel: Optional[List[KernelName]] = None
    stage_split: Optional[List[Tuple[float, float, float]]] = None
    subsample_size: Optional[List[int]] = None
    iterations: Optional[List[Tuple[int, int]]] = None


class PlanCell(BaseModel):
    """One fully resolved grid point."""

    model_config = ConfigDict(frozen=True)

    n_samples: Optional[int] = None  # None for real data (taken from the file)
    n_features: Optional[int] = None
    sparsity: Optional[int] = None
    epsilon: float
    delta: float
    noise: Optional[NoiseFamily] = None
    kernel: KernelName = KernelName.BIWEIGHT
    stage_split: Tuple[float, float, float] = EVEN_SPLIT
    subsample_size: int = 200
    outer_iters: int = 10
    inner_iters: int = 50

    @property
    def total_iters(self) -> int:
        return self.outer_iters * self.inner_iters


class ExperimentPlan(BaseModel):
    """A declarative benchmark: scenario x algorithms x grid x replications."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Scenario = Scenario.NOISE_TABLE
    algorithms: List[AlgorithmName] = Field(default_factory=lambda: [AlgorithmName.FRAPPE])
    grid: GridSpec = Field(default_factory=GridSpec)
    replications: int = Field(default=10, ge=1)
    delta: float = Field(default=1e-3, gt=0, lt=1)
    seed: int = Field(default=0, ge=0)
    output: Optional[str] = None
    format: str = Field(default="csv", pattern="^(csv|json)$")
    non_private: bool = False
    frappe: FrappeConfig = Field(default_factory=FrappeConfig)
    baseline: BaselineOverrides = Field(default_factory=BaselineOverrides)
    data: Optional[DataOptions] = None
    covariance_base: float = Field(default=0.1, gt=-1, lt=1)
    checkpoints: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0])

    @model_validator(mode="after")
    def _cells_well_formed(self) -> "ExperimentPlan":
        if self.scenario is Scenario.REAL_DATA and self.data is None:
            raise ValueError("the real-data scenario needs a `data` section with a CSV path")
        for cell in self.cells():
            if cell.n_features is not None and cell.sparsity is not None and cell.sparsity > cell.n_features:
                raise ValueError(f"cell has s={cell.sparsity} > p={cell.n_features}")
            if cell.n_samples is not None and cell.subsample_size > cell.n_samples:
                raise ValueError(f"cell has n={cell.subsample_size} > N={cell.n_samples}")
            if self.baseline.total_iters is not None and self.baseline.total_iters != cell.total_iters:
                raise ValueError(
                    f"baseline total_iters={self.baseline.total_iters} breaks the fairness protocol "
                    f"(FRAPPE runs V*T={cell.total_iters})"
                )
        return self

    def cells(self) -> List[PlanCell]:
        """Cartesian product of the resolved grid axes, in a fixed order."""
        # Local import keeps models free of bench-level logic at import time.
        from frappe_bench.bench.plan import resolve_grid

        axes = resolve_grid(self)
        cells = []
        for n, p, s, eps, noise, kernel, split, sub, iters in itertools.product(
            axes["n_samples"], axes["n_features"], axes["sparsity"], axes["epsilon"],
            axes["noise"], axes["kernel"], axes["stage_split"], axes["subsample_size"],
            axes["iterations"],
        ):
            cells.append(
                PlanCell(
                    n_samples=n, n_features=p, sparsity=s, epsilon=eps, delta=self.delta,
                    noise=noise, kernel=kernel, stage_split=split, subsample_size=sub,
                    outer_iters=iters[0], inner_iters=iters[1],
                )
            )
        return cells


class Checkpoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    seconds: float
    mse: float


class ExperimentResult(BaseModel):
    """One (cell x algorithm x replication) outcome."""

    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    algorithm: AlgorithmName
    cell: PlanCell
    replication: int
    metrics: Optional[MetricReport] = None
    seconds: float = 0.0
    hyperparameter: Optional[float] = None
    seed: int
    status: str = "ok"
    error: Optional[str] = None
    clip_row: Optional[float] = None
    config: Dict[str, Any] = Field(default_factory=dict)
    checkpoints: List[Checkpoint] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "ok"
