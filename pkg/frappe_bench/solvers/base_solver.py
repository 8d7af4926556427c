"""
Base Solver Class for the regression benchmark

All algorithms (FRAPPE, its non-private twin, SgpLAD, GpLASSO, DPIGHT) inherit
from this base class so the bench can drive them through one interface.
"""

from abc import ABC, abstractmethod
import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from frappe_bench.evaluation.selection import default_lambda_grid, default_sparsity_grid
from frappe_bench.models.dataset import Dataset
from frappe_bench.models.fit import FitResult
from frappe_bench.models.privacy import PrivacyBudget
from frappe_bench.models.solver_config import AlgorithmName, BaselineOverrides, FrappeConfig

logger = logging.getLogger(__name__)

# Called after every iteration with (elapsed seconds, current weights).
IterationCallback = Callable[[float, np.ndarray], None]


class SolverContext(BaseModel):
    """Everything a fit needs besides data, selector, budget and rng."""

    model_config = ConfigDict(frozen=True)

    frappe: FrappeConfig = Field(default_factory=FrappeConfig)
    baseline: BaselineOverrides = Field(default_factory=BaselineOverrides)
    non_private: bool = False
    # True sparsity when known (synthetic data); feeds the bandwidth schedule.
    sparsity_hint: Optional[int] = Field(default=None, ge=1)


class BaseSolver(ABC):
    """
    Abstract base class for benchmark solvers.

    Each solver must implement:
    - fit(): one run at a fixed selector value (lambda or sparsity target)
    """

    def __init__(self, algorithm: AlgorithmName, name: str, description: str, loss: str):
        """
        Initialize a solver.

        Args:
            algorithm: Registry key (e.g., AlgorithmName.FRAPPE)
            name: Human-readable name (e.g., "FRAPPE")
            description: Brief description of the method
            loss: "lad" or "squared"; the BIC is computed under this loss
        """
        self.algorithm = algorithm
        self.name = name
        self.description = description
        self.loss = loss

        logger.info(f"Initialized solver: {self.name} ({self.algorithm.value})")

    @property
    def algorithm_key(self) -> str:
        return self.algorithm.value

    @property
    def selector(self) -> str:
        return self.algorithm.selector

    @abstractmethod
    def fit(
        self,
        dataset: Dataset,
        selector_value: float,
        budget: Optional[PrivacyBudget],
        rng: np.random.Generator,
        context: SolverContext,
        callback: Optional[IterationCallback] = None,
    ) -> FitResult:
        """
        Fit at one selector value.

        Args:
            dataset: Training data
            selector_value: lambda, or the sparsity target for hard-threshold methods
            budget: Privacy budget; None runs the noise-free variant
            rng: Generator owned by this fit
            context: Shared hyperparameters
            callback: Optional per-iteration hook

        Returns:
            FitResult with final weights and trace
        """
        pass

    def default_grid(self, dataset: Dataset, count: int = 20) -> List[float]:
        """The 20-point (by default) candidate grid for BIC selection."""
        if self.selector == "sparsity":
            return [float(s) for s in default_sparsity_grid(dataset.n_features, count)]
        return default_lambda_grid(dataset, count)

    def get_info(self) -> Dict[str, Any]:
        """
        Get information about this solver.

        Returns:
            Dictionary with solver metadata
        """
        return {
            "algorithm": self.algorithm_key,
            "name": self.name,
            "description": self.description,
            "loss": self.loss,
            "selector": self.selector,
        }
