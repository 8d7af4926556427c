"""
DPIGHT: differentially private iterative gradient hard thresholding on the
square loss. Each step keeps the s largest-magnitude coordinates.
"""

from typing import Optional

import numpy as np

from frappe_bench.core.operators import hard_threshold
from frappe_bench.models.dataset import Dataset
from frappe_bench.models.fit import FitResult
from frappe_bench.models.privacy import PrivacyBudget
from frappe_bench.models.solver_config import AlgorithmName, BaselineConfig
from frappe_bench.solvers.baselines.common import (
    BaselineSolver,
    clip_responses,
    constant_step,
    perturbed_descent,
    prepare_design,
    squared_gradient,
    squared_loss_sensitivity,
    squared_objective,
)
from frappe_bench.solvers.base_solver import IterationCallback


def fit_dp_ight(
    d: Dataset,
    cfg: BaselineConfig,
    budget: Optional[PrivacyBudget],
    rng: np.random.Generator,
    callback: Optional[IterationCallback] = None,
) -> FitResult:
    """
    Run DPIGHT with sparsity target cfg.sparsity_target.

    Raises:
        ValueError: if the target exceeds p
    """
    s = cfg.sparsity_target
    if s > d.n_features:
        raise ValueError(f"sparsity target s={s} exceeds p={d.n_features}")
    data, c_x, eta = prepare_design(d, cfg)
    data, c_y = clip_responses(data, cfg.clip_response)

    return perturbed_descent(
        data, cfg, budget, rng,
        squared_loss_sensitivity(c_x, cfg.clip_weight, c_y),
        gradient=lambda beta: squared_gradient(data, beta),
        update=lambda beta, g, step: hard_threshold(beta - step * g, s),
        objective=lambda beta: squared_objective(data, beta),
        step=constant_step(eta),
        callback=callback,
        diagnostics={"clip_row": c_x, "clip_response": c_y, "step_size": eta, "sparsity_target": s},
    )


class DpIghtSolver(BaselineSolver):
    def __init__(self):
        super().__init__(
            AlgorithmName.DP_IGHT,
            "DPIGHT",
            "Differentially private iterative gradient hard thresholding",
            loss="squared",
        )

    def run(self, dataset, cfg, budget, rng, callback=None) -> FitResult:
        return fit_dp_ight(dataset, cfg, budget, rng, callback)
