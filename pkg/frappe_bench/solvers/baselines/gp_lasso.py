"""
GpLASSO: gradient-perturbed ISTA on (1/2N) ||y - X beta||^2 + lambda ||beta||_1.
"""

from typing import Optional

import numpy as np

from frappe_bench.core.operators import soft_threshold
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


def fit_gp_lasso(
    d: Dataset,
    cfg: BaselineConfig,
    budget: Optional[PrivacyBudget],
    rng: np.random.Generator,
    callback: Optional[IterationCallback] = None,
) -> FitResult:
    """
    Run GpLASSO for cfg.total_iters proximal-gradient steps at step 1/(2L).

    Responses are clipped to c_y so the square-loss gradient has a finite bound;
    with no budget this is plain ISTA.
    """
    data, c_x, eta = prepare_design(d, cfg)
    data, c_y = clip_responses(data, cfg.clip_response)
    lam = cfg.lambda_value

    return perturbed_descent(
        data, cfg, budget, rng,
        squared_loss_sensitivity(c_x, cfg.clip_weight, c_y),
        gradient=lambda beta: squared_gradient(data, beta),
        update=lambda beta, g, step: soft_threshold(beta - step * g, lam * step),
        objective=lambda beta: squared_objective(data, beta, lam),
        step=constant_step(eta),
        callback=callback,
        diagnostics={"clip_row": c_x, "clip_response": c_y, "step_size": eta, "lambda": lam},
    )


class GpLassoSolver(BaselineSolver):
    def __init__(self):
        super().__init__(
            AlgorithmName.GP_LASSO,
            "GpLASSO",
            "Gradient-perturbed proximal gradient on the Lasso objective",
            loss="squared",
        )

    def run(self, dataset, cfg, budget, rng, callback=None) -> FitResult:
        return fit_gp_lasso(dataset, cfg, budget, rng, callback)
