"""
SgpLAD: subgradient perturbation on the l1-penalized LAD objective.

    beta <- clip_l2(beta - (eta / sqrt(t)) * (g + u), c_beta)
    g = -(1/N) X' sign(y - X beta) + lambda * sign(beta)

sign(0) = 0 at both kinks. The noise is calibrated to the per-iteration
subgradient bound c_x + lambda * sqrt(p).
"""

import math
from typing import Optional

import numpy as np

from frappe_bench.models.dataset import Dataset
from frappe_bench.models.fit import FitResult
from frappe_bench.models.privacy import PrivacyBudget
from frappe_bench.models.solver_config import AlgorithmName, BaselineConfig
from frappe_bench.solvers.baselines.common import BaselineSolver, decaying_step, perturbed_descent, prepare_design
from frappe_bench.solvers.base_solver import IterationCallback


def lad_subgradient(d: Dataset, beta: np.ndarray, lam: float) -> np.ndarray:
    residuals = d.responses - d.features @ beta
    return -(d.features.T @ np.sign(residuals)) / d.n_samples + lam * np.sign(beta)


def fit_sgp_lad(
    d: Dataset,
    cfg: BaselineConfig,
    budget: Optional[PrivacyBudget],
    rng: np.random.Generator,
    callback: Optional[IterationCallback] = None,
) -> FitResult:
    """
    Run SgpLAD for cfg.total_iters iterations.

    Args:
        d: Training data
        cfg: Baseline config carrying lambda_value
        budget: Privacy budget, or None for the noise-free run
        rng: Generator owned by this fit
        callback: Optional per-iteration hook

    Returns:
        FitResult with the final clipped iterate
    """
    data, c_x, eta = prepare_design(d, cfg)
    lam = cfg.lambda_value
    sensitivity = c_x + lam * math.sqrt(data.n_features)

    def objective(beta: np.ndarray) -> float:
        residuals = data.responses - data.features @ beta
        return float(np.mean(np.abs(residuals)) + lam * np.sum(np.abs(beta)))

    return perturbed_descent(
        data, cfg, budget, rng, sensitivity,
        gradient=lambda beta: lad_subgradient(data, beta, lam),
        update=lambda beta, g, step: beta - step * g,
        objective=objective,
        step=decaying_step(eta),
        callback=callback,
        diagnostics={"clip_row": c_x, "step_size": eta, "lambda": lam},
    )


class SgpLadSolver(BaselineSolver):
    def __init__(self):
        super().__init__(
            AlgorithmName.SGP_LAD,
            "SgpLAD",
            "Subgradient-perturbed l1-penalized LAD regression",
            loss="lad",
        )

    def run(self, dataset, cfg, budget, rng, callback=None) -> FitResult:
        return fit_sgp_lad(dataset, cfg, budget, rng, callback)
