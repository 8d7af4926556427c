"""
Shared machinery for the baseline solvers: design preparation, the perturbed
iteration loop, and the BaseSolver adapter that builds a BaselineConfig from
the bench context.
"""

from abc import abstractmethod
import logging
import math
import time
from typing import Callable, Optional

import numpy as np

from frappe_bench.core.mechanisms import NoiseSource, gradient_noise_variance
from frappe_bench.core.operators import clip_l2, lipschitz_constant, scale_rows
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.fit import FitResult, TraceRecord
from frappe_bench.models.privacy import PrivacyBudget
from frappe_bench.models.solver_config import BaselineConfig
from frappe_bench.solvers.base_solver import BaseSolver, IterationCallback, SolverContext
from frappe_bench.solvers.frappe.solver import resolve_clip_row, resolve_step_size

logger = logging.getLogger(__name__)


def prepare_design(d: Dataset, cfg: BaselineConfig):
    """Row-clip the data and resolve (c_x, eta)."""
    c_x = resolve_clip_row(d, cfg.clip_row)
    data = scale_rows(d, c_x)
    eta = resolve_step_size(cfg.step_size, lipschitz_constant(data.features, cfg.power_iters))
    return data, c_x, eta


def clip_responses(d: Dataset, clip_response: Optional[float]):
    """Clip |y_i| to c_y (configured, else max |y_i|) so square-loss gradients are bounded."""
    largest = float(np.max(np.abs(d.responses)))
    c_y = clip_response if clip_response is not None else (largest if largest > 0 else 1.0)
    if largest <= c_y:
        return d, c_y
    return d.with_responses(np.clip(d.responses, -c_y, c_y)), c_y


def squared_loss_sensitivity(clip_row: float, clip_weight: float, clip_response: float) -> float:
    """Gradient bound 2 c_x (c_x c_beta + c_y) of x (x' beta - y) on clipped data."""
    return 2.0 * clip_row * (clip_row * clip_weight + clip_response)


def squared_gradient(d: Dataset, beta: np.ndarray) -> np.ndarray:
    return d.features.T @ (d.features @ beta - d.responses) / d.n_samples


def squared_objective(d: Dataset, beta: np.ndarray, lam: float = 0.0) -> float:
    residuals = d.responses - d.features @ beta
    return float(0.5 * np.mean(residuals**2) + lam * np.sum(np.abs(beta)))


def perturbed_descent(
    data: Dataset,
    cfg: BaselineConfig,
    budget: Optional[PrivacyBudget],
    rng: np.random.Generator,
    sensitivity: float,
    gradient: Callable[[np.ndarray], np.ndarray],
    update: Callable[[np.ndarray, np.ndarray, float], np.ndarray],
    objective: Callable[[np.ndarray], float],
    step: Callable[[int], float],
    callback: Optional[IterationCallback] = None,
    diagnostics: Optional[dict] = None,
) -> FitResult:
    """
    beta <- clip_l2(update(beta, grad + u, step_t), c_beta), repeated total_iters times.

    The gradient noise variance is the gradient-stage formula with V*T replaced
    by total_iters and G by the given sensitivity.
    """
    started = time.perf_counter()
    p = data.n_features
    noise = NoiseSource(rng, enabled=budget is not None)
    sigma_sq = gradient_noise_variance(budget, sensitivity, cfg.total_iters, data.n_samples) if budget else 0.0

    beta = np.zeros(p)
    trace = []
    for t in range(1, cfg.total_iters + 1):
        noisy_grad = gradient(beta) + noise.grad(p, sigma_sq)
        new_beta = clip_l2(update(beta, noisy_grad, step(t)), cfg.clip_weight)
        trace.append(
            TraceRecord(
                v=1,
                t=t,
                objective=objective(new_beta),
                weight_change=float(np.linalg.norm(new_beta - beta)),
                elapsed=time.perf_counter() - started,
                weight_norm=float(np.linalg.norm(new_beta)),
            )
        )
        beta = new_beta
        if callback is not None:
            callback(trace[-1].elapsed, beta)

    logger.debug(f"{cfg.algorithm.value}: {cfg.total_iters} iterations, sigma_grad^2={sigma_sq:.3e}")
    info = dict(diagnostics or {})
    info.update(sensitivity=sensitivity, sigma_grad_sq=sigma_sq, noise_counts=dict(noise.counts))
    return FitResult(weights=WeightVector(values=beta), trace=trace, noise_draws=noise.total_draws, diagnostics=info)


def constant_step(eta: float) -> Callable[[int], float]:
    return lambda t: eta


def decaying_step(eta: float) -> Callable[[int], float]:
    return lambda t: eta / math.sqrt(t)


class BaselineSolver(BaseSolver):
    """Adapter from the bench's (selector, context) call to a BaselineConfig run."""

    def build_config(self, selector_value: float, context: SolverContext) -> BaselineConfig:
        selector = (
            {"sparsity_target": int(round(selector_value))}
            if self.selector == "sparsity"
            else {"lambda_value": float(selector_value)}
        )
        return BaselineConfig(
            algorithm=self.algorithm,
            # Fairness protocol: same iteration count as FRAPPE's V*T.
            total_iters=context.baseline.total_iters or context.frappe.total_iters,
            step_size=context.baseline.step_size,
            clip_weight=context.frappe.clip_weight,
            clip_row=context.frappe.clip_row,
            power_iters=context.baseline.power_iters,
            **selector,
        )

    @abstractmethod
    def run(
        self,
        dataset: Dataset,
        cfg: BaselineConfig,
        budget: Optional[PrivacyBudget],
        rng: np.random.Generator,
        callback: Optional[IterationCallback] = None,
    ) -> FitResult:
        pass

    def fit(
        self,
        dataset: Dataset,
        selector_value: float,
        budget: Optional[PrivacyBudget],
        rng: np.random.Generator,
        context: SolverContext,
        callback: Optional[IterationCallback] = None,
    ) -> FitResult:
        if context.non_private:
            budget = None
        return self.run(dataset, self.build_config(selector_value, context), budget, rng, callback)
