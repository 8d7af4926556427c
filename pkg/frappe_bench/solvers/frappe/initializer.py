"""
Elastic-net LAD initializer with output perturbation.

    beta_0 = argmin (1/n) sum |y_i - x_i' beta| + l1 ||beta||_1 + (l2 / 2) ||beta||_2^2

solved on a uniform subsample of n rows by proximal subgradient descent with
step c / sqrt(t); then beta_1 = beta_0 + N(0, sigma_init^2 I).
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from frappe_bench.core.mechanisms import NoiseSource
from frappe_bench.core.operators import soft_threshold
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.privacy import NoiseScales
from frappe_bench.models.solver_config import FrappeConfig

logger = logging.getLogger(__name__)

# Relative objective gain over the last tenth of the budget that still counts as "not converged".
LATE_PROGRESS_TOL = 1e-4


def _objective(residuals: np.ndarray, beta: np.ndarray, l1: float, l2: float) -> float:
    return float(np.mean(np.abs(residuals)) + l1 * np.sum(np.abs(beta)) + 0.5 * l2 * (beta @ beta))


def elastic_net_lad(
    features: np.ndarray,
    responses: np.ndarray,
    l1: float,
    l2: float,
    step: float = 1.0,
    max_iter: int = 2000,
    tol: float = 1e-7,
) -> Tuple[np.ndarray, bool]:
    """
    Proximal subgradient descent on the elastic-net LAD objective.

    Subgradient step on the LAD term, exact prox on both penalties. The
    subgradient of |r| at r = 0 is taken as 0. The best iterate seen is
    returned, since subgradient iterates do not decrease monotonically.

    Args:
        features: n x p design
        responses: length-n responses
        l1: l1 penalty (>= 0)
        l2: ridge penalty (>= 0)
        step: c in the c / sqrt(t) step rule
        max_iter: Iteration cap
        tol: Relative tolerance on iterate movement

    Returns:
        (best iterate, converged flag)
    """
    n, p = features.shape
    beta = np.zeros(p)
    residuals = responses - features @ beta
    best_beta = beta.copy()
    best_obj = _objective(residuals, beta, l1, l2)
    late_start = max(1, int(0.9 * max_iter))
    obj_at_late_start = best_obj

    for t in range(1, max_iter + 1):
        if t == late_start:
            obj_at_late_start = best_obj
        alpha = step / math.sqrt(t)
        grad = -(features.T @ np.sign(residuals)) / n
        # prox of alpha * (l1 |.| + l2 / 2 |.|^2)
        new_beta = soft_threshold(beta - alpha * grad, alpha * l1) / (1.0 + alpha * l2)
        moved = float(np.linalg.norm(new_beta - beta))
        beta = new_beta
        residuals = responses - features @ beta
        obj = _objective(residuals, beta, l1, l2)
        if obj < best_obj:
            best_obj, best_beta = obj, beta.copy()
        if moved <= tol * max(1.0, float(np.linalg.norm(beta))):
            return best_beta, True

    converged = obj_at_late_start - best_obj <= LATE_PROGRESS_TOL * max(1.0, abs(best_obj))
    return best_beta, converged


def init_estimator(
    d: Dataset,
    cfg: FrappeConfig,
    scales: Optional[NoiseScales],
    noise: NoiseSource,
) -> WeightVector:
    """
    Subsampled elastic-net LAD fit plus Gaussian output perturbation.

    Args:
        d: Training data (already row-clipped)
        cfg: FRAPPE hyperparameters (subsample size, penalties, step rule)
        scales: Noise scales, or None in non-private mode
        noise: Stream source; its subsample stream draws the rows

    Returns:
        beta_1, the perturbed initializer
    """
    n = cfg.subsample_size
    if n > d.n_samples:
        raise ValueError(f"subsample size n={n} exceeds N={d.n_samples}")
    rows = noise.subsample_rng.choice(d.n_samples, size=n, replace=False)
    l1, l2 = cfg.elastic_net
    beta0, converged = elastic_net_lad(
        d.features[rows], d.responses[rows], l1, l2,
        step=cfg.init_step, max_iter=cfg.init_max_iter, tol=cfg.init_tol,
    )
    if not converged:
        logger.warning(
            f"Elastic-net LAD initializer still improving after {cfg.init_max_iter} iterations; "
            f"using the best iterate"
        )
    perturbation = noise.init(d.n_features, scales.sigma_init_sq if scales else 0.0)
    return WeightVector(values=beta0 + perturbation)
