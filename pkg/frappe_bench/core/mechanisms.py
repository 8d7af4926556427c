"""
Gaussian mechanism and the noise-scale calculators for the three FRAPPE stages.

Stage variances (total-budget form, even split):

    init:  24 c_x^2 log(n / (N delta)) / (eps^2 lambda02^2 N^2)
    kde:   24 B^2 log(1 / delta) V / (eps^2 N^2 h_v^2)
    grad:  6 G^2 log(1 / delta) T V / (eps^2 N^2),   G = 4 c_x^2 c_beta + c_f

A non-even stage split rescales each stage's variance by ((1/3) / w)^2, i.e.
as if that stage had spent w * eps instead of eps / 3.

RNG streams: every random draw comes from a numpy Generator built by
derive_rng(seed, *key). A NoiseSource spawns one child per stage, in the
fixed order subsample, init, kde, grad.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from frappe_bench.errors import InfeasibleBudgetError
from frappe_bench.models.privacy import NoiseScales, PrivacyBudget, Stage
from frappe_bench.models.solver_config import DEFAULT_BANDWIDTH_SPARSITY, FrappeConfig

logger = logging.getLogger(__name__)


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """
    Deterministic generator for the stream identified by (seed, key...).

    Args:
        seed: Root seed of the run
        key: Stream path, e.g. (cell, replication, role)

    Returns:
        numpy Generator independent of every other key
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(sequence)


def gaussian_noise(rng: np.random.Generator, dim: int, sigma_sq: float) -> np.ndarray:
    """
    Draw dim i.i.d. samples from N(0, sigma_sq).

    Args:
        rng: Seeded generator
        dim: Number of draws
        sigma_sq: Positive variance

    Returns:
        Length-dim float64 vector
    """
    if not sigma_sq > 0:
        raise ValueError(f"noise variance must be positive, got {sigma_sq}")
    if dim < 1:
        raise ValueError(f"noise dimension must be >= 1, got {dim}")
    return rng.normal(0.0, math.sqrt(sigma_sq), size=dim)


def effective_stage_epsilon(budget: PrivacyBudget, stage: Stage) -> Tuple[float, float]:
    """(epsilon, delta) spent by one stage under the budget's split."""
    share = budget.share(Stage(stage))
    return share * budget.epsilon, share * budget.delta


def gradient_bound(clip_row: float, clip_weight: float, density_floor: float) -> float:
    """G = 4 c_x^2 c_beta + c_f."""
    return 4.0 * clip_row**2 * clip_weight + density_floor


def _split_factor(budget: PrivacyBudget, stage: Stage) -> float:
    if budget.is_even_split:
        return 1.0
    return ((1.0 / 3.0) / budget.share(stage)) ** 2


def compute_noise_scales(
    budget: PrivacyBudget,
    cfg: FrappeConfig,
    n_samples: int,
    clip_row: Optional[float] = None,
    sparsity: Optional[int] = None,
) -> NoiseScales:
    """
    Evaluate the three stage variances for a FRAPPE run.

    Args:
        budget: Total (epsilon, delta) and its stage split
        cfg: FRAPPE hyperparameters
        n_samples: Training-set size N
        clip_row: Resolved c_x; falls back to cfg.clip_row
        sparsity: s for the bandwidth schedule (a schedule-level sparsity wins)

    Returns:
        NoiseScales with one kde variance per outer loop

    Raises:
        InfeasibleBudgetError: if n / (N delta) <= 1
    """
    # Lazy import: kernels draws its noise through this module.
    from frappe_bench.core.kernels import bandwidth_schedule, get_kernel

    c_x = clip_row if clip_row is not None else cfg.clip_row
    if c_x is None:
        raise ValueError("clip_row must be resolved before computing noise scales")
    if n_samples < 1:
        raise ValueError(f"N must be >= 1, got {n_samples}")

    eps_sq = budget.epsilon**2
    n_sq = float(n_samples) ** 2
    log_inv_delta = math.log(1.0 / budget.delta)
    lambda02 = cfg.elastic_net[1]
    V, T = cfg.outer_iters, cfg.inner_iters

    init_ratio = cfg.subsample_size / (n_samples * budget.delta)
    if init_ratio <= 1.0:
        raise InfeasibleBudgetError(
            f"initializer noise needs n/(N*delta) > 1, got n={cfg.subsample_size}, "
            f"N={n_samples}, delta={budget.delta}"
        )
    sigma_init_sq = 24.0 * c_x**2 * math.log(init_ratio) / (eps_sq * lambda02**2 * n_sq)

    bandwidths = bandwidth_schedule(cfg.bandwidth, n_samples, sparsity or DEFAULT_BANDWIDTH_SPARSITY, V)
    sup_bound = get_kernel(cfg.kernel).sup_bound
    kde_numerator = 24.0 * sup_bound**2 * log_inv_delta * V
    sigma_kde_sq = [kde_numerator / (eps_sq * n_sq * h**2) for h in bandwidths]

    g = gradient_bound(c_x, cfg.clip_weight, cfg.density_floor)
    sigma_grad_sq = 6.0 * g**2 * log_inv_delta * T * V / (eps_sq * n_sq)

    init_factor = _split_factor(budget, Stage.INIT)
    kde_factor = _split_factor(budget, Stage.KDE)
    grad_factor = _split_factor(budget, Stage.GRAD)

    logger.debug(
        f"Noise scales for N={n_samples}, eps={budget.epsilon}: init={sigma_init_sq * init_factor:.3e}, "
        f"grad={sigma_grad_sq * grad_factor:.3e}, G={g:.3e}"
    )
    return NoiseScales(
        sigma_init_sq=sigma_init_sq * init_factor,
        sigma_kde_sq=[value * kde_factor for value in sigma_kde_sq],
        sigma_grad_sq=sigma_grad_sq * grad_factor,
        gradient_bound=g,
        bandwidths=bandwidths,
    )


def gradient_noise_variance(
    budget: PrivacyBudget, sensitivity: float, total_iters: int, n_samples: int
) -> float:
    """Gradient-stage variance with V*T replaced by a single iteration count (baselines)."""
    log_inv_delta = math.log(1.0 / budget.delta)
    return 6.0 * sensitivity**2 * log_inv_delta * total_iters / (budget.epsilon**2 * float(n_samples) ** 2)


class NoiseSource:
    """
    Per-fit noise streams with a draw counter.

    When disabled (non-private mode) every draw returns exact zeros and
    nothing is counted, but the subsample stream still works so the loop
    structure is unchanged.
    """

    STREAMS: Sequence[str] = ("subsample", "init", "kde", "grad")

    def __init__(self, rng: Optional[np.random.Generator] = None, enabled: bool = True):
        if rng is None:
            rng = np.random.default_rng(0)
        self.enabled = enabled
        self.streams: Dict[str, np.random.Generator] = dict(zip(self.STREAMS, rng.spawn(len(self.STREAMS))))
        self.counts: Dict[str, int] = {"init": 0, "kde": 0, "grad": 0}

    @property
    def subsample_rng(self) -> np.random.Generator:
        return self.streams["subsample"]

    @property
    def total_draws(self) -> int:
        """1 per initializer perturbation, 1 per kde perturbation, p per gradient perturbation."""
        return sum(self.counts.values())

    def init(self, dim: int, sigma_sq: float) -> np.ndarray:
        if not self.enabled:
            return np.zeros(dim)
        self.counts["init"] += 1
        return gaussian_noise(self.streams["init"], dim, sigma_sq)

    def kde(self, sigma_sq: float) -> float:
        if not self.enabled:
            return 0.0
        self.counts["kde"] += 1
        return float(gaussian_noise(self.streams["kde"], 1, sigma_sq)[0])

    def grad(self, dim: int, sigma_sq: float) -> np.ndarray:
        if not self.enabled:
            return np.zeros(dim)
        self.counts["grad"] += dim
        return gaussian_noise(self.streams["grad"], dim, sigma_sq)
