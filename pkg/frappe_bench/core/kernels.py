"""
Compactly supported smoothing kernels and the density estimate at zero.

The biweight here is the fourth-order polynomial
    K(u) = (105/64) (1 - u^2)^2 (1 - 3 u^2),  |u| <= 1,
which integrates to 1 and peaks at K(0) = B = 105/64 but dips below zero for
|u| > 1/sqrt(3). The other three kernels are nonnegative.
"""

import math
from typing import Callable, Dict, List, Union

import numpy as np

from frappe_bench.core.mechanisms import gaussian_noise
from frappe_bench.models.solver_config import BandwidthSchedule, KernelName


class Kernel:
    """A kernel K supported on [-1, 1] with sup |K| = sup_bound."""

    def __init__(self, name: KernelName, profile: Callable[[np.ndarray], np.ndarray], sup_bound: float):
        self.name = name
        self._profile = profile
        self.sup_bound = sup_bound

    def evaluate(self, u) -> np.ndarray:
        """K(u) elementwise; exactly 0 outside [-1, 1]."""
        u = np.asarray(u, dtype=np.float64)
        u_sq = u * u
        inside = np.abs(u) <= 1.0
        return np.where(inside, self._profile(u_sq), 0.0)

    def __repr__(self) -> str:
        return f"Kernel({self.name.value}, B={self.sup_bound})"


def _biweight(u_sq: np.ndarray) -> np.ndarray:
    return (105.0 / 64.0) * (1.0 - u_sq) ** 2 * (1.0 - 3.0 * u_sq)


def _uniform(u_sq: np.ndarray) -> np.ndarray:
    return np.full_like(u_sq, 0.5)


def _epanechnikov(u_sq: np.ndarray) -> np.ndarray:
    return 0.75 * (1.0 - u_sq)


def _triweight(u_sq: np.ndarray) -> np.ndarray:
    return (35.0 / 32.0) * (1.0 - u_sq) ** 3


KERNELS: Dict[KernelName, Kernel] = {
    KernelName.BIWEIGHT: Kernel(KernelName.BIWEIGHT, _biweight, 105.0 / 64.0),
    KernelName.UNIFORM: Kernel(KernelName.UNIFORM, _uniform, 0.5),
    KernelName.EPANECHNIKOV: Kernel(KernelName.EPANECHNIKOV, _epanechnikov, 0.75),
    KernelName.TRIWEIGHT: Kernel(KernelName.TRIWEIGHT, _triweight, 35.0 / 32.0),
}


def get_kernel(name: Union[str, KernelName]) -> Kernel:
    """
    Look up a kernel by name.

    Raises:
        KeyError: for unknown names, listing the known ones
    """
    try:
        return KERNELS[KernelName(name)]
    except ValueError:
        known = ", ".join(k.value for k in KernelName)
        raise KeyError(f"unknown kernel {name!r}; known kernels: {known}") from None


def list_kernels() -> List[str]:
    return [k.value for k in KernelName]


def kde_at_zero(residuals, kernel: Kernel, h: float) -> float:
    """
    f_hat(0) = (1 / (N h)) * sum_i K(r_i / h).

    Args:
        residuals: Length-N vector y - X beta
        kernel: Smoothing kernel
        h: Positive bandwidth

    Returns:
        The density estimate at zero (can dip below 0 for the biweight)
    """
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    r = np.asarray(residuals, dtype=np.float64)
    if r.size == 0:
        raise ValueError("kde_at_zero needs at least one residual")
    return float(np.sum(kernel.evaluate(r / h)) / (r.size * h))


def floored_density(estimate: float, noise: float, floor: float) -> float:
    """max(estimate + noise, floor)."""
    if not floor > 0:
        raise ValueError(f"density floor must be positive, got {floor}")
    return max(estimate + noise, floor)


def private_kde_at_zero(
    residuals,
    kernel: Kernel,
    h: float,
    sigma_kde_sq: float,
    floor: float,
    rng: np.random.Generator,
) -> float:
    """
    Gaussian-perturbed density at zero, floored away from zero.

    A zero variance skips the draw and returns max(f_hat, floor).
    """
    estimate = kde_at_zero(residuals, kernel, h)
    noise = 0.0
    if sigma_kde_sq > 0:
        noise = float(gaussian_noise(rng, 1, sigma_kde_sq)[0])
    return floored_density(estimate, noise, floor)


def bandwidth_at(v: int, n_samples: int, sparsity: int, schedule: BandwidthSchedule) -> float:
    """
    Bandwidth for outer loop v (1-based).

    decay schedule: h_v = sqrt(s log N / N) + s^(-1/2) * decay^((v + 1) / 2)

    Args:
        v: Outer loop index, v >= 1
        n_samples: N >= 1
        sparsity: s >= 1; the schedule's own sparsity wins when set
        schedule: Bandwidth rule

    Returns:
        Positive bandwidth
    """
    if v < 1:
        raise ValueError(f"outer loop index must be >= 1, got {v}")
    if schedule.kind == "fixed":
        return float(schedule.value)
    s = schedule.sparsity or sparsity
    if s < 1 or n_samples < 1:
        raise ValueError(f"bandwidth needs s >= 1 and N >= 1, got s={s}, N={n_samples}")
    floor_term = math.sqrt(s * math.log(n_samples) / n_samples)
    return floor_term + s ** (-0.5) * schedule.decay ** ((v + 1) / 2.0)


def bandwidth_schedule(schedule: BandwidthSchedule, n_samples: int, sparsity: int, outer_iters: int) -> List[float]:
    """[h_1, ..., h_V] for one fit."""
    return [bandwidth_at(v, n_samples, sparsity, schedule) for v in range(1, outer_iters + 1)]
