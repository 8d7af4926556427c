"""
Synthetic linear-model data with AR-structured Gaussian covariates.

    x_i ~ N(0, Sigma),  Sigma_ij = rho^|i - j|
    beta* = (10 / s) * (1, 2, ..., s, 0, ..., 0)
    y_i = x_i' beta* + e_i,  e ~ normal(0,1) | student_t(2) | cauchy(0,1)

Covariates are not row-clipped here; solvers clip to c_x themselves.
"""

from functools import lru_cache
import logging
import math
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy import linalg

from frappe_bench.core.mechanisms import derive_rng
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.experiment import NoiseFamily, SyntheticSpec

logger = logging.getLogger(__name__)


def covariance_matrix(p: int, rho: float) -> np.ndarray:
    """Sigma_ij = rho^|i - j|."""
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :]).astype(np.float64)


@lru_cache(maxsize=32)
def cholesky_factor(p: int, rho: float) -> np.ndarray:
    """Lower-triangular L with L L' = Sigma, cached per (p, rho)."""
    if not -1.0 < rho < 1.0:
        raise ValueError(f"covariance base must lie in (-1, 1), got {rho}")
    factor = linalg.cholesky(covariance_matrix(p, rho), lower=True)
    factor.setflags(write=False)
    logger.debug(f"Factorized AR covariance for p={p}, rho={rho}")
    return factor


def true_weights(p: int, s: int) -> WeightVector:
    """
    Staircase truth (10 / s) * (1, ..., s) on the first s coordinates.

    Args:
        p: Dimension
        s: Sparsity, 1 <= s <= p

    Returns:
        WeightVector with exactly s non-zeros and max entry 10
    """
    if not 1 <= s <= p:
        raise ValueError(f"need 1 <= s <= p, got s={s}, p={p}")
    values = np.zeros(p)
    values[:s] = 10.0 * np.arange(1, s + 1) / s
    return WeightVector(values=values)


def sample_noise(family: NoiseFamily, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    count i.i.d. noise draws.

    Student-t(2) is built as Z / sqrt(chi2_2 / 2) and Cauchy as tan(pi (U - 1/2)).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    family = NoiseFamily(family)
    if family is NoiseFamily.NORMAL:
        return rng.standard_normal(count)
    if family is NoiseFamily.STUDENT_T:
        z = rng.standard_normal(count)
        chi2 = rng.chisquare(2, count)
        return z / np.sqrt(chi2 / 2.0)
    u = rng.random(count)
    return np.tan(math.pi * (u - 0.5))


def generate(spec: SyntheticSpec, rng: Optional[np.random.Generator] = None) -> Tuple[Dataset, WeightVector]:
    """
    Draw one dataset for spec, deterministically from spec.seed unless an
    explicit generator is passed (the bench passes one keyed by cell and replication).

    Returns:
        (dataset, true weights); y - X beta* is exactly the drawn noise
    """
    if rng is None:
        rng = derive_rng(spec.seed)
    n, p = spec.n_samples, spec.n_features
    factor = cholesky_factor(p, float(spec.covariance_base))
    features = rng.standard_normal((n, p)) @ factor.T
    truth = true_weights(p, spec.sparsity)
    noise = sample_noise(spec.noise_family, n, rng)
    responses = features @ truth.values + noise
    return Dataset(features=features, responses=responses), truth


def write_csv(d: Dataset, path: str) -> None:
    """Write the loader's schema: header row, response first, then x1..xp."""
    frame = pd.DataFrame(d.features, columns=[f"x{j + 1}" for j in range(d.n_features)])
    frame.insert(0, "y", d.responses)
    try:
        frame.to_csv(path, index=False)
    except OSError as e:
        raise OSError(f"could not write dataset to {path}: {e}") from e
