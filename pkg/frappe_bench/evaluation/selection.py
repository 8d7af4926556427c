"""
BIC model selection over lambda or sparsity grids.

    BIC = N * log(mean training loss) + |support| * log N

The loss is the algorithm's own: mean absolute residual for LAD methods, mean
squared residual for square-loss methods. Ties go to the sparser model, then
to the smaller selector value, so the choice never depends on grid order.
"""

import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from frappe_bench.evaluation.metrics import SUPPORT_TOL
from frappe_bench.models.dataset import Dataset, WeightVector

logger = logging.getLogger(__name__)

LOSSES = ("lad", "squared")
# log(0) guard for interpolating fits
_MIN_LOSS = 1e-300


class BicEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    bic: float
    loss: float
    support_size: int
    weights: WeightVector


def training_loss(d: Dataset, weights: WeightVector, loss: str) -> float:
    residuals = d.responses - d.features @ weights.values
    if loss == "lad":
        return float(np.mean(np.abs(residuals)))
    if loss == "squared":
        return float(np.mean(residuals**2))
    raise ValueError(f"unknown loss {loss!r}; expected one of {LOSSES}")


def bic_value(d: Dataset, weights: WeightVector, loss: str) -> float:
    n = d.n_samples
    mean_loss = max(training_loss(d, weights, loss), _MIN_LOSS)
    return n * math.log(mean_loss) + weights.sparsity(SUPPORT_TOL) * math.log(n)


def bic_path(
    d: Dataset,
    candidates: Sequence[float],
    fitter: Callable[[float], WeightVector],
    loss: str = "lad",
) -> List[BicEntry]:
    """
    Fit every candidate and score it.

    Args:
        d: Training data the BIC is evaluated on
        candidates: Selector values (lambda or sparsity)
        fitter: Maps a selector value to fitted weights
        loss: "lad" or "squared"

    Returns:
        One BicEntry per candidate, in the given order
    """
    entries = []
    for value in candidates:
        weights = fitter(value)
        entries.append(
            BicEntry(
                value=float(value),
                bic=bic_value(d, weights, loss),
                loss=training_loss(d, weights, loss),
                support_size=weights.sparsity(SUPPORT_TOL),
                weights=weights,
            )
        )
    return entries


def best_entry(entries: Sequence[BicEntry]) -> BicEntry:
    if not entries:
        raise ValueError("BIC selection needs at least one candidate")
    return min(entries, key=lambda e: (e.bic, e.support_size, e.value))


def bic_select(
    d: Dataset,
    candidates: Sequence[float],
    fitter: Callable[[float], WeightVector],
    loss: str = "lad",
) -> Tuple[float, WeightVector]:
    """
    Pick the candidate with the smallest BIC.

    Returns:
        (selected value, its weights)
    """
    if len(candidates) == 0:
        raise ValueError("BIC selection needs at least one candidate")
    best = best_entry(bic_path(d, candidates, fitter, loss))
    logger.debug(f"BIC selected {best.value:.4g} (support {best.support_size}, bic {best.bic:.4f})")
    return best.value, best.weights


def default_lambda_grid(d: Dataset, count: int = 20) -> List[float]:
    """
    count log-spaced values from lambda_max = ||X'y||_inf / N down to lambda_max / 1e3.

    Raises:
        ValueError: if count < 2 or X'y is identically zero
    """
    if count < 2:
        raise ValueError(f"a lambda grid needs at least 2 points, got {count}")
    lambda_max = float(np.max(np.abs(d.features.T @ d.responses))) / d.n_samples
    if not lambda_max > 0:
        raise ValueError("X'y is zero; no data-driven lambda grid exists")
    factors = 10.0 ** (-3.0 * np.arange(count) / (count - 1))
    return [lambda_max * float(f) for f in factors]


def default_sparsity_grid(p: int, count: int = 20) -> List[int]:
    """Up to count distinct sparsity targets spread over 1..min(p, max(count, p // 2))."""
    top = min(p, max(count, p // 2))
    values = np.unique(np.round(np.linspace(1, top, count)).astype(int))
    return [int(v) for v in values]
