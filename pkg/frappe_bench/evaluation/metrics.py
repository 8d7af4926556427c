"""
Accuracy and support-recovery metrics.
"""

from typing import Optional, Tuple

import numpy as np

from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.experiment import MetricReport

# |beta_i| above this counts as selected; thresholding yields exact zeros,
# the tolerance only absorbs rounding from clipping rescales.
SUPPORT_TOL = 1e-8


def f1_score(
    estimated: WeightVector, truth: WeightVector, tol: float = SUPPORT_TOL
) -> Tuple[float, float, float]:
    """
    Support-recovery scores.

    Args:
        estimated: Fitted weights
        truth: True weights
        tol: Support threshold

    Returns:
        (f1, precision, recall); empty supports give 0 for the undefined
        ratio, and two empty supports count as a perfect match
    """
    if estimated.dim != truth.dim:
        raise ValueError(f"dimension mismatch: {estimated.dim} vs {truth.dim}")
    est = set(estimated.support(tol))
    true = set(truth.support(tol))
    if not est and not true:
        return 1.0, 1.0, 1.0
    hits = len(est & true)
    precision = hits / len(est) if est else 0.0
    recall = hits / len(true) if true else 0.0
    if precision + recall == 0:
        return 0.0, precision, recall
    return 2.0 * precision * recall / (precision + recall), precision, recall


def mse_weights(estimated: WeightVector, truth: WeightVector) -> float:
    """||beta_hat - beta*||^2 / p."""
    if estimated.dim != truth.dim:
        raise ValueError(f"dimension mismatch: {estimated.dim} vs {truth.dim}")
    diff = estimated.values - truth.values
    return float(diff @ diff) / estimated.dim


def prediction_errors(test: Dataset, weights: WeightVector) -> Tuple[float, float]:
    """(MSE, MAE) of X_test beta against y_test."""
    residuals = test.responses - test.features @ weights.values
    return float(np.mean(residuals**2)), float(np.mean(np.abs(residuals)))


def metric_report(
    weights: WeightVector,
    truth: Optional[WeightVector] = None,
    test: Optional[Dataset] = None,
) -> MetricReport:
    """Build a MetricReport from whatever references are available."""
    fields = {"sparsity": weights.sparsity(SUPPORT_TOL)}
    if truth is not None:
        f1, precision, recall = f1_score(weights, truth)
        fields.update(
            mse_weights=mse_weights(weights, truth), f1=f1, precision=precision, recall=recall
        )
    if test is not None:
        mse, mae = prediction_errors(test, weights)
        fields.update(mse_pred=mse, mae_pred=mae)
    return MetricReport(**fields)
