"""
Proximal and projection operators used inside every solver loop.

All functions are pure: inputs are never modified and a fresh array is
returned.
"""

from typing import Tuple

import numpy as np

from frappe_bench.models.dataset import Dataset


def soft_threshold(g: np.ndarray, tau: float) -> np.ndarray:
    """
    Elementwise sign(g) * max(|g| - tau, 0), the prox of tau * ||.||_1.

    Args:
        g: Input vector
        tau: Nonnegative threshold

    Returns:
        Shrunk copy of g
    """
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    g = np.asarray(g, dtype=np.float64)
    return np.sign(g) * np.maximum(np.abs(g) - tau, 0.0)


def _shrink_into_ball(w: np.ndarray, c: float, norm: float) -> np.ndarray:
    scale = c / norm
    out = w * scale
    # Rounding can leave the product a hair outside the ball.
    while np.linalg.norm(out) > c:
        scale = np.nextafter(scale, 0.0)
        out = w * scale
    return out


def clip_l2(w: np.ndarray, c: float) -> np.ndarray:
    """
    Project w onto the l2 ball of radius c by rescaling.

    Vectors already inside the ball come back unchanged, which makes the
    operator exactly idempotent.

    Args:
        w: Input vector
        c: Positive radius

    Returns:
        w * c / max(c, ||w||_2)
    """
    if c <= 0:
        raise ValueError(f"clip radius must be positive, got {c}")
    w = np.asarray(w, dtype=np.float64)
    norm = float(np.linalg.norm(w))
    if norm <= c:
        return w.copy()
    return _shrink_into_ball(w, c, norm)


def clip_rows(features: np.ndarray, c_x: float) -> np.ndarray:
    """Row-wise clip_l2 of a design matrix."""
    if c_x <= 0:
        raise ValueError(f"row clip must be positive, got {c_x}")
    out = np.array(features, dtype=np.float64)
    norms = np.linalg.norm(out, axis=1)
    for i in np.flatnonzero(norms > c_x):
        out[i] = _shrink_into_ball(out[i], c_x, float(norms[i]))
    return out


def scale_rows(d: Dataset, c_x: float) -> Dataset:
    """
    Rescale every row of d with ||x_i||_2 > c_x onto the sphere of radius c_x.

    Args:
        d: Input dataset
        c_x: Positive row-norm bound

    Returns:
        Dataset with the same responses; rows inside the bound are unchanged
    """
    if c_x <= 0:
        raise ValueError(f"row clip must be positive, got {c_x}")
    if not np.any(d.row_norms() > c_x):
        return d
    return Dataset(features=clip_rows(d.features, c_x), responses=d.responses)


def hard_threshold(w: np.ndarray, s: int) -> np.ndarray:
    """
    Keep the s largest-magnitude coordinates of w and zero the rest.

    Ties in magnitude go to the lowest index.

    Args:
        w: Input vector
        s: Number of coordinates to keep (1 <= s)

    Returns:
        Vector with at most s non-zeros
    """
    if s < 1:
        raise ValueError(f"sparsity target must be >= 1, got {s}")
    w = np.asarray(w, dtype=np.float64)
    if s >= w.shape[0]:
        return w.copy()
    # Stable sort on -|w| keeps lower indices first among equal magnitudes.
    order = np.argsort(-np.abs(w), kind="stable")
    out = np.zeros_like(w)
    keep = order[:s]
    out[keep] = w[keep]
    return out


def _gram(features: np.ndarray) -> np.ndarray:
    n = features.shape[0]
    return features.T @ features / n


def lipschitz_constant(features: np.ndarray, iters: int = 100) -> float:
    """
    Largest eigenvalue of X'X/N by power iteration.

    This is the smoothness constant L of every quadratic surrogate the solvers
    minimize. The start vector is deterministic so the estimate is too.

    Args:
        features: N x p design matrix
        iters: Number of power-iteration steps

    Returns:
        Estimate of L (0.0 for an all-zero design)
    """
    gram = _gram(features)
    return _top_eigenvalue(gram, iters)


def _top_eigenvalue(matrix: np.ndarray, iters: int) -> float:
    p = matrix.shape[0]
    v = np.ones(p) / np.sqrt(p)
    value = 0.0
    for _ in range(iters):
        w = matrix @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        value = float(v @ matrix @ v)
    return value


def eigen_range(features: np.ndarray, iters: int = 100) -> Tuple[float, float]:
    """
    (mu, L): smallest and largest eigenvalue of X'X/N by shifted power iteration.

    mu is a diagnostic only; nothing in the solvers branches on it.
    """
    gram = _gram(features)
    top = _top_eigenvalue(gram, iters)
    shifted = top * np.eye(gram.shape[0]) - gram
    bottom = top - _top_eigenvalue(shifted, iters)
    return max(bottom, 0.0), top
