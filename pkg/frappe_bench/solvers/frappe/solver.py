"""
FRAPPE: private sparse LAD regression by pseudo-response Newton surrogates.

Outer loop v = 1..V:
    f_v   = max(kde_at_zero(y - X beta_v) + u, floor)
    y~_i  = x_i' beta_v - (1 / f_v) * (1{y_i <= x_i' beta_v} - 1/2)
Inner loop t = 1..T on H_v(beta) = (1 / 2N) ||y~ - X beta||^2:
    beta <- clip_l2(soft(beta - eta (grad H_v + u), lambda eta), c_beta)
"""

import logging
import math
import time
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from frappe_bench.core.kernels import bandwidth_schedule, floored_density, get_kernel, kde_at_zero
from frappe_bench.core.mechanisms import NoiseSource, compute_noise_scales
from frappe_bench.core.operators import clip_l2, eigen_range, scale_rows, soft_threshold
from frappe_bench.errors import InfeasibleBudgetError
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.fit import TRACE_COLUMNS, FitResult, TraceRecord
from frappe_bench.models.privacy import NoiseScales, PrivacyBudget
from frappe_bench.models.solver_config import DEFAULT_BANDWIDTH_SPARSITY, AlgorithmName, FrappeConfig
from frappe_bench.solvers.base_solver import BaseSolver, IterationCallback, SolverContext
from frappe_bench.solvers.frappe.initializer import init_estimator

logger = logging.getLogger(__name__)


class FrappeState(BaseModel):
    """Inner-loop state for one outer iteration."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    current_weights: WeightVector
    outer_index: int
    inner_index: int = 0
    noisy_density: float
    pseudo_responses: np.ndarray
    lambda_v: float
    trace: List[TraceRecord] = []


def resolve_clip_row(d: Dataset, clip_row: Optional[float]) -> float:
    """Configured c_x, else the largest observed row norm (1.0 for an all-zero design)."""
    if clip_row is not None:
        return clip_row
    largest = float(np.max(d.row_norms()))
    return largest if largest > 0 else 1.0


def resolve_step_size(step_size: Optional[float], lipschitz: float) -> float:
    """Configured eta, else 1 / (2L)."""
    if step_size is not None:
        return step_size
    return 1.0 / (2.0 * lipschitz) if lipschitz > 0 else 1.0


def pseudo_responses(d: Dataset, beta: WeightVector, noisy_density: float) -> np.ndarray:
    """
    y~_i = x_i' beta - (1 / f) * (1{y_i <= x_i' beta} - 1/2); ties count as 1.
    """
    if not noisy_density > 0:
        raise ValueError(f"density must be positive, got {noisy_density}")
    fitted = d.features @ beta.values
    indicator = (d.responses <= fitted).astype(np.float64)
    return fitted - (indicator - 0.5) / noisy_density


def inner_gradient(d: Dataset, beta: WeightVector, pseudo: np.ndarray) -> np.ndarray:
    """Gradient of (1 / 2N) ||y~ - X beta||^2: (1/N) X'(X beta - y~)."""
    pseudo = np.asarray(pseudo, dtype=np.float64)
    if pseudo.shape[0] != d.n_samples or beta.dim != d.n_features:
        raise ValueError("dataset, weights and pseudo responses have inconsistent lengths")
    return d.features.T @ (d.features @ beta.values - pseudo) / d.n_samples


def lad_objective(d: Dataset, beta: np.ndarray, lam: float) -> float:
    """(1/N) ||y - X beta||_1 + lambda ||beta||_1."""
    return float(np.mean(np.abs(d.responses - d.features @ beta)) + lam * np.sum(np.abs(beta)))


def inner_step(
    state: FrappeState,
    d: Dataset,
    cfg: FrappeConfig,
    scales: Optional[NoiseScales],
    noise: NoiseSource,
    step_size: float,
    started: Optional[float] = None,
) -> FrappeState:
    """
    One perturbed proximal-gradient step followed by weight clipping.

    Args:
        state: Current inner-loop state
        d: Row-clipped training data
        cfg: FRAPPE hyperparameters (clip_weight)
        scales: Noise scales, or None in non-private mode
        noise: Stream source for the gradient perturbation
        step_size: eta
        started: perf_counter() at fit start, for the trace's elapsed column

    Returns:
        New state with the trace extended by one record
    """
    beta = state.current_weights.values
    grad = inner_gradient(d, state.current_weights, state.pseudo_responses)
    grad = grad + noise.grad(d.n_features, scales.sigma_grad_sq if scales else 0.0)
    shrunk = soft_threshold(beta - step_size * grad, state.lambda_v * step_size)
    new_beta = clip_l2(shrunk, cfg.clip_weight)

    record = TraceRecord(
        v=state.outer_index,
        t=state.inner_index + 1,
        objective=lad_objective(d, new_beta, state.lambda_v),
        weight_change=float(np.linalg.norm(new_beta - beta)),
        density_estimate=state.noisy_density,
        elapsed=time.perf_counter() - started if started is not None else 0.0,
        weight_norm=float(np.linalg.norm(new_beta)),
    )
    return state.model_copy(
        update={
            "current_weights": WeightVector(values=new_beta),
            "inner_index": state.inner_index + 1,
            "trace": state.trace + [record],
        }
    )


def theoretical_outer_iters(n_samples: int, subsample_size: int, sparsity: int, n_features: int) -> int:
    """
    ceil(2 log(N / log p) / log(n / (s log p))), the outer-loop count after which
    the statistical error stops improving.

    Raises:
        InfeasibleBudgetError: if n <= s log p or N <= log p
    """
    if n_features < 2:
        raise InfeasibleBudgetError(f"the outer-iteration bound needs p >= 2, got p={n_features}")
    log_p = math.log(n_features)
    if subsample_size <= sparsity * log_p:
        raise InfeasibleBudgetError(
            f"subsample n={subsample_size} must exceed s*log(p)={sparsity * log_p:.3f}"
        )
    if n_samples <= log_p:
        raise InfeasibleBudgetError(f"N={n_samples} must exceed log(p)={log_p:.3f}")
    bound = 2.0 * math.log(n_samples / log_p) / math.log(subsample_size / (sparsity * log_p))
    # Absorb rounding so an exact integer bound is not pushed up by one.
    return max(1, math.ceil(bound - 1e-9))


def fit(
    d: Dataset,
    cfg: FrappeConfig,
    budget: Optional[PrivacyBudget],
    rng: np.random.Generator,
    lam: float,
    sparsity: Optional[int] = None,
    callback: Optional[IterationCallback] = None,
) -> FitResult:
    """
    Full FRAPPE double loop at a fixed lambda.

    Args:
        d: Training data
        cfg: FRAPPE hyperparameters
        budget: Privacy budget; None disables all three noise stages
        rng: Generator owned by this fit
        lam: l1 penalty, held fixed across outer loops
        sparsity: s for the bandwidth schedule when cfg does not pin one
        callback: Optional per-iteration hook (elapsed, weights)

    Returns:
        FitResult with beta_{V+1}, the trace and diagnostics

    Raises:
        InfeasibleBudgetError: from the noise-scale formulas
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if cfg.subsample_size > d.n_samples:
        raise ValueError(f"subsample size n={cfg.subsample_size} exceeds N={d.n_samples}")
    started = time.perf_counter()

    c_x = resolve_clip_row(d, cfg.clip_row)
    data = scale_rows(d, c_x)
    mu, lipschitz = eigen_range(data.features, cfg.power_iters)
    eta = resolve_step_size(cfg.step_size, lipschitz)
    s_bw = cfg.bandwidth.sparsity or sparsity or DEFAULT_BANDWIDTH_SPARSITY

    scales = compute_noise_scales(budget, cfg, d.n_samples, clip_row=c_x, sparsity=s_bw) if budget else None
    bandwidths = (
        scales.bandwidths if scales else bandwidth_schedule(cfg.bandwidth, d.n_samples, s_bw, cfg.outer_iters)
    )
    kernel = get_kernel(cfg.kernel)
    noise = NoiseSource(rng, enabled=budget is not None)

    diagnostics: Dict[str, Any] = {
        "clip_row": c_x,
        "step_size": eta,
        "lipschitz": lipschitz,
        "strong_convexity": mu,
        "lambda": lam,
        "bandwidths": bandwidths,
    }
    try:
        needed = theoretical_outer_iters(d.n_samples, cfg.subsample_size, s_bw, d.n_features)
        diagnostics["theoretical_outer_iters"] = needed
        if needed > cfg.outer_iters:
            logger.warning(f"Configured V={cfg.outer_iters} is below the theoretical bound V>={needed}")
    except InfeasibleBudgetError as e:
        logger.debug(f"Outer-iteration bound not applicable: {e}")

    weights = init_estimator(data, cfg, scales, noise)
    trace: List[TraceRecord] = []

    for v in range(1, cfg.outer_iters + 1):
        residuals = data.responses - data.features @ weights.values
        estimate = kde_at_zero(residuals, kernel, bandwidths[v - 1])
        u = noise.kde(scales.kde_variance(v) if scales else 0.0)
        density = floored_density(estimate, u, cfg.floor)
        logger.debug(f"Outer loop {v}: h={bandwidths[v - 1]:.4f}, f_hat={estimate:.4f}, noisy={density:.4f}")

        state = FrappeState(
            current_weights=weights,
            outer_index=v,
            noisy_density=density,
            pseudo_responses=pseudo_responses(data, weights, density),
            lambda_v=lam,
        )
        for _ in range(cfg.inner_iters):
            state = inner_step(state, data, cfg, scales, noise, eta, started)
            if callback is not None:
                callback(state.trace[-1].elapsed, state.current_weights.values)
        weights = state.current_weights
        trace.extend(state.trace)

    diagnostics["noise_counts"] = dict(noise.counts)
    return FitResult(weights=weights, trace=trace, noise_draws=noise.total_draws, diagnostics=diagnostics)


def write_trace_csv(trace: List[TraceRecord], path: str) -> None:
    """Write trace rows (v, t, objective, weight_change, density_estimate, elapsed, weight_norm)."""
    frame = pd.DataFrame([record.model_dump() for record in trace], columns=list(TRACE_COLUMNS))
    try:
        frame.to_csv(path, index=False)
    except OSError as e:
        raise OSError(f"could not write trace to {path}: {e}") from e


class FrappeSolver(BaseSolver):
    """FRAPPE with all three noise stages driven by the privacy budget."""

    def __init__(self, non_private: bool = False):
        if non_private:
            super().__init__(
                AlgorithmName.FRAPPE_NONPRIVATE,
                "FRAPPE (non-private)",
                "FRAPPE double loop with every noise stage disabled",
                loss="lad",
            )
        else:
            super().__init__(
                AlgorithmName.FRAPPE,
                "FRAPPE",
                "Private sparse LAD via kernel-density pseudo responses and perturbed ISTA",
                loss="lad",
            )
        self.non_private = non_private

    def fit(
        self,
        dataset: Dataset,
        selector_value: float,
        budget: Optional[PrivacyBudget],
        rng: np.random.Generator,
        context: SolverContext,
        callback: Optional[IterationCallback] = None,
    ) -> FitResult:
        if self.non_private or context.non_private:
            budget = None
        return fit(
            dataset, context.frappe, budget, rng, lam=selector_value,
            sparsity=context.sparsity_hint, callback=callback,
        )
