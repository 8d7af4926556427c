"""
Plan execution: one task per (cell x replication x algorithm).

Random streams are keyed by (seed, cell, replication, role): role 0 draws the
data (or the train/test split), role 1 + k belongs to algorithm k in
AlgorithmName order, and each BIC candidate gets a further child keyed by its
rank in the sorted candidate grid. A result therefore depends only on the plan
and seed, never on worker count or task order.
"""

import logging
import time
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from joblib import Parallel, delayed
import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from frappe_bench.bench.results import ResultWriter
from frappe_bench.config import settings
from frappe_bench.core.mechanisms import derive_rng
from frappe_bench.data.loader import load_split
from frappe_bench.data.synthetic import generate
from frappe_bench.evaluation.metrics import metric_report, mse_weights
from frappe_bench.evaluation.selection import BicEntry, best_entry, bic_path
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.experiment import (
    Checkpoint,
    ExperimentPlan,
    ExperimentResult,
    PlanCell,
    Scenario,
    SyntheticSpec,
)
from frappe_bench.models.fit import FitResult
from frappe_bench.models.privacy import PrivacyBudget
from frappe_bench.models.solver_config import AlgorithmName, FrappeConfig
from frappe_bench.solvers import BaseSolver, SolverContext, solver_registry
from frappe_bench.solvers.base_solver import IterationCallback

logger = logging.getLogger(__name__)

DATA_ROLE = 0
BIC_DESCRIPTION = "N*log(mean training loss) + |support|*log(N)"


class BenchTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    cell_index: int
    cell: PlanCell
    replication: int
    algorithm: AlgorithmName

    @property
    def label(self) -> str:
        return f"cell {self.cell_index} rep {self.replication} {self.algorithm.value}"


def algorithm_role(algorithm: AlgorithmName) -> int:
    return 1 + list(AlgorithmName).index(algorithm)


def build_tasks(plan: ExperimentPlan) -> List[BenchTask]:
    """Tasks in output order: cells, then replications, then the plan's algorithm order."""
    tasks = []
    for cell_index, cell in enumerate(plan.cells()):
        for replication in range(plan.replications):
            for algorithm in plan.algorithms:
                tasks.append(
                    BenchTask(cell_index=cell_index, cell=cell, replication=replication, algorithm=algorithm)
                )
    return tasks


def cell_frappe_config(plan: ExperimentPlan, cell: PlanCell) -> FrappeConfig:
    return FrappeConfig.model_validate(
        {
            **plan.frappe.model_dump(),
            "kernel": cell.kernel,
            "subsample_size": cell.subsample_size,
            "outer_iters": cell.outer_iters,
            "inner_iters": cell.inner_iters,
        }
    )


def load_task_data(
    plan: ExperimentPlan, task: BenchTask
) -> Tuple[Dataset, Optional[Dataset], Optional[WeightVector], PlanCell]:
    """(train, test, truth, cell with N and p filled in)."""
    key = (task.cell_index, task.replication, DATA_ROLE)
    cell = task.cell
    if plan.scenario is Scenario.REAL_DATA:
        train, test, _ = load_split(plan.data, plan.seed, key)
        cell = cell.model_copy(update={"n_samples": train.n_samples, "n_features": train.n_features})
        return train, test, None, cell
    spec = SyntheticSpec(
        n_samples=cell.n_samples,
        n_features=cell.n_features,
        sparsity=cell.sparsity,
        noise_family=cell.noise,
        covariance_base=plan.covariance_base,
        seed=plan.seed,
    )
    train, truth = generate(spec, derive_rng(plan.seed, *key))
    return train, None, truth, cell


class CheckpointRecorder:
    """Per-iteration (elapsed, weight MSE) log, sampled at fixed wall-clock checkpoints."""

    def __init__(self, truth: WeightVector):
        self.truth = truth
        self.points: List[Tuple[float, float]] = []

    def __call__(self, elapsed: float, weights: np.ndarray) -> None:
        self.points.append((elapsed, mse_weights(WeightVector(values=weights), self.truth)))

    def sample(self, checkpoints: List[float]) -> List[Checkpoint]:
        sampled = []
        for mark in sorted(checkpoints):
            before = [mse for elapsed, mse in self.points if elapsed <= mark]
            if before:
                sampled.append(Checkpoint(seconds=mark, mse=before[-1]))
        if self.points:
            sampled.append(Checkpoint(seconds=self.points[-1][0], mse=self.points[-1][1]))
        return sampled


def candidate_grid(solver: BaseSolver, train: Dataset, frappe_cfg: FrappeConfig) -> List[float]:
    """Configured lambda grid when the solver is lambda-selected and one is set, else the default grid."""
    if solver.selector == "lambda" and frappe_cfg.lambda_grid:
        return list(frappe_cfg.lambda_grid)
    return solver.default_grid(train, frappe_cfg.grid_size)


def fit_candidates(
    solver: BaseSolver,
    train: Dataset,
    candidates: List[float],
    budget: Optional[PrivacyBudget],
    context: SolverContext,
    seed: int,
    stream_key: Tuple[int, ...],
    callback_factory: Optional[Callable[[], Optional[IterationCallback]]] = None,
) -> Tuple[List[BicEntry], Dict[float, Tuple[FitResult, Optional[IterationCallback]]]]:
    """
    Fit every candidate on its own stream and score it by BIC.

    Each candidate's generator is keyed by stream_key + (rank of the value in
    the sorted grid, context.frappe.seed), so the outcome does not depend on
    grid order and the mechanism noise can be redrawn without new data.

    Returns:
        (BIC entries in grid order, {value: (fit result, its callback)})
    """
    ranks = {value: rank for rank, value in enumerate(sorted(set(candidates)))}
    fits: Dict[float, Tuple[FitResult, Optional[IterationCallback]]] = {}

    def fitter(value: float) -> WeightVector:
        rng = derive_rng(seed, *stream_key, ranks[value], context.frappe.seed)
        callback = callback_factory() if callback_factory else None
        result = solver.fit(train, value, budget, rng, context, callback=callback)
        fits[float(value)] = (result, callback)
        return result.weights

    entries = bic_path(train, candidates, fitter, loss=solver.loss)
    return entries, fits


def run_task(plan: ExperimentPlan, task: BenchTask) -> ExperimentResult:
    """
    Generate or load the data, BIC-select over the algorithm's grid, score.

    Failures never propagate: they come back as an error result.
    """
    started = time.perf_counter()
    cell = task.cell
    base = {
        "scenario": plan.scenario,
        "algorithm": task.algorithm,
        "replication": task.replication,
        "seed": plan.seed,
    }
    try:
        solver = solver_registry.require(task.algorithm)
        train, test, truth, cell = load_task_data(plan, task)
        frappe_cfg = cell_frappe_config(plan, cell)
        context = SolverContext(
            frappe=frappe_cfg,
            baseline=plan.baseline,
            non_private=plan.non_private,
            sparsity_hint=cell.sparsity,
        )
        budget = None if plan.non_private else PrivacyBudget(
            epsilon=cell.epsilon, delta=cell.delta, stage_split=cell.stage_split
        )

        candidates = candidate_grid(solver, train, frappe_cfg)
        track = plan.scenario is Scenario.TIME_VS_MSE and truth is not None
        entries, fits = fit_candidates(
            solver, train, candidates, budget, context, plan.seed,
            (task.cell_index, task.replication, algorithm_role(task.algorithm)),
            callback_factory=(lambda: CheckpointRecorder(truth)) if track else None,
        )
        best = best_entry(entries)
        selected = best.value
        fit_result, recorder = fits[selected]
        metrics = metric_report(best.weights, truth=truth, test=test)

        return ExperimentResult(
            **base,
            cell=cell,
            metrics=metrics,
            seconds=time.perf_counter() - started,
            hyperparameter=selected,
            clip_row=fit_result.diagnostics.get("clip_row"),
            config={
                "frappe": frappe_cfg.model_dump(mode="json"),
                "baseline": plan.baseline.model_dump(mode="json"),
                "non_private": plan.non_private,
                "bic": BIC_DESCRIPTION,
                "candidates": [float(c) for c in candidates],
                "noise_draws": fit_result.noise_draws,
            },
            checkpoints=recorder.sample(plan.checkpoints) if recorder else [],
        )
    except ValueError as e:
        logger.warning(f"Task {task.label} failed: {e}")
        return ExperimentResult(**base, cell=cell, seconds=time.perf_counter() - started, status="error", error=str(e))
    except Exception as e:
        logger.error(f"Task {task.label} raised unexpectedly: {e}", exc_info=True)
        return ExperimentResult(**base, cell=cell, seconds=time.perf_counter() - started, status="error", error=str(e))


def iter_results(plan: ExperimentPlan, n_jobs: Optional[int] = None) -> Iterator[ExperimentResult]:
    """Yield results in task order, computing them on a joblib pool when n_jobs != 1."""
    tasks = build_tasks(plan)
    n_jobs = n_jobs if n_jobs is not None else settings.N_JOBS
    if n_jobs == 1 or len(tasks) <= 1:
        return (run_task(plan, task) for task in tasks)
    return Parallel(n_jobs=n_jobs, return_as="generator")(delayed(run_task)(plan, task) for task in tasks)


def run_plan(
    plan: ExperimentPlan,
    n_jobs: Optional[int] = None,
    on_result: Optional[Callable[[ExperimentResult], None]] = None,
) -> List[ExperimentResult]:
    """
    Execute every task of the plan.

    When plan.output is set, results are streamed to that file as they
    complete, in task order.

    Args:
        plan: Validated plan
        n_jobs: Worker count (joblib semantics); defaults to settings.N_JOBS
        on_result: Optional hook called once per result, in task order

    Returns:
        One ExperimentResult per (cell x replication x algorithm)
    """
    total = len(plan.cells()) * plan.replications * len(plan.algorithms)
    logger.info(f"Running plan {plan.scenario.value}: {total} tasks, seed={plan.seed}")

    writer = ResultWriter(plan.output, plan.format) if plan.output else None
    results: List[ExperimentResult] = []
    if writer:
        writer.open()
    try:
        for result in iter_results(plan, n_jobs):
            results.append(result)
            if writer:
                writer.write(result)
            if on_result:
                on_result(result)
            logger.debug(f"Completed {len(results)}/{total}")
    finally:
        if writer:
            writer.close()

    failed = sum(1 for r in results if not r.ok)
    logger.info(f"Plan finished: {len(results) - failed}/{total} succeeded, {failed} errors")
    return results


def write_checkpoints(results: List[ExperimentResult], path: str) -> str:
    """Side file for time-vs-mse runs: algorithm, N, replication, seconds, mse."""
    rows = [
        {
            "algorithm": r.algorithm.value,
            "N": r.cell.n_samples,
            "noise": r.cell.noise.value if r.cell.noise else "real",
            "replication": r.replication,
            "seconds": point.seconds,
            "mse": point.mse,
        }
        for r in results
        for point in r.checkpoints
    ]
    frame = pd.DataFrame(rows, columns=["algorithm", "N", "noise", "replication", "seconds", "mse"])
    frame.to_csv(path, index=False)
    return path
