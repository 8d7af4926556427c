"""
Experiment plan loading: YAML files, scenario presets and CLI overrides.

A plan file mirrors ExperimentPlan field for field, e.g.

    scenario: noise-table
    algorithms: [frappe, gp_lasso, dp_ight]
    replications: 10
    grid:
      n_samples: [5000]
      noise: [normal, cauchy]
    frappe:
      outer_iters: 10
      inner_iters: 50

Grid axes left out fall back to the scenario preset, then to the frappe
section. Command-line flags win over the file.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import yaml

from frappe_bench.config import settings
from frappe_bench.models.experiment import ExperimentPlan, NoiseFamily, Scenario
from frappe_bench.models.privacy import EVEN_SPLIT

logger = logging.getLogger(__name__)

ALL_NOISE = [NoiseFamily.NORMAL, NoiseFamily.STUDENT_T, NoiseFamily.CAUCHY]

SCENARIO_PRESETS: Dict[Scenario, Dict[str, List[Any]]] = {
    Scenario.NOISE_TABLE: {
        "n_samples": [2000, 5000, 10000], "n_features": [100], "sparsity": [10],
        "epsilon": [0.5], "noise": ALL_NOISE,
    },
    Scenario.DIMENSION_TABLE: {
        "n_samples": [5000], "n_features": [50, 100, 200], "sparsity": [10],
        "epsilon": [0.5], "noise": ALL_NOISE,
    },
    Scenario.SPARSITY_SWEEP: {
        "n_samples": [5000], "n_features": [100], "sparsity": [1, 5, 10, 20, 30],
        "epsilon": [0.5], "noise": ALL_NOISE,
    },
    Scenario.EPSILON_SWEEP: {
        "n_samples": [5000], "n_features": [100], "sparsity": [10],
        "epsilon": [0.1, 0.25, 0.5, 1.0], "noise": [NoiseFamily.CAUCHY],
    },
    Scenario.TIME_VS_MSE: {
        "n_samples": [2000, 5000], "n_features": [100], "sparsity": [10],
        "epsilon": [0.5], "noise": [NoiseFamily.CAUCHY],
    },
    Scenario.REAL_DATA: {
        "n_samples": [None], "n_features": [None], "sparsity": [None],
        "epsilon": [0.10, 0.15, 0.20, 0.25, 0.30], "noise": [None],
    },
    Scenario.KERNEL_SWEEP: {
        "n_samples": [5000], "n_features": [100], "sparsity": [10], "epsilon": [0.5],
        "noise": [NoiseFamily.NORMAL, NoiseFamily.CAUCHY],
        "kernel": ["biweight", "uniform", "epanechnikov", "triweight"],
    },
    Scenario.SPLIT_SWEEP: {
        "n_samples": [5000], "n_features": [100], "sparsity": [10], "epsilon": [0.5],
        "noise": [NoiseFamily.CAUCHY],
        "stage_split": [EVEN_SPLIT, (0.5, 0.25, 0.25), (0.25, 0.5, 0.25), (0.25, 0.25, 0.5)],
    },
    Scenario.INIT_SIZE_SWEEP: {
        "n_samples": [5000], "n_features": [100], "sparsity": [10], "epsilon": [0.5],
        "noise": [NoiseFamily.CAUCHY], "subsample_size": [100, 200, 500, 1000],
    },
    Scenario.ITERATIONS_SWEEP: {
        "n_samples": [5000], "n_features": [100], "sparsity": [10], "epsilon": [0.5],
        "noise": [NoiseFamily.CAUCHY], "iterations": [(5, 100), (10, 50), (20, 25)],
    },
}

GRID_AXES = (
    "n_samples", "n_features", "sparsity", "epsilon", "noise",
    "kernel", "stage_split", "subsample_size", "iterations",
)


def resolve_grid(plan: ExperimentPlan) -> Dict[str, List[Any]]:
    """
    Every grid axis as a concrete list: explicit grid value, else the
    scenario preset, else the single value implied by the frappe section.
    """
    preset = SCENARIO_PRESETS[plan.scenario]
    fallback = {
        "kernel": [plan.frappe.kernel],
        "stage_split": [EVEN_SPLIT],
        "subsample_size": [plan.frappe.subsample_size],
        "iterations": [(plan.frappe.outer_iters, plan.frappe.inner_iters)],
    }
    axes = {}
    for axis in GRID_AXES:
        explicit = getattr(plan.grid, axis)
        if explicit is not None:
            axes[axis] = list(explicit)
        elif axis in preset:
            axes[axis] = list(preset[axis])
        else:
            axes[axis] = fallback[axis]
    if plan.scenario is Scenario.REAL_DATA:
        for axis in ("n_samples", "n_features", "sparsity", "noise"):
            axes[axis] = [None]
    return axes


def plan_defaults() -> Dict[str, Any]:
    """Plan fields that come from Settings when a file leaves them out."""
    defaults: Dict[str, Any] = {
        "replications": settings.DEFAULT_REPLICATIONS,
        "delta": settings.DEFAULT_DELTA,
        "seed": settings.DEFAULT_SEED,
        "format": settings.RESULTS_FORMAT,
    }
    return defaults


def build_plan(raw: Optional[Dict[str, Any]] = None) -> ExperimentPlan:
    """Validate a plan mapping on top of the Settings defaults."""
    merged = plan_defaults()
    merged.update(raw or {})
    return ExperimentPlan.model_validate(merged)


def load_plan(path: str) -> ExperimentPlan:
    """
    Load and validate a YAML plan file.

    Args:
        path: Plan file path

    Returns:
        Validated ExperimentPlan

    Raises:
        ValueError: on YAML syntax errors or a non-mapping document
        pydantic.ValidationError: on unknown keys or invalid values
    """
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as e:
        raise ValueError(f"{path}: invalid YAML: {e}") from e
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: a plan must be a mapping, got {type(raw).__name__}")
    plan = build_plan(raw)
    logger.info(f"Loaded plan {path}: scenario={plan.scenario.value}, {len(plan.cells())} cells")
    return plan


def merge_cli_overrides(
    plan: ExperimentPlan,
    algorithms: Optional[Sequence[str]] = None,
    epsilon: Optional[Sequence[float]] = None,
    delta: Optional[float] = None,
    kernel: Optional[str] = None,
    seed: Optional[int] = None,
    output: Optional[str] = None,
    format: Optional[str] = None,
    non_private: Optional[bool] = None,
    replications: Optional[int] = None,
) -> ExperimentPlan:
    """
    Apply command-line flags on top of a plan; None (or empty) means "not given".

    Returns:
        A new, re-validated plan
    """
    raw = plan.model_dump(mode="python")
    grid = dict(raw["grid"])
    if algorithms:
        raw["algorithms"] = list(algorithms)
    if epsilon:
        grid["epsilon"] = list(epsilon)
    if delta is not None:
        raw["delta"] = delta
    if kernel is not None:
        grid["kernel"] = [kernel]
        raw["frappe"] = {**raw["frappe"], "kernel": kernel}
    if seed is not None:
        raw["seed"] = seed
    if output is not None:
        raw["output"] = output
    if format is not None:
        raw["format"] = format
    if non_private:
        raw["non_private"] = True
    if replications is not None:
        raw["replications"] = replications
    raw["grid"] = grid
    return ExperimentPlan.model_validate(raw)
