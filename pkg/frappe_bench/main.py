"""
FRAPPE benchmark command line.

Verbs:
    generate   draw a synthetic dataset to CSV (plus a truth sidecar)
    fit        one run of one algorithm, prints its MetricReport
    select     the BIC table of one algorithm over its candidate grid
    bench      execute an experiment plan and write the results file
    algorithms list the registered solvers and kernels
"""

import json
import logging
import os
import time
from typing import Any, Dict, List, Optional, Tuple

import click
from dotenv import load_dotenv
import pandas as pd
from pydantic import BaseModel, ConfigDict

from frappe_bench.bench.plan import build_plan, load_plan, merge_cli_overrides
from frappe_bench.bench.runner import (
    algorithm_role,
    candidate_grid,
    fit_candidates,
    run_plan,
    write_checkpoints,
)
from frappe_bench.config import configure_logging, settings
from frappe_bench.core.kernels import list_kernels
from frappe_bench.core.mechanisms import derive_rng
from frappe_bench.data.loader import load_split
from frappe_bench.data.synthetic import generate as generate_dataset
from frappe_bench.data.synthetic import write_csv
from frappe_bench.evaluation.metrics import metric_report
from frappe_bench.evaluation.selection import best_entry
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.experiment import DataOptions, ExperimentPlan, NoiseFamily, Scenario, SyntheticSpec
from frappe_bench.models.privacy import PrivacyBudget
from frappe_bench.models.solver_config import AlgorithmName, KernelName
from frappe_bench.solvers import BaseSolver, SolverContext, solver_registry
from frappe_bench.solvers.frappe.solver import write_trace_csv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

# A single run uses the stream of cell 0, replication 0 of a bench plan.
SINGLE_RUN_KEY = (0, 0)
DEFAULT_EPSILON = 0.5

ALGORITHM_CHOICES = click.Choice([a.value for a in AlgorithmName])
KERNEL_CHOICES = click.Choice([k.value for k in KernelName])
NOISE_CHOICES = click.Choice([n.value for n in NoiseFamily])
FORMAT_CHOICES = click.Choice(["csv", "json"])
HARD_ERRORS = (ValueError, KeyError, OSError)


def _message(error: Exception) -> str:
    # KeyError wraps its message in quotes
    if isinstance(error, KeyError) and error.args:
        return str(error.args[0])
    return str(error)


def truth_path(csv_path: str) -> str:
    stem, _ = os.path.splitext(csv_path)
    return f"{stem}.truth.json"


def read_truth(path: str) -> WeightVector:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError(f"could not read truth file {path}: {e}") from e
    return WeightVector(values=payload["weights"] if isinstance(payload, dict) else payload)


class SingleRun(BaseModel):
    """Everything `fit` and `select` need for one algorithm on one dataset."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    solver: BaseSolver
    train: Dataset
    test: Optional[Dataset] = None
    truth: Optional[WeightVector] = None
    budget: Optional[PrivacyBudget] = None
    context: SolverContext
    plan: ExperimentPlan
    epsilon: float


def prepare_single_run(
    config: Optional[str],
    algorithm: str,
    data: Optional[str],
    response_column: str,
    normalize: bool,
    truth: Optional[str],
    n: int,
    p: int,
    s: int,
    noise: str,
    rho: float,
    epsilon: Optional[float],
    delta: Optional[float],
    kernel: Optional[str],
    seed: Optional[int],
    non_private: bool,
) -> SingleRun:
    """
    Resolve the plan (file, then flags), load or draw the data and build the budget.

    A plan file's `data` section is used when --data is absent; otherwise the
    synthetic flags describe the dataset.
    """
    plan = load_plan(config) if config else build_plan({})
    plan = merge_cli_overrides(
        plan,
        epsilon=[epsilon] if epsilon is not None else None,
        delta=delta,
        kernel=kernel,
        seed=seed,
        non_private=non_private,
    )
    solver = solver_registry.require(algorithm)
    data_key = (*SINGLE_RUN_KEY, 0)

    options = None
    if data:
        options = DataOptions(path=data, response_column=response_column, normalize=normalize)
    elif plan.data is not None:
        options = plan.data

    test = None
    truth_weights = None
    sparsity_hint: Optional[int] = None
    if options is not None:
        train, test, _ = load_split(options, plan.seed, data_key)
        if truth:
            truth_weights = read_truth(truth)
            sparsity_hint = truth_weights.sparsity() or None
    else:
        spec = SyntheticSpec(
            n_samples=n, n_features=p, sparsity=s, noise_family=noise,
            covariance_base=rho, seed=plan.seed,
        )
        train, truth_weights = generate_dataset(spec, derive_rng(plan.seed, *data_key))
        sparsity_hint = s

    eps = plan.grid.epsilon[0] if plan.grid.epsilon else DEFAULT_EPSILON
    budget = None if plan.non_private else PrivacyBudget(epsilon=eps, delta=plan.delta)
    context = SolverContext(
        frappe=plan.frappe,
        baseline=plan.baseline,
        non_private=plan.non_private,
        sparsity_hint=sparsity_hint,
    )
    return SingleRun(
        solver=solver, train=train, test=test, truth=truth_weights,
        budget=budget, context=context, plan=plan, epsilon=eps,
    )


def data_options(func):
    """Dataset flags shared by `fit` and `select`."""
    decorators = [
        click.option("--data", type=click.Path(exists=True, dir_okay=False), help="Real-data CSV (header row, numeric)."),
        click.option("--response-column", default="0", show_default=True, help="Response column name or 0-based index."),
        click.option("--normalize/--no-normalize", default=True, show_default=True, help="Standardize features with training statistics."),
        click.option("--truth", type=click.Path(exists=True, dir_okay=False), help="True-weights JSON for F1 and weight MSE."),
        click.option("--n", "n_samples", default=5000, show_default=True, help="Synthetic N."),
        click.option("--p", "n_features", default=100, show_default=True, help="Synthetic p."),
        click.option("--s", "sparsity", default=10, show_default=True, help="Synthetic sparsity."),
        click.option("--noise", type=NOISE_CHOICES, default="cauchy", show_default=True),
        click.option("--rho", default=0.1, show_default=True, help="AR covariance base."),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


def privacy_options(func):
    """Algorithm and budget flags shared by `fit` and `select`."""
    decorators = [
        click.option("--config", type=click.Path(exists=True, dir_okay=False), help="YAML plan supplying defaults."),
        click.option("--algorithm", type=ALGORITHM_CHOICES, default="frappe", show_default=True),
        click.option("--epsilon", type=float, help=f"Privacy budget (default {DEFAULT_EPSILON})."),
        click.option("--delta", type=float, help=f"Privacy slack (default {settings.DEFAULT_DELTA})."),
        click.option("--kernel", type=KERNEL_CHOICES),
        click.option("--seed", type=int, help=f"Root seed (default {settings.DEFAULT_SEED})."),
        click.option("--non-private", is_flag=True, help="Disable every noise stage."),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


@click.group()
@click.option("--log-level", default=None, help=f"Logging level (default {settings.log_level}).")
def cli(log_level: Optional[str]) -> None:
    """Differentially private sparse LAD regression benchmarks."""
    configure_logging(log_level)


@cli.command()
@click.option("--n", "n_samples", default=5000, show_default=True)
@click.option("--p", "n_features", default=100, show_default=True)
@click.option("--s", "sparsity", default=10, show_default=True)
@click.option("--noise", type=NOISE_CHOICES, default="normal", show_default=True)
@click.option("--rho", default=0.1, show_default=True, help="AR covariance base.")
@click.option("--seed", type=int, default=None, help=f"Root seed (default {settings.DEFAULT_SEED}).")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="CSV to write.")
def generate(n_samples: int, n_features: int, sparsity: int, noise: str, rho: float, seed: Optional[int], out: str) -> None:
    """Draw a synthetic dataset; the true weights go to <out>.truth.json."""
    seed = settings.DEFAULT_SEED if seed is None else seed
    try:
        spec = SyntheticSpec(
            n_samples=n_samples, n_features=n_features, sparsity=sparsity,
            noise_family=noise, covariance_base=rho, seed=seed,
        )
        dataset, truth = generate_dataset(spec, derive_rng(seed, *SINGLE_RUN_KEY, 0))
        write_csv(dataset, out)
        sidecar = truth_path(out)
        with open(sidecar, "w") as fh:
            json.dump({**spec.model_dump(mode="json"), "weights": truth.to_list()}, fh, indent=2)
    except HARD_ERRORS as e:
        raise click.ClickException(_message(e))
    click.echo(f"Wrote {dataset.n_samples} rows to {out} (truth: {sidecar})")


@cli.command()
@privacy_options
@data_options
@click.option("--lambda", "lambda_value", type=float, help="Fixed lambda; skips BIC selection.")
@click.option("--target-sparsity", type=int, help="Fixed sparsity target for hard-threshold methods.")
@click.option("--trace", type=click.Path(dir_okay=False), help="Write the iteration trace CSV here.")
@click.option("--out", type=click.Path(dir_okay=False), help="Also write the report JSON here.")
def fit(
    config, algorithm, epsilon, delta, kernel, seed, non_private,
    data, response_column, normalize, truth, n_samples, n_features, sparsity, noise, rho,
    lambda_value, target_sparsity, trace, out,
) -> None:
    """Fit one algorithm and print its metric report as JSON."""
    started = time.perf_counter()
    try:
        run = prepare_single_run(
            config, algorithm, data, response_column, normalize, truth,
            n_samples, n_features, sparsity, noise, rho,
            epsilon, delta, kernel, seed, non_private,
        )
        solver = run.solver
        fixed = lambda_value if solver.selector == "lambda" else target_sparsity
        if solver.selector == "lambda" and target_sparsity is not None:
            raise ValueError(f"{algorithm} is selected by --lambda, not --target-sparsity")
        if solver.selector == "sparsity" and lambda_value is not None:
            raise ValueError(f"{algorithm} is selected by --target-sparsity, not --lambda")

        candidates = [float(fixed)] if fixed is not None else candidate_grid(solver, run.train, run.context.frappe)
        entries, fits = fit_candidates(
            solver, run.train, candidates, run.budget, run.context, run.plan.seed,
            (*SINGLE_RUN_KEY, algorithm_role(solver.algorithm)),
        )
        best = best_entry(entries)
        fit_result, _ = fits[best.value]
        private = run.budget is not None and solver.algorithm is not AlgorithmName.FRAPPE_NONPRIVATE
        report = metric_report(best.weights, truth=run.truth, test=run.test)

        payload: Dict[str, Any] = {
            "algorithm": solver.algorithm_key,
            "epsilon": run.epsilon if private else None,
            "delta": run.plan.delta if private else None,
            "hyperparameter": best.value,
            "selection": "fixed" if fixed is not None else "bic",
            "seconds": time.perf_counter() - started,
            "noise_draws": fit_result.noise_draws,
            "metrics": report.model_dump(),
            "weights": best.weights.to_list(),
        }
        if trace:
            write_trace_csv(fit_result.trace, trace)
        text = json.dumps(payload, indent=2)
        if out:
            with open(out, "w") as fh:
                fh.write(text + "\n")
    except HARD_ERRORS as e:
        raise click.ClickException(_message(e))
    click.echo(text)


@cli.command()
@privacy_options
@data_options
@click.option("--out", type=click.Path(dir_okay=False), help="Write the BIC table here.")
@click.option("--format", "fmt", type=FORMAT_CHOICES, default=None, help="Table format (default from settings).")
def select(
    config, algorithm, epsilon, delta, kernel, seed, non_private,
    data, response_column, normalize, truth, n_samples, n_features, sparsity, noise, rho,
    out, fmt,
) -> None:
    """Print the BIC of every candidate on the algorithm's grid."""
    try:
        run = prepare_single_run(
            config, algorithm, data, response_column, normalize, truth,
            n_samples, n_features, sparsity, noise, rho,
            epsilon, delta, kernel, seed, non_private,
        )
        candidates = candidate_grid(run.solver, run.train, run.context.frappe)
        entries, _ = fit_candidates(
            run.solver, run.train, candidates, run.budget, run.context, run.plan.seed,
            (*SINGLE_RUN_KEY, algorithm_role(run.solver.algorithm)),
        )
        best = best_entry(entries)
        table = bic_table(entries, best.value, run.solver.selector)
        if out:
            write_table(table, out, fmt or settings.RESULTS_FORMAT)
    except HARD_ERRORS as e:
        raise click.ClickException(_message(e))
    click.echo(table.to_string(index=False))
    click.echo(f"selected {run.solver.selector} = {best.value!r}")


def bic_table(entries, selected: float, selector: str) -> pd.DataFrame:
    rows = [
        {
            selector: e.value,
            "bic": e.bic,
            "loss": e.loss,
            "support": e.support_size,
            "selected": e.value == selected,
        }
        for e in entries
    ]
    return pd.DataFrame(rows, columns=[selector, "bic", "loss", "support", "selected"])


def write_table(table: pd.DataFrame, path: str, fmt: str) -> None:
    try:
        if fmt == "json":
            table.to_json(path, orient="records", indent=2)
        else:
            table.to_csv(path, index=False)
    except OSError as e:
        raise OSError(f"could not write table to {path}: {e}") from e


def default_output(plan: ExperimentPlan) -> str:
    return os.path.join(settings.RESULTS_DIR, f"{plan.scenario.value}.{plan.format}")


def checkpoint_path(output: str) -> str:
    stem, _ = os.path.splitext(output)
    return f"{stem}.checkpoints.csv"


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), help="YAML experiment plan.")
@click.option("--scenario", type=click.Choice([s.value for s in Scenario]), help="Preset used when no plan file is given.")
@click.option("--algorithm", "algorithms", type=ALGORITHM_CHOICES, multiple=True, help="Repeatable; replaces the plan's list.")
@click.option("--epsilon", "epsilons", type=float, multiple=True, help="Repeatable; replaces the epsilon axis.")
@click.option("--delta", type=float)
@click.option("--kernel", type=KERNEL_CHOICES)
@click.option("--seed", type=int)
@click.option("--replications", type=click.IntRange(min=1))
@click.option("--out", type=click.Path(dir_okay=False), help="Results file (default RESULTS_DIR/<scenario>.<format>).")
@click.option("--format", "fmt", type=FORMAT_CHOICES)
@click.option("--non-private", is_flag=True)
@click.option("--jobs", type=int, default=None, help=f"Worker processes (default {settings.N_JOBS}; -1 = all cores).")
def bench(
    config: Optional[str],
    scenario: Optional[str],
    algorithms: Tuple[str, ...],
    epsilons: Tuple[float, ...],
    delta: Optional[float],
    kernel: Optional[str],
    seed: Optional[int],
    replications: Optional[int],
    out: Optional[str],
    fmt: Optional[str],
    non_private: bool,
    jobs: Optional[int],
) -> None:
    """Run an experiment plan; flags override the plan file."""
    try:
        config = config or settings.DEFAULT_PLAN
        if config:
            plan = load_plan(config)
            if scenario and scenario != plan.scenario.value:
                plan = merge_scenario(plan, scenario)
        else:
            plan = build_plan({"scenario": scenario} if scenario else {})
        plan = merge_cli_overrides(
            plan,
            algorithms=list(algorithms),
            epsilon=list(epsilons),
            delta=delta,
            kernel=kernel,
            seed=seed,
            output=out,
            format=fmt,
            non_private=non_private,
            replications=replications,
        )
        if plan.output is None:
            plan = merge_cli_overrides(plan, output=default_output(plan))

        results = run_plan(plan, n_jobs=jobs)
        if plan.scenario is Scenario.TIME_VS_MSE and results:
            side = write_checkpoints(results, checkpoint_path(plan.output))
            click.echo(f"Checkpoints: {side}")
    except HARD_ERRORS as e:
        raise click.ClickException(_message(e))

    failed = sum(1 for r in results if not r.ok)
    click.echo(f"{len(results)} results ({failed} errors) -> {plan.output}")


def merge_scenario(plan: ExperimentPlan, scenario: str) -> ExperimentPlan:
    raw = plan.model_dump(mode="python")
    raw["scenario"] = scenario
    return ExperimentPlan.model_validate(raw)


@cli.command()
def algorithms() -> None:
    """List registered solvers and kernels."""
    rows: List[Dict[str, Any]] = solver_registry.list_solvers()
    for info in rows:
        click.echo(f"{info['algorithm']:<18} {info['selector']:<9} {info['loss']:<8} {info['description']}")
    click.echo(f"kernels: {', '.join(list_kernels())}")


if __name__ == "__main__":
    cli()
