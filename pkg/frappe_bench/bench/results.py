"""
Result persistence in CSV or JSON.

Both formats carry the same flat records with a fixed column order. Floats are
written with repr(), so every value survives a CSV -> JSON -> CSV round trip
unchanged. Error rows leave the metric columns empty and put
"error: <message>" in the hyperparameter column.
"""

import csv
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional

from frappe_bench.models.experiment import ExperimentResult

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "scenario", "algorithm", "N", "p", "s", "epsilon", "noise", "replication",
    "mse", "mae", "f1", "sparsity", "seconds", "hyperparameter", "seed",
)
INT_COLUMNS = {"N", "p", "s", "replication", "sparsity", "seed"}
FLOAT_COLUMNS = {"epsilon", "mse", "mae", "f1", "seconds"}
ERROR_PREFIX = "error: "
FORMATS = ("csv", "json")


def result_record(result: ExperimentResult) -> Dict[str, Any]:
    """Flatten one result into the fixed column order."""
    cell = result.cell
    metrics = result.metrics
    mse = mae = f1 = sparsity = None
    if metrics is not None:
        mse = metrics.mse_weights if metrics.mse_weights is not None else metrics.mse_pred
        mae = metrics.mae_pred
        f1 = metrics.f1
        sparsity = metrics.sparsity
    hyperparameter: Any = result.hyperparameter
    if not result.ok:
        hyperparameter = f"{ERROR_PREFIX}{result.error}"
    return {
        "scenario": result.scenario.value,
        "algorithm": result.algorithm.value,
        "N": cell.n_samples,
        "p": cell.n_features,
        "s": cell.sparsity,
        "epsilon": cell.epsilon,
        "noise": cell.noise.value if cell.noise is not None else "real",
        "replication": result.replication,
        "mse": mse,
        "mae": mae,
        "f1": f1,
        "sparsity": sparsity,
        "seconds": result.seconds,
        "hyperparameter": hyperparameter,
        "seed": result.seed,
    }


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_value(column: str, text: str) -> Any:
    """Inverse of format_value for one CSV cell."""
    if text == "":
        return None
    if column in INT_COLUMNS:
        return int(text)
    if column in FLOAT_COLUMNS:
        return float(text)
    if column == "hyperparameter":
        return text if text.startswith(ERROR_PREFIX) else float(text)
    return text


class ResultWriter:
    """
    Streams records to disk as they arrive, flushing after each one, so a
    partial run leaves a readable file behind.

    Usage:
        with ResultWriter("results.csv", "csv") as writer:
            for result in results:
                writer.write(result)
    """

    def __init__(self, path: str, format: str = "csv"):
        if format not in FORMATS:
            raise ValueError(f"unknown results format {format!r}; expected one of {FORMATS}")
        self.path = path
        self.format = format
        self.count = 0
        self._fh = None
        self._csv = None

    def __enter__(self) -> "ResultWriter":
        self.open()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def open(self) -> None:
        try:
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            self._fh = open(self.path, "w", newline="")
        except OSError as e:
            raise OSError(f"could not open results file {self.path}: {e}") from e
        if self.format == "csv":
            self._csv = csv.writer(self._fh, lineterminator="\n")
            self._csv.writerow(CSV_HEADER)
        else:
            self._fh.write("[")
        self._fh.flush()

    def write_record(self, record: Dict[str, Any]) -> None:
        if self._fh is None:
            raise RuntimeError("ResultWriter is not open")
        try:
            if self.format == "csv":
                self._csv.writerow([format_value(record.get(c)) for c in CSV_HEADER])
            else:
                ordered = {c: record.get(c) for c in CSV_HEADER}
                self._fh.write(("\n" if self.count == 0 else ",\n") + json.dumps(ordered))
            self._fh.flush()
        except OSError as e:
            raise OSError(f"could not write to results file {self.path}: {e}") from e
        self.count += 1

    def write(self, result: ExperimentResult) -> None:
        self.write_record(result_record(result))

    def close(self) -> None:
        if self._fh is None:
            return
        if self.format == "json":
            self._fh.write("\n]\n" if self.count else "]\n")
        self._fh.close()
        self._fh = None
        logger.info(f"Wrote {self.count} results to {self.path}")


def write_records(records: Iterable[Dict[str, Any]], path: str, format: str = "csv") -> str:
    with ResultWriter(path, format) as writer:
        for record in records:
            writer.write_record(record)
    return path


def emit_results(results: Iterable[ExperimentResult], path: str, format: str = "csv") -> str:
    """
    Write results to path in the given format.

    Args:
        results: Any number of results, including none (header-only CSV / empty array)
        path: Output file
        format: "csv" or "json"

    Returns:
        The path written
    """
    return write_records((result_record(r) for r in results), path, format)


def read_results(path: str, format: Optional[str] = None) -> List[Dict[str, Any]]:
    """Read records back from a CSV or JSON results file (format inferred from the suffix)."""
    format = format or ("json" if path.endswith(".json") else "csv")
    try:
        with open(path, newline="") as fh:
            if format == "json":
                return json.load(fh)
            reader = csv.DictReader(fh)
            return [{c: parse_value(c, row[c]) for c in CSV_HEADER} for row in reader]
    except OSError as e:
        raise OSError(f"could not read results file {path}: {e}") from e


def convert_results(source: str, destination: str, format: str) -> str:
    """Re-encode a results file, e.g. CSV -> JSON."""
    return write_records(read_results(source), destination, format)
