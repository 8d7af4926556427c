"""
Real-data CSV ingestion: parse, split, standardize.

Schema: one header row, one numeric response column (first by default),
every other column a numeric feature. Missing or non-numeric cells are hard
errors reported with their 1-based file line number.
"""

import logging
import math
import re
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from frappe_bench.core.mechanisms import derive_rng
from frappe_bench.errors import DataFormatError
from frappe_bench.models.dataset import Dataset
from frappe_bench.models.experiment import DataOptions

logger = logging.getLogger(__name__)

_LINE_PATTERN = re.compile(r"line (\d+)")


class Standardization(BaseModel):
    """Training-split statistics applied to both splits."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    feature_mean: np.ndarray
    feature_scale: np.ndarray
    response_mean: float = 0.0
    response_scale: float = 1.0


def _read_table(path: str, delimiter: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, sep=delimiter, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataFormatError("file is empty", path) from None
    except pd.errors.ParserError as e:
        match = _LINE_PATTERN.search(str(e))
        line = int(match.group(1)) if match else None
        raise DataFormatError(f"malformed row: {e}", path, line) from None


def load_csv(path: str, response_column: Union[int, str] = 0, delimiter: str = ",") -> Dataset:
    """
    Parse a numeric CSV into a Dataset.

    Args:
        path: CSV file with a header row
        response_column: Column name, or 0-based position, of y
        delimiter: Field separator

    Returns:
        Dataset with every non-response column as a feature

    Raises:
        DataFormatError: malformed rows, missing or non-numeric cells
    """
    table = _read_table(path, delimiter)
    if table.shape[0] == 0:
        raise DataFormatError("no data rows after the header", path)
    if table.shape[1] < 2:
        raise DataFormatError("need a response column and at least one feature column", path)

    if isinstance(response_column, str) and not response_column.lstrip("-").isdigit():
        if response_column not in table.columns:
            raise DataFormatError(f"response column {response_column!r} not in header", path, 1)
        y_name = response_column
    else:
        position = int(response_column)
        if not -table.shape[1] <= position < table.shape[1]:
            raise DataFormatError(f"response column index {position} out of range", path, 1)
        y_name = table.columns[position]

    numeric = {}
    for name in table.columns:
        raw = table[name]
        values = pd.to_numeric(raw, errors="coerce")
        bad = values.isna() | ~np.isfinite(values.fillna(0.0))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            cell = raw.iloc[row]
            missing = cell is None or cell == "" or (isinstance(cell, float) and math.isnan(cell))
            problem = "missing value" if missing else f"non-numeric value {cell!r}"
            # +2: one header line, 1-based numbering
            raise DataFormatError(f"{problem} in column {name!r}", path, row + 2)
        numeric[name] = values.to_numpy(dtype=np.float64)

    feature_names = [c for c in table.columns if c != y_name]
    features = np.column_stack([numeric[c] for c in feature_names])
    logger.info(f"Loaded {path}: N={features.shape[0]}, p={features.shape[1]}, response={y_name!r}")
    return Dataset(features=features, responses=numeric[y_name])


def train_test_split(
    d: Dataset, fraction: float, rng: np.random.Generator
) -> Tuple[Dataset, Dataset]:
    """
    Uniform random split into ceil(fraction * N) training rows and the rest.

    Raises:
        ValueError: if either side would be empty
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"split fraction must lie in (0, 1), got {fraction}")
    n = d.n_samples
    n_train = math.ceil(fraction * n - 1e-9)
    if n_train < 1 or n_train >= n:
        raise ValueError(f"split fraction {fraction} leaves an empty partition for N={n}")
    order = rng.permutation(n)
    return d.subset(np.sort(order[:n_train])), d.subset(np.sort(order[n_train:]))


def fit_standardization(train: Dataset, normalize_response: bool = False) -> Standardization:
    mean = train.features.mean(axis=0)
    scale = train.features.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    fields = {"feature_mean": mean, "feature_scale": scale}
    if normalize_response:
        y_scale = float(train.responses.std())
        fields.update(response_mean=float(train.responses.mean()), response_scale=y_scale if y_scale > 0 else 1.0)
    return Standardization(**fields)


def apply_standardization(d: Dataset, stats: Standardization) -> Dataset:
    return Dataset(
        features=(d.features - stats.feature_mean) / stats.feature_scale,
        responses=(d.responses - stats.response_mean) / stats.response_scale,
    )


def load_split(
    options: DataOptions, seed: int, split_key: Tuple[int, ...] = ()
) -> Tuple[Dataset, Dataset, Optional[Standardization]]:
    """
    load_csv -> train_test_split -> optional standardization with training statistics.

    Args:
        options: Path, schema and split options
        seed: Root seed
        split_key: Stream key for the split (e.g. (cell, replication, 0))

    Returns:
        (train, test, statistics or None)
    """
    data = load_csv(options.path, options.response_column, options.delimiter)
    train, test = train_test_split(data, options.split_fraction, derive_rng(seed, *split_key))
    if not options.normalize:
        return train, test, None
    stats = fit_standardization(train, options.normalize_response)
    return apply_standardization(train, stats), apply_standardization(test, stats), stats
