"""
Dataset and WeightVector - the shared input and output of every solver.

Both are frozen pydantic models over read-only float64 numpy arrays, so a
single instance can be handed to any number of workers without copying.
"""

from typing import Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


def _readonly(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


class Dataset(BaseModel):
    """Design matrix X (N x p) with response vector y."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: np.ndarray
    responses: np.ndarray

    @field_validator("features", mode="before")
    @classmethod
    def _features_2d(cls, v):
        return _readonly(v, 2, "features")

    @field_validator("responses", mode="before")
    @classmethod
    def _responses_1d(cls, v):
        return _readonly(v, 1, "responses")

    @model_validator(mode="after")
    def _consistent_shapes(self) -> "Dataset":
        n, p = self.features.shape
        if n < 1 or p < 1:
            raise ValueError(f"dataset needs N >= 1 and p >= 1, got N={n}, p={p}")
        if self.responses.shape[0] != n:
            raise ValueError(
                f"features have {n} rows but responses have {self.responses.shape[0]} entries"
            )
        return self

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def rows(self) -> Iterator[Tuple[np.ndarray, float]]:
        """Yield (x_i, y_i) pairs."""
        for i in range(self.n_samples):
            yield self.features[i], float(self.responses[i])

    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.features, axis=1)

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(features=self.features[idx], responses=self.responses[idx])

    def with_responses(self, responses) -> "Dataset":
        return Dataset(features=self.features, responses=responses)


class WeightVector(BaseModel):
    """A p-dimensional regression weight."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _values_1d(cls, v):
        return _readonly(v, 1, "values")

    @classmethod
    def zeros(cls, p: int) -> "WeightVector":
        return cls(values=np.zeros(p))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def support(self, tol: float = 0.0) -> List[int]:
        """Indices with |values[i]| > tol (tol=0 gives exactly the non-zeros)."""
        return [int(i) for i in np.flatnonzero(np.abs(self.values) > tol)]

    def sparsity(self, tol: float = 0.0) -> int:
        return len(self.support(tol))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def to_list(self) -> List[float]:
        return [float(v) for v in self.values]
