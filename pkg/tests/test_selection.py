"""
Unit tests for BIC model selection and the default candidate grids
"""

import math
import random

import numpy as np
import pytest

from frappe_bench.core.operators import soft_threshold
from frappe_bench.data.synthetic import generate
from frappe_bench.evaluation.selection import (
    best_entry,
    bic_path,
    bic_select,
    bic_value,
    default_lambda_grid,
    default_sparsity_grid,
    training_loss,
)
from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.experiment import SyntheticSpec


def first_k(p: int):
    """Fitter returning ones on the first int(value) coordinates."""

    def fitter(value: float) -> WeightVector:
        values = np.zeros(p)
        values[: int(value)] = 1.0
        return WeightVector(values=values)

    return fitter


class TestBicValue:
    """Test the criterion itself"""

    def test_hand_example(self):
        """Residuals (-1, 0, 1, 2): mean |r| = 1, so BIC = 1 * log 4"""
        d = Dataset(features=[[1.0], [1.0], [1.0], [1.0]], responses=[1.0, 2.0, 3.0, 4.0])
        assert bic_value(d, WeightVector(values=[2.0]), "lad") == pytest.approx(math.log(4.0), rel=1e-15)

    def test_squared_loss(self):
        """The square-loss variant uses the mean squared residual"""
        d = Dataset(features=[[1.0], [1.0], [1.0], [1.0]], responses=[1.0, 2.0, 3.0, 4.0])
        assert training_loss(d, WeightVector(values=[2.0]), "squared") == 1.5

    def test_interpolating_fit_is_finite(self):
        """Zero training loss does not produce -inf"""
        d = Dataset(features=[[1.0], [2.0]], responses=[1.0, 2.0])
        assert math.isfinite(bic_value(d, WeightVector(values=[1.0]), "lad"))

    def test_unknown_loss(self):
        """Only lad and squared are known"""
        d = Dataset(features=[[1.0]], responses=[1.0])
        with pytest.raises(ValueError):
            training_loss(d, WeightVector(values=[1.0]), "huber")


class TestSelection:
    """Test candidate selection"""

    def test_single_candidate(self):
        """A one-point grid returns that point"""
        d = Dataset(features=[[1.0, 0.0], [0.0, 1.0]], responses=[1.0, 1.0])
        value, weights = bic_select(d, [0.5], first_k(2))
        assert value == 0.5
        assert weights.dim == 2

    def test_equal_loss_prefers_smaller_support(self):
        """Zero features make every fit equally good; the sparsest wins on the penalty"""
        d = Dataset(features=np.zeros((6, 5)), responses=np.ones(6))
        value, weights = bic_select(d, [3.0, 1.0, 5.0], first_k(5))
        assert value == 1.0
        assert weights.sparsity() == 1

    def test_exact_tie_goes_to_smaller_value(self):
        """Identical fits at every candidate resolve to the smallest value"""
        d = Dataset(features=[[1.0], [2.0], [3.0]], responses=[1.0, 1.0, 4.0])
        same = WeightVector(values=[1.0])
        value, _ = bic_select(d, [0.3, 0.1, 0.2], lambda _: same)
        assert value == 0.1

    def test_order_invariance(self):
        """Shuffling the grid does not change the choice"""
        d, _ = generate(SyntheticSpec(n_samples=200, n_features=8, sparsity=3, seed=9))

        def lasso_closed_form(lam: float) -> WeightVector:
            return WeightVector(values=soft_threshold(d.features.T @ d.responses / d.n_samples, lam))

        grid = default_lambda_grid(d, 10)
        expected, _ = bic_select(d, grid, lasso_closed_form)
        shuffled = list(grid)
        random.Random(5).shuffle(shuffled)
        assert bic_select(d, shuffled, lasso_closed_form)[0] == expected

    def test_path_keeps_grid_order(self):
        """bic_path returns one entry per candidate in the given order"""
        d = Dataset(features=np.eye(3), responses=[1.0, 2.0, 3.0])
        entries = bic_path(d, [2.0, 0.0, 1.0], first_k(3))
        assert [e.value for e in entries] == [2.0, 0.0, 1.0]
        assert [e.support_size for e in entries] == [2, 0, 1]

    def test_empty_grid(self):
        """No candidates is an error"""
        d = Dataset(features=[[1.0]], responses=[1.0])
        with pytest.raises(ValueError):
            bic_select(d, [], first_k(1))
        with pytest.raises(ValueError):
            best_entry([])


class TestDefaultGrids:
    """Test data-driven candidate grids"""

    def test_lambda_grid_shape(self):
        """20 log-spaced values from lambda_max down to lambda_max / 1e3"""
        d, _ = generate(SyntheticSpec(n_samples=100, n_features=6, sparsity=2, seed=1))
        grid = default_lambda_grid(d)
        lambda_max = np.max(np.abs(d.features.T @ d.responses)) / d.n_samples
        assert len(grid) == 20
        assert grid[0] == pytest.approx(lambda_max, rel=1e-15)
        assert grid[-1] == pytest.approx(lambda_max / 1000.0, rel=1e-12)
        assert all(b < a for a, b in zip(grid, grid[1:]))

    def test_lambda_grid_scales_with_response(self):
        """Multiplying y by 3 multiplies every grid point by 3"""
        d, _ = generate(SyntheticSpec(n_samples=100, n_features=6, sparsity=2, seed=1))
        scaled = d.with_responses(3.0 * d.responses)
        assert default_lambda_grid(scaled, 5) == pytest.approx([3.0 * x for x in default_lambda_grid(d, 5)], rel=1e-12)

    def test_lambda_grid_needs_two_points(self):
        """count < 2 is rejected"""
        d = Dataset(features=[[1.0]], responses=[1.0])
        with pytest.raises(ValueError):
            default_lambda_grid(d, 1)

    def test_lambda_grid_needs_signal(self):
        """X'y = 0 leaves no lambda_max"""
        d = Dataset(features=[[1.0], [-1.0]], responses=[1.0, 1.0])
        with pytest.raises(ValueError):
            default_lambda_grid(d)

    def test_sparsity_grid_wide(self):
        """p = 100: 20 distinct targets from 1 to 50"""
        grid = default_sparsity_grid(100)
        assert len(grid) == 20
        assert grid[0] == 1
        assert grid[-1] == 50
        assert grid == sorted(set(grid))

    def test_sparsity_grid_narrow(self):
        """p = 5 caps the grid at p"""
        assert default_sparsity_grid(5) == [1, 2, 3, 4, 5]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
