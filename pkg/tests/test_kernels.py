"""
Unit tests for smoothing kernels, the density estimate at zero and bandwidths
"""

import math

import numpy as np
import pytest
from scipy import integrate

from frappe_bench.core.kernels import (
    KERNELS,
    bandwidth_at,
    bandwidth_schedule,
    floored_density,
    get_kernel,
    kde_at_zero,
    list_kernels,
    private_kde_at_zero,
)
from frappe_bench.core.mechanisms import derive_rng
from frappe_bench.models.solver_config import BandwidthSchedule, KernelName


class TestKernels:
    """Test the four kernel profiles"""

    @pytest.mark.parametrize("name", list_kernels())
    def test_integrates_to_one(self, name):
        """Each kernel is a density on [-1, 1]"""
        kernel = get_kernel(name)
        area, _ = integrate.quad(lambda u: float(kernel.evaluate(u)), -1.0, 1.0)
        assert area == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("name", list_kernels())
    def test_bounded_by_sup(self, name):
        """|K(u)| <= B everywhere and K(0) = B"""
        kernel = get_kernel(name)
        values = kernel.evaluate(np.linspace(-1.5, 1.5, 3001))
        assert np.max(np.abs(values)) <= kernel.sup_bound + 1e-15
        assert float(kernel.evaluate(0.0)) == pytest.approx(kernel.sup_bound, rel=1e-15)

    @pytest.mark.parametrize("name", list_kernels())
    def test_zero_outside_support(self, name):
        """K(u) = 0 for |u| > 1"""
        kernel = get_kernel(name)
        assert np.all(kernel.evaluate(np.array([-3.0, -1.0001, 1.0001, 7.0])) == 0.0)

    def test_biweight_values(self):
        """K(0) = 105/64 and K(0.5) = 945/4096"""
        kernel = KERNELS[KernelName.BIWEIGHT]
        assert float(kernel.evaluate(0.0)) == pytest.approx(105 / 64, rel=1e-15)
        assert float(kernel.evaluate(0.5)) == pytest.approx(945 / 4096, rel=1e-14)

    def test_unknown_kernel(self):
        """Unknown names raise KeyError listing the known kernels"""
        with pytest.raises(KeyError, match="biweight"):
            get_kernel("gaussian")


class TestKdeAtZero:
    """Test the density estimate at zero"""

    def test_far_residuals_give_zero(self):
        """Residuals outside [-h, h] contribute nothing"""
        assert kde_at_zero([2.0, -3.0, 1.5], get_kernel("biweight"), 1.0) == 0.0

    def test_biweight_example(self):
        """Residuals [0, 0.5, 2] with h = 1 average to about 0.623779"""
        value = kde_at_zero([0.0, 0.5, 2.0], get_kernel("biweight"), 1.0)
        assert value == pytest.approx((105 / 64 + 945 / 4096) / 3, rel=1e-14)
        assert value == pytest.approx(0.623779, abs=1e-6)

    @pytest.mark.parametrize("name", list_kernels())
    def test_single_zero_residual(self, name):
        """One residual at zero with h = 1 gives K(0)"""
        kernel = get_kernel(name)
        assert kde_at_zero([0.0], kernel, 1.0) == pytest.approx(kernel.sup_bound, rel=1e-15)

    def test_invalid_bandwidth(self):
        """h must be positive"""
        with pytest.raises(ValueError):
            kde_at_zero([0.0], get_kernel("uniform"), 0.0)

    @pytest.mark.slow
    def test_recovers_normal_density(self):
        """N = 1e5 standard normal residuals, h = 0.1: within 5% of 1/sqrt(2 pi)"""
        residuals = derive_rng(42).standard_normal(100_000)
        estimate = kde_at_zero(residuals, get_kernel("biweight"), 0.1)
        assert estimate == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=0.05)


class TestFlooredDensity:
    """Test the floor on the perturbed estimate"""

    def test_floor_activates(self):
        """0.5 - 0.6 floored at 0.01"""
        assert floored_density(0.5, -0.6, 0.01) == 0.01

    def test_additive_path(self):
        """0.5 + 0.1 passes through"""
        assert floored_density(0.5, 0.1, 0.01) == pytest.approx(0.6)

    def test_never_zero(self):
        """The output is positive for any inputs"""
        rng = np.random.default_rng(4)
        for _ in range(100):
            assert floored_density(rng.normal(), rng.normal() * 10, 1e-6) > 0

    def test_zero_variance_skips_draw(self):
        """private_kde_at_zero with sigma^2 = 0 equals max(f_hat, floor)"""
        kernel = get_kernel("epanechnikov")
        residuals = [0.0, 0.1, -0.2]
        exact = kde_at_zero(residuals, kernel, 0.5)
        assert private_kde_at_zero(residuals, kernel, 0.5, 0.0, 0.01, derive_rng(0)) == max(exact, 0.01)

    def test_noisy_estimate_is_seeded(self):
        """The same stream gives the same noisy density"""
        kernel = get_kernel("triweight")
        first = private_kde_at_zero([0.1, 0.2], kernel, 1.0, 0.5, 0.01, derive_rng(8))
        second = private_kde_at_zero([0.1, 0.2], kernel, 1.0, 0.5, 0.01, derive_rng(8))
        assert first == second


class TestBandwidth:
    """Test the bandwidth schedule"""

    def test_first_outer_loop(self):
        """N=5000, s=10, v=1"""
        expected = math.sqrt(10 * math.log(5000) / 5000) + 10 ** -0.5 * 0.9
        assert bandwidth_at(1, 5000, 10, BandwidthSchedule()) == pytest.approx(expected, rel=1e-14)

    def test_strictly_decreasing(self):
        """h_{v+1} < h_v"""
        h = bandwidth_schedule(BandwidthSchedule(), 5000, 10, 30)
        assert all(b < a for a, b in zip(h, h[1:]))

    def test_limit(self):
        """s = 1, large v approaches sqrt(log N / N)"""
        assert bandwidth_at(400, 5000, 1, BandwidthSchedule()) == pytest.approx(math.sqrt(math.log(5000) / 5000), abs=1e-6)

    def test_schedule_sparsity_wins(self):
        """A sparsity pinned in the schedule overrides the caller's"""
        pinned = BandwidthSchedule(sparsity=4)
        assert bandwidth_at(2, 5000, 25, pinned) == bandwidth_at(2, 5000, 4, BandwidthSchedule())

    def test_fixed_schedule_needs_value(self):
        """kind=fixed without a value is rejected"""
        with pytest.raises(ValueError):
            BandwidthSchedule(kind="fixed")

    def test_invalid_outer_index(self):
        """v starts at 1"""
        with pytest.raises(ValueError):
            bandwidth_at(0, 5000, 10, BandwidthSchedule())


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
