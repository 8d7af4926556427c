"""
Unit tests for the Gaussian mechanism and the stage noise scales
"""

import math

import numpy as np
import pytest
from scipy import stats

from frappe_bench.core.mechanisms import (
    NoiseSource,
    compute_noise_scales,
    derive_rng,
    effective_stage_epsilon,
    gaussian_noise,
    gradient_bound,
    gradient_noise_variance,
)
from frappe_bench.errors import InfeasibleBudgetError
from frappe_bench.models.privacy import NoiseScales, PrivacyBudget, Stage
from frappe_bench.models.solver_config import BandwidthSchedule, FrappeConfig

BIWEIGHT_SUP = 105.0 / 64.0


def frappe_config(**overrides) -> FrappeConfig:
    fields = {"clip_row": 1.0, "clip_weight": 10.0, "density_floor": 0.01}
    fields.update(overrides)
    return FrappeConfig(**fields)


class TestGradientBound:
    """Test G = 4 c_x^2 c_beta + c_f"""

    def test_unit_constants(self):
        """(c_x, c_beta, c_f) = (1, 1, 1) gives G = 5"""
        assert gradient_bound(1.0, 1.0, 1.0) == 5.0

    def test_paper_scale_constants(self):
        """(1, 10, 0.01) gives G = 40.01"""
        assert gradient_bound(1.0, 10.0, 0.01) == pytest.approx(40.01, rel=1e-15)


class TestNoiseScales:
    """Test the three stage variances against hand evaluation"""

    def test_unit_plug_in(self):
        """eps=1, delta=1/e, T=V=1, N=1, G=1 gives sigma_grad^2 = 6"""
        cfg = frappe_config(
            outer_iters=1, inner_iters=1, subsample_size=1,
            clip_row=0.5, clip_weight=0.5, density_floor=0.5,
        )
        budget = PrivacyBudget(epsilon=1.0, delta=math.exp(-1.0))
        scales = compute_noise_scales(budget, cfg, n_samples=1)
        assert scales.gradient_bound == pytest.approx(1.0, rel=1e-15)
        assert scales.sigma_grad_sq == pytest.approx(6.0, rel=1e-12)

    def test_desk_scale_example(self):
        """eps=0.5, delta=1e-3, T=50, V=10, N=5000, G=40.01"""
        cfg = frappe_config(outer_iters=10, inner_iters=50)
        budget = PrivacyBudget(epsilon=0.5, delta=1e-3)
        scales = compute_noise_scales(budget, cfg, n_samples=5000)
        expected = 6 * 40.01**2 * math.log(1000) * 500 / (0.25 * 5000**2)
        assert scales.sigma_grad_sq == pytest.approx(expected, rel=1e-12)

    def test_randomized_parameter_sets(self):
        """All three stages match the closed forms on 20 random parameter sets"""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            eps = rng.uniform(0.1, 2.0)
            delta = rng.uniform(1e-6, 5e-3)
            n_samples = int(rng.integers(1000, 20000))
            subsample = int(rng.integers(200, 1000))
            V = int(rng.integers(1, 20))
            T = int(rng.integers(1, 100))
            s = int(rng.integers(1, 30))
            c_x = rng.uniform(0.5, 20.0)
            c_beta = rng.uniform(1.0, 50.0)
            c_f = rng.uniform(0.001, 0.5)
            l1, l2 = rng.uniform(0.001, 0.1), rng.uniform(0.01, 1.0)
            cfg = FrappeConfig(
                outer_iters=V, inner_iters=T, subsample_size=subsample, elastic_net=(l1, l2),
                clip_row=c_x, clip_weight=c_beta, density_floor=c_f,
            )
            scales = compute_noise_scales(PrivacyBudget(epsilon=eps, delta=delta), cfg, n_samples, sparsity=s)

            N = n_samples
            init = 24 * c_x**2 * math.log(subsample / (N * delta)) / (eps**2 * l2**2 * N**2)
            G = 4 * c_x**2 * c_beta + c_f
            grad = 6 * G**2 * math.log(1 / delta) * T * V / (eps**2 * N**2)
            assert scales.sigma_init_sq == pytest.approx(init, rel=1e-12)
            assert scales.sigma_grad_sq == pytest.approx(grad, rel=1e-12)
            for v in range(1, V + 1):
                h = math.sqrt(s * math.log(N) / N) + s ** -0.5 * 0.9 ** ((v + 1) / 2)
                kde = 24 * BIWEIGHT_SUP**2 * math.log(1 / delta) * V / (eps**2 * N**2 * h**2)
                assert scales.bandwidths[v - 1] == pytest.approx(h, rel=1e-12)
                assert scales.kde_variance(v) == pytest.approx(kde, rel=1e-12)

    def test_gradient_variance_scales_as_inverse_square_of_n(self):
        """sigma_grad^2 * N^2 does not depend on N; doubling N quarters the variance"""
        cfg = frappe_config(subsample_size=500)
        budget = PrivacyBudget(epsilon=0.5, delta=1e-3)
        small = compute_noise_scales(budget, cfg, n_samples=1000).sigma_grad_sq
        large = compute_noise_scales(budget, cfg, n_samples=2000).sigma_grad_sq
        assert small * 1000**2 == pytest.approx(large * 2000**2, rel=1e-14)
        assert small / large == pytest.approx(4.0, rel=1e-14)

    def test_kde_variance_times_bandwidth_squared_is_constant(self):
        """sigma_kde,v^2 * h_v^2 is the same for every outer loop"""
        scales = compute_noise_scales(PrivacyBudget(epsilon=0.5, delta=1e-3), frappe_config(), 5000)
        products = [scales.kde_variance(v) * h**2 for v, h in enumerate(scales.bandwidths, start=1)]
        assert products == pytest.approx([products[0]] * len(products), rel=1e-12)

    def test_uneven_split_rescales_each_stage(self):
        """A stage spending w * eps has its variance multiplied by ((1/3) / w)^2"""
        cfg = frappe_config()
        even = compute_noise_scales(PrivacyBudget(epsilon=0.5, delta=1e-3), cfg, 5000)
        split = compute_noise_scales(
            PrivacyBudget(epsilon=0.5, delta=1e-3, stage_split=(0.5, 0.25, 0.25)), cfg, 5000
        )
        assert split.sigma_init_sq == pytest.approx(even.sigma_init_sq * (2.0 / 3.0) ** 2, rel=1e-12)
        assert split.sigma_grad_sq == pytest.approx(even.sigma_grad_sq * (4.0 / 3.0) ** 2, rel=1e-12)
        assert split.kde_variance(1) == pytest.approx(even.kde_variance(1) * (4.0 / 3.0) ** 2, rel=1e-12)

    def test_fixed_bandwidth(self):
        """A fixed schedule uses the same h for every outer loop"""
        cfg = frappe_config(outer_iters=3, bandwidth=BandwidthSchedule(kind="fixed", value=0.25))
        scales = compute_noise_scales(PrivacyBudget(epsilon=1.0, delta=1e-3), cfg, 5000)
        assert scales.bandwidths == [0.25, 0.25, 0.25]

    def test_infeasible_initializer_budget(self):
        """n / (N delta) <= 1 makes the initializer variance undefined"""
        cfg = frappe_config(subsample_size=1)
        with pytest.raises(InfeasibleBudgetError):
            compute_noise_scales(PrivacyBudget(epsilon=0.5, delta=1e-3), cfg, 5000)

    def test_baseline_gradient_variance(self):
        """V*T replaced by a single iteration count"""
        budget = PrivacyBudget(epsilon=1.0, delta=math.exp(-1.0))
        assert gradient_noise_variance(budget, 1.0, 1, 1) == pytest.approx(6.0, rel=1e-12)


class TestStageBudget:
    """Test the per-stage (epsilon, delta) split"""

    def test_even_split(self):
        """(0.3, 3e-3) gives (0.1, 1e-3) for each stage"""
        eps, delta = effective_stage_epsilon(PrivacyBudget(epsilon=0.3, delta=3e-3), Stage.INIT)
        assert eps == pytest.approx(0.1, rel=1e-12)
        assert delta == pytest.approx(1e-3, rel=1e-12)

    def test_uneven_split(self):
        """Split (0.5, 0.25, 0.25), eps=1: the gradient stage gets 0.25"""
        budget = PrivacyBudget(epsilon=1.0, delta=1e-3, stage_split=(0.5, 0.25, 0.25))
        eps, delta = effective_stage_epsilon(budget, Stage.GRAD)
        assert eps == 0.25
        assert delta == pytest.approx(0.25e-3, rel=1e-12)

    def test_stages_partition_the_budget(self):
        """The three stage budgets sum to (eps, delta)"""
        budget = PrivacyBudget(epsilon=0.7, delta=2e-3, stage_split=(0.2, 0.3, 0.5))
        parts = [effective_stage_epsilon(budget, stage) for stage in Stage]
        assert sum(p[0] for p in parts) == pytest.approx(0.7, rel=1e-12)
        assert sum(p[1] for p in parts) == pytest.approx(2e-3, rel=1e-12)

    def test_split_must_sum_to_one(self):
        """A split that is not a partition is rejected"""
        with pytest.raises(ValueError):
            PrivacyBudget(epsilon=1.0, delta=1e-3, stage_split=(0.5, 0.5, 0.5))


class TestGaussianNoise:
    """Test draws from N(0, sigma^2)"""

    def test_shape(self):
        """dim=3 gives a length-3 vector"""
        assert gaussian_noise(derive_rng(1), 3, 1.0).shape == (3,)

    def test_same_seed_same_draws(self):
        """Determinism contract"""
        assert np.array_equal(gaussian_noise(derive_rng(9, 1, 2), 5, 2.0), gaussian_noise(derive_rng(9, 1, 2), 5, 2.0))

    def test_distinct_keys_distinct_streams(self):
        """Different stream keys give different draws"""
        assert not np.array_equal(gaussian_noise(derive_rng(9, 1), 5, 1.0), gaussian_noise(derive_rng(9, 2), 5, 1.0))

    def test_sample_variance(self):
        """Variance over 1e5 draws within 3% of sigma^2"""
        x = gaussian_noise(derive_rng(17), 100_000, 2.5)
        assert np.var(x) == pytest.approx(2.5, rel=0.03)

    def test_invalid_variance(self):
        """sigma^2 must be positive"""
        with pytest.raises(ValueError):
            gaussian_noise(derive_rng(0), 3, 0.0)


class TestNoiseSource:
    """Test the per-stage streams and the draw counter"""

    def test_each_stage_passes_ks(self):
        """Every stage's draws pass KS against N(0, sigma^2) at 0.01 with 1e4 samples"""
        source = NoiseSource(derive_rng(31))
        sigma_sq = 0.7
        samples = {
            "init": source.init(10_000, sigma_sq),
            "kde": np.array([source.kde(sigma_sq) for _ in range(10_000)]),
            "grad": source.grad(10_000, sigma_sq),
        }
        for stage, x in samples.items():
            result = stats.kstest(x / math.sqrt(sigma_sq), "norm")
            assert result.pvalue > 0.01, stage

    def test_counts(self):
        """init counts once per call, kde once per call, grad once per coordinate"""
        source = NoiseSource(derive_rng(3))
        source.init(4, 1.0)
        source.kde(1.0)
        source.kde(1.0)
        source.grad(4, 1.0)
        assert source.counts == {"init": 1, "kde": 2, "grad": 4}
        assert source.total_draws == 7

    def test_disabled_source_draws_nothing(self):
        """Non-private mode returns zeros and counts nothing"""
        source = NoiseSource(derive_rng(3), enabled=False)
        assert np.array_equal(source.grad(3, 1.0), np.zeros(3))
        assert source.kde(1.0) == 0.0
        assert source.total_draws == 0

    def test_noise_scales_reject_non_positive(self):
        """NoiseScales only holds positive finite variances"""
        with pytest.raises(ValueError):
            NoiseScales(sigma_init_sq=0.0, sigma_kde_sq=[1.0], sigma_grad_sq=1.0, gradient_bound=1.0, bandwidths=[1.0])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
