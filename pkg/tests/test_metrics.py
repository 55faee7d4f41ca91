import math

import numpy as np
import pytest

from lbptex.errors import ConfigError, DataError
from lbptex.histograms import Histogram
from lbptex.metrics import METRICS, get_metric, kl_divergence, ordinal_distance

scipy_opt = pytest.importorskip("scipy.optimize")


def transport_cost_lp(p: np.ndarray, q: np.ndarray) -> float:
    """Minimum-cost transport between two 1-D histograms, solved as an LP.

    Moving one unit of mass from bin i to bin j costs |i - j|; this is the
    textbook definition the cumulative-sum formula is supposed to equal.
    """
    n = p.size
    cost = np.abs(np.subtract.outer(np.arange(n), np.arange(n))).ravel().astype(np.float64)
    a_eq = np.zeros((2 * n, n * n))
    for i in range(n):
        a_eq[i, i * n : (i + 1) * n] = 1.0  # row sums: mass leaving bin i
        a_eq[n + i, i::n] = 1.0  # column sums: mass arriving at bin i
    b_eq = np.concatenate([p, q])
    res = scipy_opt.linprog(cost, A_eq=a_eq, b_eq=b_eq, method="highs")
    assert res.success, res.message
    return float(res.fun)


def random_prob(rng, n):
    v = rng.random(n) + 1e-6
    return v / v.sum()


class TestKL:
    def test_identity_is_zero(self):
        a = np.array([0.25, 0.5, 0.25])
        assert kl_divergence(a, a) == 0.0

    def test_worked_example(self):
        # D(B||A) with A as model: 0.25*ln(.5) + 0.75*ln(1.5) = 0.130812...
        got = kl_divergence([0.5, 0.5], [0.25, 0.75])
        assert got == pytest.approx(0.25 * math.log(0.5) + 0.75 * math.log(1.5), abs=1e-9)

    def test_direction_weights_by_second_argument(self):
        # reference spreads mass, sample concentrates it: cost ~ ln 2
        assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == pytest.approx(math.log(2), abs=1e-6)

    def test_asymmetric(self):
        a, b = [0.5, 0.5], [1.0, 0.0]
        assert abs(kl_divergence(a, b) - kl_divergence(b, a)) > 1.0

    def test_nonnegative_on_random_pairs(self):
        rng = np.random.default_rng(70)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            assert kl_divergence(random_prob(rng, n), random_prob(rng, n)) >= -1e-9

    def test_smoothing_handles_zeros(self):
        v = kl_divergence([1.0, 0.0], [0.0, 1.0])
        assert np.isfinite(v) and v > 10  # ln(1/eps) scale, finite

    def test_accepts_counts_and_histograms(self):
        h1 = Histogram(counts=np.array([2, 2], dtype=np.int64))
        h2 = Histogram(counts=np.array([1, 3], dtype=np.int64))
        assert kl_divergence(h1, h2) == kl_divergence([0.5, 0.5], [0.25, 0.75])


class TestOrdinal:
    def test_worked_example(self):
        assert ordinal_distance([0.75, 0.0, 0.25], [0.25, 0.5, 0.25]) == pytest.approx(0.5)

    def test_adjacent_swap_costs_mass(self):
        assert ordinal_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
        assert ordinal_distance([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]) == pytest.approx(2.0)

    def test_identity_and_symmetry(self):
        rng = np.random.default_rng(71)
        for _ in range(100):
            p = random_prob(rng, 12)
            q = random_prob(rng, 12)
            assert ordinal_distance(p, p) == 0.0
            assert ordinal_distance(p, q) == pytest.approx(ordinal_distance(q, p), abs=1e-12)

    def test_scale_invariance_via_normalization(self):
        p = np.array([4.0, 0.0, 4.0])
        q = np.array([1.0, 2.0, 1.0])
        assert ordinal_distance(p, q) == pytest.approx(
            ordinal_distance(p / p.sum(), q / q.sum()), abs=1e-15
        )

    def test_matches_lp_transport(self):
        rng = np.random.default_rng(72)
        for _ in range(20):
            p = random_prob(rng, 5)
            q = random_prob(rng, 5)
            assert ordinal_distance(p, q) == pytest.approx(transport_cost_lp(p, q), abs=1e-9)


class TestValidation:
    @pytest.mark.parametrize("metric", [kl_divergence, ordinal_distance])
    def test_length_mismatch(self, metric):
        with pytest.raises(ValueError):
            metric([0.5, 0.5], [1.0])

    @pytest.mark.parametrize("metric", [kl_divergence, ordinal_distance])
    def test_negative_entries(self, metric):
        with pytest.raises(ValueError):
            metric([0.5, -0.5], [0.5, 0.5])

    @pytest.mark.parametrize("metric", [kl_divergence, ordinal_distance])
    def test_zero_mass(self, metric):
        with pytest.raises((ValueError, DataError)):
            metric([0.0, 0.0], [0.5, 0.5])

    def test_registry(self):
        assert set(METRICS) == {"od", "kl"}
        assert get_metric("od") is ordinal_distance
        assert get_metric("kl") is kl_divergence
        with pytest.raises(ConfigError):
            get_metric("euclidean")
