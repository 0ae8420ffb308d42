import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optbench import gp


def naive_posterior(X, f, s, theta, jitter):
    """Explicit-inverse reference: mu = k^T K^-1 f, var = 1 - k^T K^-1 k."""
    n = X.shape[0]
    K = np.array([[gp.kernel(X[a], X[b], gp.KernelParams(theta)) for b in range(n)] for a in range(n)])
    K += jitter * np.eye(n)
    Kinv = np.linalg.inv(K)
    k = np.array([gp.kernel(X[a], s, gp.KernelParams(theta)) for a in range(n)])
    return float(k @ Kinv @ f), float(1.0 - k @ Kinv @ k)


class TestKernel:
    def test_identical_points(self):
        s = np.array([0.3, 0.7])
        assert gp.kernel(s, s, gp.KernelParams(0.4)) == 1.0

    def test_far_apart(self):
        value = gp.kernel(np.array([0.0]), np.array([100.0]), gp.KernelParams(0.1))
        assert value < 1e-12

    def test_spot_value(self):
        # (1 + sqrt5 + 5/3) * exp(-sqrt5), worked out on a calculator
        by_hand = (1 + math.sqrt(5) + 5 / 3) * math.exp(-math.sqrt(5))
        value = gp.kernel(np.array([0.0, 0.0]), np.array([0.6, 0.8]), gp.KernelParams(1.0))
        assert value == pytest.approx(by_hand, abs=1e-12)
        assert value == pytest.approx(0.52399, abs=1e-4)

    def test_bad_theta(self):
        with pytest.raises(ValueError):
            gp.KernelParams(0.0)
        with pytest.raises(ValueError):
            gp.matern52(1.0, -1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            gp.kernel(np.zeros(2), np.zeros(3), gp.KernelParams(1.0))


class TestFit:
    def test_single_point(self):
        m = gp.fit(np.array([[0.2, 0.4]]), np.array([2.0]), gp.KernelParams(0.5), jitter=1e-6)
        assert m.chol.shape == (1, 1)
        assert m.chol[0, 0] == pytest.approx(math.sqrt(1 + 1e-6))

    def test_duplicate_points(self):
        X = np.array([[0.5, 0.5], [0.5, 0.5], [0.1, 0.9]])
        m = gp.fit(X, np.array([1.0, 1.0, 0.0]), gp.KernelParams(0.3), jitter=1e-6)
        assert np.all(np.isfinite(m.alpha))

    def test_kernel_matrix_matches_pointwise(self):
        rng = np.random.default_rng(3)
        X = rng.random((3, 4))
        params = gp.KernelParams(0.7)
        m = gp.fit(X, rng.standard_normal(3), params, jitter=1e-6)
        K = np.array([[gp.kernel(a, b, params) for b in X] for a in X])
        np.testing.assert_allclose(m.chol @ m.chol.T, K + 1e-6 * np.eye(3), atol=1e-12)

    def test_factor_reconstructs(self):
        rng = np.random.default_rng(4)
        X = rng.random((30, 5))
        params = gp.KernelParams(0.3)
        m = gp.fit(X, rng.standard_normal(30), params)
        K = gp.kernel_matrix(X, X, params) + m.jitter * np.eye(30)
        assert np.linalg.norm(m.chol @ m.chol.T - K) < 1e-8

    def test_reports_pivot(self):
        X = np.zeros((3, 2))
        with pytest.raises(gp.NotPositiveDefiniteError) as info:
            gp.fit(X, np.zeros(3), gp.KernelParams(1.0), jitter=0.0)
        assert info.value.pivot >= 1


class TestPosterior:
    def test_interpolates_single_point(self):
        x = np.array([0.25, 0.75])
        m = gp.fit(x[None, :], np.array([3.5]), gp.KernelParams(0.2), jitter=1e-10)
        mu, var = gp.posterior(m, x)
        assert abs(mu - 3.5) < 1e-6
        assert var < 1e-6

    def test_prior_far_away(self):
        m = gp.fit(np.array([[0.0, 0.0]]), np.array([5.0]), gp.KernelParams(0.01))
        mu, var = gp.posterior(m, np.array([1.0, 1.0]))
        assert abs(mu) < 1e-9
        assert var == pytest.approx(1.0, abs=1e-9)

    def test_two_point_system(self):
        X = np.array([[0.1, 0.2], [0.4, 0.3]])
        f = np.array([1.0, -0.5])
        s = np.array([0.3, 0.3])
        theta = 0.5
        m = gp.fit(X, f, gp.KernelParams(theta), jitter=1e-6)
        # 2x2 inverse written out by hand
        k12 = gp.kernel(X[0], X[1], gp.KernelParams(theta))
        a, b, d = 1 + 1e-6, k12, 1 + 1e-6
        det = a * d - b * b
        Kinv = np.array([[d, -b], [-b, a]]) / det
        k = np.array([gp.kernel(X[0], s, gp.KernelParams(theta)), gp.kernel(X[1], s, gp.KernelParams(theta))])
        mu, var = gp.posterior(m, s)
        assert mu == pytest.approx(k @ Kinv @ f, abs=1e-8)
        assert var == pytest.approx(1 - k @ Kinv @ k, abs=1e-8)

    @given(st.integers(1, 50), st.integers(1, 20), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_matches_naive_inverse(self, n, d, seed):
        rng = np.random.default_rng(seed)
        X = rng.random((n, d))
        f = rng.standard_normal(n)
        s = rng.random(d)
        theta = float(rng.uniform(0.1, 1.0))
        m = gp.fit(X, f, gp.KernelParams(theta), jitter=1e-6)
        mu, var = gp.posterior(m, s)
        mu_ref, var_ref = naive_posterior(X, f, s, theta, 1e-6)
        assert abs(mu - mu_ref) < 1e-8
        assert abs(var - max(var_ref, 0.0)) < 1e-8

    @given(st.integers(1, 40), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_raw_variance_nearly_nonnegative(self, n, seed):
        rng = np.random.default_rng(seed)
        X = rng.random((n, 3))
        m = gp.fit(X, rng.standard_normal(n), gp.KernelParams(0.5))
        S = np.vstack([rng.random((20, 3)), X])
        assert np.all(m.predict_raw_variance(S) >= -1e-8)
        assert np.all(m.predict(S)[1] >= 0.0)


def test_fit_time_grows_superlinearly():
    rng = np.random.default_rng(0)
    params = gp.KernelParams(0.1)
    times = {}
    for n in (100, 400):
        X = rng.random((n, 20))
        f = rng.standard_normal(n)
        samples = []
        for _ in range(7):
            import time

            start = time.perf_counter()
            gp.fit(X, f, params)
            samples.append(time.perf_counter() - start)
        times[n] = float(np.median(samples))
    assert times[400] / times[100] > 8
