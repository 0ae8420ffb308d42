import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optbench import gp
from optbench.bench import BenchmarkFunction
from optbench.bo import BOConfig, exploration_weight, propose, run_bo, ucb
from optbench.core import best_so_far


class TestUCB:
    def test_zero_sigma_is_mean(self):
        assert ucb(1.25, 0.0, t=7, d=3, gamma=0.1) == 1.25

    def test_spot_value(self):
        # tau_1 = 2 ln(pi^2 / 0.3) for d = 2, gamma = 0.1
        by_hand = math.sqrt(2 * math.log(math.pi**2 / 0.3))
        assert ucb(0.0, 1.0, t=1, d=2, gamma=0.1) == pytest.approx(by_hand, rel=1e-12)
        assert by_hand == pytest.approx(2.6433, abs=1e-4)

    @given(st.floats(0.0, 10.0), st.floats(0.01, 5.0))
    def test_monotone_in_sigma(self, sigma, extra):
        assert ucb(0.3, sigma + extra, 5, 4, 0.1) > ucb(0.3, sigma, 5, 4, 0.1)

    @given(st.integers(1, 5000), st.integers(1, 30), st.floats(0.001, 0.999))
    def test_tau_increasing_in_t(self, t, d, gamma):
        assert exploration_weight(t + 1, d, gamma) > exploration_weight(t, d, gamma) > 0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            ucb(0.0, -1.0, 1, 2, 0.1)
        with pytest.raises(ValueError):
            exploration_weight(0, 2, 0.1)
        with pytest.raises(ValueError):
            BOConfig(gamma=1.0)


def small_model(seed=0, n=8, d=2, theta=0.2):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    f = rng.standard_normal(n)
    return gp.fit(X, f, gp.KernelParams(theta))


class TestPropose:
    def test_single_candidate_no_refinement(self):
        model = small_model()
        cfg = BOConfig(acq_samples=1, acq_refine_steps=0)
        rng = np.random.default_rng(5)
        expected = np.random.default_rng(5).random((1, 2))[0]
        np.testing.assert_array_equal(propose(model, cfg, 8, rng), expected)

    def test_beats_every_raw_candidate(self):
        model = gp.fit(np.array([[0.5, 0.5], [0.1, 0.9]]), np.array([3.0, -1.0]), gp.KernelParams(0.05))
        cfg = BOConfig(acq_samples=200, acq_refine_steps=50)
        x = propose(model, cfg, 2, np.random.default_rng(1))
        cand = np.random.default_rng(1).random((200, 2))

        def acq(S):
            mu, var = model.predict(S)
            return ucb(mu, np.sqrt(var), 2, 2, cfg.gamma)

        assert acq(x[None, :])[0] >= acq(cand).max()
        assert np.all((x >= 0) & (x <= 1))

    def test_deterministic(self):
        model = small_model()
        cfg = BOConfig(acq_samples=50, acq_refine_steps=20)
        a = propose(model, cfg, 8, np.random.default_rng(9))
        b = propose(model, cfg, 8, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)


class TestRunBO:
    fn = BenchmarkFunction("griewank", 2)
    cfg = BOConfig(theta=0.1, acq_samples=200, acq_refine_steps=20, seed=3)

    def test_pure_random_design(self):
        trace = run_bo(self.fn.objective, self.fn.domain(), self.cfg, self.cfg.n_init)
        expected = self.fn.domain().from_unit(np.random.default_rng(3).random((10, 2)))
        np.testing.assert_allclose(trace.xs, expected)

    def test_improves_and_stays_in_bounds(self):
        space = self.fn.domain()
        trace = run_bo(self.fn.objective, space, self.cfg, 50)
        assert len(trace) == 50
        assert best_so_far(trace, 50) >= best_so_far(trace, 10)
        assert all(space.contains(r.x) for r in trace.records)
        assert np.all(np.isfinite(trace.overheads)) and np.all(trace.overheads >= 0)
        assert set(trace.stages) == {"bo"}

    def test_same_seed_same_trace(self):
        a = run_bo(self.fn.objective, self.fn.domain(), self.cfg, 20)
        b = run_bo(self.fn.objective, self.fn.domain(), self.cfg, 20)
        np.testing.assert_array_equal(a.f, b.f)

    def test_objective_failure_reports_iteration(self):
        def broken(x):
            raise ArithmeticError("boom")

        with pytest.raises(RuntimeError, match="iteration 1"):
            run_bo(broken, self.fn.domain(), self.cfg, 12)

    def test_too_few_iterations(self):
        with pytest.raises(ValueError):
            run_bo(self.fn.objective, self.fn.domain(), self.cfg, 5)


@pytest.mark.slow
def test_overhead_trends_upward():
    fn = BenchmarkFunction("rastrigin", 20)
    for seed in range(2):
        o = run_bo(fn.objective, fn.domain(), BOConfig(theta=0.1, seed=seed), 300).overheads
        assert np.polyfit(np.arange(1, 301), o, 1)[0] > 0
        assert o[250:300].mean() > 2 * o[50:100].mean()
