import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hsvrkit import numerics, svr
from hsvrkit.errors import InvalidTrainingSet


def gram(x, gamma):
    d = x[:, None] - x[None, :]
    return np.exp(-gamma * d * d)


class TestKernel:
    def test_self_similarity(self):
        assert svr.gaussian_kernel(0.3, 0.3, 5.0) == 1.0

    def test_known_value(self):
        assert svr.gaussian_kernel(0.0, 1.0, 1.0) == pytest.approx(np.exp(-1.0), rel=1e-15)

    def test_symmetric_matrix(self):
        x = np.linspace(0, 1, 7)
        K = svr.kernel_matrix(x, x, 3.0)
        np.testing.assert_allclose(K, K.T, atol=0)
        np.testing.assert_allclose(K, gram(x, 3.0), atol=1e-15)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(C=0.0), dict(epsilon=-1.0), dict(gamma=0.0), dict(kkt_tol=0.0)])
    def test_rejects_invalid(self, kw):
        base = dict(C=1.0, epsilon=0.1, gamma=1.0)
        base.update(kw)
        with pytest.raises(ValueError):
            svr.SvrConfig(**base)


class TestFit:
    def test_constant_target_has_no_support(self):
        x = np.linspace(0, 1, 5)
        m = svr.fit(x, np.full(5, 0.25), svr.SvrConfig(C=1.0, epsilon=0.01, gamma=1.0))
        assert m.n_support == 0
        assert m.bias == pytest.approx(0.25, abs=1e-12)
        np.testing.assert_allclose(svr.predict(m, [0.1, 3.0]), 0.25, atol=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_enumeration_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        x = np.sort(rng.uniform(0, 2, n))
        y = rng.uniform(-1, 1, n)
        C, eps, gamma = float(rng.uniform(0.2, 3)), float(rng.uniform(0.0, 0.2)), float(rng.uniform(0.5, 5))
        m = svr.fit(x, y, svr.SvrConfig(C=C, epsilon=eps, gamma=gamma, kkt_tol=1e-10))
        ap, am = numerics.qp_oracle_svr(gram(x, gamma), y, C, eps)
        np.testing.assert_allclose(m.train_beta, ap - am, atol=1e-6)
        assert m.converged

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 40), st.floats(0.05, 5.0), st.floats(0.0, 0.3), st.integers(0, 10_000))
    def test_feasible_and_kkt(self, n, C, eps, seed):
        rng = np.random.default_rng(seed)
        x = np.sort(rng.uniform(0, 1, n))
        x += np.arange(n) * 1e-3  # keep points distinct
        y = rng.normal(size=n)
        tol = 1e-3
        m = svr.fit(x, y, svr.SvrConfig(C=C, epsilon=eps, gamma=20.0, kkt_tol=tol))
        assert m.converged
        assert abs(m.train_beta.sum()) <= 1e-9 * max(1.0, C) * n
        assert np.all(np.abs(m.train_beta) <= C * (1 + 1e-12))
        assert svr.kkt_violations(m, x, y, kkt_tol=2 * tol).size == 0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        x = np.sort(rng.uniform(0, 1, 30))
        y = np.sin(6 * x) + 0.1 * rng.normal(size=30)
        cfg = svr.SvrConfig(C=2.0, epsilon=0.02, gamma=30.0, kkt_tol=1e-9)
        a = svr.fit(x, y, cfg)
        p = rng.permutation(30)
        b = svr.fit(x[p], y[p], cfg)
        q = np.linspace(0, 1, 101)
        np.testing.assert_allclose(svr.predict(a, q), svr.predict(b, q), atol=1e-6)

    def test_single_sine_scale(self):
        x = np.linspace(0, 2, 1001)
        y = np.sin(2 * np.pi * x)
        sigma = 1 / 6
        m = svr.fit(x, y, svr.SvrConfig(C=10.0, epsilon=0.02, gamma=1 / sigma**2))
        assert np.max(np.abs(svr.predict(m, x) - y)) <= 0.03

    def test_matches_libsvm_when_available(self):
        sk = pytest.importorskip("sklearn.svm")
        x = np.linspace(0, 2, 201)
        y = np.sin(2 * np.pi * x) + 0.3 * np.cos(9 * x)
        gamma, C, eps = 30.0, 5.0, 0.02
        m = svr.fit(x, y, svr.SvrConfig(C=C, epsilon=eps, gamma=gamma, kkt_tol=1e-9))
        ref = sk.SVR(kernel="rbf", gamma=gamma, C=C, epsilon=eps, tol=1e-9, shrinking=False).fit(x[:, None], y)
        q = np.linspace(0, 2, 777)
        np.testing.assert_allclose(svr.predict(m, q), ref.predict(q[:, None]), atol=1e-5)

    def test_iteration_budget_reported(self):
        x = np.linspace(0, 1, 50)
        y = np.sin(20 * x)
        m = svr.fit(x, y, svr.SvrConfig(C=100.0, epsilon=0.001, gamma=100.0, max_passes=1))
        assert not m.converged

    @pytest.mark.parametrize("x,y", [([0.0, 1.0], [1.0]), ([], []), ([0.0, 1.0], [1.0, np.nan])])
    def test_rejects_bad_training_set(self, x, y):
        with pytest.raises(InvalidTrainingSet):
            svr.fit(x, y, svr.SvrConfig(C=1.0, epsilon=0.1, gamma=1.0))


class TestPredict:
    def test_two_term_expansion(self):
        m = svr.SvrModel(support_x=np.array([[0.0], [1.0]]), beta=np.array([1.0, -1.0]),
                         bias=0.0, gamma=1.0)
        assert svr.predict(m, [0.0])[0] == pytest.approx(1 - np.exp(-1.0), rel=1e-14)
        assert svr.predict(m, [0.5])[0] == pytest.approx(0.0, abs=1e-15)

    def test_empty_model_returns_bias(self):
        m = svr.SvrModel(support_x=np.zeros((0, 1)), beta=np.zeros(0), bias=-0.7, gamma=1.0)
        np.testing.assert_array_equal(svr.predict(m, [0.0, 5.0]), [-0.7, -0.7])

    def test_json_round_trip(self):
        x = np.linspace(0, 1, 40)
        m = svr.fit(x, np.cos(7 * x), svr.SvrConfig(C=1.0, epsilon=0.01, gamma=50.0))
        back = svr.SvrModel.from_json(m.to_json())
        q = np.linspace(-0.2, 1.2, 91)
        np.testing.assert_array_equal(svr.predict(back, q), svr.predict(m, q))
