import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hsvrkit import signals, spectral_dmd as dmd
from hsvrkit.errors import DegenerateData, InvalidEmbedding, NoOscillatoryContent


class TestHankel:
    def test_small_example(self):
        pair = dmd.build_hankel([1, 2, 3, 4, 5], 3)
        np.testing.assert_array_equal(pair.H, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])
        np.testing.assert_array_equal(pair.X, [[1, 2], [2, 3], [3, 4]])
        np.testing.assert_array_equal(pair.Y, [[2, 3], [3, 4], [4, 5]])

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.integers(5, 60), elements=st.floats(-10, 10)), st.data())
    def test_anti_diagonals(self, f, data):
        n = f.size
        M = data.draw(st.integers(n // 2 + 1, n - 2))
        pair = dmd.build_hankel(f, M)
        assert pair.H.shape == (M, n - M + 1)
        i, j = np.indices(pair.H.shape)
        np.testing.assert_array_equal(pair.H, f[i + j])
        np.testing.assert_array_equal(pair.X, pair.H[:, :-1])
        np.testing.assert_array_equal(pair.Y, pair.H[:, 1:])

    def test_geometric_sequence_shift(self):
        f = 1.3 ** np.arange(12)
        pair = dmd.build_hankel(f)
        np.testing.assert_allclose(pair.Y, 1.3 * pair.X, rtol=1e-14)

    @pytest.mark.parametrize("M", [2, 4, 5, 9])
    def test_rows_out_of_range(self, M):
        with pytest.raises(InvalidEmbedding):
            dmd.build_hankel(np.arange(10.0), M)


class TestRrr:
    def test_cosine(self):
        n = np.arange(200)
        pair = dmd.build_hankel(np.cos(2 * np.pi * 0.1 * n))
        spec = dmd.dmd_rrr(pair.X, pair.Y)
        assert spec.ritz_values.size == 2
        np.testing.assert_allclose(np.abs(spec.ritz_values), 1.0, atol=1e-10)
        np.testing.assert_allclose(sorted(np.angle(spec.ritz_values)), [-0.2 * np.pi, 0.2 * np.pi], atol=1e-10)
        assert np.all(spec.residuals <= 1e-8)

    def test_geometric_decay(self):
        pair = dmd.build_hankel(0.9 ** np.arange(60))
        spec = dmd.dmd_rrr(pair.X, pair.Y)
        assert spec.ritz_values.size == 1
        assert spec.ritz_values[0] == pytest.approx(0.9, abs=1e-12)
        assert spec.residuals[0] <= 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_linear_map_inclusion(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(5, 5))
        X = rng.normal(size=(5, 12))
        spec = dmd.dmd_rrr(X, A @ X)
        truth = np.linalg.eigvals(A)
        for lam in spec.ritz_values:
            assert np.min(np.abs(truth - lam)) <= 1e-6
        assert np.all(spec.residuals <= 1e-8)

    def test_unit_modes(self):
        pair = dmd.build_hankel(np.sin(0.3 * np.arange(80)) + 0.5 * np.sin(1.1 * np.arange(80)))
        spec = dmd.dmd_rrr(pair.X, pair.Y)
        np.testing.assert_allclose(np.linalg.norm(spec.modes, axis=0), 1.0, rtol=1e-12)

    def test_zero_signal(self):
        pair = dmd.build_hankel(np.zeros(10))
        with pytest.raises(DegenerateData):
            dmd.dmd_rrr(pair.X, pair.Y)


def _spectrum_with(modes):
    k = modes.shape[1]
    return dmd.DmdSpectrum(ritz_values=np.ones(k, complex), residuals=np.zeros(k), modes=modes)


class TestEnergies:
    def test_self_projection(self):
        Y = np.array([[3.0, 0.0], [4.0, 1.0]])
        e, T = dmd.mode_energies(_spectrum_with((Y[:, :1] / 5.0).astype(complex)), Y)
        assert e[0] == pytest.approx(5.0) and T == pytest.approx(5.0)

    def test_orthogonal_mode(self):
        Y = np.array([[1.0, 0.0], [0.0, 1.0]])
        e, _ = dmd.mode_energies(_spectrum_with(np.array([[0.0], [1.0]], complex)), Y)
        assert e[0] == 0.0

    def test_orthonormal_pair(self):
        Y = np.array([[2.0, 0.0], [-1.0, 0.0], [0.0, 0.0]])
        q = np.array([[1, 1], [1, -1], [0, 0]], complex) / np.sqrt(2)
        e, T = dmd.mode_energies(_spectrum_with(q), Y)
        assert T == pytest.approx(np.sqrt(5.0), rel=1e-14)
        assert T**2 == pytest.approx(np.sum(e**2), rel=1e-9)

    def test_power_identity_on_signal(self):
        spec = dmd.dmd_spectrum(signals.generate_named("four-sines").y[::2])
        assert spec.total_power**2 == pytest.approx(np.sum(spec.energies**2), rel=1e-9)
        assert np.all(np.abs(spec.frequencies) <= 0.5)
        assert np.all(spec.residuals >= 0)


class TestMixtures:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(100, 400), st.integers(0, 2**31))
    def test_recovers_frequencies(self, k, n, seed):
        rng = np.random.default_rng(seed)
        while True:
            nu = np.sort(rng.uniform(0.02, 0.45, k))
            if k == 1 or np.min(np.diff(nu)) > 0.02:
                break
        t = np.arange(n)
        f = sum(rng.uniform(0.5, 2.0) * np.cos(2 * np.pi * v * t + rng.uniform(0, 2 * np.pi)) for v in nu)
        pair = dmd.build_hankel(f)
        spec = dmd.dmd_rrr(pair.X, pair.Y)
        assert spec.ritz_values.size == 2 * k
        got = np.sort(np.abs(dmd.unit_circle_frequencies(spec.ritz_values)))
        np.testing.assert_allclose(got, np.repeat(nu, 2), atol=1e-6)
        assert np.all(spec.residuals <= 1e-8)


class TestDmdScales:
    def test_ten_hertz_sine(self):
        train, _ = signals.split_alternating(signals.generate_named("sin-20pi-x"))
        est = dmd.dmd_scales(train.y, train.dx)
        assert len(est) == 1
        assert est.scales[0] == pytest.approx(1 / 60, rel=1e-3)

    def test_exponential_has_no_oscillation(self):
        train, _ = signals.split_alternating(signals.generate_named("e-x"))
        with pytest.raises(NoOscillatoryContent):
            dmd.dmd_scales(train.y, train.dx)

    def test_lorenz_x(self):
        train, _ = signals.lorenz_train_test()
        assert len(dmd.dmd_scales(train[0].y, train[0].dx)) == 2

    @pytest.mark.parametrize("slug", ["four-sines", "sin-40pi-x-cos-10pi-x-plus-3sin-20x-sin-40x", "sin-2pi-x4-plus-x"])
    def test_schedule_invariants(self, slug):
        train, _ = signals.split_alternating(signals.generate_named(slug))
        est = dmd.dmd_scales(train.y, train.dx)
        s = np.array(est.scales)
        assert np.all(s[:-1] / s[1:] >= est.decay)
        spec = dmd.dmd_spectrum(train.y)
        support = dmd.dmd_support(spec, train.y.size)
        for sigma in s:
            assert np.min(np.abs(sigma - train.dx / (6 * support)) / sigma) <= 1e-12

    @pytest.mark.parametrize("kw", [dict(tol=0.0), dict(eta=1.0), dict(eta=0.0)])
    def test_bad_parameters(self, kw):
        with pytest.raises(ValueError):
            dmd.dmd_scales(np.sin(np.arange(20.0)), 0.1, **kw)

    def test_spectrum_json_keys(self):
        spec = dmd.dmd_spectrum(np.sin(0.4 * np.arange(50)))
        assert set(spec.to_dict()) == {"ritz_re", "ritz_im", "residual", "energy", "frequency"}
