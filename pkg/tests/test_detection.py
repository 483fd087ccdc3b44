import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linespec.detection import (
    build_hankel,
    decimation_stride,
    detect_count_at_s,
    detect_count_sweep,
    detect_entry,
    effective_omega,
    min_singular_lower_bound,
    satisfies_guarantee,
    separation_threshold,
    singular_spectrum,
)
from linespec.errors import SupportsOutsideInterval, TooFewSamples
from linespec.measure import (
    DiscreteMeasure,
    IntervalSpec,
    Measurement,
    SamplingGrid,
    disk_noise,
    fourier_samples,
    synthesize_measurement,
)
from linespec.svd import jacobi_svd
from linespec.vandermonde import vandermonde_matrix, zeta


def noiseless(mu, omega, m, sigma=0.0):
    grid = SamplingGrid(omega, m)
    return Measurement(fourier_samples(mu, grid), grid, sigma)


def random_instance(rng, n, omega=1.0):
    half = IntervalSpec(n, omega).half_width
    y = np.sort(rng.uniform(-half, half, n))
    return DiscreteMeasure(y, np.exp(2j * math.pi * rng.random(n)) * rng.uniform(1, 2, n))


class TestStride:
    def test_examples(self):
        assert decimation_stride(20, 4) == 2
        assert decimation_stride(9, 4) == 1
        assert decimation_stride(21, 5) == 2

    @given(st.integers(1, 30), st.integers(0, 200))
    def test_indices_valid(self, s, extra):
        m = 2 * s + 1 + extra
        r = decimation_stride(m, s)
        assert r >= 1 and 1 + 2 * s * r <= m < 1 + 2 * s * (r + 1)

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            decimation_stride(8, 4)


class TestHankel:
    def test_indices_m20_s4(self):
        h = build_hankel(noiseless(DiscreteMeasure([0.0], [1]), 1.0, 20), 4)
        assert h.source_indices.tolist() == [0, 2, 4, 6, 8, 10, 12, 14, 16]

    def test_exact_division_nodes(self):
        grid = SamplingGrid(1.0, 21)
        h = build_hankel(Measurement(grid.frequencies.astype(complex), grid, 0.0), 5)
        z = np.concatenate([h.entries[0], h.entries[1:, -1]]).real
        assert np.allclose(z, -1 + np.arange(11) / 5, atol=1e-15)
        assert h.source_indices[-1] == 20

    def test_all_ones(self):
        h = build_hankel(noiseless(DiscreteMeasure([0.0], [1]), 1.0, 20), 4)
        assert np.array_equal(h.entries, np.ones((5, 5)))

    def test_hankel_structure_exact(self, rng):
        y = synthesize_measurement(random_instance(rng, 3), SamplingGrid(1.0, 30), 1e-3, seed=1)
        e = build_hankel(y, 6).entries
        for i in range(7):
            for j in range(7):
                assert e[i, j] == e[0, i + j] if i + j <= 6 else e[i, j] == e[i + j - 6, 6]

    def test_vandermonde_factorization(self, rng):
        omega, s, m = 1.0, 5, 21
        mu = random_instance(rng, 3, omega)
        h = build_hankel(noiseless(mu, omega, m), s).entries
        d = vandermonde_matrix(s, np.exp(1j * mu.supports * omega / s))
        a = np.diag(np.exp(-1j * mu.supports * omega) * mu.amplitudes)
        assert np.allclose(h, d @ a @ d.T, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_noiseless_rank(self, rng, n):
        mu = DiscreteMeasure(np.linspace(-1, 1, n) if n > 1 else [0.2], np.ones(n))
        for s in range(n, 8):
            assert detect_count_at_s(noiseless(mu, 3.0, 2 * s + 1), s) == n


class TestSpectrum:
    def test_matches_eigenvalues(self, rng):
        for _ in range(10):
            z = rng.normal(size=11) + 1j * rng.normal(size=11)
            y = Measurement(z, SamplingGrid(1.0, 11), 0.0)
            h = build_hankel(y, 5)
            vals = singular_spectrum(h).values
            ev = np.sqrt(np.clip(np.linalg.eigvalsh(h.entries.conj().T @ h.entries), 0, None))[::-1]
            assert np.allclose(vals, ev, rtol=0, atol=1e-9 * vals[0])

    def test_phase_invariance(self, rng):
        mu = random_instance(rng, 3)
        a = singular_spectrum(build_hankel(noiseless(mu, 1.0, 25), 6)).values
        b = singular_spectrum(build_hankel(noiseless(mu.scaled(np.exp(1.3j)), 1.0, 25), 6)).values
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * a[0])


class TestDetect:
    def test_single_spike_declared_noise(self):
        y = noiseless(DiscreteMeasure([0.0], [1]), 1.0, 11, sigma=1e-9)
        for s in range(1, 6):
            assert detect_count_at_s(y, s) == 1

    @pytest.mark.parametrize("m", [3, 4, 10, 31])
    def test_single_spike_sweep(self, m):
        assert detect_count_sweep(noiseless(DiscreteMeasure([0.3], [2j]), 1.0, m)).n_detected == 1

    def test_pure_noise(self, rng):
        grid = SamplingGrid(1.0, 21)
        for seed in range(20):
            w = disk_noise(grid.m, 1e-3, np.random.default_rng(seed))
            y = Measurement(w, grid, 1e-3)
            assert detect_count_sweep(y).n_detected == 0

    def test_threshold_is_strict(self):
        # put the threshold exactly on the top singular value
        y = noiseless(DiscreteMeasure([0.0], [1]), 1.0, 3)
        top = singular_spectrum(build_hankel(y, 1)).values[0]
        assert detect_count_at_s(y.with_sigma(top / 2), 1) == 0
        assert detect_count_at_s(y.with_sigma(np.nextafter(top / 2, 0)), 1) == 1

    def test_saturation_flagged(self, rng):
        z = rng.normal(size=9) + 1j * rng.normal(size=9)
        y = Measurement(z, SamplingGrid(1.0, 9), 1e-12)
        entry = detect_entry(y, 4)
        assert entry.n == 5 and entry.saturated
        assert detect_count_sweep(y).saturated

    def test_sweep_trace(self):
        y = synthesize_measurement(DiscreteMeasure([-0.5, 0.0, 0.5, 1.0], [1, -1, -1, 1]),
                                   SamplingGrid(1.0, 20), 1e-7, seed=0)
        res = detect_count_sweep(y)
        assert [e.s for e in res.per_s] == list(range(1, 10))
        assert res.n_detected == max(e.n for e in res.per_s) == 4
        d = res.to_dict()
        assert set(d) == {"n_detected", "per_s"}
        assert set(d["per_s"][0]) == {"s", "singular_values", "threshold", "n"}
        assert detect_count_sweep(y, workers=4) .n_detected == 4

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            detect_count_sweep(noiseless(DiscreteMeasure([0.0], [1]), 1.0, 2))


class TestBounds:
    def test_lower_bound_example(self):
        mu = DiscreteMeasure([-math.pi / 2, math.pi / 2], [1, 1])
        assert min_singular_lower_bound(mu, 1.0, 2) == pytest.approx(1 / 8, rel=1e-14)
        assert min_singular_lower_bound(mu.scaled(2), 1.0, 2) == pytest.approx(1 / 4, rel=1e-14)

    def test_lower_bound_outside(self):
        with pytest.raises(SupportsOutsideInterval):
            min_singular_lower_bound(DiscreteMeasure([0.0, 2.0], [1, 1]), 1.0, 2)

    @pytest.mark.parametrize("n", [2, 3])
    def test_noiseless_sigma_n_above_bound(self, rng, n):
        for _ in range(25):
            mu = random_instance(rng, n)
            m = 2 * n + 1
            sv = jacobi_svd(build_hankel(noiseless(mu, 1.0, m), n).entries, compute_uv=False)
            assert sv[n - 1] >= min_singular_lower_bound(mu, 1.0, n) * (1 - 1e-9)

    def test_threshold_formula(self):
        n, s, omega, sigma, m_min = 3, 3, 2.0, 1e-6, 1.5
        want = (math.pi * s / omega) * (2 * n * (s + 1) * sigma / (zeta(n) ** 2 * m_min)) ** (1 / (2 * n - 2))
        assert separation_threshold(n, s, omega, sigma, m_min) == pytest.approx(want, rel=1e-15)

    def test_effective_omega(self):
        assert effective_omega(21, 1.0, 5) == pytest.approx(1.0, rel=1e-15)
        assert effective_omega(20, 1.0, 4) == pytest.approx(16 / 19, rel=1e-15)

    def test_guarantee_predicate(self):
        mu = DiscreteMeasure([-1.0, 1.0], [1, 1])
        assert satisfies_guarantee(mu, 5, 1.0, 1e-6)
        assert not satisfies_guarantee(mu, 5, 1.0, 0.5)


class TestWeyl:
    @given(st.integers(0, 10_000), st.integers(1, 3), st.floats(1e-8, 1e-2))
    def test_perturbation_bound(self, seed, n, sigma):
        rng = np.random.default_rng(seed)
        mu = random_instance(rng, n)
        grid = SamplingGrid(1.0, 4 * n + 4)
        clean = fourier_samples(mu, grid)
        noisy = Measurement(clean + disk_noise(grid.m, sigma, rng), grid, sigma)
        for s in range(1, (grid.m - 1) // 2 + 1):
            a = jacobi_svd(build_hankel(Measurement(clean, grid, 0.0), s).entries, compute_uv=False)
            b = jacobi_svd(build_hankel(noisy, s).entries, compute_uv=False)
            assert np.max(np.abs(a - b)) <= (s + 1) * sigma + 1e-12 * b[0]
            if s >= n:
                assert np.all(b[n:] <= (s + 1) * sigma)
            assert detect_count_at_s(noisy, s) <= n
