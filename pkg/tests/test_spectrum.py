import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdbloch.core import constant, from_closed_form, mathieu_potential
from rdbloch.errors import BrillouinZoneError, ConvergenceError, ResolutionError
from rdbloch.spectrum import assemble, band_structure, bands_to_csv, eigen_all, lambda00

TWO_PI = 2 * math.pi


def perturbative_lambda00(s):
    """Second-order oracle: -s_0 - sum_{k != 0} |s_k|^2 / (kappa k)^2, from numpy's FFT."""
    c = np.fft.fft(np.asarray(s.samples)) / s.n
    k = np.fft.fftfreq(s.n, 1.0 / s.n)
    nz = k != 0
    return -c[0].real - np.sum(np.abs(c[nz]) ** 2 / (s.kappa * k[nz]) ** 2)


def random_smooth(seed, period=TWO_PI, degree=4, amp=0.6, n=64):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=degree) * amp, rng.normal(size=degree) * amp
    m = rng.uniform(-1.5, 0.5)
    kappa = TWO_PI / period

    def f(x):
        return m + sum(a[j] * np.cos((j + 1) * kappa * x) + b[j] * np.sin((j + 1) * kappa * x)
                       for j in range(degree))
    return from_closed_form(f, period, n)


def test_free_operator_matrix():
    H = assemble(constant(0.0, TWO_PI, 64), 0.0, 8)
    np.testing.assert_array_equal(H.entries, np.diag(np.arange(-8, 9) ** 2.0))
    w = eigen_all(H)
    np.testing.assert_allclose(w[:5], [0, 1, 1, 4, 4], atol=1e-13)


def test_constant_shift_matrix():
    H = assemble(constant(0.7, 2.0, 32), 0.4, 6)
    kappa = math.pi
    np.testing.assert_allclose(H.entries, np.diag((0.4 + kappa * np.arange(-6, 7)) ** 2 - 0.7), atol=1e-14)


def test_cosine_couples_only_distance_two():
    beta = 0.8
    H = assemble(from_closed_form(lambda x: beta * np.cos(2 * x), TWO_PI, 64), 0.1, 6)
    off = H.entries - np.diag(np.diag(H.entries))
    i, j = np.nonzero(np.abs(off) > 1e-14)
    assert set(np.abs(i - j)) == {2}
    np.testing.assert_allclose(off[i, j], -beta / 2, atol=1e-14)
    np.testing.assert_allclose(H.entries, H.entries.conj().T, atol=1e-12)


def test_brillouin_zone_and_resolution_checks():
    s = mathieu_potential(1, 0.5, 1, 64)
    with pytest.raises(BrillouinZoneError):
        assemble(s, 0.6, 8)
    rough = from_closed_form(lambda x: np.abs(np.sin(x)), TWO_PI, 16)
    with pytest.raises(ResolutionError):
        assemble(rough, 0.0, 8)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_constant_lambda00(alpha):
    g = lambda00(constant(-alpha, TWO_PI, 32))
    assert g.value == alpha and g.increment == 0.0


@pytest.mark.parametrize("kappa", [1.0, TWO_PI, 20.0])
def test_mathieu_perturbation_oracle(kappa):
    s = mathieu_potential(kappa ** 2, 0.02 * kappa ** 2, kappa, 64)
    g = lambda00(s)
    assert g.increment < 1e-10
    # remaining error is fourth order in beta
    assert g.value == pytest.approx(perturbative_lambda00(s), abs=1e-8 * kappa ** 2)
    assert perturbative_lambda00(s) == pytest.approx(kappa ** 2 * (1 - 0.02 ** 2 / 8), rel=1e-13)


def test_scale_invariance():
    vals = [lambda00(mathieu_potential(0.4 * k * k, 1.3 * k * k, k, 64)).value / (k * k) for k in (1.0, 3.0, TWO_PI)]
    np.testing.assert_allclose(vals, vals[0], atol=1e-12)


def test_certificate_cap():
    with pytest.raises(ConvergenceError):
        lambda00(mathieu_potential(1.0, 40.0, 1.0, 64), M=4, m_cap=4)


@given(st.integers(0, 10 ** 6), st.floats(-3, 3))
def test_shift_covariance(seed, c):
    s = random_smooth(seed)
    assert lambda00(s + c, M=16).value == pytest.approx(lambda00(s, M=16).value - c, abs=1e-10)


@given(st.integers(0, 10 ** 6))
def test_band_ordering_minimum_and_parity(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=3)
    s = from_closed_form(lambda x: -0.5 + sum(a[j] * np.cos((j + 1) * x) for j in range(3)), TWO_PI, 64)
    bs = band_structure(s, n_bands=3, n_p=9, M=16)
    lam = lambda00(s, M=16).value
    assert np.all(np.diff(bs.bands, axis=1) >= -1e-12)
    assert bs.bands.min() >= lam - 1e-9
    val, p, n = bs.minimum()
    assert (p, n) == (0.0, 0) and val == pytest.approx(lam, abs=1e-9)
    np.testing.assert_allclose(bs.bands, bs.bands[::-1], atol=1e-9)


def test_random_smooth_minimum_is_lambda00():
    for seed in range(5):
        s = random_smooth(seed)
        bs = band_structure(s, n_bands=2, n_p=11, M=16)
        assert bs.bands.min() == pytest.approx(lambda00(s, M=16).value, abs=1e-9)


def test_free_bands():
    kappa = 2.0
    s = constant(-0.3, TWO_PI / kappa, 32)
    bs = band_structure(s, n_bands=4, n_p=7, M=8)
    for p, row in zip(bs.p_grid, bs.bands):
        expect = np.sort((p + kappa * np.arange(-8, 9)) ** 2 + 0.3)[:4]
        np.testing.assert_allclose(row, expect, atol=1e-12)
    np.testing.assert_allclose(bs.bands[:, 0], bs.p_grid ** 2 + 0.3, atol=1e-12)


def test_eigenvectors_normalized_and_residual():
    s = mathieu_potential(1, 0.9, 1, 64)
    H = assemble(s, 0.2, 12)
    w, v = eigen_all(H, vectors=True)
    np.testing.assert_allclose(np.linalg.norm(v, axis=0), 1.0, atol=1e-12)
    assert np.abs(H.entries @ v - v * w).max() < 1e-10


def test_band_grid_validation_and_csv():
    s = mathieu_potential(1, 0.5, 1, 64)
    with pytest.raises(ValueError):
        band_structure(s, n_p=4)
    bs = band_structure(s, n_bands=2, n_p=3, M=8)
    lines = bands_to_csv(bs, header_comments={"k": 1}).splitlines()
    assert lines[0] == "# k = 1" and lines[1] == "p,n,lambda" and len(lines) == 2 + 6
