import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdbloch.core import (NormConvention, PeriodicFunction, constant, derivative, fluctuation, from_closed_form,
                          inner, mathieu_potential, max_value, mean, norm_sq, read_csv, to_csv)
from rdbloch.errors import GridError

TWO_PI = 2 * math.pi


def trig_poly(coeffs, period, n=64, mean_value=0.0):
    """Real trigonometric polynomial sum_k a_k cos(k kappa x) + b_k sin(k kappa x)."""
    kappa = TWO_PI / period
    a, b = coeffs

    def f(x):
        out = np.full_like(x, mean_value)
        for k, (ak, bk) in enumerate(zip(a, b), start=1):
            out = out + ak * np.cos(k * kappa * x) + bk * np.sin(k * kappa * x)
        return out
    return from_closed_form(f, period, n)


coeff_lists = st.lists(st.floats(-2, 2), min_size=1, max_size=8)
periods = st.floats(0.1, 20.0)


@pytest.mark.parametrize("n", [4, 12, 100])
def test_rejects_bad_sample_counts(n):
    with pytest.raises(GridError):
        PeriodicFunction(1.0, np.zeros(n))


def test_rejects_nonfinite():
    with pytest.raises(GridError):
        PeriodicFunction(1.0, [0.0] * 7 + [np.nan])
    with pytest.raises(GridError):
        PeriodicFunction(-1.0, np.zeros(8))


def test_samples_read_only_and_kappa():
    f = constant(1.0, 3.0, 8)
    with pytest.raises(ValueError):
        f.samples[0] = 2.0
    assert f.kappa == TWO_PI / 3.0


def test_zero_function():
    f = from_closed_form(lambda x: 0 * x, TWO_PI, 16)
    assert np.all(f.samples == 0)
    assert norm_sq(f) == 0


def test_single_mode_coefficients():
    f = from_closed_form(lambda x: np.cos(2 * x), TWO_PI, 16)
    c = f.coeff(np.arange(-7, 8))
    expect = np.zeros(15)
    expect[[7 - 2, 7 + 2]] = 0.5
    np.testing.assert_allclose(c, expect, atol=1e-15)


def test_mathieu_coefficients_and_stats():
    s = mathieu_potential(1.0, 0.5, 1.0, 64)
    np.testing.assert_allclose(s.coeff([0, 2, -2]), [-1, 0.25, 0.25], atol=1e-15)
    assert mean(s) == pytest.approx(-1.0, abs=1e-15)
    assert max_value(s) == pytest.approx(-0.5, abs=1e-12)
    d = fluctuation(s)
    np.testing.assert_allclose(d.samples, 0.5 * np.cos(2 * s.x), atol=1e-15)
    np.testing.assert_allclose(fluctuation(d).samples, d.samples, atol=1e-15)


def test_norm_examples():
    beta = 0.7
    f = from_closed_form(lambda x: beta * np.cos(2 * x), TWO_PI, 32)
    assert norm_sq(f, NormConvention.MEAN) == pytest.approx(beta ** 2 / 2, rel=1e-13)
    assert norm_sq(f, NormConvention.INTEGRAL) == pytest.approx(math.pi * beta ** 2, rel=1e-13)


def test_constant_stats():
    c = constant(-2.5, 1.0, 16)
    assert mean(c) == -2.5 and max_value(c) == -2.5
    assert np.all(fluctuation(c).samples == 0)
    assert np.all(derivative(c).samples == 0)


def test_off_grid_maximum():
    f = from_closed_form(lambda x: np.sin(x + 0.3), TWO_PI, 16)
    assert f.samples.max() < 1 - 1e-3
    assert max_value(f) == pytest.approx(1.0, abs=1e-9)


def test_derivative_of_sine():
    kappa = 3.0
    f = from_closed_form(lambda x: np.sin(kappa * x), TWO_PI / kappa, 32)
    df = derivative(f)
    np.testing.assert_allclose(df.samples, kappa * np.cos(kappa * f.x), atol=1e-12)
    assert norm_sq(df) / norm_sq(f) == pytest.approx(kappa ** 2, rel=1e-12)


def test_interpolant_evaluation():
    f = from_closed_form(lambda x: np.cos(3 * x) - 0.2 * np.sin(x), TWO_PI, 16)
    x = np.linspace(0, 7, 23)
    np.testing.assert_allclose(f(x), np.cos(3 * x) - 0.2 * np.sin(x), atol=1e-13)


def test_inner_is_conjugate_linear_mean():
    f = from_closed_form(lambda x: np.cos(x), TWO_PI, 16)
    g = from_closed_form(lambda x: np.cos(x) + 1, TWO_PI, 16)
    assert inner(f, g) == pytest.approx(0.5)
    assert inner(f, g, "INTEGRAL") == pytest.approx(math.pi)


def test_incompatible_grids():
    with pytest.raises(GridError):
        constant(1.0, 1.0, 8) + constant(1.0, 2.0, 8)


def test_csv_round_trip(tmp_path):
    s = mathieu_potential(0.3, 1.1, 2.0, 32)
    path = tmp_path / "s.csv"
    to_csv(s, path, {"note": "x"})
    back = read_csv(path)
    assert back.period == s.period
    np.testing.assert_array_equal(back.samples, s.samples)


def test_csv_period_fallback_and_errors():
    text = "x,value\n" + "".join(f"{j * 0.25},{j}\n" for j in range(8))
    f = read_csv(io.StringIO(text))
    assert f.period == pytest.approx(2.0)
    with pytest.raises(GridError):
        read_csv(io.StringIO("a,b\n0,1\n"))
    with pytest.raises(GridError):
        read_csv(io.StringIO("x,value\n0,1\n0.5,oops\n"))
    with pytest.raises(GridError):
        read_csv(io.StringIO("x,value\n" + "".join(f"{j * 0.25},{j}\n" for j in range(6))))


@given(coeff_lists, coeff_lists, periods)
def test_poincare(a, b, L):
    m = min(len(a), len(b))
    phi = trig_poly((a[:m], b[:m]), L)
    for conv in NormConvention:
        lhs = norm_sq(derivative(phi), conv)
        assert lhs >= phi.kappa ** 2 * norm_sq(phi, conv) - 1e-10 * max(1.0, lhs)


@given(coeff_lists, coeff_lists, st.floats(-3, 3), periods)
def test_cauchy_schwarz_and_convention_ratio(a, b, c, L):
    m = min(len(a), len(b))
    f = trig_poly((a[:m], b[:m]), L, mean_value=c)
    g = trig_poly((b[:m], a[:m]), L)
    for conv in NormConvention:
        assert inner(f, g, conv) ** 2 <= norm_sq(f, conv) * norm_sq(g, conv) * (1 + 1e-12) + 1e-300
    assert norm_sq(f, "INTEGRAL") == pytest.approx(L * norm_sq(f, "MEAN"), rel=1e-12, abs=1e-300)


@given(coeff_lists, coeff_lists, st.floats(-3, 3), periods)
def test_parseval_and_reality(a, b, c, L):
    m = min(len(a), len(b))
    f = trig_poly((a[:m], b[:m]), L, mean_value=c)
    k = np.arange(-f.n // 2, f.n // 2 + 1)
    ck = f.coeff(k)
    assert norm_sq(f, "INTEGRAL") == pytest.approx(L * np.sum(np.abs(ck) ** 2), rel=1e-12, abs=1e-14)
    np.testing.assert_allclose(ck, np.conj(ck[::-1]), atol=1e-12 * max(1.0, np.abs(ck).max()))
    assert abs(mean(fluctuation(f))) <= 1e-15 * max(1.0, abs(c))
