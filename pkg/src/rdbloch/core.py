"""L-periodic real functions on a uniform power-of-two grid.

A :class:`PeriodicFunction` is identified with its trigonometric
interpolant, so Fourier coefficients beyond the Nyquist index are exactly
zero and the Nyquist coefficient is split evenly between ``+N/2`` and
``-N/2``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import GridError
from .fft import fft, ifft, is_power_of_two, wavenumbers

DEFAULT_N = 256
MIN_N = 8


class NormConvention(str, Enum):
    """``INTEGRAL``: ||f||^2 = int_0^L |f|^2 dx.  ``MEAN``: the same divided by L."""

    INTEGRAL = "INTEGRAL"
    MEAN = "MEAN"

    @classmethod
    def parse(cls, value) -> "NormConvention":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    period: float
    samples: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.period) and self.period > 0):
            raise GridError(f"period must be positive and finite, got {self.period!r}")
        samples = np.array(self.samples, dtype=float).ravel()
        n = samples.size
        if not is_power_of_two(n) or n < MIN_N:
            raise GridError(f"sample count must be a power of two >= {MIN_N}, got {n}")
        if not np.all(np.isfinite(samples)):
            raise GridError("samples contain non-finite values")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def kappa(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * (self.period / self.n)

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Raw DFT coefficients divided by N, in FFT order."""
        c = fft(self.samples) / self.n
        c.setflags(write=False)
        return c

    def coeff(self, k) -> np.ndarray:
        """Interpolant coefficients for integer wavenumbers ``k`` (any range)."""
        k = np.asarray(k, dtype=int)
        n = self.n
        out = np.zeros(k.shape, dtype=complex)
        inside = np.abs(k) < n // 2
        out[inside] = self.coeffs[k[inside] % n]
        nyq = np.abs(k) == n // 2
        out[nyq] = 0.5 * self.coeffs[n // 2].real
        return out

    def __call__(self, x):
        """Evaluate the trigonometric interpolant at arbitrary points."""
        x = np.asarray(x, dtype=float)
        half = self.n // 2
        k = np.arange(-half + 1, half)
        vals = np.exp(1j * self.kappa * np.multiply.outer(x, k)) @ self.coeff(k)
        # Nyquist term is a pure cosine
        return vals.real + self.coeffs[half].real * np.cos(half * self.kappa * x)

    def with_samples(self, samples) -> "PeriodicFunction":
        return PeriodicFunction(self.period, samples)

    def __add__(self, other):
        if isinstance(other, PeriodicFunction):
            _check_compatible(self, other)
            return self.with_samples(self.samples + other.samples)
        return self.with_samples(self.samples + float(other))

    __radd__ = __add__

    def __neg__(self):
        return self.with_samples(-self.samples)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PeriodicFunction):
            _check_compatible(self, other)
            return self.with_samples(self.samples * other.samples)
        return self.with_samples(self.samples * float(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"PeriodicFunction(period={self.period!r}, n={self.n})"


def _check_compatible(f: PeriodicFunction, g: PeriodicFunction) -> None:
    if f.n != g.n or f.period != g.period:
        raise GridError("functions live on different grids")


def from_closed_form(f: Callable, period: float, n: int = DEFAULT_N) -> PeriodicFunction:
    """Sample ``f`` at ``x_j = j L / N``."""
    if not is_power_of_two(n) or n < MIN_N:
        raise GridError(f"sample count must be a power of two >= {MIN_N}, got {n}")
    x = np.arange(n) * (period / n)
    try:
        vals = np.asarray(f(x), dtype=float)
    except TypeError:
        vals = np.array([f(xi) for xi in x], dtype=float)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape).copy()
    return PeriodicFunction(period, vals)


def constant(value: float, period: float, n: int = DEFAULT_N) -> PeriodicFunction:
    return PeriodicFunction(period, np.full(n, float(value)))


def mathieu_potential(alpha: float, beta: float, kappa: float, n: int = DEFAULT_N) -> PeriodicFunction:
    """Sampled ``s(x) = -alpha + beta cos(2 kappa x)`` on one period ``2 pi / kappa``."""
    return from_closed_form(lambda x: -alpha + beta * np.cos(2.0 * kappa * x), 2.0 * math.pi / kappa, n)


def mean(s: PeriodicFunction) -> float:
    return float(np.mean(s.samples))


def fluctuation(s: PeriodicFunction) -> PeriodicFunction:
    return s.with_samples(s.samples - np.mean(s.samples))


def inner(f: PeriodicFunction, g: PeriodicFunction, conv=NormConvention.MEAN) -> float:
    """<f, g> for real functions; exact for products resolved by the grid."""
    _check_compatible(f, g)
    val = float(np.mean(f.samples * g.samples))
    if NormConvention.parse(conv) is NormConvention.INTEGRAL:
        val *= f.period
    return val


def norm_sq(f: PeriodicFunction, conv=NormConvention.MEAN) -> float:
    return inner(f, f, conv)


def derivative(f: PeriodicFunction) -> PeriodicFunction:
    k = wavenumbers(f.n).astype(float)
    k[f.n // 2] = 0.0
    return f.with_samples(ifft(1j * f.kappa * k * f.coeffs * f.n).real)


def max_value(s: PeriodicFunction, candidates: int = 3, xtol: float = 1e-10) -> float:
    """Continuum maximum of the interpolant.

    The best sample local maxima are polished with a bounded Brent search
    on the interval of one grid spacing either side.
    """
    y = s.samples
    best = float(y.max())
    if y.max() - y.min() <= 1e-14 * max(1.0, abs(best)):
        return best
    is_peak = (y >= np.roll(y, 1)) & (y >= np.roll(y, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(y[peaks])[::-1][:candidates]]
    dx = s.period / s.n
    for j in peaks:
        x0 = j * dx
        res = minimize_scalar(lambda x: -float(s(x)), bounds=(x0 - dx, x0 + dx),
                              method="bounded", options={"xatol": xtol})
        best = max(best, -float(res.fun))
    return best


def to_csv(f: PeriodicFunction, target=None, header_comments: dict | None = None) -> str:
    """Write ``x,value`` rows at 17 significant digits; returns the text."""
    buf = io.StringIO()
    buf.write(f"# period = {f.period!r}\n")
    for key, val in (header_comments or {}).items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "value"])
    for xi, vi in zip(f.x, f.samples):
        w.writerow([f"{xi:.17g}", f"{vi:.17g}"])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text


def read_csv(source, period: float | None = None) -> PeriodicFunction:
    """Read ``x,value`` samples; ``period`` falls back to the header comment, then to N dx."""
    text = Path(source).read_text() if not isinstance(source, io.StringIO) else source.getvalue()
    header_period = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            if key.strip() == "period":
                header_period = float(val)
            continue
        rows.append(line)
    if not rows or [c.strip() for c in rows[0].split(",")] != ["x", "value"]:
        raise GridError("expected header 'x,value'")
    try:
        data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise GridError(f"malformed CSV row: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 2:
        raise GridError("expected two columns per row")
    x, vals = data[:, 0], data[:, 1]
    if period is None:
        period = header_period
    if period is None:
        if x.size < 2:
            raise GridError("cannot infer period from fewer than two samples")
        period = x.size * (x[1] - x[0])
    if not np.allclose(x, np.arange(x.size) * (period / x.size), rtol=0, atol=1e-9 * period):
        raise GridError("x column is not the uniform grid j L / N")
    return PeriodicFunction(period, vals)
