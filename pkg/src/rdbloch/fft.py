"""Iterative radix-2 FFT for power-of-two lengths.

Conventions match ``numpy.fft``: the forward transform carries no
normalization and the inverse divides by the length.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=64)
def _twiddles(n: int, sign: int) -> tuple[np.ndarray, ...]:
    # one twiddle column per butterfly stage, stage widths 1, 2, 4, ..., n/2
    out = []
    width = 1
    while width < n:
        tw = np.exp(sign * 1j * np.pi * np.arange(width) / width)[:, None]
        tw.setflags(write=False)
        out.append(tw)
        width *= 2
    return tuple(out)


def _transform(x: np.ndarray, sign: int) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if x.ndim != 1:
        raise ValueError("only one-dimensional input is supported")
    if not is_power_of_two(n):
        raise ValueError(f"length {n} is not a power of two")
    if n == 1:
        return x.copy()
    # column j of X holds the DFT of the strided subsequence x[j::X.shape[1]]
    X = x.reshape(2, n // 2)
    X = np.vstack([X[0] + X[1], X[0] - X[1]])
    for tw in _twiddles(n, sign)[1:]:
        half = X.shape[1] // 2
        even = X[:, :half]
        odd = tw * X[:, half:]
        X = np.vstack([even + odd, even - odd])
    return X.ravel()


def fft(x) -> np.ndarray:
    """Forward DFT, ``X_k = sum_j x_j exp(-2 pi i j k / n)``."""
    return _transform(x, -1)


def ifft(X) -> np.ndarray:
    """Inverse DFT, ``x_j = (1/n) sum_k X_k exp(2 pi i j k / n)``."""
    X = np.asarray(X)
    return _transform(X, +1) / X.shape[-1]


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order: 0, 1, ..., n/2 - 1, -n/2, ..., -1."""
    k = np.arange(n)
    k[k >= n // 2] -= n
    return k
