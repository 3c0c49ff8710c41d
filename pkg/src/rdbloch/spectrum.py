"""Fourier-Galerkin Bloch operator and its spectrum.

Substituting ``u = sum_m c_m exp(i kappa m x)`` into the Bloch-reduced
eigenproblem ``-lam u = (s - p^2 + 2ip d/dx + d^2/dx^2) u`` gives the
Hermitian matrix problem ``H c = lam c`` with

    H_mn = (p + kappa m)^2 delta_mn - s_hat[m - n].
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from .core import PeriodicFunction
from .eigen import eigh
from .errors import BrillouinZoneError, ConvergenceError, ResolutionError
from .parallel import pmap

DEFAULT_M = 64
M_CAP = 1024
CONVERGENCE_TOL = 1e-10
MIN_M = 4


@dataclass(frozen=True)
class BlochMatrix:
    p: float
    M: int
    kappa: float
    entries: np.ndarray

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    @property
    def dim(self) -> int:
        return 2 * self.M + 1


@dataclass(frozen=True)
class GroundState:
    """Lowest p = 0 eigenvalue with its truncation certificate."""

    value: float
    M: int
    increment: float
    vector: np.ndarray | None = None

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)


@dataclass(frozen=True)
class BandStructure:
    kappa: float
    p_grid: np.ndarray
    bands: np.ndarray  # shape (n_p, n_bands), ascending along axis 1
    truncation: np.ndarray  # converged M per column
    eigvecs: tuple | None = None

    @property
    def n_bands(self) -> int:
        return self.bands.shape[1]

    def minimum(self) -> tuple[float, float, int]:
        """(value, p, n) of the smallest computed eigenvalue."""
        i, n = np.unravel_index(np.argmin(self.bands), self.bands.shape)
        return float(self.bands[i, n]), float(self.p_grid[i]), int(n)


def _check_resolution(s: PeriodicFunction, M: int) -> None:
    half = s.n // 2
    if 2 * M < half:
        return
    # ŝ_k beyond N/2 is taken as zero, which is only honest if s is resolved
    k = np.arange(s.n // 4, half + 1)
    tail = np.abs(s.coeff(k)).max()
    scale = max(np.abs(s.coeffs).max(), 1e-300)
    if tail > 1e-10 * scale:
        raise ResolutionError(
            f"truncation M={M} needs Fourier modes up to {2 * M} but s (N={s.n}) "
            f"is not band-limited: tail/peak = {tail / scale:.2e}")


def assemble(s: PeriodicFunction, p: float, M: int = DEFAULT_M) -> BlochMatrix:
    kappa = s.kappa
    if abs(p) > 0.5 * kappa * (1 + 1e-12):
        raise BrillouinZoneError(f"p={p} outside [-kappa/2, kappa/2] with kappa={kappa}")
    if M < MIN_M:
        raise ValueError(f"truncation M must be >= {MIN_M}")
    _check_resolution(s, M)
    m = np.arange(-M, M + 1)
    shat = s.coeff(np.arange(-2 * M, 2 * M + 1))
    # imaginary parts at FFT roundoff level (even s) would force the
    # doubled complex eigensolve for nothing
    noise = 64 * np.finfo(float).eps * max(np.abs(s.coeffs).max(), 1e-300)
    shat.imag[np.abs(shat.imag) <= noise] = 0.0
    # S[i, j] = ŝ_{m_i - m_j}; index of m_i - m_j in shat is (i - j) + 2M
    idx = (m[:, None] - m[None, :]) + 2 * M
    entries = -shat[idx]
    entries[np.diag_indices_from(entries)] += (p + kappa * m) ** 2
    entries.setflags(write=False)
    return BlochMatrix(p=float(p), M=M, kappa=kappa, entries=entries)


def eigen_all(H: BlochMatrix | np.ndarray, vectors: bool = False):
    """Full ascending spectrum of a Bloch matrix (optionally unit-norm eigenvectors)."""
    mat = H.entries if isinstance(H, BlochMatrix) else np.asarray(H)
    return eigh(mat, vectors=vectors)


def lambda00(s: PeriodicFunction, M: int = DEFAULT_M, m_cap: int = M_CAP,
             tol: float = CONVERGENCE_TOL, vectors: bool = False) -> GroundState:
    """Smallest p = 0 eigenvalue, doubling M until successive values agree to ``tol``.

    Constant s is answered exactly (lambda00 = -s, constant eigenvector).
    """
    if np.ptp(s.samples) == 0.0:
        vec = None
        if vectors:
            vec = np.zeros(2 * M + 1, dtype=complex)
            vec[M] = 1.0
        return GroundState(-float(s.samples[0]), M, 0.0, vec)
    prev = None
    while True:
        out = eigen_all(assemble(s, 0.0, M), vectors=vectors)
        vals, vecs = out if vectors else (out, None)
        val = float(vals[0])
        if prev is not None:
            inc = abs(val - prev)
            if inc < tol:
                vec = vecs[:, 0] if vectors else None
                return GroundState(val, M, inc, vec)
            if 2 * M > m_cap:
                raise ConvergenceError(
                    f"lambda00 not converged at M={M}: increment {inc:.3e} >= {tol:.1e}")
        prev = val
        M *= 2


def _band_column(p: float, s: PeriodicFunction, n_bands: int, M: int, m_cap: int,
                 tol: float, vectors: bool):
    prev = None
    while True:
        if 2 * M + 1 < n_bands:
            M *= 2
            continue
        out = eigen_all(assemble(s, p, M), vectors=vectors)
        vals, vecs = out if vectors else (out, None)
        cur = vals[:n_bands]
        if prev is not None and np.abs(cur - prev).max() < tol:
            return cur, M, (vecs[:, :n_bands] if vectors else None)
        if prev is not None and 2 * M > m_cap:
            raise ConvergenceError(f"band column p={p} not converged at M={M}")
        prev = cur
        M *= 2


def band_structure(s: PeriodicFunction, n_bands: int = 4, n_p: int = 21, M: int = DEFAULT_M,
                   m_cap: int = M_CAP, tol: float = CONVERGENCE_TOL, vectors: bool = False,
                   jobs: int | None = 1) -> BandStructure:
    if n_bands < 1:
        raise ValueError("n_bands must be >= 1")
    if n_p < 3 or n_p % 2 == 0:
        raise ValueError("n_p must be odd and >= 3 so that p = 0 is sampled")
    kappa = s.kappa
    p_grid = np.linspace(-0.5 * kappa, 0.5 * kappa, n_p)
    p_grid[n_p // 2] = 0.0
    cols = pmap(partial(_band_column, s=s, n_bands=n_bands, M=M, m_cap=m_cap, tol=tol,
                        vectors=vectors), p_grid, jobs=jobs, chunksize=1)
    bands = np.array([c[0] for c in cols])
    trunc = np.array([c[1] for c in cols])
    vecs = tuple(c[2] for c in cols) if vectors else None
    return BandStructure(kappa=kappa, p_grid=p_grid, bands=bands, truncation=trunc, eigvecs=vecs)


def bands_to_csv(bs: BandStructure, target=None, header_comments: dict | None = None) -> str:
    """``p,n,lambda`` rows sorted by p then n."""
    buf = io.StringIO()
    for key, val in (header_comments or {}).items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "n", "lambda"])
    for i in np.argsort(bs.p_grid, kind="stable"):
        for n in range(bs.n_bands):
            w.writerow([f"{bs.p_grid[i]:.17g}", n, f"{bs.bands[i, n]:.17g}"])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text
