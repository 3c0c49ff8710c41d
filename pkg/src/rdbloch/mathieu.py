"""The single-harmonic potential s(x) = -alpha + beta cos(2 kappa x).

Stability boundaries in the (alpha, beta) plane at fixed kappa:

THEOREM1  beta = -alpha + sqrt(3 alpha^2 + 2 kappa^2 alpha)
KATO      ||ds||^2 = 8 L |<s>| with ||ds||^2 = L beta^2 / 2, i.e. beta = 4 sqrt(alpha)
SERIES    alpha / kappa^2 = q^2/2 - 7 q^4/128 + 29 q^6/2304
NUMERIC   lambda00(alpha, beta) = 0 from the Bloch eigensolver
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from pathlib import Path

import numpy as np

from .core import NormConvention, PeriodicFunction, mathieu_potential
from .criteria import KatoForm, Verdict, evaluate
from .errors import ConvergenceError, PreconditionError, RDBlochError, SeriesValidityError
from .parallel import pmap
from .spectrum import lambda00

# a_0(q) coefficients of the Mathieu characteristic value, and the q^8 term
# used as the truncation error estimate
SERIES_COEFFS = (1.0 / 2.0, -7.0 / 128.0, 29.0 / 2304.0)
FIRST_OMITTED = -68687.0 / 18874368.0
SERIES_VALIDITY = 1e-3

SCAN_N = 64
SCAN_M = 16


class QConvention(str, Enum):
    Q_PAPER = "Q_PAPER"  # q = beta / kappa^2
    Q_STANDARD = "Q_STANDARD"  # q = beta / (2 kappa^2)


class BoundaryKind(str, Enum):
    THEOREM1 = "THEOREM1"
    KATO = "KATO"
    SERIES = "SERIES"
    NUMERIC = "NUMERIC"


@dataclass(frozen=True)
class MathieuProblem:
    alpha: float
    beta: float
    kappa: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta >= 0 and self.kappa > 0):
            raise PreconditionError("need alpha > 0, beta >= 0, kappa > 0")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.kappa

    @property
    def mean_s(self) -> float:
        return -self.alpha

    @property
    def s0(self) -> float:
        return -self.alpha + self.beta

    @property
    def mean_fluct_sq(self) -> float:
        return 0.5 * self.beta ** 2

    @property
    def integral_fluct_sq(self) -> float:
        return 0.5 * self.period * self.beta ** 2

    def potential(self, n: int = 256) -> PeriodicFunction:
        return mathieu_potential(self.alpha, self.beta, self.kappa, n)


def theorem1_boundary(alpha: float, kappa: float = 1.0) -> float:
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    return -alpha + math.sqrt(3.0 * alpha * alpha + 2.0 * kappa * kappa * alpha)


def kato_boundary(alpha: float, kappa: float = 1.0, form: KatoForm = KatoForm.OVER_L) -> float:
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    if KatoForm(form) is KatoForm.OVER_L:
        # L beta^2 / 2 = 8 L alpha
        return 4.0 * math.sqrt(alpha)
    # (L/8)(L beta^2 / 2) = alpha
    return 4.0 * math.sqrt(alpha) * kappa / (2.0 * math.pi)


def _q(beta: float, kappa: float, conv: QConvention) -> float:
    conv = QConvention(conv)
    return beta / (kappa * kappa) if conv is QConvention.Q_PAPER else beta / (2.0 * kappa * kappa)


def series_truncation_error(beta: float, kappa: float = 1.0,
                            q_convention: QConvention = QConvention.Q_STANDARD) -> float:
    """Magnitude of the first omitted (q^8) term, in units of alpha."""
    q = _q(beta, kappa, q_convention)
    return kappa * kappa * abs(FIRST_OMITTED) * q ** 8


def series_boundary(beta: float, kappa: float = 1.0,
                    q_convention: QConvention = QConvention.Q_STANDARD) -> float:
    q = _q(beta, kappa, q_convention)
    q2 = q * q
    total = sum(c * q2 ** (i + 1) for i, c in enumerate(SERIES_COEFFS))
    if q == 0.0:
        return 0.0
    if abs(FIRST_OMITTED) * q2 ** 4 >= SERIES_VALIDITY * abs(total):
        raise SeriesValidityError(f"q={q:.4g} too large for the degree-6 series")
    return kappa * kappa * total


def series_validity_limit(kappa: float = 1.0, q_convention: QConvention = QConvention.Q_STANDARD) -> float:
    """Largest beta accepted by :func:`series_boundary` (to bisection accuracy)."""
    lo, hi = 0.0, 4.0 * kappa * kappa
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        try:
            series_boundary(mid, kappa, q_convention)
            lo = mid
        except SeriesValidityError:
            hi = mid
    return lo


def _lam(alpha: float, beta: float, kappa: float, n: int, M: int) -> float:
    return lambda00(mathieu_potential(alpha, beta, kappa, n), M=M).value


def numeric_boundary(beta: float, kappa: float = 1.0, n: int = SCAN_N, M: int = SCAN_M,
                     tol: float = 1e-10) -> float:
    """alpha with lambda00(-alpha + beta cos 2 kappa x) = 0, by bisection plus root polish."""
    if beta < 0:
        raise PreconditionError("beta must be nonnegative")
    lam = partial(_lam, beta=beta, kappa=kappa, n=n, M=M)
    if lam(0.0) >= 0.0:
        return 0.0
    hi = kappa * kappa
    while lam(hi) <= 0.0:
        hi *= 2.0
        if hi > 1024.0 * kappa * kappa:
            raise ConvergenceError(f"no bracket for beta={beta} below alpha=1024 kappa^2")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lam(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    # d lambda00 / d alpha = 1 exactly, so one Newton step lands on the root
    root = 0.5 * (lo + hi)
    for _ in range(2):
        root -= lam(root)
    return root


def numeric_beta(alpha: float, kappa: float = 1.0, n: int = SCAN_N, M: int = SCAN_M,
                 tol: float = 1e-10) -> float:
    """beta on the lambda00 = 0 curve at given alpha (lambda00 decreases in beta >= 0)."""
    lam = partial(lambda b, a: _lam(a, b, kappa, n, M), a=alpha)
    hi = kappa * kappa
    while lam(hi) >= 0.0:
        hi *= 2.0
        if hi > 1024.0 * kappa * kappa:
            raise ConvergenceError(f"no bracket for alpha={alpha}")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lam(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class StabilityBoundary:
    kind: BoundaryKind
    kappa: float
    points: tuple  # ((alpha, beta), ...) sorted by alpha


def boundary_curve(kind: BoundaryKind, kappa: float = 1.0, alpha_max: float | None = None,
                   beta_max: float | None = None, n_points: int = 81,
                   q_convention: QConvention = QConvention.Q_STANDARD,
                   kato_form: KatoForm = KatoForm.OVER_L) -> StabilityBoundary:
    kind = BoundaryKind(kind)
    k2 = kappa * kappa
    alpha_max = 2.0 * k2 if alpha_max is None else alpha_max
    beta_max = 4.0 * k2 if beta_max is None else beta_max
    if kind in (BoundaryKind.THEOREM1, BoundaryKind.KATO):
        alphas = np.linspace(0.0, alpha_max, n_points)[1:]
        fn = theorem1_boundary if kind is BoundaryKind.THEOREM1 else partial(kato_boundary, form=kato_form)
        pts = [(0.0, 0.0)] + [(float(a), float(fn(a, kappa))) for a in alphas]
    elif kind is BoundaryKind.SERIES:
        top = min(beta_max, series_validity_limit(kappa, q_convention))
        betas = np.linspace(0.0, top, n_points)
        pts = [(series_boundary(b, kappa, q_convention), float(b)) for b in betas]
    else:
        betas = np.linspace(0.0, beta_max, n_points)
        pts = [(numeric_boundary(b, kappa), float(b)) for b in betas]
    pts.sort()
    return StabilityBoundary(kind, kappa, tuple(pts))


def boundaries_to_csv(curves, target=None, header_comments: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (header_comments or {}).items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "alpha", "beta"])
    for curve in curves:
        for a, b in curve.points:
            w.writerow([curve.kind.value, f"{a:.17g}", f"{b:.17g}"])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text


# --- region scan -----------------------------------------------------------

@dataclass(frozen=True)
class ScanCell:
    alpha: float
    beta: float
    lambda00: float
    thm1: bool
    kato: bool
    verdict: str
    error: str = ""


@dataclass(frozen=True)
class Comparison:
    alpha: float
    beta_kato: float
    beta_theorem1: float
    beta_numeric: float

    @property
    def ordering(self) -> str:
        items = sorted([("KATO", self.beta_kato), ("THEOREM1", self.beta_theorem1),
                        ("NUMERIC", self.beta_numeric)], key=lambda t: t[1])
        return " <= ".join(k for k, _ in items)

    @property
    def theorem1_sharper_than_kato(self) -> bool:
        return self.beta_theorem1 > self.beta_kato

    @property
    def theorem1_within_numeric(self) -> bool:
        return self.beta_theorem1 <= self.beta_numeric


@dataclass(frozen=True)
class ScanResult:
    kappa: float
    convention: NormConvention
    cells: tuple
    comparison: tuple = field(default=())

    def violations(self, tol: float = 1e-8) -> list:
        """Cells certified stable whose eigenvalue says otherwise."""
        return [c for c in self.cells
                if not c.error and c.verdict != Verdict.INCONCLUSIVE.value and c.lambda00 < -tol]

    def errors(self) -> list:
        return [c for c in self.cells if c.error]


def _scan_cell(ab, kappa, conv, kato_form, n, M):
    alpha, beta = ab
    try:
        s = mathieu_potential(alpha, beta, kappa, n)
        lam = lambda00(s, M=M).value
        rep = evaluate(s, conv, kato_form)
        return ScanCell(alpha, beta, lam, rep.theorem1_pass, rep.kato_pass, rep.verdict.value)
    except RDBlochError as exc:
        return ScanCell(alpha, beta, float("nan"), False, False, "ERROR", f"{type(exc).__name__}: {exc}")


def compare_boundaries(alpha: float, kappa: float = 1.0,
                       kato_form: KatoForm = KatoForm.OVER_L) -> Comparison:
    return Comparison(alpha, kato_boundary(alpha, kappa, kato_form), theorem1_boundary(alpha, kappa),
                      numeric_beta(alpha, kappa))


def region_scan(alpha_grid, beta_grid, kappa: float = 1.0, conv=NormConvention.MEAN,
                jobs: int | None = None, kato_form: KatoForm = KatoForm.OVER_L,
                compare_alphas=None, n: int = SCAN_N, M: int = SCAN_M) -> ScanResult:
    """Evaluate lambda00 and both criteria at every (alpha, beta) grid cell.

    ``compare_alphas`` (default: none) selects the alpha values at which the
    three boundary values are recorded for comparison.
    """
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    beta_grid = np.asarray(beta_grid, dtype=float)
    if alpha_grid.size == 0 or beta_grid.size == 0:
        raise ValueError("scan grids must be nonempty")
    if np.any(np.diff(alpha_grid) <= 0) or np.any(np.diff(beta_grid) <= 0):
        raise ValueError("scan grids must be strictly ascending")
    conv = NormConvention.parse(conv)
    pairs = [(float(a), float(b)) for a in alpha_grid for b in beta_grid]
    cells = pmap(partial(_scan_cell, kappa=kappa, conv=conv, kato_form=kato_form, n=n, M=M),
                 pairs, jobs=jobs, chunksize=64)
    comps = ()
    if compare_alphas is not None:
        comps = tuple(compare_boundaries(float(a), kappa, kato_form) for a in compare_alphas)
    return ScanResult(kappa, conv, tuple(cells), comps)


def default_grids(kappa: float = 1.0, n_alpha: int = 81, n_beta: int = 81,
                  alpha_max: float = 2.0, beta_max: float = 4.0):
    """alpha/kappa^2 in (0, alpha_max], beta/kappa^2 in [0, beta_max]."""
    k2 = kappa * kappa
    alphas = np.linspace(alpha_max / n_alpha, alpha_max, n_alpha) * k2
    betas = np.linspace(0.0, beta_max, n_beta) * k2
    return alphas, betas


def scan_to_csv(scan: ScanResult, target=None, header_comments: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (header_comments or {}).items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "beta", "lambda00", "thm1", "kato", "verdict"])
    for c in scan.cells:
        w.writerow([f"{c.alpha:.17g}", f"{c.beta:.17g}", f"{c.lambda00:.17g}",
                    int(c.thm1), int(c.kato), c.verdict])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text
