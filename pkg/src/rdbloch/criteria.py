"""A priori sufficient conditions for lambda00 >= 0.

Three tests are reported, in order of precedence:

* negativity: s(x) <= 0 everywhere;
* the mean/maximum test: <s> <= 0, s0 <= kappa^2 and
  ||ds||^2 <= (kappa^2 - s0) |<s>|, with ds the fluctuation of s;
* the Kato lower bound lambda00 >= -<s> - ||ds||_2^2 / (8 L).

The module also computes the (a, b, c) decomposition of a computed p = 0
eigenpair, for which ``lam = a + b / (lam - c)`` must hold identically.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .core import NormConvention, PeriodicFunction, fluctuation, max_value, mean, norm_sq
from .errors import PreconditionError

NONPOSITIVE_TOL = 1e-12


class Verdict(str, Enum):
    STABLE_BY_NEGATIVITY = "STABLE_BY_NEGATIVITY"
    STABLE_BY_THEOREM1 = "STABLE_BY_THEOREM1"
    STABLE_BY_KATO = "STABLE_BY_KATO"
    INCONCLUSIVE = "INCONCLUSIVE"


class KatoForm(str, Enum):
    """OVER_L: ||ds||^2_INTEGRAL / (8L).  TIMES_L: L ||ds||^2_INTEGRAL / 8 (dimensionally consistent).

    The two coincide for L = 1.
    """

    OVER_L = "OVER_L"
    TIMES_L = "TIMES_L"


@dataclass(frozen=True)
class CriterionReport:
    mean_s: float
    s0: float
    fluct_norm_sq: float
    kappa_sq: float
    convention: NormConvention
    negativity_pass: bool
    eq12a_pass: bool
    eq12b_pass: bool
    kato_bound: float
    kato_pass: bool
    verdict: Verdict
    margins: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return self.verdict is not Verdict.INCONCLUSIVE

    @property
    def theorem1_pass(self) -> bool:
        return self.eq12a_pass and self.eq12b_pass

    def to_dict(self) -> dict:
        d = asdict(self)
        d["convention"] = self.convention.value
        d["verdict"] = self.verdict.value
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def table(self) -> str:
        rows = [
            ("mean_s", f"{self.mean_s:.12g}"),
            ("s0", f"{self.s0:.12g}"),
            ("fluct_norm_sq", f"{self.fluct_norm_sq:.12g}"),
            ("kappa_sq", f"{self.kappa_sq:.12g}"),
            ("convention", self.convention.value),
            ("negativity_pass", str(self.negativity_pass)),
            ("eq12a_pass", str(self.eq12a_pass)),
            ("eq12b_pass", str(self.eq12b_pass)),
            ("kato_bound", f"{self.kato_bound:.12g}"),
            ("kato_pass", str(self.kato_pass)),
            ("verdict", self.verdict.value),
        ]
        rows += [(f"margin.{k}", f"{v:.6g}") for k, v in self.margins.items()]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def kato_lower_bound(s: PeriodicFunction, form: KatoForm = KatoForm.OVER_L) -> float:
    """Lower bound on lambda00 from the Kato estimate for Hill's equation."""
    fl = norm_sq(fluctuation(s), NormConvention.INTEGRAL)
    L = s.period
    if KatoForm(form) is KatoForm.OVER_L:
        return -mean(s) - fl / (8.0 * L)
    return -mean(s) - L * fl / 8.0


def evaluate(s: PeriodicFunction, conv=NormConvention.MEAN,
             kato_form: KatoForm = KatoForm.OVER_L) -> CriterionReport:
    conv = NormConvention.parse(conv)
    m = mean(s)
    s0 = max_value(s)
    fl = norm_sq(fluctuation(s), conv)
    k2 = s.kappa ** 2

    neg_margin = -s0
    negativity = s0 <= NONPOSITIVE_TOL

    a_margin = k2 - s0
    eq12a = a_margin >= 0.0

    b_margin = a_margin * abs(m) - fl
    if m > 0.0:
        # outside the hypothesis <s> <= 0
        b_margin = min(b_margin, -m)
    eq12b = m <= 0.0 and b_margin >= 0.0

    kato = kato_lower_bound(s, kato_form)
    kato_ok = kato >= 0.0

    if negativity:
        verdict = Verdict.STABLE_BY_NEGATIVITY
    elif eq12a and eq12b:
        verdict = Verdict.STABLE_BY_THEOREM1
    elif kato_ok:
        verdict = Verdict.STABLE_BY_KATO
    else:
        verdict = Verdict.INCONCLUSIVE

    return CriterionReport(
        mean_s=m, s0=s0, fluct_norm_sq=fl, kappa_sq=k2, convention=conv,
        negativity_pass=negativity, eq12a_pass=eq12a, eq12b_pass=eq12b,
        kato_bound=kato, kato_pass=kato_ok, verdict=verdict,
        margins={"negativity": neg_margin, "eq12a": a_margin, "eq12b": b_margin, "kato": kato},
    )


@dataclass(frozen=True)
class AbcDiagnostic:
    a: float
    b: float
    c: float
    lam: float
    identity_residual: float
    du_norm_sq: float
    mean_u: complex

    @property
    def Q(self) -> float:
        return self.a * self.du_norm_sq

    def roots(self) -> tuple[float, float] | None:
        """Both solutions of lam = a + b/(lam - c); None when complex."""
        tot = self.a + self.c
        disc = tot * tot - 4.0 * (self.a * self.c - self.b)
        if disc < 0.0:
            return None
        r = math.sqrt(disc)
        return 0.5 * (tot - r), 0.5 * (tot + r)


def abc_diagnostic(s: PeriodicFunction, lam: float, coeffs: np.ndarray,
                   conv=NormConvention.MEAN) -> AbcDiagnostic:
    """Evaluate a, b, c on a p = 0 eigenpair given by Fourier coefficients.

    ``coeffs[j]`` multiplies ``exp(i kappa m x)`` with ``m = j - M``.
    Inner products are taken in coefficient space, where they are exact
    for the truncated eigenvector.  Only MEAN-convention inner products
    make the identity hold for L != 1; INTEGRAL scales b by L.
    """
    conv = NormConvention.parse(conv)
    c_vec = np.asarray(coeffs, dtype=complex)
    M = (c_vec.size - 1) // 2
    m = np.arange(-M, M + 1)
    kappa = s.kappa
    sbar = mean(s)

    mean_u = c_vec[M]
    du = c_vec.copy()
    du[M] = 0.0
    du_sq = float(np.vdot(du, du).real)
    if du_sq <= 1e-20 * float(np.vdot(c_vec, c_vec).real):
        raise PreconditionError("eigenvector has no fluctuating part (constant s case)")
    if abs(lam + sbar) <= 1e-10:
        raise PreconditionError("lam + <s> = 0: the identity is not defined in this case")

    shat = s.coeff(np.arange(-2 * M, 2 * M + 1))
    S = shat[(m[:, None] - m[None, :]) + 2 * M]
    du_s_du = np.vdot(du, S @ du).real
    grad_sq = float(np.sum((kappa * m) ** 2 * np.abs(du) ** 2))
    ds = shat[m + 2 * M].copy()
    ds[M] = 0.0
    du_ds = np.vdot(du, ds)

    scale = s.period if conv is NormConvention.INTEGRAL else 1.0
    a = (-du_s_du + grad_sq) / du_sq
    b = scale * abs(du_ds) ** 2 / du_sq
    c = abs(sbar)
    resid = abs(lam - a - b / (lam - c))
    return AbcDiagnostic(a=float(a), b=float(b), c=float(c), lam=float(lam),
                         identity_residual=float(resid), du_norm_sq=du_sq, mean_u=complex(mean_u))
