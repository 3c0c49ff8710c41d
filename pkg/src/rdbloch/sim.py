"""Time integration of dC/dt = sigma(x) + N(C) + C'' and its linearization.

The real line is approximated by a periodic super-domain of ``n_periods``
copies of the unit cell.  Stepping is first-order IMEX: the reaction term
is explicit, diffusion is implicit and exact per Fourier mode,

    C* = C + dt R(C),     C_hat <- C*_hat / (1 + dt k^2).

In LINEARIZED mode R(dC) = s(x) dC with s = N'(C0).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .core import PeriodicFunction, derivative, from_closed_form, max_value, mean
from .errors import BlowUpError, GridError, InsufficientRangeError, PreconditionError
from .fft import fft, ifft, is_power_of_two, wavenumbers

POINTS_PER_PERIOD = 64
STEADY_TOL = 1e-8
BLOWUP_LIMIT = 1e100
# keep the linearized field inside this range by rescaling
RENORM_LO, RENORM_HI = 1e-50, 1e50


class Mode(str, Enum):
    NONLINEAR = "NONLINEAR"
    LINEARIZED = "LINEARIZED"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True)
class CubicNonlinearity:
    """N(C) = c1 C + c3 C^3."""

    c1: float
    c3: float

    def __call__(self, c):
        return self.c1 * c + self.c3 * c ** 3

    def d1(self, c):
        return self.c1 + 3.0 * self.c3 * c ** 2

    def d2(self, c):
        return 6.0 * self.c3 * c


@dataclass(frozen=True)
class RDProblem:
    """Steady state C0 of sigma + N(C) + C'' = 0 and its linearization potential s.

    ``nonlinearity`` and ``source`` may be None for a purely linear problem
    given directly by ``s``; such a problem only supports LINEARIZED runs.
    """

    nonlinearity: CubicNonlinearity | None
    source: PeriodicFunction | None
    base_state: PeriodicFunction
    s: PeriodicFunction
    n_periods: int = 8
    points_per_period: int = POINTS_PER_PERIOD

    def __post_init__(self):
        if self.n_periods < 1:
            raise PreconditionError("n_periods must be >= 1")
        if not is_power_of_two(self.n_periods * self.points_per_period):
            raise GridError("n_periods * points_per_period must be a power of two")

    @property
    def period(self) -> float:
        return self.s.period

    @property
    def n(self) -> int:
        return self.n_periods * self.points_per_period

    @property
    def length(self) -> float:
        return self.n_periods * self.period

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * (self.length / self.n)

    @property
    def k(self) -> np.ndarray:
        return wavenumbers(self.n) * (2.0 * math.pi / self.length)

    def on_grid(self, f: PeriodicFunction) -> np.ndarray:
        """Tile a unit-cell function onto the super-domain grid."""
        if f.n == self.points_per_period:
            return np.tile(np.asarray(f.samples), self.n_periods)
        return np.real(f(self.x))

    def steady_residual(self) -> float:
        """sup |sigma + N(C0) + C0''| on the unit-cell grid."""
        if self.nonlinearity is None:
            return 0.0
        c0 = self.base_state
        c2 = derivative(derivative(c0))
        r = self.source.samples + self.nonlinearity(c0.samples) + c2.samples
        return float(np.abs(r).max())

    @classmethod
    def linear(cls, s: PeriodicFunction, n_periods: int = 8,
               points_per_period: int = POINTS_PER_PERIOD) -> "RDProblem":
        zero = s.with_samples(np.zeros(s.n))
        return cls(None, None, zero, s, n_periods, points_per_period)


def allen_cahn_problem(alpha: float, beta: float, kappa: float = 1.0, n_periods: int = 8,
                       points_per_period: int = POINTS_PER_PERIOD, n: int = 256) -> RDProblem:
    """Manufactured problem with C0 = sin(kappa x) and N'(C0) = -alpha + beta cos(2 kappa x)."""
    if not (alpha > 0 and beta >= 0 and kappa > 0):
        raise PreconditionError("need alpha > 0, beta >= 0, kappa > 0")
    L = 2.0 * math.pi / kappa
    nl = CubicNonlinearity(beta - alpha, -2.0 * beta / 3.0)
    c0 = from_closed_form(lambda x: np.sin(kappa * x), L, n)
    amp = alpha + kappa * kappa - 0.5 * beta
    sigma = from_closed_form(lambda x: amp * np.sin(kappa * x) - beta / 6.0 * np.sin(3.0 * kappa * x), L, n)
    s = c0.with_samples(nl.d1(c0.samples))
    prob = RDProblem(nl, sigma, c0, s, n_periods, points_per_period)
    resid = prob.steady_residual()
    if resid >= STEADY_TOL:
        raise PreconditionError(f"steady-state residual {resid:.3e} exceeds {STEADY_TOL}")
    expected = -alpha + beta * np.cos(2.0 * kappa * c0.x)
    if np.abs(s.samples - expected).max() > 1e-10:
        raise PreconditionError("N'(C0) does not reproduce the Mathieu potential")
    return prob


@dataclass
class SimState:
    """Field on the super-domain; the true field is ``field * exp(log_scale)``.

    ``history`` rows are (t, log sup-norm, log 2-norm) of the true field;
    ``validity`` holds the per-step ratio |N'' dC^2 / 2| / |N' dC| for
    NONLINEAR runs (small when the linearization applies).
    """

    t: float
    field: np.ndarray
    mode: Mode
    dt: float
    log_scale: float = 0.0
    history: list = field(default_factory=list)
    validity: list = field(default_factory=list)

    def true_field(self) -> np.ndarray:
        return self.field * math.exp(self.log_scale)

    def record(self, dx: float) -> None:
        sup = float(np.abs(self.field).max())
        l2 = math.sqrt(dx * float(np.dot(self.field, self.field)))
        lg = lambda v: math.log(v) + self.log_scale if v > 0 else -math.inf
        self.history.append((self.t, lg(sup), lg(l2)))

    def history_array(self) -> np.ndarray:
        """Columns t, sup_norm, l2_norm (may overflow to inf for long growth)."""
        h = np.array(self.history, dtype=float).reshape(-1, 3)
        with np.errstate(over="ignore"):
            return np.column_stack([h[:, 0], np.exp(h[:, 1]), np.exp(h[:, 2])])


def default_dt(s: PeriodicFunction) -> float:
    return 0.1 / max(1.0, max_value(s) + abs(mean(s)))


def _reaction(problem: RDProblem, mode: Mode):
    if mode is Mode.LINEARIZED:
        s = problem.on_grid(problem.s)
        return lambda f: s * f
    if problem.nonlinearity is None:
        raise PreconditionError("a linear-only problem cannot be run in NONLINEAR mode")
    sigma = problem.on_grid(problem.source)
    nl = problem.nonlinearity
    return lambda f: sigma + nl(f)


class Stepper:
    """Precomputed operators for repeated steps on one problem."""

    def __init__(self, problem: RDProblem, mode, dt: float):
        if not (dt > 0 and math.isfinite(dt)):
            raise PreconditionError("dt must be positive and finite")
        self.problem = problem
        self.mode = Mode.parse(mode)
        self.dt = dt
        self.reaction = _reaction(problem, self.mode)
        self.inv = 1.0 / (1.0 + dt * problem.k ** 2)
        self.dx = problem.length / problem.n
        if self.mode is Mode.NONLINEAR:
            self.c0 = problem.on_grid(problem.base_state)
            self.n1 = problem.nonlinearity.d1(self.c0)
            self.n2 = problem.nonlinearity.d2(self.c0)

    def advance(self, state: SimState) -> SimState:
        f = state.field + self.dt * self.reaction(state.field)
        f = ifft(fft(f) * self.inv).real
        t = state.t + self.dt
        if not np.all(np.isfinite(f)) or (self.mode is Mode.NONLINEAR and np.abs(f).max() > BLOWUP_LIMIT):
            bad = np.flatnonzero(~np.isfinite(f) | (np.abs(np.nan_to_num(f, nan=np.inf)) > BLOWUP_LIMIT))
            xb = float(self.problem.x[bad[0]]) if bad.size else float("nan")
            raise BlowUpError(t, xb)
        state.field = f
        state.t = t
        if self.mode is Mode.LINEARIZED:
            m = float(np.abs(f).max())
            if m > 0 and not (RENORM_LO <= m <= RENORM_HI):
                state.field = f / m
                state.log_scale += math.log(m)
        else:
            dc = f - self.c0
            lin = float(np.abs(self.n1 * dc).max())
            quad = float(np.abs(0.5 * self.n2 * dc * dc).max())
            state.validity.append(quad / lin if lin > 0 else 0.0)
        return state


def step(state: SimState, problem: RDProblem) -> SimState:
    """Advance one step; returns a new state and leaves ``state`` untouched."""
    new = replace(state, field=state.field.copy(), history=list(state.history),
                  validity=list(state.validity))
    return Stepper(problem, state.mode, state.dt).advance(new)


def initial_state(problem: RDProblem, mode, dt: float, field=None) -> SimState:
    mode = Mode.parse(mode)
    if field is None:
        field = problem.on_grid(problem.base_state) if mode is Mode.NONLINEAR else gaussian_perturbation(problem)
    f = np.array(field, dtype=float)
    if f.shape != (problem.n,):
        raise GridError(f"field must have {problem.n} samples")
    if not np.all(np.isfinite(f)):
        raise PreconditionError("initial field must be finite")
    st = SimState(0.0, f, mode, dt)
    st.record(problem.length / problem.n)
    return st


def integrate(problem: RDProblem, T: float, mode=Mode.LINEARIZED, dt: float | None = None,
              field=None, record_every: int = 1, snapshot_times=()) -> tuple[SimState, list]:
    """Run to time T.  Returns the final state and [(t, field), ...] snapshots."""
    dt = default_dt(problem.s) if dt is None else dt
    nsteps = max(1, int(round(T / dt)))
    stepper = Stepper(problem, mode, dt)
    state = initial_state(problem, mode, dt, field)
    dx = stepper.dx
    snaps = []
    want = sorted(float(t) for t in snapshot_times)
    if want and want[0] <= 0.0:
        snaps.append((0.0, state.true_field()))
        want = [t for t in want if t > 0.0]
    for i in range(1, nsteps + 1):
        stepper.advance(state)
        if i % record_every == 0 or i == nsteps:
            state.record(dx)
        while want and state.t >= want[0] - 0.5 * dt:
            snaps.append((state.t, state.true_field()))
            want.pop(0)
    return state, snaps


def gaussian_perturbation(problem: RDProblem, amplitude: float = 1.0, seed: int | None = None) -> np.ndarray:
    """Gaussian of width L/4 centred mid-domain; seeded noise envelope if ``seed`` is given."""
    x = problem.x
    w = problem.period / 4.0
    g = amplitude * np.exp(-0.5 * ((x - 0.5 * problem.length) / w) ** 2)
    if seed is not None:
        g = g * np.random.default_rng(seed).uniform(0.5, 1.5, size=x.size)
    return g


@dataclass(frozen=True)
class DecayMeasurement:
    rate: float
    growth: bool
    decades: float
    T: float
    dt: float
    state: SimState = field(repr=False, compare=False, default=None)


def _fit_rate(state: SimState, min_decades: float) -> tuple[float, float]:
    h = np.array(state.history, dtype=float)
    t, logn = h[:, 0], h[:, 2]
    decades = abs(logn[-1] - logn[0]) / math.log(10.0)
    if decades < min_decades:
        raise InsufficientRangeError(
            f"only {decades:.2f} decades of norm change by T={t[-1]:.4g}; increase T")
    sel = t >= 0.5 * t[-1]
    slope = np.polyfit(t[sel], logn[sel], 1)[0]
    return -float(slope), decades


def measure_decay_rate(problem: RDProblem, perturbation=None, T: float = 200.0,
                       dt: float | None = None, min_decades: float = 2.0,
                       richardson: bool = False) -> DecayMeasurement:
    """Rate lambda_eff with ||dC||_2 ~ exp(-lambda_eff t), fitted over the final half.

    With ``richardson`` the run is repeated at dt/2 and the first-order
    error is extrapolated away: 2 r(dt/2) - r(dt).
    """
    dt = default_dt(problem.s) if dt is None else dt
    field0 = gaussian_perturbation(problem) if perturbation is None else perturbation
    state, _ = integrate(problem, T, Mode.LINEARIZED, dt, field0)
    rate, decades = _fit_rate(state, min_decades)
    if richardson:
        state2, _ = integrate(problem, T, Mode.LINEARIZED, 0.5 * dt, field0)
        rate2, _ = _fit_rate(state2, min_decades)
        rate = 2.0 * rate2 - rate
        state = state2
    return DecayMeasurement(rate, rate < 0.0, decades, T, dt, state)


def sup_drift(problem: RDProblem, T: float, dt: float | None = None) -> tuple[float, SimState]:
    """Max over time of sup |C(t) - C0| for a NONLINEAR run started at C0."""
    dt = default_dt(problem.s) if dt is None else dt
    stepper = Stepper(problem, Mode.NONLINEAR, dt)
    state = initial_state(problem, Mode.NONLINEAR, dt)
    c0 = stepper.c0
    worst = 0.0
    for _ in range(max(1, int(round(T / dt)))):
        stepper.advance(state)
        state.record(stepper.dx)
        worst = max(worst, float(np.abs(state.field - c0).max()))
    return worst, state


def history_to_csv(state: SimState, target=None, header_comments: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (header_comments or {}).items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "sup_norm", "l2_norm"])
    for t, sup, l2 in state.history_array():
        w.writerow([f"{t:.17g}", f"{sup:.17g}", f"{l2:.17g}"])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text


def snapshot_to_csv(x: np.ndarray, values: np.ndarray, target=None,
                    header_comments: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (header_comments or {}).items():
        buf.write(f"# {key} = {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "value"])
    for xi, v in zip(x, values):
        w.writerow([f"{xi:.17g}", f"{v:.17g}"])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text
