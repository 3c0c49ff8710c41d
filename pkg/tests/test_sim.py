import math

import numpy as np
import pytest

from rdbloch.core import constant, mathieu_potential
from rdbloch.errors import BlowUpError, GridError, InsufficientRangeError, PreconditionError
from rdbloch.sim import (Mode, RDProblem, SimState, Stepper, allen_cahn_problem, gaussian_perturbation,
                         history_to_csv, initial_state, integrate, measure_decay_rate, snapshot_to_csv, step,
                         sup_drift)
from rdbloch.spectrum import lambda00

TWO_PI = 2 * math.pi


@pytest.mark.parametrize("params", [(1.0, 0.5, 1.0), (0.3, 2.0, 2.0), (2.0, 0.0, 0.5)])
def test_manufactured_residual(params):
    prob = allen_cahn_problem(*params)
    assert prob.steady_residual() < 1e-8
    alpha, beta, kappa = params
    x = prob.base_state.x
    np.testing.assert_allclose(prob.s.samples, -alpha + beta * np.cos(2 * kappa * x), atol=1e-12)


def test_linear_degenerate_case():
    prob = allen_cahn_problem(0.8, 0.0, 1.0)
    assert prob.nonlinearity.c3 == 0
    np.testing.assert_allclose(prob.source.samples, 1.8 * np.sin(prob.source.x), atol=1e-14)
    np.testing.assert_allclose(prob.s.samples, -0.8, atol=1e-15)


def test_grid_and_parameter_validation():
    with pytest.raises(GridError):
        allen_cahn_problem(1, 0.5, 1, n_periods=3)
    with pytest.raises(PreconditionError):
        allen_cahn_problem(-1, 0.5, 1)
    with pytest.raises(PreconditionError):
        integrate(RDProblem.linear(constant(-1.0, TWO_PI, 64)), 1.0, Mode.NONLINEAR, 0.1)


def test_step_from_steady_state_is_stationary():
    prob = allen_cahn_problem(1.0, 0.5, 1.0)
    st = initial_state(prob, Mode.NONLINEAR, 0.1)
    new = step(st, prob)
    assert np.abs(new.field - st.field).max() < 1e-10
    assert new.t == pytest.approx(0.1) and st.t == 0.0


def test_zero_field_stays_zero():
    prob = allen_cahn_problem(1.0, 0.5, 1.0)
    st = initial_state(prob, Mode.LINEARIZED, 0.1, np.zeros(prob.n))
    assert np.all(step(st, prob).field == 0)


def test_single_mode_amplification_factor():
    alpha, dt = 0.6, 1e-3
    prob = RDProblem.linear(constant(-alpha, TWO_PI, 64), n_periods=8)
    j = 3
    p = j * TWO_PI / prob.length
    f0 = np.cos(p * prob.x)
    st = Stepper(prob, Mode.LINEARIZED, dt).advance(initial_state(prob, Mode.LINEARIZED, dt, f0))
    ratio = st.field[0] / f0[0]
    expect = (1 - alpha * dt) / (1 + dt * p * p)
    assert ratio == pytest.approx(expect, rel=1e-12)
    assert ratio == pytest.approx(math.exp(-(alpha + p * p) * dt), abs=dt * dt)


def test_pure_diffusion_conserves_mean():
    prob = RDProblem.linear(constant(0.0, TWO_PI, 64), n_periods=4)
    f0 = np.sin(prob.x / 4) + 0.3 * np.cos(3 * prob.x)
    st, _ = integrate(prob, 5.0, Mode.LINEARIZED, 0.05, f0)
    assert abs(st.field.mean() - f0.mean()) < 1e-12


def test_blow_up_is_reported():
    prob = allen_cahn_problem(1.0, 3.0, 1.0, n_periods=1)
    with pytest.raises(BlowUpError) as exc:
        integrate(prob, 50.0, Mode.NONLINEAR, 1.0, np.full(prob.n, 100.0))
    assert exc.value.t > 0 and math.isfinite(exc.value.x)


def test_constant_potential_rate():
    alpha = 0.7
    prob = RDProblem.linear(constant(-alpha, TWO_PI, 64), n_periods=8)
    m = measure_decay_rate(prob, T=200, dt=0.02, richardson=True)
    # the diffusive continuum above p = 0 adds a slowly decaying bias
    assert m.rate == pytest.approx(alpha, rel=5e-3) and not m.growth


def test_insufficient_range():
    prob = RDProblem.linear(constant(-0.01, TWO_PI, 64), n_periods=2)
    with pytest.raises(InsufficientRangeError):
        measure_decay_rate(prob, T=5, dt=0.1)


def test_linearized_norm_nonincreasing_when_stable():
    prob = allen_cahn_problem(1.0, 0.5, 1.0)
    st, _ = integrate(prob, 20, Mode.LINEARIZED, 0.05)
    logn = np.array(st.history)[:, 2]
    assert np.all(np.diff(logn[20:]) <= 1e-12)


def test_linearization_consistency():
    eps, dt, T = 1e-6, 0.01, 2.0
    prob = allen_cahn_problem(1.0, 0.5, 1.0)
    phi = gaussian_perturbation(prob)
    c0 = prob.on_grid(prob.base_state)
    nl, _ = integrate(prob, T, Mode.NONLINEAR, dt, c0 + eps * phi)
    lin, _ = integrate(prob, T, Mode.LINEARIZED, dt, phi)
    d = (nl.field - c0) / eps
    rel = np.abs(d - lin.true_field()).max() / np.abs(lin.true_field()).max()
    assert rel < 10 * eps
    assert max(nl.validity) < 1e-5


def test_rate_resolution_independence():
    prob64 = allen_cahn_problem(0.5, 1.0, 1.0)
    prob32 = allen_cahn_problem(0.5, 1.0, 1.0, points_per_period=32)
    r64 = measure_decay_rate(prob64, T=150, dt=0.01).rate
    r32 = measure_decay_rate(prob32, T=150, dt=0.01).rate
    r64h = measure_decay_rate(prob64, T=150, dt=0.005).rate
    assert abs(r32 - r64) / r64 < 0.01
    assert abs(r64h - r64) / r64 < 0.01


def test_history_and_snapshot_csv():
    prob = allen_cahn_problem(1.0, 0.5, 1.0, n_periods=1)
    st, snaps = integrate(prob, 0.5, Mode.NONLINEAR, 0.1, snapshot_times=[0.0, 0.3])
    lines = history_to_csv(st, header_comments={"dt": 0.1}).splitlines()
    assert lines[:2] == ["# dt = 0.1", "t,sup_norm,l2_norm"] and len(lines) == 2 + 6
    assert [round(t, 12) for t, _ in snaps] == [0.0, 0.3]
    text = snapshot_to_csv(prob.x, snaps[1][1])
    assert text.splitlines()[0] == "x,value"


def test_determinism():
    prob = allen_cahn_problem(0.5, 1.0, 1.0, n_periods=2)
    a, _ = integrate(prob, 3.0, Mode.LINEARIZED, 0.05)
    b, _ = integrate(prob, 3.0, Mode.LINEARIZED, 0.05)
    assert history_to_csv(a) == history_to_csv(b)


def test_growth_with_renormalization():
    prob = allen_cahn_problem(0.2, 2.0, 1.0)
    m = measure_decay_rate(prob, T=600, dt=0.05)
    assert m.growth and m.decades > 50
    assert np.isfinite(m.state.field).all()
    lam = lambda00(mathieu_potential(0.2, 2.0, 1.0)).value
    assert m.rate == pytest.approx(lam, rel=0.05)
