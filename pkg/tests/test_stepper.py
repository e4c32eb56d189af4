"""Time integration: amplification oracles, order, stability, and run control.

The one-step amplification tests pit the implementation against closed-form
factors derived independently: with a reference profile proportional to p the
vertical coefficient is exactly 1, the constant-coefficient split is the
whole operator, and every step of the scheme acts diagonally on a single
harmonic.
"""

import numpy as np
import pytest

from moistpe.errors import BlowupError, ConfigError
from moistpe.fields import Field3D
from moistpe.grid import Grid
from moistpe.initial import random_smooth
from moistpe.model import FAITHFUL
from moistpe.norms import sobolev_norm
from moistpe.params import PhysParams, Profile
from moistpe.state import State
from moistpe import stepper
from moistpe.stepper import (ERK4_STABILITY_LIMIT, StepConfig, Workspace,
                             check_erk4_stability, erk4_step, imex_step, run)

P0, P1 = 0.2, 1.0
LP = P1 - P0


def _grid(n=16):
    return Grid(n, n, n, P0, P1)


def _single_harmonic_state(g):
    """q = sin of the lowest vertical harmonic, everything else zero."""
    q = Field3D.from_function(
        g, lambda x, y, p: np.sin(2 * np.pi * (p - P0) / LP))
    z = Field3D.zeros(g, "physical")
    return State(z, z, z, q)


def _unit_c_params():
    # theta_bar = (g/R) p makes the vertical coefficient identically one
    return PhysParams(theta_bar=Profile("proportional", 1.0))


def _mode_amp(state):
    C = state.q.as_spectral().data
    return abs(C[0, 0, 1])


# --- closed-form amplification ----------------------------------------------

def test_first_step_amplification_matches_bootstrap_factor():
    g = _grid()
    pr = _unit_c_params()
    st = _single_harmonic_state(g)
    ws = Workspace(g, pr, FAITHFUL)
    lam = pr.nu_q * (2 * np.pi / LP) ** 2
    dt = 1e-3
    s1, _ = imex_step(st, None, dt, ws)
    want = (1 + lam * dt / 10) ** -10
    got = _mode_amp(s1) / _mode_amp(st)
    assert abs(got / want - 1) <= 1e-13


def test_later_steps_amplify_by_the_trapezoidal_factor():
    g = _grid()
    pr = _unit_c_params()
    st = _single_harmonic_state(g)
    ws = Workspace(g, pr, FAITHFUL)
    lam = pr.nu_q * (2 * np.pi / LP) ** 2
    dt = 1e-3
    s1, n1 = imex_step(st, None, dt, ws)
    s2, n2 = imex_step(s1, n1, dt, ws)
    s3, _ = imex_step(s2, n2, dt, ws)
    want = (1 - lam * dt / 2) / (1 + lam * dt / 2)
    assert abs(_mode_amp(s2) / _mode_amp(s1) / want - 1) <= 1e-13
    assert abs(_mode_amp(s3) / _mode_amp(s2) / want - 1) <= 1e-13


def test_erk4_amplification_matches_stability_polynomial():
    g = _grid()
    pr = _unit_c_params()
    st = _single_harmonic_state(g)
    lam = pr.nu_q * (2 * np.pi / LP) ** 2
    dt = 1e-3
    z = lam * dt
    want = 1 - z + z**2 / 2 - z**3 / 6 + z**4 / 24
    s1 = erk4_step(st, dt, pr, forcing=None, variant=FAITHFUL)
    assert abs(_mode_amp(s1) / _mode_amp(st) / want - 1) <= 1e-13


# --- stability --------------------------------------------------------------

def test_pure_diffusion_norm_never_increases_even_at_huge_steps():
    g = _grid()
    pr = _unit_c_params()
    st = _single_harmonic_state(g)
    cfg = StepConfig(dt=50.0, t_end=500.0)
    traj = run(st, pr, cfg)
    vals = [s.report.l2_q for s in traj.samples]
    assert traj.completed
    assert np.all(np.diff(vals) <= 1e-14)


def test_erk4_rejects_steps_beyond_the_stability_limit():
    g = _grid(8)
    pr = PhysParams()
    ws = Workspace(g, pr, FAITHFUL)
    dt_bad = 1.01 * ERK4_STABILITY_LIMIT / ws.lam_max
    with pytest.raises(ConfigError):
        check_erk4_stability(ws, dt_bad)
    # and through the run entry point
    st = State.zeros(g)
    with pytest.raises(ConfigError):
        run(st, pr, StepConfig(dt=dt_bad, t_end=10 * dt_bad,
                               scheme="erk4_fully_explicit"))
    # just under the limit is accepted
    check_erk4_stability(ws, 0.99 * ERK4_STABILITY_LIMIT / ws.lam_max)


# --- order ------------------------------------------------------------------

def _final(g, pr, scheme, dt, seed=6, t_end=0.02):
    st = random_smooth(g, seed, amplitude=1.0, band=2)
    cfg = StepConfig(dt=dt, t_end=t_end, scheme=scheme)
    traj = run(st, pr, cfg, record_every=10**9, raise_on_blowup=True)
    return traj.final_state


def _state_dist(a, b):
    return max(np.abs(fa.as_physical().data - fb.as_physical().data).max()
               for fa, fb in zip(a.fields, b.fields))


def test_imex_cnab2_is_second_order_on_the_nonlinear_system():
    g = _grid(8)
    pr = PhysParams()
    sols = {dt: _final(g, pr, "imex_cnab2", dt) for dt in (2e-3, 1e-3, 5e-4)}
    d1 = _state_dist(sols[2e-3], sols[1e-3])
    d2 = _state_dist(sols[1e-3], sols[5e-4])
    assert 3.2 <= d1 / d2 <= 4.8


def test_erk4_is_fourth_order_on_the_nonlinear_system():
    g = _grid(8)
    pr = PhysParams()
    sols = {dt: _final(g, pr, "erk4_fully_explicit", dt, t_end=0.04)
            for dt in (8e-3, 4e-3, 2e-3)}
    d1 = _state_dist(sols[8e-3], sols[4e-3])
    d2 = _state_dist(sols[4e-3], sols[2e-3])
    assert 12.0 <= d1 / d2 <= 20.0


# --- run control ------------------------------------------------------------

def test_zero_state_is_a_fixed_point():
    g = _grid(8)
    pr = PhysParams()
    for scheme in ("imex_cnab2", "erk4_fully_explicit"):
        traj = run(State.zeros(g), pr, StepConfig(dt=1e-3, t_end=0.01, scheme=scheme))
        assert traj.completed
        final = traj.final_state
        for f in final.fields:
            assert np.abs(f.as_physical().data).max() <= 1e-14


def test_zero_span_run_records_exactly_the_initial_sample():
    g = _grid(8)
    traj = run(State.zeros(g), PhysParams(), StepConfig(dt=1e-3, t_end=0.0))
    assert traj.completed
    assert len(traj.samples) == 1
    assert traj.samples[0].t == 0.0


def test_divergent_run_returns_partial_trajectory():
    g = _grid(8)
    pr = PhysParams()
    st = random_smooth(g, 8, amplitude=200.0, band=2)
    cfg = StepConfig(dt=0.2, t_end=50.0)
    traj = run(st, pr, cfg)
    assert not traj.completed
    assert traj.blowup_time is not None
    assert len(traj.samples) >= 1          # partial history retained
    assert traj.final_state is not None


def test_divergent_run_raises_when_asked():
    g = _grid(8)
    pr = PhysParams()
    st = random_smooth(g, 8, amplitude=200.0, band=2)
    cfg = StepConfig(dt=0.2, t_end=50.0)
    with pytest.raises(BlowupError) as exc:
        run(st, pr, cfg, raise_on_blowup=True)
    assert exc.value.t_last > 0.0


def test_record_every_thins_samples_but_keeps_the_endpoint():
    g = _grid(8)
    pr = PhysParams()
    st = random_smooth(g, 4, amplitude=0.5, band=2)
    traj = run(st, pr, StepConfig(dt=1e-3, t_end=0.01), record_every=4)
    times = [s.t for s in traj.samples]
    assert times[0] == 0.0
    assert abs(times[-1] - 0.01) <= 1e-12
    assert len(times) == 4   # t = 0, 0.004, 0.008, 0.01


def test_every_recorded_sample_satisfies_the_divergence_constraint():
    g = _grid(8)
    pr = PhysParams()
    st = random_smooth(g, 4, amplitude=1.0, band=2)
    traj = run(st, pr, StepConfig(dt=1e-3, t_end=0.02))
    for s in traj.samples:
        r = s.report
        assert r.div_residual <= 1e-11 * max(1.0, r.h1_v)


def test_keep_states_every_collects_checkpoints():
    g = _grid(8)
    pr = PhysParams()
    st = random_smooth(g, 4, amplitude=0.5, band=2)
    traj = run(st, pr, StepConfig(dt=1e-3, t_end=0.01), keep_states_every=5)
    assert len(traj.checkpoints) == 3   # samples 0, 5, 10
    assert traj.checkpoints[0].t == 0.0


def test_adaptive_run_reaches_the_end_time():
    g = _grid(8)
    pr = PhysParams()
    st = random_smooth(g, 4, amplitude=1.0, band=2)
    cfg = StepConfig(dt=5e-3, t_end=0.02, adapt=True)
    traj = run(st, pr, cfg)
    assert traj.completed
    times = [s.t for s in traj.samples]
    assert abs(times[-1] - 0.02) <= 1e-10
    assert np.all(np.diff(times) > 0)


def test_step_config_validation():
    with pytest.raises(ConfigError):
        StepConfig(dt=1e-3, t_end=1.0, scheme="leapfrog")
    with pytest.raises(ConfigError):
        StepConfig(dt=0.0, t_end=1.0)
    with pytest.raises(ConfigError):
        StepConfig(dt=1e-3, t_end=-1.0)
    with pytest.raises(ConfigError):
        StepConfig(dt=1e-3, t_end=1.0, cfl_target=0.0)
    with pytest.raises(ConfigError):
        StepConfig(dt=1e-3, t_end=1.0, cfl_target=1.5)


def test_run_rejects_end_time_before_state_time():
    g = _grid(8)
    st = State.zeros(g, t=1.0)
    with pytest.raises(ConfigError):
        run(st, PhysParams(), StepConfig(dt=1e-3, t_end=0.5))
