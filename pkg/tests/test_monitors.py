"""Norm panel, energy budgets, and inequality probes."""

import math

import numpy as np
import pytest

from moistpe.fields import SPECTRAL, Field3D, derivative
from moistpe.errors import SamplingError
from moistpe.grid import Grid
from moistpe.initial import random_smooth
from moistpe.manufactured import ManufacturedSolution, get_case
from moistpe.model import ModelVariant
from moistpe.monitors import (
    NormReport,
    budget_terms,
    coriolis_work,
    energy_budget,
    gronwall_record,
    gronwall_series,
    minkowski_probe,
    norm_report,
    trilinear_bound,
    trilinear_form,
)
from moistpe.norms import sobolev_norm, weighted_norm_w
from moistpe.params import PhysParams, Profile
from moistpe.probes import seeded_scalar, seeded_velocity
from moistpe.state import State
from moistpe.stepper import StepConfig, TrajectorySample, run

TAU = 2.0 * math.pi


def _harmonic(grid, fn):
    return Field3D.from_function(grid, fn).as_spectral()


def _zero(grid):
    return Field3D.spectral(grid, np.zeros(grid.spectral_shape, complex))


# --- norm panel -----------------------------------------------------------


def test_report_of_rest_state_is_all_zero(grid16, params):
    rep = norm_report(State.zeros(grid16, SPECTRAL), params)
    for name, value in rep.to_dict().items():
        if name in ("t", "budget_residual"):
            continue
        assert value == 0.0, name


def test_report_single_harmonics_match_hand_values(grid16, params):
    g = grid16
    Lp = g.Lp
    v1 = _harmonic(g, lambda x, y, p: np.sin(TAU * x) * np.cos(TAU * (p - params.p0) / Lp))
    th = _harmonic(g, lambda x, y, p: np.sin(TAU * y) + 0.0 * p)
    q = _harmonic(g, lambda x, y, p: np.cos(TAU * (p - params.p0) / Lp) + 0.0 * x)
    st = State(v1, _zero(g), th, q)
    rep = norm_report(st, params)

    kp = TAU / Lp
    assert rep.l2_v == pytest.approx(math.sqrt(Lp / 4.0), rel=1e-12)
    assert rep.h1_v == pytest.approx(
        math.sqrt((1.0 + TAU**2 + kp**2) * Lp / 4.0), rel=1e-12)
    assert rep.l2_theta == pytest.approx(math.sqrt(Lp / 2.0), rel=1e-12)
    assert rep.h1_theta == pytest.approx(
        math.sqrt((1.0 + TAU**2) * Lp / 2.0), rel=1e-12)
    assert rep.l2_q == pytest.approx(math.sqrt(Lp / 2.0), rel=1e-12)
    assert rep.l2_dp_q == pytest.approx(kp * math.sqrt(Lp / 2.0), rel=1e-12)
    assert rep.l2_dp_theta == 0.0
    assert rep.l2_T > 0.0

    # the vertical mean of cos over a full period vanishes, so the barotropic
    # divergence and the top-boundary omega residual are exactly zero
    assert rep.div_residual <= 1e-15
    assert rep.omega_p1 <= 1e-15
    assert rep.hydro_residual <= 1e-12


def test_report_matches_public_primitives(grid16, params):
    st = random_smooth(grid16, 42, amplitude=1.5)
    rep = norm_report(st, params)
    sp = st.as_spectral()
    dp = {name: derivative(f, "p") for name, f in
          zip(("v1", "v2", "theta", "q"), sp.fields)}

    l2_dp_v = math.sqrt(sobolev_norm(dp["v1"], 0) ** 2 + sobolev_norm(dp["v2"], 0) ** 2)
    h1_dp_v = math.sqrt(sobolev_norm(dp["v1"], 1) ** 2 + sobolev_norm(dp["v2"], 1) ** 2)
    assert rep.l2_dp_v == pytest.approx(l2_dp_v, rel=1e-13)
    assert rep.h1_dp_v == pytest.approx(h1_dp_v, rel=1e-13)
    assert rep.h1_dp_theta == pytest.approx(sobolev_norm(dp["theta"], 1), rel=1e-13)
    assert rep.h2_q == pytest.approx(sobolev_norm(sp.q, 2), rel=1e-13)

    w_dp_v = math.sqrt(
        weighted_norm_w(dp["v1"].as_physical(), params) ** 2
        + weighted_norm_w(dp["v2"].as_physical(), params) ** 2)
    assert rep.w_dp_v == pytest.approx(w_dp_v, rel=1e-13)

    dp2 = {k: derivative(f, "p") for k, f in dp.items()}
    w_dp2_v = math.sqrt(
        weighted_norm_w(dp2["v1"].as_physical(), params) ** 2
        + weighted_norm_w(dp2["v2"].as_physical(), params) ** 2)
    assert rep.w_dp2_v == pytest.approx(w_dp2_v, rel=1e-13)

    acc = 0.0
    for f in (dp["v1"], dp["v2"]):
        for axis in ("x", "y"):
            acc += weighted_norm_w(derivative(f, axis).as_physical(), params) ** 2
    assert rep.w_grad_dp_v == pytest.approx(math.sqrt(acc), rel=1e-13)


def test_report_norm_orderings(grid16, params):
    st = random_smooth(grid16, 3, amplitude=1.0)
    rep = norm_report(st, params)
    assert rep.l2_v <= rep.h1_v <= rep.h2_v
    assert rep.l2_theta <= rep.h1_theta <= rep.h2_theta
    assert rep.l2_q <= rep.h1_q <= rep.h2_q
    # the p-derivative seminorm is part of the full H1 norm
    assert rep.l2_dp_v <= rep.h1_v
    assert rep.l2_dp_theta <= rep.h1_theta
    assert rep.l2_dp_q <= rep.h1_q


def test_report_field_names_cover_dict(grid16, params):
    names = NormReport.field_names()
    rep = norm_report(State.zeros(grid16, SPECTRAL), params)
    assert list(rep.to_dict().keys()) == names
    assert names[0] == "t"
    assert "budget_residual" in names


# --- energy budgets -------------------------------------------------------


def test_budget_terms_zero_state(grid16, params):
    bt = budget_terms(State.zeros(grid16, SPECTRAL), params)
    for var in ("v", "theta", "q"):
        for key, value in bt[var].items():
            assert value == 0.0, (var, key)


def test_budget_energy_of_harmonic(grid16, params):
    g = grid16
    v1 = _harmonic(g, lambda x, y, p: np.sin(TAU * x) + 0.0 * p)
    st = State(v1, _zero(g), _zero(g), _zero(g))
    bt = budget_terms(st, params)
    assert bt["v"]["E"] == pytest.approx(0.5 * g.Lp / 2.0, rel=1e-12)
    assert bt["theta"]["E"] == 0.0


def test_budget_closes_for_pure_diffusion(grid16, params):
    g = grid16
    q = _harmonic(g, lambda x, y, p: np.sin(TAU * x) * np.cos(TAU * (p - params.p0) / g.Lp))
    st = State(_zero(g), _zero(g), _zero(g), q)
    traj = run(st, params, StepConfig(dt=1e-4, t_end=1.2e-3), collect_budget=True)
    rows = [b for b in energy_budget(traj.samples) if b.variable == "q"]
    assert len(rows) >= 6
    for b in rows:
        assert abs(b.residual) <= 1e-8 * b.max_term
        assert b.diss_h > 0.0
        assert b.diss_v > 0.0
        assert b.coupling == 0.0
        assert b.forcing_work == 0.0


def test_budget_closes_for_nonlinear_run(grid16, params):
    st = random_smooth(grid16, 5, amplitude=0.5, band=2)
    traj = run(st, params, StepConfig(dt=1e-4, t_end=1.5e-3), collect_budget=True)
    rows = energy_budget(traj.samples)
    assert rows
    for b in rows:
        assert abs(b.residual) <= 1e-6 * b.max_term


def test_budget_closes_with_forcing(grid16, params):
    ms = ManufacturedSolution(get_case("gentle"), grid16, params)
    traj = run(ms.initial_state(), params, StepConfig(dt=1e-4, t_end=1.5e-3),
               forcing=ms.forcing, collect_budget=True)
    rows = energy_budget(traj.samples)
    assert any(abs(b.forcing_work) > 1e-12 for b in rows)
    for b in rows:
        assert abs(b.residual) <= 5e-6 * b.max_term


def test_budget_coupling_routes_agree(grid16, params):
    # the pairing route and the direct heat-flux quadrature nearly cancel on
    # random data, so they are compared against the natural pairing scale
    # |v| |grad Phi| rather than against each other
    from moistpe.model import diagnose_phi

    for seed in (9, 11, 13):
        st = random_smooth(grid16, seed, amplitude=1.0)
        bt = budget_terms(st, params)
        cp, hf = bt["v"]["coupling"], bt["v"]["coupling_heat_flux"]
        phys = st.as_physical()
        phi = diagnose_phi(phys.theta, params).as_spectral()
        scale = sum(
            sobolev_norm(comp.as_spectral(), 0) * sobolev_norm(derivative(phi, ax), 0)
            for comp, ax in ((phys.v1, "x"), (phys.v2, "y")))
        assert abs(cp - hf) <= 1e-2 * scale


def test_budget_skip_startup_controls_row_count(grid16, params):
    st = random_smooth(grid16, 5, amplitude=0.2, band=2)
    traj = run(st, params, StepConfig(dt=1e-4, t_end=1e-3), collect_budget=True)
    default = energy_budget(traj.samples)
    everything = energy_budget(traj.samples, skip_startup=0)
    assert len(everything) == len(default) + 2 * 3


def test_budget_needs_three_samples():
    samples = [TrajectorySample(0.0, "", None, {}), TrajectorySample(0.1, "", None, {})]
    with pytest.raises(SamplingError):
        energy_budget(samples)


def test_budget_needs_uniform_samples():
    samples = [TrajectorySample(t, "", None, {}) for t in (0.0, 0.1, 0.35, 0.5)]
    with pytest.raises(SamplingError):
        energy_budget(samples)


# --- trilinear probe ------------------------------------------------------


def test_trilinear_form_of_constants(grid16):
    one = Field3D.physical(grid16, np.ones(grid16.shape))
    Lp = grid16.Lp
    assert trilinear_form(one, one, one) == pytest.approx(Lp**2, rel=1e-13)
    assert trilinear_bound(one, one, one) == pytest.approx(Lp**1.5, rel=1e-13)


def test_trilinear_form_kills_zero_vertical_mean(grid16, params):
    g = grid16
    f = _harmonic(g, lambda x, y, p: np.sin(TAU * (p - params.p0) / g.Lp) * np.cos(TAU * x))
    h = _harmonic(g, lambda x, y, p: np.cos(TAU * y) + 0.0 * p)
    assert trilinear_form(f, h, h) <= 1e-15


def test_trilinear_seeded_triples_are_controlled(grid16):
    for seed in range(10):
        f = seeded_scalar(grid16, 3 * seed + 0, band=4)
        g_ = seeded_scalar(grid16, 3 * seed + 1, band=4)
        h = seeded_scalar(grid16, 3 * seed + 2, band=4)
        form = trilinear_form(f, g_, h)
        bound = trilinear_bound(f, g_, h)
        assert math.isfinite(form) and math.isfinite(bound)
        assert bound > 0.0
        assert form <= bound


# --- vertical-velocity inequality probe -----------------------------------


def test_minkowski_zero_field(grid16):
    z = _zero(grid16)
    lhs, rhs = minkowski_probe(z, z)
    assert lhs == 0.0 and rhs == 0.0


def test_minkowski_separable_example_matches_analytic(grid16, params):
    g = grid16
    Lp = g.Lp
    v1 = _harmonic(g, lambda x, y, p: np.sin(TAU * x) * np.cos(TAU * (p - params.p0) / Lp))
    lhs, rhs = minkowski_probe(v1, _zero(g))
    p_nodes = params.p0 + Lp * np.arange(g.np) / g.np
    mean_abs_cos = float(np.mean(np.abs(np.cos(TAU * (p_nodes - params.p0) / Lp))))
    assert lhs == pytest.approx(Lp**1.5 / 2.0, rel=1e-12)
    assert rhs == pytest.approx(TAU / math.sqrt(2.0) * mean_abs_cos * Lp, rel=1e-12)
    assert lhs <= math.sqrt(Lp) * rhs


def test_minkowski_holds_for_seeded_velocities(grid16):
    root = math.sqrt(grid16.Lp)
    for seed in range(10):
        v1, v2 = seeded_velocity(grid16, seed)
        lhs, rhs = minkowski_probe(v1, v2)
        assert lhs <= root * rhs


# --- differential-inequality collectors -----------------------------------


def test_gronwall_series_zero_state(grid16, params):
    records = [gronwall_record(State.zeros(grid16, SPECTRAL, t=0.01 * k), params)
               for k in range(4)]
    series = gronwall_series(records, params)
    for form, data in series.items():
        assert all(v == 0.0 for v in data["lhs"]), form
        assert all(v == 0.0 for v in data["rhs"]), form


def test_gronwall_series_needs_uniform_records(grid16, params):
    records = [gronwall_record(State.zeros(grid16, SPECTRAL, t=t), params)
               for t in (0.0, 0.01, 0.05)]
    with pytest.raises(SamplingError):
        gronwall_series(records, params)


def test_gronwall_diffusion_only_signs():
    # with a constant vertical coefficient and no transport terms every
    # inequality is provable mode by mode: the damped left side stays
    # negative while the right side keeps a positive norm floor
    pr = PhysParams(theta_bar=Profile("proportional", 1.0))
    g = Grid(16, 16, 16, pr.p0, pr.p1)
    st = random_smooth(g, 3, amplitude=1.0)
    var = ModelVariant(advection=False, coriolis=False, pressure=False)
    traj = run(st, pr, StepConfig(dt=1e-3, t_end=0.02), variant=var,
               collect_gronwall=True)
    series = gronwall_series(traj.gronwall, pr)
    assert set(series) == {"vp", "thetap", "lapv", "laptheta"}
    for form, data in series.items():
        lhs = np.asarray(data["lhs"])
        rhs = np.asarray(data["rhs"])
        assert lhs.size >= 10
        assert lhs.max() < 0.0, form
        assert rhs.min() > 0.0, form


def test_gronwall_records_carry_forcing_terms(grid16, params):
    ms = ManufacturedSolution(get_case("gentle"), grid16, params)
    rec = gronwall_record(ms.initial_state(), params, forcing=ms.forcing)
    assert rec.scalars["fv_h1s"] > 0.0
    assert rec.scalars["fth_h1s"] > 0.0
    rec0 = gronwall_record(ms.initial_state(), params)
    assert rec0.scalars["fv_h1s"] == 0.0


# --- rotation work --------------------------------------------------------


def test_coriolis_work_vanishes(grid16, params):
    st = random_smooth(grid16, 7, amplitude=2.0)
    assert abs(coriolis_work(st, params)) <= 1e-13
