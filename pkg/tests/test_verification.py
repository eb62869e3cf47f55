"""Verification battery plumbing (the cases themselves run in acceptance)."""
import numpy as np
import pytest

from induction2d.driver import Simulation
from induction2d.phase import PhaseKinetics
from induction2d.verification import (
    OrderReport, analytic_skin_depth, build_strip, dissipation_audit,
    fine_quadrature_joule, joule_average_case, mini_strip_config,
    rk4_phase_reference, skin_depth_case,
)


def test_order_report_needs_three_levels():
    with pytest.raises(ValueError, match="3"):
        OrderReport.from_errors([0.1, 0.05], [1.0, 0.25])


def test_order_report_requires_positive_errors():
    with pytest.raises(ValueError, match="positive"):
        OrderReport.from_errors([0.1, 0.05, 0.025], [1.0, 0.25, 0.0])


def test_order_report_slope_of_exact_quadratic():
    hs = [0.1, 0.05, 0.025]
    rep = OrderReport.from_errors(hs, [h ** 2 for h in hs])
    assert abs(rep.observed_order - 2.0) < 1e-12


def test_analytic_skin_depth_value():
    # closed-form: sigma = 1e6, mu = 4 pi e-7, f = 1e4 -> 5.03e-3 m
    d = analytic_skin_depth(1e4, 1e6, 4e-7 * np.pi)
    assert abs(d - 5.03e-3) < 0.01e-3


def test_skin_depth_quadrupling_halves_analytic():
    d1 = analytic_skin_depth(1e4, 1e6, 4e-7 * np.pi)
    d4 = analytic_skin_depth(4e4, 1e6, 4e-7 * np.pi)
    assert abs(d4 - 0.5 * d1) < 1e-15


def test_strip_width_precondition():
    delta = analytic_skin_depth(1e4, 1e6, 4e-7 * np.pi)
    strip = build_strip(delta, width_deltas=4.0, levels=0)
    with pytest.raises(ValueError, match="5 skin depths"):
        skin_depth_case(1e4, 1e6, 4e-7 * np.pi, strip=strip)


def test_joule_case_against_quadrature_oracle():
    computed, closed_form = joule_average_case((0.5, 0.25), (20.0, 120.0))
    oracle = fine_quadrature_joule((0.5, 0.25), (20.0, 120.0))
    assert abs(closed_form - oracle) / oracle < 1e-6  # oracle vs closed form
    assert abs(computed - oracle) / oracle < 0.01


def test_rk4_reference_constant_theta_closed_form():
    kin = PhaseKinetics(theta_start=1000.0, theta_finish=1100.0, tau0=0.3,
                        latent_scale=0.0)
    z = rk4_phase_reference(lambda t: 1500.0, 0.6, kin, n_steps=4000)
    exact = 1.0 - np.exp(-0.6 / 0.3)
    assert abs(z - exact) < 1e-10


def test_dissipation_audit_passes_on_heating_run():
    cfg = mini_strip_config(t_end=0.02)
    sim = Simulation(cfg)
    res = sim.run()
    report = dissipation_audit(res.records, cfg.kinetics, sim.thermal_ops)
    assert report["passed"]


def test_dissipation_audit_zero_source_cooling():
    # no drive, workpiece above ambient: only the conduction term is active
    # and every term stays nonnegative
    from dataclasses import replace
    cfg = mini_strip_config(t_end=0.02)
    cfg = replace(cfg, a_mf=0.0, a_hf=0.0,
                  thermal=replace(cfg.thermal, theta0=600.0))
    sim = Simulation(cfg)
    res = sim.run()
    report = dissipation_audit(res.records, cfg.kinetics, sim.thermal_ops)
    assert report["passed"]
    assert report["min_joule"] == 0.0 and report["min_phase"] == 0.0
    terms_positive = any(
        np.any(np.asarray(rec.theta) != rec.theta[0]) for rec in res.records)
    # cooling creates gradients after the first step
    assert terms_positive or len(res.records) <= 1


def test_dissipation_audit_flags_adversarial_record():
    from induction2d.driver import StepRecord
    cfg = mini_strip_config(t_end=0.01)
    sim = Simulation(cfg)
    n = sim.sub.num_vertices
    bad = StepRecord(t=0.0,
                     theta=np.full(n, 1050.0),  # inside the ramp
                     z=np.zeros(n),
                     z_rate=np.full(n, -1.0),   # negative by construction
                     joule_nodal=np.zeros(n))
    report = dissipation_audit([bad], cfg.kinetics, sim.thermal_ops)
    assert not report["passed"]
    assert report["min_phase"] < -1e-12
