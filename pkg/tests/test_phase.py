"""Austenite kinetics: rate law, exponential integrator, latent coefficient."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from induction2d.phase import PhaseKinetics, latent_coeff, phase_rate, step_phase

KIN = PhaseKinetics(theta_start=1000.0, theta_finish=1100.0, tau0=1.0, latent_scale=2e8)


def test_rate_vanishes_at_equilibrium():
    theta = 1060.0
    z = KIN.z_eq(theta)
    assert phase_rate(z, theta, KIN) == 0.0


def test_rate_one_sided_above_equilibrium():
    assert phase_rate(0.8, 1020.0, KIN) == 0.0  # z > z_eq there


def test_rate_above_finish_temperature():
    # z_eq = 1 above the finish temperature, so rate = (1 - 0) / tau0
    assert np.isclose(phase_rate(0.0, 1500.0, KIN), 1.0 / KIN.tau0)


def test_step_closed_form_half_life():
    # z_eq = 1, tau = 1, z0 = 0, dt = ln 2 -> z1 = 0.5
    z1 = step_phase(np.zeros(1), np.full(1, 2000.0), math.log(2.0), KIN)
    assert abs(z1[0] - 0.5) < 1e-14


def test_step_no_reverse_transformation():
    z1 = step_phase(np.full(1, 0.8), np.full(1, 1050.0), 0.5, KIN)
    assert z1[0] == 0.8  # z_eq(1050) = 0.5 < z, positive part keeps it fixed


def test_step_matches_rk4_oracle_with_substeps():
    # piecewise-frozen theta over 4 substeps; RK4 integrates each smooth piece
    kin = PhaseKinetics(theta_start=1000.0, theta_finish=1100.0, tau0=0.4,
                        latent_scale=0.0)
    thetas = [990.0, 1040.0, 1080.0, 1200.0]
    sub = 0.04  # = tau/10
    z = np.zeros(1)
    for th in thetas:
        z = step_phase(z, np.full(1, th), sub, kin)

    z_ref = 0.0
    n = 512
    for th in thetas:
        dt = sub / n
        zeq = float(kin.z_eq(th))
        tau = float(kin.tau(th))
        for _ in range(n):
            def f(zi):
                return max(zeq - zi, 0.0) / tau
            k1 = f(z_ref)
            k2 = f(z_ref + dt / 2 * k1)
            k3 = f(z_ref + dt / 2 * k2)
            k4 = f(z_ref + dt * k3)
            z_ref += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert abs(float(z[0]) - z_ref) <= 1e-6


def test_latent_zero_scale():
    kin = PhaseKinetics(theta_start=1000.0, theta_finish=1100.0, tau0=1.0,
                        latent_scale=0.0)
    assert latent_coeff(1050.0, 0.3, kin) == 0.0


def test_latent_vanishes_on_flat_equilibrium():
    theta = 500.0  # z_eq = 0 and z_eq' = 0 below the start temperature
    assert latent_coeff(theta, 0.0, KIN) == 0.0


def test_latent_matches_finite_difference_derivative():
    theta = 1050.0  # middle of the ramp
    h = 1e-4
    dzeq = (KIN.z_eq(theta + h) - KIN.z_eq(theta - h)) / (2 * h)
    expect = -KIN.latent_scale * (KIN.z_eq(theta) - 0.0 - theta * dzeq)
    got = latent_coeff(theta, 0.0, KIN)
    assert abs(got - expect) / abs(expect) < 1e-6


def test_equilibrium_curve_bounds_and_smoothness():
    KIN.check_bounds()
    th = np.linspace(900.0, 1200.0, 4001)
    zeq = KIN.z_eq(th)
    assert zeq.min() >= 0.0 and zeq.max() <= 1.0
    assert np.all(np.diff(zeq) >= 0.0)
    # derivative continuous at the junctions (C^2 smoothstep)
    dz = KIN.z_eq_prime(th)
    assert abs(dz[0]) == 0.0 and abs(dz[-1]) == 0.0
    assert np.max(np.abs(np.diff(dz))) < 1e-3


def free_energy_rate_coeff(theta, z, kin):
    """Coefficient with the Heaviside gate (entropy-form variant)."""
    gap = kin.z_eq(theta) - z
    heav = np.heaviside(gap, 1.0)
    return (-kin.latent_scale * np.maximum(gap, 0.0)
            + kin.latent_scale * theta * kin.z_eq_prime(theta) * heav)


@given(st.floats(800.0, 1400.0), st.floats(0.0, 0.999))
@settings(max_examples=200, deadline=None)
def test_gated_and_lipschitz_forms_agree_times_rate(theta, z):
    # both coefficient forms produce the same product with the rate: the
    # positive part kills the disagreement region
    rate = phase_rate(z, theta, KIN)
    a = -free_energy_rate_coeff(theta, z, KIN) * rate
    b = -latent_coeff(theta, z, KIN) * rate
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@given(st.lists(st.floats(300.0, 2000.0), min_size=1, max_size=30),
       st.floats(1e-3, 0.5))
@settings(max_examples=100, deadline=None)
def test_bounds_and_monotonicity_any_trajectory(thetas, dt):
    z = np.zeros(1)
    prev = 0.0
    for th in thetas:
        z = step_phase(z, np.full(1, th), dt, KIN)
        assert 0.0 <= z[0] < 1.0
        assert z[0] >= prev
        prev = float(z[0])


def test_lipschitz_in_theta():
    # |step(z, th1) - step(z, th2)| <= C dt |th1 - th2| sampled over the ramp
    dt = 0.05
    z0 = np.full(1, 0.2)
    ths = np.linspace(950.0, 1150.0, 81)
    worst = 0.0
    for t1, t2 in zip(ths[:-1], ths[1:]):
        d = abs(step_phase(z0, np.full(1, t1), dt, KIN)[0]
                - step_phase(z0, np.full(1, t2), dt, KIN)[0])
        worst = max(worst, d / abs(t1 - t2))
    # C ~ max |dz_eq/dtheta| * (1 - exp(-dt/tau)) / ... bounded by M * dt / tau
    zeq_slope = np.max(KIN.z_eq_prime(ths))
    assert worst <= zeq_slope * (1.0 - math.exp(-dt / KIN.tau0)) + 1e-9
