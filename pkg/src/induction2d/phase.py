"""Austenite fraction kinetics: one-sided relaxation toward equilibrium.

The fraction z grows toward a temperature-dependent equilibrium z_eq(theta)
with time constant tau(theta) and never decreases (heating model only).  The
equilibrium curve is a C^2 quintic smoothstep between the transformation
start and finish temperatures; tau is constant by default.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _smoothstep5(x):
    """Quintic smoothstep: 0 below 0, 1 above 1, C^2 across the junctions."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return ((6.0 * x - 15.0) * x + 10.0) * x ** 3


def _smoothstep5_prime(x):
    xa = np.asarray(x, dtype=float)
    inside = (xa > 0.0) & (xa < 1.0)
    xc = np.clip(xa, 0.0, 1.0)
    d = 30.0 * xc ** 2 * (xc - 1.0) ** 2
    return np.where(inside, d, 0.0)


@dataclass(frozen=True)
class PhaseKinetics:
    """Equilibrium curve, time constant, and latent heat scale.

    theta_start  : transformation start temperature, K (z_eq = 0 below)
    theta_finish : transformation finish temperature, K (z_eq = 1 above)
    tau0         : relaxation time constant, s (constant law; tau_* = tau^*)
    latent_scale : latent heat per unit fraction, J/m^3
    """

    theta_start: float
    theta_finish: float
    tau0: float
    latent_scale: float = 0.0

    def __post_init__(self):
        if not (self.theta_finish > self.theta_start):
            raise ValueError("theta_finish must exceed theta_start")
        if not (self.tau0 > 0.0):
            raise ValueError("tau must be positive (clause iv)")

    @property
    def tau_min(self) -> float:
        return self.tau0

    @property
    def tau_max(self) -> float:
        return self.tau0

    def z_eq(self, theta):
        """Equilibrium austenite fraction in [0, 1]."""
        x = (np.asarray(theta, dtype=float) - self.theta_start) / (self.theta_finish - self.theta_start)
        return _smoothstep5(x)

    def z_eq_prime(self, theta):
        x = (np.asarray(theta, dtype=float) - self.theta_start) / (self.theta_finish - self.theta_start)
        return _smoothstep5_prime(x) / (self.theta_finish - self.theta_start)

    def tau(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), self.tau0)

    def check_bounds(self, theta_lo: float = 0.0, theta_hi: float = 3000.0,
                     samples: int = 2001) -> None:
        """Sampled admissibility check of the equilibrium and tau laws."""
        th = np.linspace(theta_lo, theta_hi, samples)
        zeq = self.z_eq(th)
        if zeq.min() < -1e-14 or zeq.max() > 1.0 + 1e-14:
            raise ValueError("z_eq leaves [0, 1] (clause iv)")
        tau = self.tau(th)
        if tau.min() <= 0.0:
            raise ValueError("tau not positive (clause iv)")


def phase_rate(z, theta, kinetics: PhaseKinetics):
    """Transformation rate (z_eq(theta) - z)^+ / tau(theta); always >= 0."""
    gap = np.maximum(kinetics.z_eq(theta) - np.asarray(z, dtype=float), 0.0)
    return gap / kinetics.tau(theta)


def step_phase(z, theta, dt: float, kinetics: PhaseKinetics):
    """Advance z by dt with theta frozen (exact exponential integrator).

    Guarantees z_n <= z_{n+1} < 1 and z_{n+1} <= max(z_n, z_eq(theta)) for
    z_n in [0, 1); never reaches z_eq in finite time.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    z = np.asarray(z, dtype=float)
    zeq = kinetics.z_eq(theta)
    decay = np.exp(-dt / kinetics.tau(theta))
    znew = zeq - (zeq - z) * decay
    return np.where(z < zeq, znew, z)


def latent_coeff(theta, z, kinetics: PhaseKinetics):
    """Latent-heat coefficient -L (z_eq(theta) - z - theta z_eq'(theta)).

    Multiplied by z_t it is the phase term removed from the heat balance; it
    is Lipschitz and bounded for bounded theta * z_eq'.
    """
    theta = np.asarray(theta, dtype=float)
    return -kinetics.latent_scale * (kinetics.z_eq(theta) - np.asarray(z, dtype=float)
                                     - theta * kinetics.z_eq_prime(theta))
