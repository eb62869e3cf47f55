"""Heat balance on the workpiece: implicit Euler with lumped mass.

The coarse-scale temperature update uses the period-averaged Joule heating
as a volumetric source and removes the latent heat bound up in the phase
change.  A Robin condition models convective exchange on the workpiece
surface; symmetry cuts are adiabatic.  Implicit Euler plus mass lumping keeps
the update unconditionally stable and (on Delaunay-quality meshes) positive.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import fem
from .mesh import Mesh, OUTER
from .phase import PhaseKinetics, latent_coeff

THETA_FLOOR = 1e-6  # K; guards 1/theta in the entropy-production audit


@dataclass(frozen=True)
class ThermalParams:
    """Volumetric heat capacity, conductivity, surface exchange, initial data.

    c_v   : volumetric heat capacity, J/(m^3 K)
    kappa : thermal conductivity, W/(m K), constant
    eta   : surface heat transfer coefficient, W/(m^2 K)
    g     : ambient boundary source, W/m^2 (eta * ambient temperature for
            equilibrium at the ambient)
    theta0: initial temperature, K
    """

    c_v: float
    kappa: float
    eta: float
    g: float
    theta0: float

    def __post_init__(self):
        if self.c_v <= 0.0 or self.kappa <= 0.0:
            raise ValueError("c_v and kappa must be positive")
        if self.eta < 0.0:
            raise ValueError("eta must be >= 0")
        if self.g < 0.0:
            raise ValueError("boundary source g must be >= 0 (clause v)")
        if self.theta0 < 0.0:
            raise ValueError("theta0 must be >= 0 (clause vi)")


@dataclass
class ThermalOperators:
    """Constant-coefficient operators on the workpiece submesh."""

    mesh: Mesh
    params: ThermalParams
    mass_lumped: sp.csr_matrix
    mass_unit: sp.csr_matrix
    stiffness_unit: sp.csr_matrix
    robin: sp.csr_matrix
    robin_load: np.ndarray
    cg_tol: float = 1e-11
    _dt: float = field(default=0.0, repr=False)
    _lhs: sp.csr_matrix | None = field(default=None, repr=False)

    def prepare(self, dt: float) -> sp.csr_matrix:
        if self._lhs is None or dt != self._dt:
            p = self.params
            self._lhs = ((p.c_v / dt) * self.mass_lumped + p.kappa * self.stiffness_unit
                         + p.eta * self.robin).tocsr()
            self._dt = dt
        return self._lhs


def build_thermal_operators(mesh: Mesh, params: ThermalParams,
                            cg_tol: float = 1e-11) -> ThermalOperators:
    """Assemble the fixed matrices; Robin applies on OUTER edges only
    (symmetry cuts get the natural, adiabatic condition)."""
    robin, load = fem.assemble_robin(mesh, OUTER, 1.0, params.g)
    return ThermalOperators(
        mesh=mesh,
        params=params,
        mass_lumped=fem.assemble_mass(mesh, 1.0, lumped=True),
        mass_unit=fem.assemble_mass(mesh, 1.0),
        stiffness_unit=fem.assemble_stiffness(mesh, 1.0),
        robin=robin,
        robin_load=load,
        cg_tol=cg_tol,
    )


def step_heat(theta_n: np.ndarray, dt: float, qbar_tri: np.ndarray,
              z_n: np.ndarray, z_np1: np.ndarray, kinetics: PhaseKinetics,
              ops: ThermalOperators, extra_source: np.ndarray | None = None,
              extra_load: np.ndarray | None = None) -> np.ndarray:
    """Implicit Euler step of the heat balance.

    Solves (c_v M_L / dt + kappa K + eta R) theta_{n+1} =
    c_v M_L theta_n / dt + load(qbar) + load(g) - load(f(theta_n, z_n) dz/dt).
    `extra_source` (a signed nodal density) and `extra_load` (a preassembled
    load vector, e.g. time-dependent boundary data) serve manufactured
    solutions; the Joule field itself must be nonnegative.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    qbar_tri = np.asarray(qbar_tri, dtype=float)
    if np.any(qbar_tri < 0.0):
        raise ValueError("averaged Joule heating must be >= 0")
    mesh = ops.mesh
    p = ops.params
    lhs = ops.prepare(dt)
    rhs = (p.c_v / dt) * (ops.mass_lumped @ np.asarray(theta_n, dtype=float))
    rhs += fem.load_from_cell_field(mesh, qbar_tri)
    rhs += ops.robin_load
    if kinetics.latent_scale != 0.0:
        f_n = latent_coeff(theta_n, z_n, kinetics)
        sink = f_n * (np.asarray(z_np1) - np.asarray(z_n)) / dt
        rhs -= ops.mass_lumped @ sink
    if extra_source is not None:
        rhs += ops.mass_unit @ np.asarray(extra_source, dtype=float)
    if extra_load is not None:
        rhs += np.asarray(extra_load, dtype=float)
    theta, info = fem.solve_spd(lhs, rhs, tol=ops.cg_tol, x0=np.asarray(theta_n, dtype=float))
    if not info.converged:
        raise RuntimeError(f"thermal solve stalled (relres {info.relative_residual:.2e})")
    return theta


@dataclass
class DissipationTerms:
    """Nodal entropy-production terms; all must be >= 0 for admissibility.

    joule   : sigma |A_t|^2 (time-averaged), W/m^3
    fourier : kappa |grad theta|^2 / theta, W/(m^3 K) scale
    phase   : latent_scale * (z_eq - z)^+ * z_t, W/m^3
    skipped : nodes excluded from the fourier term because theta < floor
    """

    joule: np.ndarray
    fourier: np.ndarray
    phase: np.ndarray
    skipped: int

    def minima(self) -> tuple[float, float, float]:
        def safe_min(v):
            return float(v.min()) if v.size else 0.0
        return safe_min(self.joule), safe_min(self.fourier), safe_min(self.phase)


def dissipation_terms(theta: np.ndarray, z: np.ndarray, z_rate: np.ndarray,
                      joule_nodal: np.ndarray, kinetics: PhaseKinetics,
                      ops: ThermalOperators,
                      theta_floor: float = THETA_FLOOR) -> DissipationTerms:
    """Evaluate the three entropy-production terms at the submesh nodes.

    The phase term uses the supplied rate (not a recomputation), so an
    inconsistent state with a negative rate is flagged by a negative term.
    """
    mesh = ops.mesh
    theta = np.asarray(theta, dtype=float)
    grad = fem.gradient_per_triangle(mesh, theta)
    grad_sq = (grad ** 2).sum(axis=1)
    grad_sq_nodal = fem.cell_to_nodes(mesh, grad_sq)
    mask = theta >= theta_floor
    fourier = np.zeros_like(theta)
    fourier[mask] = ops.params.kappa * grad_sq_nodal[mask] / theta[mask]
    gap = np.maximum(kinetics.z_eq(theta) - np.asarray(z, dtype=float), 0.0)
    phase = kinetics.latent_scale * gap * np.asarray(z_rate, dtype=float)
    return DissipationTerms(
        joule=np.asarray(joule_nodal, dtype=float),
        fourier=fourier,
        phase=phase,
        skipped=int((~mask).sum()),
    )
