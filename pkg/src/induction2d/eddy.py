"""Time-domain eddy-current solver for the out-of-plane vector potential.

With the source current and the potential both out of plane, the curl-curl
operator reduces to a scalar diffusion operator: sigma dA/dt - div((1/mu)
grad A) = u(t) J0.  The potential is pinned to zero on the outer boundary;
symmetry cuts are flux-free (natural) by default.  A Crank-Nicolson scheme
is run over source periods until the solution is time-periodic, and the
Joule heating is averaged over the final period.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import fem
from .mesh import COIL, OUTER, SYMMETRY, Mesh


@dataclass(frozen=True)
class SourceWaveform:
    """Coil current density J0 (per triangle) modulated by a two-tone signal
    u(t) = a_mf sin(2 pi f_mf t) + a_hf sin(2 pi f_hf t).

    The high frequency must be an integer multiple of the medium frequency so
    the combined signal is periodic with period 1/f_mf.
    """

    j0: np.ndarray
    a_mf: float
    a_hf: float
    f_mf: float
    f_hf: float

    def __post_init__(self):
        if not (self.f_mf > 0.0):
            raise ValueError("f_mf must be positive")
        ratio = self.f_hf / self.f_mf
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError("f_hf must be an integer multiple (>= 1) of f_mf")
        if not np.all(np.isfinite([self.a_mf, self.a_hf, self.f_mf, self.f_hf])):
            raise ValueError("waveform parameters must be finite")

    @property
    def harmonic(self) -> int:
        return int(round(self.f_hf / self.f_mf))

    @property
    def period(self) -> float:
        """Common period of both tones (the averaging window)."""
        return 1.0 / self.f_mf

    def u(self, t):
        """Dimensionless drive signal at time t."""
        t = np.asarray(t, dtype=float)
        return (self.a_mf * np.sin(2.0 * np.pi * self.f_mf * t)
                + self.a_hf * np.sin(2.0 * np.pi * self.f_hf * t))


def uniform_coil_density(mesh: Mesh, j0: float) -> np.ndarray:
    """Per-triangle source density: j0 on COIL triangles, zero elsewhere."""
    out = np.zeros(mesh.num_triangles)
    out[mesh.region == COIL] = j0
    return out


def check_j0_support(mesh: Mesh, j0: np.ndarray) -> None:
    j0 = np.asarray(j0, dtype=float)
    if j0.shape != (mesh.num_triangles,):
        raise ValueError("J0 must be a per-triangle field")
    if np.any(j0[mesh.region != COIL] != 0.0):
        raise ValueError("J0 must be supported on COIL triangles only")


def assemble_eddy(mesh: Mesh, sigma_tri: np.ndarray,
                  inv_mu_tri: np.ndarray) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Conductivity-weighted mass and reluctivity-weighted stiffness.

    M_sigma has zero rows exactly at pure-air nodes; K becomes SPD once the
    outer-boundary nodes are eliminated.
    """
    m_sigma = fem.assemble_mass(mesh, sigma_tri)
    k = fem.assemble_stiffness(mesh, inv_mu_tri)
    return m_sigma, k


@dataclass
class EddyOperators:
    """Assembled operators plus boundary data for the fine time stepping.

    The mesh reference is only needed by mesh-aware consumers (Joule
    averaging); pure matrix surrogates may pass None.
    """

    mesh: Mesh | None
    m_sigma: sp.csr_matrix
    k: sp.csr_matrix
    load_fn: Callable[[float], np.ndarray]
    dirichlet: np.ndarray
    mass_unit: sp.csr_matrix
    cg_tol: float = 1e-9
    cg_maxit: int | None = None
    _dt: float = field(default=0.0, repr=False)
    _lhs: sp.csr_matrix | None = field(default=None, repr=False)
    _rhs_mat: sp.csr_matrix | None = field(default=None, repr=False)

    def prepare(self, dt: float) -> None:
        """Cache the constrained CN system matrices for time step dt."""
        if self._lhs is not None and dt == self._dt:
            return
        lhs = (self.m_sigma / dt + 0.5 * self.k).tocsr()
        self._lhs = fem.constrain_matrix(lhs, self.dirichlet)
        self._rhs_mat = (self.m_sigma / dt - 0.5 * self.k).tocsr()
        self._dt = dt

    @property
    def lhs(self) -> sp.csr_matrix:
        return self._lhs

    @property
    def rhs_mat(self) -> sp.csr_matrix:
        return self._rhs_mat


def build_eddy_operators(mesh: Mesh, sigma_tri: np.ndarray, inv_mu_tri: np.ndarray,
                         waveform: SourceWaveform, symmetry_dirichlet: bool = False,
                         cg_tol: float = 1e-9, mass_unit: sp.csr_matrix | None = None) -> EddyOperators:
    """Assemble the CN operators for frozen material fields.

    The potential is pinned to zero on OUTER edges; SYMMETRY edges are
    flux-free unless `symmetry_dirichlet` is set.
    """
    check_j0_support(mesh, waveform.j0)
    m_sigma, k = assemble_eddy(mesh, sigma_tri, inv_mu_tri)
    b0 = fem.load_from_cell_field(mesh, waveform.j0)
    dirichlet = mesh.boundary_vertices(OUTER)
    if symmetry_dirichlet:
        dirichlet = np.union1d(dirichlet, mesh.boundary_vertices(SYMMETRY))
    if mass_unit is None:
        mass_unit = fem.assemble_mass(mesh, 1.0)

    def load_fn(t: float) -> np.ndarray:
        return waveform.u(t) * b0

    return EddyOperators(mesh=mesh, m_sigma=m_sigma, k=k, load_fn=load_fn,
                         dirichlet=dirichlet, mass_unit=mass_unit, cg_tol=cg_tol)


def step_cn(a_n: np.ndarray, t_n: float, dt: float, ops: EddyOperators) -> tuple[np.ndarray, fem.SolveInfo]:
    """One Crank-Nicolson step of the potential equation.

    Solves (M_sigma/dt + K/2) A_{n+1} = (M_sigma/dt - K/2) A_n
           + (b(t_n) + b(t_n + dt)) / 2 with A = 0 on the outer boundary.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    ops.prepare(dt)
    rhs = ops.rhs_mat @ a_n + 0.5 * (ops.load_fn(t_n) + ops.load_fn(t_n + dt))
    rhs[ops.dirichlet] = 0.0
    a_next, info = fem.solve_spd(ops.lhs, rhs, tol=ops.cg_tol, maxit=ops.cg_maxit, x0=a_n)
    if not info.converged:
        raise RuntimeError(f"eddy CN solve stalled (relres {info.relative_residual:.2e})")
    a_next[ops.dirichlet] = 0.0
    return a_next, info


@dataclass
class PeriodicSolveResult:
    """Fine-scale samples of the final averaging window.

    samples    : (n_steps + 1) nodal potentials covering one window
    at_mid     : n_steps midpoint time derivatives (A_{k+1} - A_k) / dt
    dt         : fine step
    window     : averaging window length (source period)
    windows    : number of windows simulated
    change     : final relative window-to-window L2(time; L2(D)) difference
    converged  : change <= tol
    cg_iterations : total CG iterations spent
    """

    samples: list[np.ndarray]
    at_mid: list[np.ndarray]
    dt: float
    window: float
    windows: int
    change: float
    converged: bool
    cg_iterations: int
    change_history: list[float] = field(default_factory=list)


def _window_metric(mass: sp.csr_matrix, samples_new, samples_old, dt: float) -> tuple[float, float]:
    """Trapezoid-in-time L2(D) norms of (difference, new window)."""
    num = 0.0
    den = 0.0
    n = len(samples_new) - 1
    for k in range(n + 1):
        w = 0.5 * dt if k in (0, n) else dt
        d = samples_new[k] - samples_old[k]
        num += w * float(d @ (mass @ d))
        den += w * float(samples_new[k] @ (mass @ samples_new[k]))
    return np.sqrt(max(num, 0.0)), np.sqrt(max(den, 0.0))


def run_to_periodic(a_init: np.ndarray, ops: EddyOperators, dt: float, window: float,
                    tol: float = 1e-3, max_windows: int = 12) -> PeriodicSolveResult:
    """March windows of CN steps until the solution repeats period to period.

    The window must be an integer number of fine steps.  Convergence is the
    relative L2-in-time difference between consecutive windows; failure to
    converge is flagged, not fatal.
    """
    n_steps = int(round(window / dt))
    if abs(n_steps * dt - window) > 1e-9 * window or n_steps < 1:
        raise ValueError("dt must divide the averaging window")
    prev = [np.asarray(a_init, dtype=float)] * (n_steps + 1)
    change = np.inf
    converged = False
    total_iters = 0
    windows = 0
    cur = None
    history: list[float] = []
    for _ in range(max_windows):
        windows += 1
        cur = [prev[-1].copy()]
        for k in range(n_steps):
            # window-local time keeps the load exactly periodic (no drift)
            a_next, info = step_cn(cur[-1], k * dt, dt, ops)
            total_iters += info.iterations
            cur.append(a_next)
        num, den = _window_metric(ops.mass_unit, cur, prev, dt)
        change = num / den if den > 0.0 else num
        history.append(float(change))
        prev = cur
        if change <= tol:
            converged = True
            break
    at_mid = [(cur[k + 1] - cur[k]) / dt for k in range(n_steps)]
    return PeriodicSolveResult(samples=cur, at_mid=at_mid, dt=dt, window=window,
                               windows=windows, change=float(change),
                               converged=converged, cg_iterations=total_iters,
                               change_history=history)


def averaged_joule(result: PeriodicSolveResult, sigma_tri: np.ndarray, mesh: Mesh,
                   require_converged: bool = True) -> np.ndarray:
    """Per-triangle Joule heating averaged over the final window, W/m^3.

    Q_T = (1/window) * sum_k dt * sigma_T * mean_vertices(A_t^2) evaluated at
    the step midpoints; identically zero on air.
    """
    if not result.at_mid:
        raise ValueError("empty sample list")
    if require_converged and not result.converged:
        raise RuntimeError("periodic solve did not converge; pass "
                           "require_converged=False to average anyway")
    sigma_tri = np.asarray(sigma_tri, dtype=float)
    at = np.stack(result.at_mid)             # (n_steps, n_nodes)
    at2_tri = (at[:, mesh.triangles] ** 2).mean(axis=2)   # (n_steps, n_tris)
    return sigma_tri * at2_tri.mean(axis=0)


def compute_b(mesh: Mesh, a: np.ndarray) -> np.ndarray:
    """Magnetic induction per triangle: the 90-degree rotated gradient
    (dA/dy, -dA/dx), in teslas."""
    g = fem.gradient_per_triangle(mesh, a)
    return np.stack([g[:, 1], -g[:, 0]], axis=1)
