"""Two-time-scale coupling of the electromagnetic, thermal, and phase models.

Each coarse step freezes the phase fraction, rebuilds the material fields,
drives the eddy-current problem to its time-periodic state with fine steps,
averages the Joule heating over one source period, and then advances the
phase fraction and the temperature by the coarse step.  The fine problem is
linear within a step because the coefficients are frozen.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import eddy, fem, thermal
from .materials import MaterialModel, inv_mu_field, sigma_field
from .mesh import DomainSpec, Mesh, WORKPIECE, WORKPIECE_SURFACE, build_domain, refine_boundary_layer, submesh
from .phase import PhaseKinetics, step_phase
from .thermal import ThermalParams


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to run a simulation; validated before use."""

    domain: DomainSpec
    materials: MaterialModel
    kinetics: PhaseKinetics
    thermal: ThermalParams
    j0_amplitude: float
    a_mf: float
    a_hf: float
    f_mf: float
    f_hf: float
    t_end: float
    dt_coarse: float
    steps_per_hf: int = 20
    periodic_tol: float = 1e-3
    max_windows: int = 12
    em_cg_tol: float = 1e-9
    em_symmetry_dirichlet: bool = False
    refine_depth: float = 0.0
    refine_levels: int = 0
    probes: tuple[tuple[float, float], ...] = ()
    region_root: tuple[float, float, float, float] | None = None
    region_tip: tuple[float, float, float, float] | None = None
    snapshot_times: tuple[float, ...] = ()

    @property
    def dt_fine(self) -> float:
        return 1.0 / (self.f_hf * self.steps_per_hf)

    @property
    def window(self) -> float:
        return 1.0 / self.f_mf

    def validate(self) -> None:
        self.materials.validate()
        self.kinetics.check_bounds()
        if self.t_end < 0.0:
            raise ValueError("t_end must be >= 0")
        if self.dt_coarse <= 0.0:
            raise ValueError("dt_coarse must be positive")
        if self.steps_per_hf < 20:
            raise ValueError("need >= 20 fine steps per high-frequency period")
        if self.dt_coarse / self.dt_fine < 100.0:
            raise ValueError("coarse/fine step ratio must be >= 100 (scale separation)")
        ratio = self.f_hf / self.f_mf
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError("f_hf must be an integer multiple of f_mf")
        if not np.all(np.isfinite([self.a_mf, self.a_hf, self.f_mf, self.f_hf,
                                   self.j0_amplitude])):
            raise ValueError("source parameters must be finite (clause iii)")


@dataclass
class SimulationState:
    """Coarse-scale solution triple plus the last fine-scale window."""

    t: float
    a: np.ndarray                     # potential on the full domain
    theta: np.ndarray                 # temperature on the workpiece submesh
    z: np.ndarray                     # austenite fraction on the submesh
    periodic: eddy.PeriodicSolveResult | None = None
    diagnostics: dict = field(default_factory=dict)

    def check_invariants(self) -> None:
        if np.any(self.z < -1e-12) or np.any(self.z >= 1.0):
            raise ValueError("z left [0, 1)")
        if np.any(self.theta < -1e-12):
            raise ValueError("negative temperature")


@dataclass
class StepRecord:
    """Audit trail of one coarse step (start-of-step fields, step rates)."""

    t: float
    theta: np.ndarray
    z: np.ndarray
    z_rate: np.ndarray
    joule_nodal: np.ndarray


@dataclass
class Snapshot:
    t: float
    theta: np.ndarray
    z: np.ndarray
    a: np.ndarray
    qbar_tri: np.ndarray


@dataclass
class RunResult:
    state: SimulationState
    header: list[str]
    rows: list[list[float]]
    records: list[StepRecord]
    snapshots: list[Snapshot]


def _region_integral(mesh: Mesh, values: np.ndarray, box) -> float:
    """Integral of a nodal field over the triangles whose centroid lies in box."""
    x0, y0, x1, y1 = box
    c = mesh.centroids
    inside = (c[:, 0] >= x0) & (c[:, 0] <= x1) & (c[:, 1] >= y0) & (c[:, 1] <= y1)
    if not np.any(inside):
        return 0.0
    vals = values[mesh.triangles[inside]].mean(axis=1)
    return float((vals * mesh.triangle_areas[inside]).sum())


class Simulation:
    """Owns the meshes and constant operators of one configured run."""

    def __init__(self, cfg: RunConfig):
        cfg.validate()
        self.cfg = cfg
        mesh = build_domain(cfg.domain)
        if cfg.refine_levels > 0:
            mesh = refine_boundary_layer(mesh, WORKPIECE_SURFACE,
                                         cfg.refine_depth, cfg.refine_levels)
        self.mesh = mesh
        self.sub, self.submap = submesh(mesh, WORKPIECE)
        self.thermal_ops = thermal.build_thermal_operators(self.sub, cfg.thermal)
        self.mass_unit = fem.assemble_mass(mesh, 1.0)
        self.j0 = eddy.uniform_coil_density(mesh, cfg.j0_amplitude)
        self.waveform = eddy.SourceWaveform(j0=self.j0, a_mf=cfg.a_mf, a_hf=cfg.a_hf,
                                            f_mf=cfg.f_mf, f_hf=cfg.f_hf)
        if cfg.probes:
            pts = np.asarray(cfg.probes, dtype=float)
            tri_idx, bary = self.sub.locate(pts)
            if np.any(tri_idx < 0):
                raise ValueError("probe point outside the workpiece")
            self._probe_tris = tri_idx
            self._probe_bary = bary
        else:
            self._probe_tris = np.empty(0, dtype=int)
            self._probe_bary = np.empty((0, 3))

    def initial_state(self) -> SimulationState:
        n = self.mesh.num_vertices
        ns = self.sub.num_vertices
        return SimulationState(
            t=0.0,
            a=np.zeros(n),
            theta=np.full(ns, self.cfg.thermal.theta0),
            z=np.zeros(ns),
        )

    def _probe(self, values: np.ndarray) -> np.ndarray:
        if self._probe_tris.size == 0:
            return np.empty(0)
        return (values[self.sub.triangles[self._probe_tris]] * self._probe_bary).sum(axis=1)

    def coarse_step(self, state: SimulationState) -> tuple[SimulationState, StepRecord, np.ndarray]:
        """One coarse step: EM periodic solve, Joule average, phase, heat."""
        cfg = self.cfg
        state.check_invariants()
        z_full = self.submap.extend(state.z, self.mesh.num_vertices)
        sigma_tri = sigma_field(cfg.materials, self.mesh, z_full)
        inv_mu_tri = inv_mu_field(cfg.materials, self.mesh, z_full)
        ops = eddy.build_eddy_operators(self.mesh, sigma_tri, inv_mu_tri, self.waveform,
                                        symmetry_dirichlet=cfg.em_symmetry_dirichlet,
                                        cg_tol=cfg.em_cg_tol, mass_unit=self.mass_unit)
        periodic = eddy.run_to_periodic(state.a, ops, cfg.dt_fine, cfg.window,
                                        tol=cfg.periodic_tol, max_windows=cfg.max_windows)
        qbar_tri = eddy.averaged_joule(periodic, sigma_tri, self.mesh,
                                       require_converged=False)
        qbar_sub = qbar_tri[self.submap.tri_map]

        z_new = step_phase(state.z, state.theta, cfg.dt_coarse, cfg.kinetics)
        theta_new = thermal.step_heat(state.theta, cfg.dt_coarse, qbar_sub,
                                      state.z, z_new, cfg.kinetics, self.thermal_ops)

        record = StepRecord(
            t=state.t + cfg.dt_coarse,
            theta=state.theta.copy(),
            z=state.z.copy(),
            z_rate=(z_new - state.z) / cfg.dt_coarse,
            joule_nodal=fem.cell_to_nodes(self.sub, qbar_sub),
        )
        diag = {
            "em_windows": periodic.windows,
            "em_change": periodic.change,
            "em_converged": periodic.converged,
            "em_cg_iterations": periodic.cg_iterations,
        }
        new_state = SimulationState(
            t=state.t + cfg.dt_coarse,
            a=periodic.samples[-1].copy(),
            theta=theta_new,
            z=z_new,
            periodic=periodic,
            diagnostics=diag,
        )
        new_state.check_invariants()
        return new_state, record, qbar_tri

    def timeseries_header(self) -> list[str]:
        cols = ["t", "theta_min", "theta_max", "z_min", "z_max"]
        for i in range(len(self.cfg.probes)):
            cols += [f"theta_probe_{i}", f"z_probe_{i}"]
        if self.cfg.region_root is not None:
            cols.append("z_int_root")
        if self.cfg.region_tip is not None:
            cols.append("z_int_tip")
        cols += ["diss_min_joule", "diss_min_fourier", "diss_min_phase",
                 "em_windows", "em_change", "em_cg_iterations"]
        return cols

    def _row(self, state: SimulationState, diss_min) -> list[float]:
        row = [state.t, float(state.theta.min()), float(state.theta.max()),
               float(state.z.min()), float(state.z.max())]
        th_p = self._probe(state.theta)
        z_p = self._probe(state.z)
        for i in range(len(self.cfg.probes)):
            row += [float(th_p[i]), float(z_p[i])]
        if self.cfg.region_root is not None:
            row.append(_region_integral(self.sub, state.z, self.cfg.region_root))
        if self.cfg.region_tip is not None:
            row.append(_region_integral(self.sub, state.z, self.cfg.region_tip))
        row += list(diss_min)
        d = state.diagnostics
        row += [float(d.get("em_windows", 0)), float(d.get("em_change", 0.0)),
                float(d.get("em_cg_iterations", 0))]
        return row

    def run(self, quiet: bool = True) -> RunResult:
        """Iterate coarse steps from t=0 to t_end, logging one row per step."""
        cfg = self.cfg
        state = self.initial_state()
        rows = [self._row(state, (0.0, 0.0, 0.0))]
        records: list[StepRecord] = []
        snapshots: list[Snapshot] = []
        pending = sorted(cfg.snapshot_times)
        n_steps = int(round(cfg.t_end / cfg.dt_coarse))
        if abs(n_steps * cfg.dt_coarse - cfg.t_end) > 1e-9 * max(cfg.t_end, cfg.dt_coarse):
            raise ValueError("dt_coarse must divide t_end")
        qbar_tri = np.zeros(self.mesh.num_triangles)
        if pending and pending[0] <= 1e-12:
            snapshots.append(self._snapshot(state, qbar_tri))
            pending.pop(0)
        for k in range(n_steps):
            state, record, qbar_tri = self.coarse_step(state)
            records.append(record)
            terms = thermal.dissipation_terms(record.theta, record.z, record.z_rate,
                                              record.joule_nodal, cfg.kinetics,
                                              self.thermal_ops)
            rows.append(self._row(state, terms.minima()))
            while pending and state.t >= pending[0] - 1e-12:
                snapshots.append(self._snapshot(state, qbar_tri))
                pending.pop(0)
            if not quiet:
                print(f"step {k + 1}/{n_steps} t={state.t:.6g} "
                      f"theta_max={state.theta.max():.1f} z_max={state.z.max():.4f} "
                      f"em_windows={state.diagnostics['em_windows']}")
        return RunResult(state=state, header=self.timeseries_header(), rows=rows,
                         records=records, snapshots=snapshots)

    def _snapshot(self, state: SimulationState, qbar_tri: np.ndarray) -> Snapshot:
        return Snapshot(t=state.t, theta=state.theta.copy(), z=state.z.copy(),
                        a=state.a.copy(), qbar_tri=qbar_tri.copy())


def run_simulation(cfg: RunConfig, quiet: bool = True) -> RunResult:
    return Simulation(cfg).run(quiet=quiet)


def _final_norms(sim: Simulation, base: RunResult, pert: RunResult) -> float:
    """Sum of the final-time difference norms used by the sensitivity probe."""
    sub_mass = sim.thermal_ops.mass_unit
    sub_stiff = sim.thermal_ops.stiffness_unit
    d_theta = pert.state.theta - base.state.theta
    d_z = pert.state.z - base.state.z
    at_base = base.state.periodic.at_mid[-1] if base.state.periodic else np.zeros_like(base.state.a)
    at_pert = pert.state.periodic.at_mid[-1] if pert.state.periodic else np.zeros_like(pert.state.a)
    d_at = at_pert - at_base
    n_theta = fem.l2_norm(sub_mass, d_theta)
    n_at = fem.l2_norm(sim.mass_unit, d_at)
    n_z = np.sqrt(fem.l2_norm(sub_mass, d_z) ** 2 + fem.l2_norm(sub_stiff, d_z) ** 2)
    return n_theta + n_at + n_z


def stability_probe(cfg: RunConfig, eps: float, perturb: str = "source") -> dict:
    """Two-run sensitivity ratio D(eps) and the halved-step ratio D(eps/2).

    Perturbs the drive signal (or the initial temperature) by relative eps and
    eps/2 and reports D = (sum of final difference norms) / eps for both; a
    ratio D(eps/2)/D(eps) in [0.5, 2] indicates first-order data-to-solution
    sensitivity.
    """
    if eps < 0.0:
        raise ValueError("eps must be >= 0")

    def perturbed(cfg0: RunConfig, e: float) -> RunConfig:
        if perturb == "source":
            return replace(cfg0, a_mf=cfg0.a_mf * (1.0 + e), a_hf=cfg0.a_hf * (1.0 + e))
        if perturb == "theta0":
            return replace(cfg0, thermal=replace(cfg0.thermal,
                                                 theta0=cfg0.thermal.theta0 * (1.0 + e)))
        raise ValueError("perturb must be 'source' or 'theta0'")

    sim = Simulation(cfg)
    base = sim.run()
    out: dict = {"eps": eps, "perturb": perturb}
    if eps == 0.0:
        out["D"] = 0.0
        out["D_half"] = 0.0
        out["ratio"] = 1.0
        return out
    for label, e in (("D", eps), ("D_half", eps / 2.0)):
        pert = Simulation(perturbed(cfg, e)).run()
        out[label] = _final_norms(sim, base, pert) / e
    out["ratio"] = out["D_half"] / out["D"] if out["D"] > 0.0 else np.nan
    return out


def scale_separation_report(cfg: RunConfig) -> dict:
    """Relative change of the final temperature when the fine step is halved.

    Reports the relative L2 difference; the default budget for an adequately
    resolved run is 2%.
    """
    sim = Simulation(cfg)
    base = sim.run()
    fine = Simulation(replace(cfg, steps_per_hf=2 * cfg.steps_per_hf)).run()
    d = fine.state.theta - base.state.theta
    mass = sim.thermal_ops.mass_unit
    rel = fem.l2_norm(mass, d) / max(fem.l2_norm(mass, fine.state.theta), 1e-300)
    return {"relative_theta_change": float(rel), "budget": 0.02,
            "within_budget": bool(rel <= 0.02)}
