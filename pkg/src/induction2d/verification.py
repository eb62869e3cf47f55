"""Self-contained verification battery.

All oracles are closed-form or brute-force: the analytic half-space skin
depth, manufactured solutions with substituted sources, exact single-tone
Joule averages, a Runge-Kutta reference for the phase ODE, and in-memory
reruns for determinism.  No external data is consulted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import eddy, fem, thermal
from .driver import RunConfig, Simulation, StepRecord, stability_probe
from .materials import MU_VACUUM, MaterialModel, ZLinearLaw
from .mesh import COIL, DomainSpec, Mesh, OUTER, WORKPIECE, WORKPIECE_SURFACE, build_domain, refine_boundary_layer
from .phase import PhaseKinetics, phase_rate, step_phase
from .thermal import ThermalParams


@dataclass
class OrderReport:
    """Observed convergence order from a least-squares log-log fit."""

    sizes: list[float]
    errors: list[float]
    observed_order: float

    @staticmethod
    def from_errors(sizes, errors) -> "OrderReport":
        sizes = [float(s) for s in sizes]
        errors = [float(e) for e in errors]
        if len(sizes) < 3:
            raise ValueError("need at least 3 refinement levels")
        if any(e <= 0.0 for e in errors):
            raise ValueError("errors must be strictly positive")
        slope = np.polyfit(np.log(sizes), np.log(errors), 1)[0]
        return OrderReport(sizes=sizes, errors=errors, observed_order=float(slope))


def analytic_skin_depth(f: float, sigma: float, mu: float) -> float:
    """Half-space penetration depth sqrt(2 / (2 pi f mu sigma))."""
    return math.sqrt(2.0 / (2.0 * math.pi * f * mu * sigma))


@dataclass
class StripGeometry:
    """1D-like conductor strip driven by an adjacent coil slab."""

    mesh: Mesh
    x_surface: float
    width: float
    height: float


def build_strip(delta: float, width_deltas: float = 8.0, h_deltas: float = 0.8,
                levels: int = 2, band_deltas: float = 4.5) -> StripGeometry:
    """Strip geometry sized in units of the skin depth `delta`.

    Long sides are symmetry cuts so the problem is exactly one-dimensional;
    the workpiece far face sits on the outer boundary (shielded end).  The
    surface band of depth `band_deltas * delta` is red-refined `levels` times.
    """
    h = h_deltas * delta
    width = width_deltas * delta
    gap = 2.0 * h
    coil_w = 2.0 * h
    x_surface = gap + coil_w + gap
    height = 3.0 * h
    box = (0.0, 0.0, x_surface + width, height)
    workpiece = np.array([[x_surface, 0.0], [box[2], 0.0], [box[2], height], [x_surface, height]])
    coil = np.array([[gap, 0.0], [gap + coil_w, 0.0], [gap + coil_w, height], [gap, height]])
    spec = DomainSpec(box=box, workpiece=workpiece, coils=(coil,), h=h,
                      symmetry_sides=("top", "bottom"))
    mesh = build_domain(spec)
    if levels > 0:
        mesh = refine_boundary_layer(mesh, WORKPIECE_SURFACE, band_deltas * delta, levels)
    return StripGeometry(mesh=mesh, x_surface=x_surface, width=width, height=height)


@dataclass
class SkinDepthReport:
    f: float
    sigma: float
    mu: float
    delta_analytic: float
    delta_fitted: float
    relative_error: float
    windows: int
    converged: bool
    depths: np.ndarray
    amplitudes: np.ndarray


def skin_depth_case(f: float, sigma: float, mu: float, strip: StripGeometry | None = None,
                    fit_lo_deltas: float = 0.8, fit_hi_deltas: float = 4.0,
                    steps_per_period: int = 32, tol: float = 1e-3,
                    max_windows: int = 60) -> SkinDepthReport:
    """Fit the decay length of the time-amplitude of A_t into the conductor.

    Runs the eddy solver to periodicity on the strip, samples the RMS of A_t
    along the centerline, and fits a log-linear decay over
    [fit_lo_deltas, fit_hi_deltas] skin depths below the driven surface (the
    driven face is excluded; the window stays clear of the shielded end so
    the half-space solution applies).
    """
    delta = analytic_skin_depth(f, sigma, mu)
    if strip is None:
        strip = build_strip(delta)
    if strip.width < 5.0 * delta:
        raise ValueError("strip must be at least 5 skin depths wide")
    mesh = strip.mesh
    sigma_tri = np.zeros(mesh.num_triangles)
    sigma_tri[mesh.region == WORKPIECE] = sigma
    sigma_tri[mesh.region == COIL] = 1.0  # quasi-static coil
    inv_mu_tri = np.full(mesh.num_triangles, 1.0 / MU_VACUUM)
    inv_mu_tri[mesh.region == WORKPIECE] = 1.0 / mu

    waveform = eddy.SourceWaveform(j0=eddy.uniform_coil_density(mesh, 1e6),
                                   a_mf=1.0, a_hf=0.0, f_mf=f, f_hf=f)
    ops = eddy.build_eddy_operators(mesh, sigma_tri, inv_mu_tri, waveform)
    dt = 1.0 / (f * steps_per_period)
    result = eddy.run_to_periodic(np.zeros(mesh.num_vertices), ops, dt, 1.0 / f,
                                  tol=tol, max_windows=max_windows)
    at = np.stack(result.at_mid)
    amp = np.sqrt((at ** 2).mean(axis=0))

    depths = np.linspace(fit_lo_deltas * delta, fit_hi_deltas * delta, 40)
    pts = np.column_stack([strip.x_surface + depths,
                           np.full_like(depths, 0.5 * strip.height)])
    values = mesh.interpolate(amp, pts)
    if np.any(values <= 0.0):
        raise RuntimeError("skin fit failed: vanished amplitude in fit window")
    rise = np.diff(values) > 1e-3 * values[:-1]
    if np.any(rise):
        raise RuntimeError("skin fit failed: non-monotone amplitude profile")
    slope = np.polyfit(depths, np.log(values), 1)[0]
    if slope >= 0.0:
        raise RuntimeError("skin fit failed: non-decaying profile")
    fitted = -1.0 / float(slope)
    return SkinDepthReport(
        f=f, sigma=sigma, mu=mu,
        delta_analytic=delta, delta_fitted=fitted,
        relative_error=abs(fitted - delta) / delta,
        windows=result.windows, converged=result.converged,
        depths=depths, amplitudes=values,
    )


# ---------------------------------------------------------------------------
# manufactured solutions

def _unit_square_mesh(h: float) -> Mesh:
    poly = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return build_domain(DomainSpec(box=(0.0, 0.0, 1.0, 1.0), workpiece=poly, h=h))


def _heat_mms_error(h: float, t_end: float, dt: float) -> float:
    """L2 error at t_end for theta* = exp(-t) cos(pi x) cos(pi y) with
    c_v = kappa = eta = 1 and the matching substituted source and boundary
    data."""
    mesh = _unit_square_mesh(h)
    params = ThermalParams(c_v=1.0, kappa=1.0, eta=1.0, g=0.0, theta0=0.0)
    ops = thermal.build_thermal_operators(mesh, params, cg_tol=1e-13)
    kin = PhaseKinetics(theta_start=1e6, theta_finish=2e6, tau0=1.0, latent_scale=0.0)
    x = mesh.vertices[:, 0]
    y = mesh.vertices[:, 1]
    cospi = np.cos(np.pi * x) * np.cos(np.pi * y)

    def exact(t):
        return math.exp(-t) * cospi

    def source(t):
        # c_v theta_t - kappa Lap(theta) = (-1 + 2 pi^2) exact
        return (2.0 * np.pi ** 2 - 1.0) * math.exp(-t) * cospi

    def boundary_load(t):
        # kappa dtheta/dnu vanishes on the square's faces; g = eta * theta*
        def g(px, py):
            return math.exp(-t) * math.cos(math.pi * px) * math.cos(math.pi * py)
        _, load = fem.assemble_robin(mesh, OUTER, 1.0, g)
        return load

    theta = exact(0.0).copy()
    z = np.zeros(mesh.num_vertices)
    qzero = np.zeros(mesh.num_triangles)
    n_steps = int(round(t_end / dt))
    for k in range(n_steps):
        t_new = (k + 1) * dt
        theta = thermal.step_heat(theta, dt, qzero, z, z, kin, ops,
                                  extra_source=source(t_new),
                                  extra_load=boundary_load(t_new))
    return fem.l2_norm(ops.mass_unit, theta - exact(t_end))


def manufactured_heat_order(levels: int = 3) -> OrderReport:
    """Spatial L2 order of the thermal scheme (dt scaled with h^2)."""
    if levels < 3:
        raise ValueError("need at least 3 levels")
    hs = [1.0 / 8 * 0.5 ** k for k in range(levels)]
    t_end = 0.1
    errors = [_heat_mms_error(h, t_end, dt=t_end / round(t_end / (0.4 * h * h)))
              for h in hs]
    return OrderReport.from_errors(hs, errors)


def manufactured_heat_temporal_order(levels: int = 3, h: float = 1.0 / 12) -> OrderReport:
    """Temporal order of implicit Euler by Richardson differences on a fixed
    mesh (spatial error cancels)."""
    t_end = 0.2
    dts = [0.05 * 0.5 ** k for k in range(levels + 1)]
    mesh = _unit_square_mesh(h)
    mass = fem.assemble_mass(mesh, 1.0)
    sols = []
    for dt in dts:
        # reuse the MMS march on the fixed mesh
        params = ThermalParams(c_v=1.0, kappa=1.0, eta=1.0, g=0.0, theta0=0.0)
        ops = thermal.build_thermal_operators(mesh, params, cg_tol=1e-13)
        kin = PhaseKinetics(theta_start=1e6, theta_finish=2e6, tau0=1.0, latent_scale=0.0)
        x = mesh.vertices[:, 0]
        y = mesh.vertices[:, 1]
        cospi = np.cos(np.pi * x) * np.cos(np.pi * y)
        theta = cospi.copy()
        z = np.zeros(mesh.num_vertices)
        qzero = np.zeros(mesh.num_triangles)
        for k in range(int(round(t_end / dt))):
            t_new = (k + 1) * dt
            src = (2.0 * np.pi ** 2 - 1.0) * math.exp(-t_new) * cospi

            def g(px, py, t=t_new):
                return math.exp(-t) * math.cos(math.pi * px) * math.cos(math.pi * py)
            _, load = fem.assemble_robin(mesh, OUTER, 1.0, g)
            theta = thermal.step_heat(theta, dt, qzero, z, z, kin, ops,
                                      extra_source=src, extra_load=load)
        sols.append(theta)
    errors = [fem.l2_norm(mass, sols[k] - sols[k + 1]) for k in range(levels)]
    return OrderReport.from_errors(dts[:levels], errors)


def _em_mms_error(h: float, dt: float, t_end: float) -> float:
    """L2 error at t_end for A* = sin(w t) sin(pi x) sin(pi y) on an
    all-conductor unit square with sigma = 1, 1/mu = 1."""
    mesh = _unit_square_mesh(h)
    omega = 2.0 * np.pi
    x = mesh.vertices[:, 0]
    y = mesh.vertices[:, 1]
    shape = np.sin(np.pi * x) * np.sin(np.pi * y)
    m_sigma = fem.assemble_mass(mesh, 1.0)
    k_mat = fem.assemble_stiffness(mesh, 1.0)
    mass_unit = m_sigma

    def load_fn(t):
        nodal = (omega * math.cos(omega * t) + 2.0 * np.pi ** 2 * math.sin(omega * t)) * shape
        return mass_unit @ nodal

    ops = eddy.EddyOperators(mesh=mesh, m_sigma=m_sigma, k=k_mat, load_fn=load_fn,
                             dirichlet=mesh.boundary_vertices(OUTER),
                             mass_unit=mass_unit, cg_tol=1e-12)
    a = np.zeros(mesh.num_vertices)
    n_steps = int(round(t_end / dt))
    for k in range(n_steps):
        a, _ = eddy.step_cn(a, k * dt, dt, ops)
    exact = math.sin(omega * t_end) * shape
    return fem.l2_norm(mass_unit, a - exact)


def manufactured_em_order(levels: int = 3) -> OrderReport:
    """Spatial L2 order of the CN potential scheme (dt scaled with h)."""
    if levels < 3:
        raise ValueError("need at least 3 levels")
    hs = [1.0 / 8 * 0.5 ** k for k in range(levels)]
    t_end = 0.3
    errors = [_em_mms_error(h, dt=t_end / round(t_end / (0.25 * h)), t_end=t_end)
              for h in hs]
    return OrderReport.from_errors(hs, errors)


def em_temporal_order(levels: int = 4) -> OrderReport:
    """CN order on the scalar surrogate sigma a' + k a = s(t) with exact
    solution a(t) = sin(w t)."""
    sigma0, k0, omega = 2.0, 3.0, 2.0 * np.pi
    t_end = 1.0

    import scipy.sparse as sp
    m = sp.csr_matrix(np.array([[sigma0]]))
    k_mat = sp.csr_matrix(np.array([[k0]]))

    def load_fn(t):
        return np.array([sigma0 * omega * math.cos(omega * t) + k0 * math.sin(omega * t)])

    errors = []
    dts = [0.05 * 0.5 ** j for j in range(levels)]
    for dt in dts:
        ops = eddy.EddyOperators(mesh=None, m_sigma=m, k=k_mat, load_fn=load_fn,
                                 dirichlet=np.empty(0, dtype=int),
                                 mass_unit=sp.identity(1, format="csr"), cg_tol=1e-14)
        a = np.zeros(1)
        for step in range(int(round(t_end / dt))):
            a, _ = eddy.step_cn(a, step * dt, dt, ops)
        errors.append(abs(a[0] - math.sin(omega * t_end)))
    return OrderReport.from_errors(dts, errors)


# ---------------------------------------------------------------------------
# averaged Joule heat against quadrature oracles

def _single_triangle_mesh() -> Mesh:
    return build_domain(DomainSpec(
        box=(0.0, 0.0, 1.0, 1.0),
        workpiece=np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
        h=1.0))


def joule_average_case(amps: tuple[float, ...], freqs: tuple[float, ...],
                       steps_per_fastest: int = 64) -> tuple[float, float]:
    """(computed, exact) period-averaged sigma |dA/dt|^2 for a spatially
    uniform multi-tone potential on a conductor patch with sigma = 1.

    Exact mean over the common period: sum of sigma * (a_i w_i)^2 / 2.
    """
    mesh = _single_triangle_mesh()
    f0 = min(freqs)
    window = 1.0 / f0
    n_steps = int(steps_per_fastest * max(freqs) / f0)
    dt = window / n_steps
    times = np.arange(n_steps + 1) * dt

    def a_of_t(t):
        return sum(a * np.sin(2.0 * np.pi * f * t) for a, f in zip(amps, freqs))

    samples = [np.full(mesh.num_vertices, a_of_t(t)) for t in times]
    at_mid = [(samples[k + 1] - samples[k]) / dt for k in range(n_steps)]
    result = eddy.PeriodicSolveResult(samples=samples, at_mid=at_mid, dt=dt,
                                      window=window, windows=1, change=0.0,
                                      converged=True, cg_iterations=0)
    sigma_tri = np.ones(mesh.num_triangles)
    qbar = eddy.averaged_joule(result, sigma_tri, mesh)
    exact = sum((a * 2.0 * np.pi * f) ** 2 for a, f in zip(amps, freqs)) / 2.0
    return float(qbar[0]), float(exact)


def fine_quadrature_joule(amps, freqs, n: int = 200001) -> float:
    """Brute-force trapezoid average of sigma |dA/dt|^2 over the common
    period, using the analytic derivative (independent oracle)."""
    f0 = min(freqs)
    t = np.linspace(0.0, 1.0 / f0, n)
    dadt = sum(a * 2.0 * np.pi * f * np.cos(2.0 * np.pi * f * t) for a, f in zip(amps, freqs))
    return float(np.trapezoid(dadt ** 2, t) * f0)


# ---------------------------------------------------------------------------
# phase ODE against closed form and RK4

def rk4_phase_reference(theta_of_t, t_end: float, kinetics: PhaseKinetics,
                        n_steps: int = 20000, z0: float = 0.0) -> float:
    """Classical RK4 on z' = (z_eq(theta(t)) - z)^+ / tau(theta(t))."""
    z = z0
    dt = t_end / n_steps
    for k in range(n_steps):
        t = k * dt

        def f(ti, zi):
            return float(phase_rate(zi, theta_of_t(ti), kinetics))

        k1 = f(t, z)
        k2 = f(t + dt / 2, z + dt / 2 * k1)
        k3 = f(t + dt / 2, z + dt / 2 * k2)
        k4 = f(t + dt, z + dt * k3)
        z += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return z


def phase_exactness_case() -> tuple[float, float]:
    """(constant-theta error vs closed form, varying-theta error vs RK4)."""
    kin = PhaseKinetics(theta_start=1000.0, theta_finish=1100.0, tau0=0.25,
                        latent_scale=0.0)
    # constant theta: closed-form exponential
    theta_c = 1060.0
    zeq = float(kin.z_eq(theta_c))
    dt = 0.137
    steps = 7
    z = np.zeros(1)
    for _ in range(steps):
        z = step_phase(z, np.full(1, theta_c), dt, kin)
    exact = zeq * (1.0 - math.exp(-steps * dt / kin.tau0))
    err_const = abs(float(z[0]) - exact) / max(exact, 1e-300)

    # piecewise-constant theta ramp, substeps << tau
    t_end = 0.8
    n_sub = 320  # substep = tau/100
    sub = t_end / n_sub

    def theta_of_t(t):
        return 950.0 + 250.0 * min(t / t_end, 1.0)

    z2 = np.zeros(1)
    for k in range(n_sub):
        z2 = step_phase(z2, np.full(1, theta_of_t(k * sub)), sub, kin)
    # reference integrates the same piecewise-frozen trajectory piece by
    # piece, so RK4 never straddles a coefficient jump
    z_ref = 0.0
    for k in range(n_sub):
        theta_k = theta_of_t(k * sub)
        z_ref = rk4_phase_reference(lambda t: theta_k, sub, kin,
                                    n_steps=64, z0=z_ref)
    err_var = abs(float(z2[0]) - z_ref)
    return err_const, err_var


# ---------------------------------------------------------------------------
# dissipation audit and the runnable battery

def dissipation_audit(records: list[StepRecord], kinetics: PhaseKinetics,
                      ops: thermal.ThermalOperators) -> dict:
    """Minimum of each entropy-production term over all nodes and steps."""
    mins = [np.inf, np.inf, np.inf]
    skipped = 0
    for rec in records:
        terms = thermal.dissipation_terms(rec.theta, rec.z, rec.z_rate,
                                          rec.joule_nodal, kinetics, ops)
        for i, m in enumerate(terms.minima()):
            mins[i] = min(mins[i], m)
        skipped += terms.skipped
    if not records:
        mins = [0.0, 0.0, 0.0]
    report = {
        "min_joule": float(mins[0]),
        "min_fourier": float(mins[1]),
        "min_phase": float(mins[2]),
        "skipped_nodes": int(skipped),
    }
    report["passed"] = all(report[k] >= -1e-12 for k in ("min_joule", "min_fourier", "min_phase"))
    return report


def mini_strip_config(t_end: float = 0.08, dt_coarse: float = 0.01,
                      a_mf: float = 1.0, a_hf: float = 0.5) -> RunConfig:
    """Small heating scenario used by the battery's run-based checks."""
    mu0 = MU_VACUUM
    sigma = 1e6
    f = 1e4
    delta = analytic_skin_depth(f, mu=mu0, sigma=sigma)
    width = 6.0 * delta
    x_surface = 0.02
    box_l = x_surface + width
    height = 0.009
    return RunConfig(
        domain=DomainSpec(
            box=(0.0, 0.0, box_l, height),
            workpiece=np.array([[x_surface, 0.0], [box_l, 0.0],
                                [box_l, height], [x_surface, height]]),
            coils=(np.array([[0.005, 0.0], [0.012, 0.0],
                             [0.012, height], [0.005, height]]),),
            h=0.003, symmetry_sides=("top", "bottom")),
        materials=MaterialModel(sigma_coil=1.0, sigma_w=ZLinearLaw(sigma, 0.85 * sigma),
                                mu_w=ZLinearLaw(mu0, mu0)),
        kinetics=PhaseKinetics(theta_start=1000.0, theta_finish=1150.0, tau0=0.05,
                               latent_scale=5e8),
        thermal=ThermalParams(c_v=3.9e6, kappa=40.0, eta=200.0, g=200.0 * 293.0,
                              theta0=293.0),
        j0_amplitude=4e8, a_mf=a_mf, a_hf=a_hf, f_mf=f, f_hf=4 * f,
        t_end=t_end, dt_coarse=dt_coarse, steps_per_hf=20,
        max_windows=30,
        refine_depth=delta, refine_levels=2,
    )


def bounds_and_monotonicity_report(res) -> dict:
    """Per-node bounds and monotonicity over a completed run's audit trail."""
    rows = np.array(res.rows)
    head = res.header
    z_states = [rec.z for rec in res.records] + [res.state.z]
    worst_increment = 0.0
    for a, b in zip(z_states[:-1], z_states[1:]):
        worst_increment = min(worst_increment, float((b - a).min()))
    z_min = min(float(rows[:, head.index("z_min")].min()), float(res.state.z.min()))
    z_max = max(float(rows[:, head.index("z_max")].max()), float(res.state.z.max()))
    th_min = float(rows[:, head.index("theta_min")].min())
    report = {
        "z_min": z_min, "z_max": z_max, "theta_min": th_min,
        "worst_z_increment": worst_increment,
    }
    report["passed"] = (z_min >= -1e-12 and z_max < 1.0 and th_min >= -1e-12
                        and worst_increment >= -1e-12)
    return report


def run_battery(tooth_cfg: RunConfig | None = None) -> list[dict]:
    """Run the verification cases; one record per case.

    Each record carries name, metric, threshold, and passed.  Passing a tooth
    configuration adds the long-running frequency-selectivity comparison
    (otherwise delegated to the CLI's compare-freq subcommand).
    """
    cases: list[dict] = []

    def add(name, metric, threshold, passed, sense="<="):
        cases.append({"name": name, "metric": float(metric),
                      "threshold": float(threshold), "sense": sense,
                      "pass": bool(passed)})

    err_const, err_var = phase_exactness_case()
    add("phase_ode_constant_theta", err_const, 1e-10, err_const <= 1e-10)
    add("phase_ode_rk4_oracle", err_var, 1e-6, err_var <= 1e-6)

    cfg = mini_strip_config()
    sim = Simulation(cfg)
    res = sim.run()
    bm = bounds_and_monotonicity_report(res)
    add("bounds_and_monotonicity", min(bm["z_min"], bm["theta_min"], bm["worst_z_increment"]),
        -1e-12, bm["passed"], sense=">=")

    audit = dissipation_audit(res.records, cfg.kinetics, sim.thermal_ops)
    worst = min(audit["min_joule"], audit["min_fourier"], audit["min_phase"])
    add("clausius_duhem_audit", worst, -1e-12, audit["passed"], sense=">=")

    f0, sigma0, mu0 = 1e4, 1e6, MU_VACUUM
    rep = skin_depth_case(f0, sigma0, mu0)
    add("skin_depth_fit", rep.relative_error, 0.05, rep.relative_error <= 0.05)

    delta4 = analytic_skin_depth(4 * f0, sigma0, mu0)
    strip4 = build_strip(delta4, width_deltas=16.0, levels=2, band_deltas=9.0)
    rep_f = skin_depth_case(f0, sigma0, mu0, strip=strip4)
    rep_4f = skin_depth_case(4 * f0, sigma0, mu0, strip=strip4)
    ratio = rep_4f.delta_fitted / rep_f.delta_fitted
    add("skin_depth_frequency_halving", abs(ratio - 0.5) / 0.5, 0.10,
        abs(ratio - 0.5) <= 0.05)

    computed, exact = joule_average_case((0.7,), (50.0,))
    err = abs(computed - exact) / exact
    add("joule_average_single_tone", err, 0.01, err <= 0.01)

    computed, exact = joule_average_case((0.7, 0.2), (50.0, 400.0))
    oracle = fine_quadrature_joule((0.7, 0.2), (50.0, 400.0))
    err = abs(computed - oracle) / oracle
    add("joule_average_two_tone", err, 0.01, err <= 0.01)

    rep_h = manufactured_heat_order()
    add("order_heat_spatial", rep_h.observed_order, 1.8,
        1.8 <= rep_h.observed_order <= 2.2, sense="in [1.8, 2.2]")
    rep_ht = manufactured_heat_temporal_order()
    add("order_heat_temporal", rep_ht.observed_order, 0.9,
        rep_ht.observed_order >= 0.9, sense=">=")
    rep_e = manufactured_em_order()
    add("order_em_spatial", rep_e.observed_order, 1.8,
        1.8 <= rep_e.observed_order <= 2.2, sense="in [1.8, 2.2]")
    rep_et = em_temporal_order()
    add("order_em_temporal", rep_et.observed_order, 1.9,
        1.9 <= rep_et.observed_order <= 2.1, sense="in [1.9, 2.1]")

    probe_cfg = replace(mini_strip_config(t_end=0.02), j0_amplitude=1e7,
                        kinetics=PhaseKinetics(theta_start=1000.0, theta_finish=1150.0,
                                               tau0=0.05, latent_scale=0.0))
    for eps in (1e-2, 1e-3):
        pr = stability_probe(probe_cfg, eps)
        ok = 0.5 <= pr["ratio"] <= 2.0
        add(f"stability_probe_eps_{eps:g}", pr["ratio"], 2.0, ok, sense="in [0.5, 2]")

    csv_a = _determinism_csv()
    csv_b = _determinism_csv()
    add("determinism_rerun", 0.0 if csv_a == csv_b else 1.0, 0.0,
        csv_a == csv_b, sense="==")

    if tooth_cfg is not None:
        from .compare import compare_report_only  # heavy; import on demand
        comp = compare_report_only(tooth_cfg)
        add("multifrequency_selectivity", 1.0 if comp["passed"] else 0.0, 1.0,
            comp["passed"], sense="==")

    return cases


def _determinism_csv() -> str:
    """Serialize a fresh mini run to CSV text (for byte-identity checks)."""
    from .io import TimeSeries, timeseries_to_text
    cfg = mini_strip_config(t_end=0.02)
    res = Simulation(cfg).run()
    return timeseries_to_text(TimeSeries(header=res.header, rows=res.rows))
