"""Flat INI-style configuration: parsing, validation, and RunConfig assembly.

Sections are [domain], [materials], [phase], [thermal], [source], [time],
[output] with case-sensitive `key = value` pairs and `#` comments.  Every
admissibility assumption of the model becomes a machine check here; a
violation is reported with the offending key and the violated clause:

  (i)   conductivities positive and bounded
  (ii)  permeabilities positive and bounded
  (iii) drive signal finite (amplitudes/frequencies), integer tone ratio
  (iv)  phase kinetics: tau positive, equilibrium fraction in [0, 1]
  (v)   boundary source nonnegative and bounded
  (vi)  initial temperature nonnegative
  (mod) discretization constraints of this implementation
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

import numpy as np

from .driver import RunConfig
from .materials import MU_VACUUM, MaterialModel, ZLinearLaw
from .mesh import BOX_SIDES, DomainSpec
from .phase import PhaseKinetics
from .thermal import ThermalParams

DEFAULTS: dict[str, dict[str, str]] = {
    "domain": {
        "box": "0 0 0.06 0.009",
        "workpiece_polygon": "0.03 0  0.06 0  0.06 0.009  0.03 0.009",
        "coil_polygon_1": "0.005 0  0.012 0  0.012 0.009  0.005 0.009",
        "mesh_h": "0.003",
        "symmetry_sides": "top bottom",
        "refine_depth": "0.005",
        "refine_levels": "2",
    },
    "materials": {
        "sigma_coil": "1.0",
        "sigma_workpiece_z0": "1e6",
        "sigma_workpiece_z1": "8.5e5",
        "mu_vacuum": f"{MU_VACUUM!r}",
        "mu_coil": f"{MU_VACUUM!r}",
        "mu_workpiece_z0": f"{MU_VACUUM!r}",
        "mu_workpiece_z1": f"{MU_VACUUM!r}",
    },
    "phase": {
        "A_s": "1000.0",
        "A_f": "1150.0",
        "tau0": "0.05",
        "latent_L": "5e8",
    },
    "thermal": {
        "c_v": "3.9e6",
        "kappa": "40.0",
        "eta": "200.0",
        "g_ambient": "58600.0",
        "theta0": "293.0",
    },
    "source": {
        "j0_amplitude": "4e8",
        "a_mf": "1.0",
        "a_hf": "0.5",
        "f_mf": "1e4",
        "f_hf": "4e4",
        "steps_per_hf_period": "20",
        "periodic_tol": "1e-3",
        "max_windows": "30",
        "em_cg_tol": "1e-9",
        "em_symmetry_dirichlet": "0",
    },
    "time": {
        "t_end": "0.03",
        "dt_coarse": "0.01",
    },
    "output": {
        "probe_points": "",
        "region_root": "",
        "region_tip": "",
        "snapshot_times": "",
        "compare_scale": "0.7071067811865476",
    },
}


class ConfigError(ValueError):
    """Collected validation failures, each naming the key and clause."""

    def __init__(self, violations: list[tuple[str, str, str]]):
        self.violations = violations
        lines = [f"{key}: violates clause ({clause}): {msg}"
                 for key, clause, msg in violations]
        super().__init__("invalid configuration:\n" + "\n".join(lines))


@dataclass
class Config:
    """Parsed and validated configuration (merged over defaults)."""

    values: dict[str, dict[str, str]]
    path: str | None = None

    def get(self, section: str, key: str) -> str:
        return self.values[section][key]

    def get_float(self, section: str, key: str) -> float:
        return float(self.values[section][key])

    def get_int(self, section: str, key: str) -> int:
        return int(self.values[section][key])

    def get_floats(self, section: str, key: str) -> list[float]:
        return [float(tok) for tok in self.values[section][key].split()]

    def domain_spec(self) -> DomainSpec:
        box = self.get_floats("domain", "box")
        poly = np.array(self.get_floats("domain", "workpiece_polygon")).reshape(-1, 2)
        coils = []
        i = 1
        while f"coil_polygon_{i}" in self.values["domain"]:
            raw = self.values["domain"][f"coil_polygon_{i}"].strip()
            if raw:
                coils.append(np.array([float(t) for t in raw.split()]).reshape(-1, 2))
            i += 1
        sym = tuple(self.values["domain"]["symmetry_sides"].split())
        return DomainSpec(box=tuple(box), workpiece=poly, coils=tuple(coils),
                          h=self.get_float("domain", "mesh_h"), symmetry_sides=sym)

    def run_config(self) -> RunConfig:
        probes = []
        raw = self.values["output"]["probe_points"].strip()
        if raw:
            for part in raw.split(";"):
                x, y = (float(t) for t in part.split())
                probes.append((x, y))

        def box_or_none(key):
            s = self.values["output"][key].strip()
            return tuple(float(t) for t in s.split()) if s else None

        snaps = tuple(float(t) for t in self.values["output"]["snapshot_times"].split())
        materials = MaterialModel(
            sigma_coil=self.get_float("materials", "sigma_coil"),
            sigma_w=ZLinearLaw(self.get_float("materials", "sigma_workpiece_z0"),
                               self.get_float("materials", "sigma_workpiece_z1")),
            mu_vacuum=self.get_float("materials", "mu_vacuum"),
            mu_coil=self.get_float("materials", "mu_coil"),
            mu_w=ZLinearLaw(self.get_float("materials", "mu_workpiece_z0"),
                            self.get_float("materials", "mu_workpiece_z1")),
        )
        kinetics = PhaseKinetics(
            theta_start=self.get_float("phase", "A_s"),
            theta_finish=self.get_float("phase", "A_f"),
            tau0=self.get_float("phase", "tau0"),
            latent_scale=self.get_float("phase", "latent_L"),
        )
        therm = ThermalParams(
            c_v=self.get_float("thermal", "c_v"),
            kappa=self.get_float("thermal", "kappa"),
            eta=self.get_float("thermal", "eta"),
            g=self.get_float("thermal", "g_ambient"),
            theta0=self.get_float("thermal", "theta0"),
        )
        return RunConfig(
            domain=self.domain_spec(),
            materials=materials,
            kinetics=kinetics,
            thermal=therm,
            j0_amplitude=self.get_float("source", "j0_amplitude"),
            a_mf=self.get_float("source", "a_mf"),
            a_hf=self.get_float("source", "a_hf"),
            f_mf=self.get_float("source", "f_mf"),
            f_hf=self.get_float("source", "f_hf"),
            t_end=self.get_float("time", "t_end"),
            dt_coarse=self.get_float("time", "dt_coarse"),
            steps_per_hf=self.get_int("source", "steps_per_hf_period"),
            periodic_tol=self.get_float("source", "periodic_tol"),
            max_windows=self.get_int("source", "max_windows"),
            em_cg_tol=self.get_float("source", "em_cg_tol"),
            em_symmetry_dirichlet=bool(self.get_int("source", "em_symmetry_dirichlet")),
            refine_depth=self.get_float("domain", "refine_depth"),
            refine_levels=self.get_int("domain", "refine_levels"),
            probes=tuple(probes),
            region_root=box_or_none("region_root"),
            region_tip=box_or_none("region_tip"),
            snapshot_times=snaps,
        )

    @property
    def compare_scale(self) -> float:
        return self.get_float("output", "compare_scale")


def _validate(cfg: Config) -> None:
    bad: list[tuple[str, str, str]] = []

    def check(cond, key, clause, msg):
        if not cond:
            bad.append((key, clause, msg))

    def f(section, key):
        try:
            return cfg.get_float(section, key)
        except ValueError:
            bad.append((f"{section}.{key}", "parse", "not a number"))
            return math.nan

    s_coil = f("materials", "sigma_coil")
    s_z0 = f("materials", "sigma_workpiece_z0")
    s_z1 = f("materials", "sigma_workpiece_z1")
    check(s_coil > 0, "materials.sigma_coil", "i", "coil conductivity must be positive")
    check(s_z0 > 0, "materials.sigma_workpiece_z0", "i",
          "workpiece conductivity must be positive")
    check(s_z1 > 0, "materials.sigma_workpiece_z1", "i",
          "workpiece conductivity must be positive")
    check(all(np.isfinite([s_coil, s_z0, s_z1])), "materials.sigma_*", "i",
          "conductivities must be bounded")

    for key in ("mu_vacuum", "mu_coil", "mu_workpiece_z0", "mu_workpiece_z1"):
        v = f("materials", key)
        check(v > 0 and np.isfinite(v), f"materials.{key}", "ii",
              "permeability must be positive and bounded")

    for key in ("a_mf", "a_hf", "f_mf", "f_hf", "j0_amplitude"):
        v = f("source", key)
        check(np.isfinite(v), f"source.{key}", "iii", "must be finite")
    f_mf = f("source", "f_mf")
    f_hf = f("source", "f_hf")
    check(f_mf > 0, "source.f_mf", "iii", "medium frequency must be positive")
    if f_mf > 0 and np.isfinite(f_hf):
        ratio = f_hf / f_mf
        check(abs(ratio - round(ratio)) <= 1e-9 and round(ratio) >= 1,
              "source.f_hf", "mod",
              "f_hf must be an integer multiple (>= 1) of f_mf")

    a_s = f("phase", "A_s")
    a_fin = f("phase", "A_f")
    tau0 = f("phase", "tau0")
    check(tau0 > 0, "phase.tau0", "iv", "time constant must be positive")
    check(a_fin > a_s, "phase.A_f", "iv",
          "finish temperature must exceed start temperature")
    if tau0 > 0 and a_fin > a_s:
        kin = PhaseKinetics(theta_start=a_s, theta_finish=a_fin, tau0=tau0)
        th = np.linspace(0.0, max(3000.0, 2 * a_fin), 501)
        zeq = kin.z_eq(th)
        check(zeq.min() >= -1e-14 and zeq.max() <= 1 + 1e-14, "phase.A_s/A_f",
              "iv", "equilibrium fraction must stay in [0, 1]")

    g = f("thermal", "g_ambient")
    check(g >= 0 and np.isfinite(g), "thermal.g_ambient", "v",
          "boundary source must be nonnegative and bounded")
    th0 = f("thermal", "theta0")
    check(th0 >= 0, "thermal.theta0", "vi", "initial temperature must be >= 0")
    for key in ("c_v", "kappa"):
        check(f("thermal", key) > 0, f"thermal.{key}", "mod", "must be positive")
    check(f("thermal", "eta") >= 0, "thermal.eta", "mod", "must be >= 0")

    h = f("domain", "mesh_h")
    check(h > 0, "domain.mesh_h", "mod", "mesh size must be positive")
    for side in cfg.values["domain"]["symmetry_sides"].split():
        check(side in BOX_SIDES, "domain.symmetry_sides", "mod",
              f"unknown side {side!r}")

    spp = f("source", "steps_per_hf_period")
    check(spp >= 20, "source.steps_per_hf_period", "mod",
          "need >= 20 fine steps per high-frequency period")
    t_end = f("time", "t_end")
    dt = f("time", "dt_coarse")
    check(t_end >= 0, "time.t_end", "mod", "must be >= 0")
    check(dt > 0, "time.dt_coarse", "mod", "must be positive")
    if dt > 0 and f_hf > 0 and spp >= 1:
        dt_fine = 1.0 / (f_hf * spp)
        check(dt / dt_fine >= 100.0, "time.dt_coarse", "mod",
              "coarse/fine step ratio must be >= 100")
    if dt > 0 and t_end > 0:
        n = round(t_end / dt)
        check(abs(n * dt - t_end) <= 1e-9 * max(t_end, dt), "time.t_end", "mod",
              "dt_coarse must divide t_end")

    if bad:
        raise ConfigError(bad)


def load_config(path) -> Config:
    """Parse `path`, merge over defaults, and validate every clause."""
    parser = configparser.ConfigParser(
        interpolation=None,
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        default_section="__defaults__",
    )
    parser.optionxform = str  # case-sensitive keys
    with open(path) as fh:
        parser.read_file(fh, source=str(path))

    values = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    for section in parser.sections():
        if section not in values:
            raise ConfigError([(section, "parse", "unknown section")])
        user = dict(parser.items(section))
        # a config that names any coil replaces the default coil list entirely
        if section == "domain" and any(k.startswith("coil_polygon_") for k in user):
            for k in list(values["domain"]):
                if k.startswith("coil_polygon_"):
                    del values["domain"][k]
        for key, val in user.items():
            if key not in DEFAULTS[section] and not key.startswith("coil_polygon_"):
                raise ConfigError([(f"{section}.{key}", "parse", "unknown key")])
            values[section][key] = val

    cfg = Config(values=values, path=str(path))
    _validate(cfg)
    return cfg
