"""Piecewise material laws: electrical conductivity and magnetic permeability.

Both coefficients are piecewise by region (zero conductivity in air) and may
depend on the local austenite fraction z in the workpiece.  Coefficients are
frozen per triangle via vertex averaging of z, which keeps the fine-scale
electromagnetic problem linear within a coarse step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import AIR, COIL, WORKPIECE, Mesh

MU_VACUUM = 4.0e-7 * np.pi


@dataclass(frozen=True)
class ZLinearLaw:
    """Affine law v(z) = v0 + (v1 - v0) z on z in [0, 1]."""

    v0: float
    v1: float

    def __call__(self, z):
        return self.v0 + (self.v1 - self.v0) * np.asarray(z, dtype=float)

    @property
    def derivative_bound(self) -> float:
        return abs(self.v1 - self.v0)

    @property
    def min(self) -> float:
        return min(self.v0, self.v1)

    @property
    def max(self) -> float:
        return max(self.v0, self.v1)


@dataclass(frozen=True)
class MaterialModel:
    """Conductivity and permeability laws with their admissibility bounds.

    sigma_coil : coil conductivity, S/m (constant)
    sigma_w    : workpiece conductivity law of z, S/m
    mu_vacuum  : air permeability, H/m
    mu_coil    : coil permeability, H/m
    mu_w       : workpiece permeability law of z, H/m
    """

    sigma_coil: float
    sigma_w: ZLinearLaw
    mu_vacuum: float = MU_VACUUM
    mu_coil: float = MU_VACUUM
    mu_w: ZLinearLaw = field(default_factory=lambda: ZLinearLaw(MU_VACUUM, MU_VACUUM))

    @property
    def sigma_min(self) -> float:
        return min(self.sigma_coil, self.sigma_w.min)

    @property
    def sigma_max(self) -> float:
        return max(self.sigma_coil, self.sigma_w.max)

    @property
    def mu_min(self) -> float:
        return min(self.mu_coil, self.mu_vacuum, self.mu_w.min)

    @property
    def mu_max(self) -> float:
        return max(self.mu_coil, self.mu_vacuum, self.mu_w.max)

    @property
    def sigma_lipschitz(self) -> float:
        return self.sigma_w.derivative_bound

    def validate(self) -> None:
        """Admissibility: conductor sigma bounded away from 0, mu positive."""
        if self.sigma_min <= 0.0:
            raise ValueError("conductor conductivities must be positive with a "
                             "positive lower bound (clause i)")
        if not np.isfinite(self.sigma_max):
            raise ValueError("conductivity unbounded (clause i)")
        if self.mu_min <= 0.0 or not np.isfinite(self.mu_max):
            raise ValueError("permeabilities must be positive and bounded (clause ii)")


def _z_tri_mean(mesh: Mesh, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (mesh.num_vertices,):
        raise ValueError("z must be a full-mesh nodal field (scatter from the "
                         "workpiece submesh first)")
    zt = z[mesh.triangles].mean(axis=1)
    wp = mesh.region == WORKPIECE
    if np.any(zt[wp] < 0.0) or np.any(zt[wp] > 1.0):
        raise ValueError("z outside [0, 1]")
    return zt


def sigma_field(model: MaterialModel, mesh: Mesh, z: np.ndarray) -> np.ndarray:
    """Per-triangle conductivity: 0 on AIR, sigma_coil on COIL, sigma_w(z) on
    the workpiece with z averaged over the triangle's vertices."""
    zt = _z_tri_mean(mesh, z)
    out = np.zeros(mesh.num_triangles)
    out[mesh.region == COIL] = model.sigma_coil
    wp = mesh.region == WORKPIECE
    out[wp] = model.sigma_w(zt[wp])
    return out


def inv_mu_field(model: MaterialModel, mesh: Mesh, z: np.ndarray) -> np.ndarray:
    """Per-triangle reluctivity 1/mu; strictly positive everywhere."""
    zt = _z_tri_mean(mesh, z)
    out = np.full(mesh.num_triangles, 1.0 / model.mu_vacuum)
    out[mesh.region == COIL] = 1.0 / model.mu_coil
    wp = mesh.region == WORKPIECE
    out[wp] = 1.0 / model.mu_w(zt[wp])
    return out
