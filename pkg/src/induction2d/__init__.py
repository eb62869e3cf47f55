"""2D finite-element simulator for multifrequency induction hardening.

Couples a time-domain eddy-current potential equation, an internal energy
balance with latent heat, and a one-sided austenite phase ODE with a
two-time-scale scheme: fine Crank-Nicolson steps resolve the coil current
oscillation to a periodic state, and the period-averaged Joule heating drives
coarse implicit-Euler steps of temperature and phase.
"""

__version__ = "0.1.0"

from .driver import RunConfig, Simulation, SimulationState, run_simulation, stability_probe
from .materials import MaterialModel, ZLinearLaw
from .mesh import DomainSpec, Mesh, build_domain, refine_boundary_layer, submesh
from .phase import PhaseKinetics
from .thermal import ThermalParams

__all__ = [
    "DomainSpec", "MaterialModel", "Mesh", "PhaseKinetics", "RunConfig",
    "Simulation", "SimulationState", "ThermalParams", "ZLinearLaw",
    "build_domain", "refine_boundary_layer", "run_simulation",
    "stability_probe", "submesh", "__version__",
]
