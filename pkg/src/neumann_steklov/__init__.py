"""Weighted Neumann and Steklov eigenvalue experiments: concentrating radial
weights, transfer maps, a circle Fourier toolkit, P1 finite elements on the
disk, linear and nonlinear eigensolvers, and a radial mode oracle."""

from .errors import (DimensionMismatchError, MeshBudgetError, ParameterDomainError, SolverError,
                     TraceUndefinedError, UnsupportedMapError)
from .weights import (BoundaryWeightSpec, ConcentratingWeight, ExponentBundle, beta_moment,
                      constant_alpha, delta_pq, layer_sup, parse_alpha, radial_mass, rho)
from .maps import (ConformalQuadraticMap, IdentityMap, RadialPowerMap, induce_weights, parse_map,
                   pullback_energy_weight, unweighted_boundary_alpha)
from .circle import (CircleFunction, poisson_extend, poisson_radial_gap, radial_extend,
                     radial_trace_gap, slobodeckij_norm)
from .fem import DiskMesh, assemble, build_disk_mesh, p_energy
from .eigen import EigenResult, minimize_quotient, q_center, quotient, solve_linear, weak_residual
from .radial import mode_minimizer_distance, mode_neumann, mode_steklov, shooting_eigenvalue
from .experiments import SweepConfig, run_lemma_checks, run_minimizer_sweep, run_quotient_comparison, run_sweep

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatchError",
    "MeshBudgetError",
    "ParameterDomainError",
    "SolverError",
    "TraceUndefinedError",
    "UnsupportedMapError",
    "BoundaryWeightSpec",
    "ConcentratingWeight",
    "ExponentBundle",
    "beta_moment",
    "constant_alpha",
    "delta_pq",
    "layer_sup",
    "parse_alpha",
    "radial_mass",
    "rho",
    "ConformalQuadraticMap",
    "IdentityMap",
    "RadialPowerMap",
    "induce_weights",
    "parse_map",
    "pullback_energy_weight",
    "unweighted_boundary_alpha",
    "CircleFunction",
    "poisson_extend",
    "poisson_radial_gap",
    "radial_extend",
    "radial_trace_gap",
    "slobodeckij_norm",
    "DiskMesh",
    "assemble",
    "build_disk_mesh",
    "p_energy",
    "EigenResult",
    "minimize_quotient",
    "q_center",
    "quotient",
    "solve_linear",
    "weak_residual",
    "mode_minimizer_distance",
    "mode_neumann",
    "mode_steklov",
    "shooting_eigenvalue",
    "SweepConfig",
    "run_lemma_checks",
    "run_minimizer_sweep",
    "run_quotient_comparison",
    "run_sweep",
]
