"""Explicit solvers for 1D heat conduction with a constant delay.

Delayed exponential functions, closed-form and method-of-steps scalar
delay-ODE solvers, a spectral solver for the delayed heat equation with
Dirichlet or Neumann conditions, an exponential-decay certificate for the
dissipative regime, characteristic-root diagnostics for under-regularized
(ill-posed) variants, and a short-pulse laser heating scenario for a thin
gold film.
"""

from .delay_ode import DelayOdeProblem, Trajectory, solve_closed_form, solve_step_method
from .delayed_exp import DelayedExp, fundamental_solution
from .illposed import (
    CharacteristicRoot,
    CharProblem,
    blowup_table,
    construct_eigenvalues,
    growth_scan,
    root_m1,
    root_m2,
)
from .laser import LaserConfig, build_problem, find_peak, modal_source, simulate, source
from .numerics import (
    BracketError,
    ComplexRootResult,
    ConvergenceError,
    UniformGrid,
    bisect,
    lambert_w_principal,
    simpson,
)
from .spectral import (
    DelayHeatProblem,
    FieldSnapshot,
    SpectralBasis,
    assemble_from_pde,
    dirichlet_lift,
    project,
    synthesize,
)
from .stability import (
    CoefficientBounds,
    EnergyTrace,
    StabilityCertificate,
    build_certificate,
    check_condition,
    energy_trace,
    fit_decay_rate,
    optimal_epsilon,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "CharProblem",
    "CharacteristicRoot",
    "CoefficientBounds",
    "ComplexRootResult",
    "ConvergenceError",
    "DelayHeatProblem",
    "DelayOdeProblem",
    "DelayedExp",
    "EnergyTrace",
    "FieldSnapshot",
    "LaserConfig",
    "SpectralBasis",
    "StabilityCertificate",
    "Trajectory",
    "UniformGrid",
    "assemble_from_pde",
    "bisect",
    "blowup_table",
    "build_certificate",
    "build_problem",
    "check_condition",
    "construct_eigenvalues",
    "dirichlet_lift",
    "energy_trace",
    "find_peak",
    "fit_decay_rate",
    "fundamental_solution",
    "growth_scan",
    "lambert_w_principal",
    "modal_source",
    "optimal_epsilon",
    "project",
    "root_m1",
    "root_m2",
    "simpson",
    "simulate",
    "solve_closed_form",
    "solve_step_method",
    "source",
    "synthesize",
]
