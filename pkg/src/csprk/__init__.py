"""Energy-preserving continuous-stage partitioned Runge-Kutta integrators.

Continuous-stage partitioned Runge-Kutta (csPRK) methods treat the momenta p
and positions q of a Hamiltonian system with separate coefficient functions
A, B and Ahat, Bhat on [0, 1]. Choosing those functions so that

    A(0, sigma) = Ahat(0, sigma) = 0,
    A(1, sigma) = B(sigma),  Ahat(1, sigma) = Bhat(sigma),
    d/dtau A(tau, sigma) = d/dsigma Ahat(sigma, tau)

makes the method preserve the Hamiltonian exactly (up to quadrature error
once the integrals are discretized). This package constructs such methods
from truncated Legendre expansions, certifies their order and energy
condition, integrates built-in and user-defined Hamiltonian systems, and
ships classical baseline one-step methods plus a CLI for experiments.

The stage solver has two interchangeable backends: a Cython extension
(csprk._cycore) used automatically for the built-in systems when compiled,
and a pure numpy implementation (csprk._pycore) that handles everything
else. Set CSPRK_BACKEND=python or =compiled to force a choice.
"""

from .polynomials import (
    DEGREE_CAP,
    UnitPolynomial,
    integral_basis_matrix,
    legendre,
    legendre_integral,
    legendre_values,
    xi,
)
from .quadrature import Quadrature, gauss_legendre, interpolatory, min_nodes_for_exact_energy
from .coefficients import (
    AlphaTableau,
    ConditionReport,
    CsprkTableau,
    PreconditionError,
    build_tableau,
    check_energy_condition,
    estimate_order,
    load_tableau_json,
    max_simplifying_eta,
    max_simplifying_zeta,
    preset,
    verify_simplifying_C,
    verify_simplifying_D,
)
from .problems import HamiltonianSystem, henon_heiles, kepler, linear_system
from .integrator import (
    ConvergenceError,
    NonFiniteGradientError,
    SolverOptions,
    StageSolution,
    State,
    Trajectory,
    active_backend,
    compiled_available,
    integrate,
    solve_stages,
    step,
)
from .baselines import BASELINES, BaselineMethod, baseline_step, integrate_baseline

__version__ = "0.1.0"

__all__ = [
    "DEGREE_CAP",
    "UnitPolynomial",
    "integral_basis_matrix",
    "legendre",
    "legendre_integral",
    "legendre_values",
    "xi",
    "Quadrature",
    "gauss_legendre",
    "interpolatory",
    "min_nodes_for_exact_energy",
    "AlphaTableau",
    "ConditionReport",
    "CsprkTableau",
    "PreconditionError",
    "build_tableau",
    "check_energy_condition",
    "estimate_order",
    "load_tableau_json",
    "max_simplifying_eta",
    "max_simplifying_zeta",
    "preset",
    "verify_simplifying_C",
    "verify_simplifying_D",
    "HamiltonianSystem",
    "henon_heiles",
    "kepler",
    "linear_system",
    "ConvergenceError",
    "NonFiniteGradientError",
    "SolverOptions",
    "StageSolution",
    "State",
    "Trajectory",
    "active_backend",
    "compiled_available",
    "integrate",
    "solve_stages",
    "step",
    "BASELINES",
    "BaselineMethod",
    "baseline_step",
    "integrate_baseline",
]
