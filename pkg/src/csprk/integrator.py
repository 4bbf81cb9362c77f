"""Stage solving, stepping and trajectory integration for csPRK methods.

One step from (p0, q0) solves the coupled stage equations

    P(tau) = p0 - h int_0^1 A(tau, sigma) grad_q H(P(sigma), Q(sigma)) dsigma
    Q(tau) = q0 + h int_0^1 Ahat(tau, sigma) grad_p H(P(sigma), Q(sigma)) dsigma

with the integrals replaced by a quadrature rule, then updates

    p1 = p0 - h sum_i b_i B(c_i) grad_q H(P(c_i), Q(c_i))
    q1 = q0 + h sum_i b_i Bhat(c_i) grad_p H(P(c_i), Q(c_i)).

The stage polynomials are solved in Legendre coefficient space by fixed-point
iteration; all node values and projection matrices are precomputed once per
(tableau, quadrature) pair by the Stepper. Two backends implement the sweep:
csprk._cycore (Cython, built-in gradient kernels only) and csprk._pycore
(numpy, everything). Selection is automatic, or forced via the backend
argument / the CSPRK_BACKEND environment variable.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import _pycore
from .polynomials import integral_basis_matrix, legendre_values

try:
    from . import _cycore
except ImportError:  # extension not built; numpy path covers everything
    _cycore = None

_KERNEL_IDS = {"linear": 1, "henon_heiles": 2, "kepler": 3}


class ConvergenceError(RuntimeError):
    """Fixed-point iteration exhausted its budget without converging."""

    def __init__(self, message, iterations, residual, step_index=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.step_index = step_index


class NonFiniteGradientError(RuntimeError):
    """A Hamiltonian gradient evaluated to NaN or infinity."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


@dataclass(frozen=True)
class State:
    """Phase-space point (p, q) at time t. Treated as immutable."""

    p: np.ndarray
    q: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.p, dtype=float)).copy()
        q = np.atleast_1d(np.asarray(self.q, dtype=float)).copy()
        if p.shape != q.shape or p.ndim != 1:
            raise ValueError("p and q must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise ValueError("state components must be finite")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self):
        return self.p.size


@dataclass(frozen=True)
class SolverOptions:
    """Fixed-point solver controls.

    guess selects the initial stage coefficients: "constant" starts every
    step from the flat polynomial at the current state; "previous_step"
    translates the previous step's converged coefficients (integrate only).
    """

    tolerance: float = 1e-14
    max_iterations: int = 100
    guess: str = "constant"

    def __post_init__(self):
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.guess not in ("constant", "previous_step"):
            raise ValueError("guess must be 'constant' or 'previous_step'")


@dataclass
class StageSolution:
    """Converged stage coefficients plus iteration diagnostics.

    lam[m] are the Legendre coefficients of the momentum stage polynomial P,
    mu[m] those of Q; residual is the max-norm equation residual measured by
    one extra gradient pass at the converged coefficients.
    """

    lam: np.ndarray
    mu: np.ndarray
    iterations: int
    residual: float

    def p_stage(self, tau):
        """Evaluate P(tau), shape (len(tau), dim)."""
        return legendre_values(self.lam.shape[0] - 1, tau) @ self.lam

    def q_stage(self, tau):
        return legendre_values(self.mu.shape[0] - 1, tau) @ self.mu


def compiled_available():
    return _cycore is not None


def _resolve_backend(backend, system):
    choice = backend or os.environ.get("CSPRK_BACKEND", "").strip() or "auto"
    kernel_ok = system.kernel is not None and system.kernel[0] in _KERNEL_IDS
    if choice == "python":
        return "python"
    if choice == "compiled":
        if _cycore is None:
            raise RuntimeError("compiled backend requested but csprk._cycore is not built")
        if not kernel_ok:
            raise ValueError(
                "compiled backend only implements the built-in gradient kernels; "
                f"system {system.name!r} has none"
            )
        return "compiled"
    if choice == "auto":
        return "compiled" if (_cycore is not None and kernel_ok) else "python"
    raise ValueError(f"unknown backend {choice!r}; use 'python' or 'compiled'")


def active_backend(system=None, backend=None):
    """Name of the backend that would run: 'compiled' or 'python'."""
    if system is None:
        return "compiled" if _cycore is not None else "python"
    return _resolve_backend(backend, system)


class Stepper:
    """Precomputed step engine for one (system, tableau, quadrature) triple.

    Builds the node evaluation matrices once and exposes advance(). Reuse it
    for long runs; the module-level step()/integrate() wrap it.
    """

    def __init__(self, system, tableau, quadrature, options=None, backend=None):
        self.system = system
        self.tableau = tableau
        self.quadrature = quadrature
        self.options = options or SolverOptions()
        self.backend = _resolve_backend(backend, system)
        c = quadrature.nodes
        b = quadrature.weights
        s, ra = tableau.a.shape
        r, sh = tableau.ahat.shape
        ea = tableau.a @ legendre_values(ra - 1, c).T
        eh = tableau.ahat @ legendre_values(sh - 1, c).T
        self.wab = (integral_basis_matrix(s) @ ea) * b
        self.whb = (integral_basis_matrix(r) @ eh) * b
        self.vp = legendre_values(s, c)
        self.vq = legendre_values(r, c)
        self.bw_b = b * tableau.b_values(c)
        self.bw_bhat = b * tableau.bhat_values(c)
        self.n_lam = s + 1
        self.n_mu = r + 1

    def initial_guess(self, state):
        lam = np.zeros((self.n_lam, state.dim))
        mu = np.zeros((self.n_mu, state.dim))
        lam[0] = state.p
        mu[0] = state.q
        return lam, mu

    def advance(self, state, h, warm=None):
        """One step of size h from state. Returns (new_state, StageSolution).

        warm optionally supplies initial stage coefficients (lam, mu); they
        are copied, not mutated.
        """
        if warm is None:
            lam, mu = self.initial_guess(state)
        else:
            lam = np.array(warm[0], dtype=float, copy=True)
            mu = np.array(warm[1], dtype=float, copy=True)
        opts = self.options
        if self.backend == "compiled":
            kind = _KERNEL_IDS[self.system.kernel[0]]
            params = np.asarray(self.system.kernel[1], dtype=float)
            p1, q1, iterations, residual, status = _cycore.solve_stage(
                self.vp, self.vq, self.wab, self.whb, self.bw_b, self.bw_bhat,
                kind, params, state.p, state.q, float(h), lam, mu,
                opts.tolerance, opts.max_iterations,
            )
        else:
            p1, q1, iterations, residual, status = _pycore.solve_stage(
                self.vp, self.vq, self.wab, self.whb, self.bw_b, self.bw_bhat,
                self.system.grad_p, self.system.grad_q, state.p, state.q,
                float(h), lam, mu, opts.tolerance, opts.max_iterations,
            )
        if status == 2:
            raise NonFiniteGradientError(
                f"gradient of {self.system.name!r} was non-finite during the stage solve"
            )
        if status == 1:
            raise ConvergenceError(
                f"stage iteration did not reach tolerance {opts.tolerance:g} "
                f"within {opts.max_iterations} iterations (last update {residual:.3e})",
                iterations=iterations,
                residual=residual,
            )
        stages = StageSolution(lam=lam, mu=mu, iterations=iterations, residual=residual)
        return State(p1, q1, state.t + h), stages


def solve_stages(system, tableau, quadrature, state, h, options=None, backend=None):
    """Solve the stage equations once; returns the StageSolution only."""
    stepper = Stepper(system, tableau, quadrature, options=options, backend=backend)
    _, stages = stepper.advance(state, h)
    return stages


def step(system, tableau, quadrature, state, h, options=None, backend=None):
    """One integration step. Returns (new_state, StageSolution)."""
    stepper = Stepper(system, tableau, quadrature, options=options, backend=backend)
    return stepper.advance(state, h)


class Trajectory:
    """Dense record of an integration run.

    times, p, q hold the n_steps + 1 visited states. invariant_errors maps
    each invariant name to the max-norm deviation from its initial value at
    every visited state; solution_error is the max-norm error against the
    exact solution when one applies, else None. iterations[i] and
    residuals[i] describe the solve that produced state i (zero for the
    initial state).
    """

    def __init__(self, times, p, q, iterations, residuals, invariant_errors, solution_error):
        self.times = times
        self.p = p
        self.q = q
        self.iterations = iterations
        self.residuals = residuals
        self.invariant_errors = invariant_errors
        self.solution_error = solution_error

    def __len__(self):
        return self.times.size

    def state(self, i):
        return State(self.p[i], self.q[i], float(self.times[i]))

    @property
    def final_state(self):
        return self.state(len(self) - 1)

    def max_invariant_error(self, name):
        return float(np.max(self.invariant_errors[name]))


class _Recorder:
    def __init__(self, system, initial, n_steps):
        self.system = system
        n = n_steps + 1
        dim = initial.dim
        self.times = np.empty(n)
        self.p = np.empty((n, dim))
        self.q = np.empty((n, dim))
        self.iterations = np.zeros(n, dtype=int)
        self.residuals = np.zeros(n)
        self.refs = {
            name: np.asarray(fn(initial.p, initial.q))
            for name, fn in system.invariants.items()
        }
        self.inv_errors = {name: np.empty(n) for name in self.refs}
        exact = system.exact_solution
        self.track_exact = exact is not None and (
            np.array_equal(initial.p, system.initial.p)
            and np.array_equal(initial.q, system.initial.q)
            and initial.t == system.initial.t
        )
        self.sol_error = np.empty(n) if self.track_exact else None
        self.record(0, initial, 0, 0.0)

    def record(self, i, state, iterations, residual):
        self.times[i] = state.t
        self.p[i] = state.p
        self.q[i] = state.q
        self.iterations[i] = iterations
        self.residuals[i] = residual
        for name, ref in self.refs.items():
            val = np.asarray(self.system.invariants[name](state.p, state.q))
            self.inv_errors[name][i] = np.max(np.abs(val - ref))
        if self.track_exact:
            pe, qe = self.system.exact_solution(state.t)
            self.sol_error[i] = max(
                float(np.max(np.abs(state.p - pe))), float(np.max(np.abs(state.q - qe)))
            )

    def build(self):
        return Trajectory(
            self.times, self.p, self.q, self.iterations, self.residuals,
            self.inv_errors, self.sol_error,
        )


def integrate(system, tableau, quadrature, h, n_steps, initial=None,
              options=None, backend=None):
    """Integrate n_steps steps of size h. Returns a Trajectory.

    Fails with ConvergenceError or NonFiniteGradientError carrying the
    1-based index of the failing step. Times are t0 + i * h, not accumulated.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    state = initial if initial is not None else system.initial
    opts = options or SolverOptions()
    stepper = Stepper(system, tableau, quadrature, options=opts, backend=backend)
    recorder = _Recorder(system, state, n_steps)
    t0 = state.t
    warm = None
    for i in range(1, n_steps + 1):
        try:
            new_state, stages = stepper.advance(state, h, warm=warm)
        except (ConvergenceError, NonFiniteGradientError) as exc:
            exc.step_index = i
            raise
        new_state = State(new_state.p, new_state.q, t0 + i * h)
        if opts.guess == "previous_step":
            lam = stages.lam.copy()
            mu = stages.mu.copy()
            lam[0] += new_state.p - state.p
            mu[0] += new_state.q - state.q
            warm = (lam, mu)
        recorder.record(i, new_state, stages.iterations, stages.residual)
        state = new_state
    return recorder.build()
