"""Classical one-step baselines for comparison runs.

All methods act on dp/dt = -grad_q H, dq/dt = grad_p H. Implicit ones use
the same fixed-point tolerance semantics as the stage solver: iterate until
the max-norm state update drops to options.tolerance, then take one more
gradient pass for the update. stormer_verlet is the kick-drift-kick scheme
and only accepts separable Hamiltonians (grad_p free of q, grad_q free of p);
it raises on anything else rather than silently computing a different method.
"""

from dataclasses import dataclass

import numpy as np

from .integrator import (
    ConvergenceError,
    NonFiniteGradientError,
    SolverOptions,
    State,
    _Recorder,
)

_SQRT3 = np.sqrt(3.0)
# 2-stage Gauss-Legendre collocation (classical order 4).
_GL_A = np.array([[0.25, 0.25 - _SQRT3 / 6.0], [0.25 + _SQRT3 / 6.0, 0.25]])
_GL_B = np.array([0.5, 0.5])


@dataclass(frozen=True)
class BaselineMethod:
    name: str
    order: int
    implicit: bool
    separable_only: bool = False


BASELINES = {
    m.name: m
    for m in (
        BaselineMethod("explicit_euler", 1, False),
        BaselineMethod("implicit_euler", 1, True),
        BaselineMethod("symplectic_euler_1", 1, True),
        BaselineMethod("symplectic_euler_2", 1, True),
        BaselineMethod("implicit_midpoint", 2, True),
        BaselineMethod("stormer_verlet", 2, False, separable_only=True),
        BaselineMethod("glrk4", 4, True),
    )
}


def _check_finite(name, *arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteGradientError(f"gradient was non-finite in baseline {name!r}")


def _fixed_point(name, initial, sweep, opts):
    """Iterate x <- sweep(x) to the update tolerance; returns (x, sweeps)."""
    x = [a.copy() for a in initial]
    for iteration in range(1, opts.max_iterations + 1):
        new = sweep(x)
        _check_finite(name, *new)
        delta = max(float(np.max(np.abs(n - o))) for n, o in zip(new, x))
        x = new
        if delta <= opts.tolerance:
            return x, iteration
    raise ConvergenceError(
        f"baseline {name!r} did not converge within {opts.max_iterations} iterations "
        f"(last update {delta:.3e})",
        iterations=opts.max_iterations,
        residual=delta,
    )


def _step_impl(method, system, state, h, opts):
    p0, q0 = state.p, state.q
    gp, gq = system.grad_p, system.grad_q
    name = method.name

    if name == "explicit_euler":
        pg, qg = gq(p0, q0), gp(p0, q0)
        _check_finite(name, pg, qg)
        return p0 - h * pg, q0 + h * qg, 1

    if name == "implicit_euler":
        def sweep(x):
            p, q = x
            return [p0 - h * gq(p, q), q0 + h * gp(p, q)]
        (p1, q1), iters = _fixed_point(name, (p0, q0), sweep, opts)
        return p0 - h * gq(p1, q1), q0 + h * gp(p1, q1), iters

    if name == "symplectic_euler_1":
        # q1 = q0 + h grad_p(p0, q1) implicit, then p explicit.
        if system.separable:
            q1, iters = q0 + h * gp(p0, q0), 1
        else:
            (q1,), iters = _fixed_point(name, (q0,), lambda x: [q0 + h * gp(p0, x[0])], opts)
            q1 = q0 + h * gp(p0, q1)
        pg = gq(p0, q1)
        _check_finite(name, q1, pg)
        return p0 - h * pg, q1, iters

    if name == "symplectic_euler_2":
        # p1 = p0 - h grad_q(p1, q0) implicit, then q explicit.
        if system.separable:
            p1, iters = p0 - h * gq(p0, q0), 1
        else:
            (p1,), iters = _fixed_point(name, (p0,), lambda x: [p0 - h * gq(x[0], q0)], opts)
            p1 = p0 - h * gq(p1, q0)
        qg = gp(p1, q0)
        _check_finite(name, p1, qg)
        return p1, q0 + h * qg, iters

    if name == "implicit_midpoint":
        def sweep(x):
            pm, qm = (p0 + x[0]) / 2.0, (q0 + x[1]) / 2.0
            return [p0 - h * gq(pm, qm), q0 + h * gp(pm, qm)]
        (p1, q1), iters = _fixed_point(name, (p0, q0), sweep, opts)
        pm, qm = (p0 + p1) / 2.0, (q0 + q1) / 2.0
        return p0 - h * gq(pm, qm), q0 + h * gp(pm, qm), iters

    if name == "stormer_verlet":
        if not system.separable:
            raise ValueError(
                "stormer_verlet requires a separable Hamiltonian; "
                f"system {system.name!r} is not separable"
            )
        ph = p0 - 0.5 * h * gq(p0, q0)
        q1 = q0 + h * gp(ph, q0)
        p1 = ph - 0.5 * h * gq(ph, q1)
        _check_finite(name, ph, q1, p1)
        return p1, q1, 1

    if name == "glrk4":
        def sweep(x):
            out = []
            for i in range(2):
                pi = p0 + h * (_GL_A[i, 0] * (-gq(x[0], x[1])) + _GL_A[i, 1] * (-gq(x[2], x[3])))
                qi = q0 + h * (_GL_A[i, 0] * gp(x[0], x[1]) + _GL_A[i, 1] * gp(x[2], x[3]))
                out.extend([pi, qi])
            return out
        stages, iters = _fixed_point(name, (p0, q0, p0, q0), sweep, opts)
        z1, z2 = (stages[0], stages[1]), (stages[2], stages[3])
        p1 = p0 - h * (_GL_B[0] * gq(*z1) + _GL_B[1] * gq(*z2))
        q1 = q0 + h * (_GL_B[0] * gp(*z1) + _GL_B[1] * gp(*z2))
        return p1, q1, iters

    raise ValueError(f"unknown baseline method {name!r}; choose from {sorted(BASELINES)}")


def _lookup(method):
    if isinstance(method, BaselineMethod):
        return method
    if method not in BASELINES:
        raise ValueError(f"unknown baseline method {method!r}; choose from {sorted(BASELINES)}")
    return BASELINES[method]


def baseline_step(method, system, state, h, options=None):
    """One step of a baseline method. Returns the new State."""
    m = _lookup(method)
    opts = options or SolverOptions()
    p1, q1, _ = _step_impl(m, system, state, h, opts)
    return State(p1, q1, state.t + h)


def integrate_baseline(method, system, h, n_steps, initial=None, options=None):
    """Integrate a baseline method; same Trajectory contract as integrate()."""
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    m = _lookup(method)
    opts = options or SolverOptions()
    state = initial if initial is not None else system.initial
    recorder = _Recorder(system, state, n_steps)
    t0 = state.t
    for i in range(1, n_steps + 1):
        try:
            p1, q1, iters = _step_impl(m, system, state, h, opts)
        except (ConvergenceError, NonFiniteGradientError) as exc:
            exc.step_index = i
            raise
        state = State(p1, q1, t0 + i * h)
        recorder.record(i, state, iters, 0.0)
    return recorder.build()
