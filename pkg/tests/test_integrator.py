"""Tests for the stage solver and trajectory integration."""

import numpy as np
import pytest

from csprk import (
    ConvergenceError,
    NonFiniteGradientError,
    SolverOptions,
    State,
    build_tableau,
    compiled_available,
    gauss_legendre,
    henon_heiles,
    integrate,
    kepler,
    linear_system,
    min_nodes_for_exact_energy,
    preset,
    solve_stages,
    step,
)
from csprk.problems import HamiltonianSystem
from csprk.quadrature import Quadrature

AVF = build_tableau(preset("avf"))


def midpoint_map(system, state, h):
    """Oracle: implicit midpoint on the 1-d linear system, solved directly."""
    a, b, c = system.kernel[1]
    L = np.array([[b, -c], [a, -b]])
    z0 = np.array([state.p[0], state.q[0]])
    lhs = np.eye(2) - 0.5 * h * L
    rhs = (np.eye(2) + 0.5 * h * L) @ z0
    return np.linalg.solve(lhs, rhs)


def test_zero_step_is_identity():
    system = linear_system()
    new, stages = step(system, AVF, gauss_legendre(2), system.initial, 0.0)
    assert np.array_equal(new.p, system.initial.p)
    assert np.array_equal(new.q, system.initial.q)
    assert stages.iterations <= 2


def test_constant_hamiltonian_stages():
    zero = lambda p, q: np.zeros_like(p)
    system = HamiltonianSystem(
        name="flat",
        dim=2,
        energy=lambda p, q: 1.0,
        grad_p=zero,
        grad_q=zero,
        initial=State([0.3, -0.4], [1.0, 2.0]),
        separable=True,
        poly_degree=1,
    )
    stages = solve_stages(system, AVF, gauss_legendre(2), system.initial, 0.5)
    assert stages.iterations == 1
    tau = np.linspace(0, 1, 7)
    assert np.max(np.abs(stages.p_stage(tau) - system.initial.p)) <= 1e-15
    assert np.max(np.abs(stages.q_stage(tau) - system.initial.q)) <= 1e-15


def test_avf_equals_implicit_midpoint_on_linear():
    system = linear_system()
    state = system.initial
    for h in (0.1, 0.05, -0.08):
        new, _ = step(system, AVF, gauss_legendre(2), state, h)
        z = midpoint_map(system, state, h)
        assert abs(new.p[0] - z[0]) <= 1e-12
        assert abs(new.q[0] - z[1]) <= 1e-12


def test_stage_polynomial_anchored_at_state():
    system = henon_heiles()
    tab = build_tableau(preset("ex32", [1.0, 1.0]))
    stages = solve_stages(system, tab, gauss_legendre(5), system.initial, 0.1)
    p0 = stages.p_stage(np.array([0.0]))[0]
    q0 = stages.q_stage(np.array([0.0]))[0]
    assert np.max(np.abs(p0 - system.initial.p)) <= 1e-12
    assert np.max(np.abs(q0 - system.initial.q)) <= 1e-12


@pytest.mark.parametrize(
    "name,params",
    [("avf", ()), ("ex31", (1.0,)), ("ex32", (1.0, 1.0)), ("ex33", (1.0, 1.0))],
)
def test_exact_energy_preservation_per_step(name, params):
    # with enough quadrature nodes the step preserves polynomial energies
    # to solver tolerance, for random states
    rng = np.random.default_rng(17)
    system = henon_heiles()
    alpha = preset(name, params)
    tab = build_tableau(alpha)
    k = min_nodes_for_exact_energy(system.poly_degree, alpha.s, alpha.r)
    quad = gauss_legendre(k)
    tol = 1e-14
    opts = SolverOptions(tolerance=tol)
    for _ in range(100):
        p = system.initial.p + rng.uniform(-0.1, 0.1, 2)
        q = system.initial.q + rng.uniform(-0.1, 0.1, 2)
        state = State(p, q)
        new, _ = step(system, tab, quad, state, 0.1, options=opts)
        dH = abs(system.energy(new.p, new.q) - system.energy(p, q))
        assert dH <= 10 * tol


def test_under_resolved_quadrature_drifts():
    # k=1 cannot integrate the cubic terms: energy drift appears
    rng = np.random.default_rng(23)
    system = henon_heiles()
    tab = build_tableau(preset("ex32", [1.0, 1.0]))
    quad = gauss_legendre(1)
    worst = 0.0
    for _ in range(100):
        p = system.initial.p + rng.uniform(-0.1, 0.1, 2)
        q = system.initial.q + rng.uniform(-0.1, 0.1, 2)
        state = State(p, q)
        new, _ = step(system, tab, quad, state, 0.1)
        worst = max(worst, abs(system.energy(new.p, new.q) - system.energy(p, q)))
    assert worst > 1e-8


def test_convergence_orders_on_linear():
    system = linear_system()
    cases = [("avf", (), 2), ("ex31", (1.0,), 1), ("ex33", (1.0, 1.0), 4)]
    hs = np.array([0.1, 0.05, 0.025, 0.0125])
    for name, params, order in cases:
        alpha = preset(name, params)
        tab = build_tableau(alpha)
        k = min_nodes_for_exact_energy(2, alpha.s, alpha.r)
        quad = gauss_legendre(k)
        errs = []
        for h in hs:
            n = int(round(1.0 / h))
            traj = integrate(system, tab, quad, h, n)
            pe, qe = system.exact_solution(traj.times[-1])
            err = max(
                np.max(np.abs(traj.p[-1] - pe)), np.max(np.abs(traj.q[-1] - qe))
            )
            errs.append(err)
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert abs(slope - order) <= 0.15, (name, slope)


def test_time_symmetry_of_symmetric_family():
    system = henon_heiles()
    tab = build_tableau(preset("symmetric_eta_s", [2]))
    quad = gauss_legendre(5)
    tol = 1e-14
    opts = SolverOptions(tolerance=tol)
    state = system.initial
    fwd, _ = step(system, tab, quad, state, 0.1, options=opts)
    back, _ = step(system, tab, quad, fwd, -0.1, options=opts)
    assert np.max(np.abs(back.p - state.p)) <= 100 * tol
    assert np.max(np.abs(back.q - state.q)) <= 100 * tol


def test_iteration_counts_stay_small():
    system = kepler()
    tab = build_tableau(preset("ex33", [1.0, 0.0]))
    traj = integrate(system, tab, gauss_legendre(6), 0.1, 200)
    assert np.max(traj.iterations) < 100
    assert np.max(traj.residuals[1:]) <= 1e-13


def test_trajectory_record_layout():
    system = linear_system()
    traj = integrate(system, AVF, gauss_legendre(2), 0.1, 10)
    assert len(traj) == 11
    assert np.allclose(traj.times, 0.1 * np.arange(11), atol=1e-15)
    assert traj.p.shape == (11, 1) and traj.q.shape == (11, 1)
    assert set(traj.invariant_errors) == {"H"}
    assert traj.invariant_errors["H"][0] == 0.0
    assert traj.solution_error is not None
    assert traj.solution_error[0] == 0.0
    final = traj.final_state
    assert final.t == pytest.approx(1.0)


def test_integrate_zero_steps():
    system = linear_system()
    traj = integrate(system, AVF, gauss_legendre(2), 0.1, 0)
    assert len(traj) == 1
    assert traj.max_invariant_error("H") == 0.0


def test_custom_initial_state_disables_exact_tracking():
    system = linear_system()
    other = State([0.3], [0.1])
    traj = integrate(system, AVF, gauss_legendre(2), 0.1, 5, initial=other)
    assert traj.solution_error is None
    assert traj.invariant_errors["H"][0] == 0.0


def test_warm_start_matches_cold_start():
    system = henon_heiles()
    tab = build_tableau(preset("ex32", [1.0, 0.0]))
    quad = gauss_legendre(5)
    cold = integrate(system, tab, quad, 0.1, 50,
                     options=SolverOptions(guess="constant"))
    warm = integrate(system, tab, quad, 0.1, 50,
                     options=SolverOptions(guess="previous_step"))
    assert np.max(np.abs(cold.p - warm.p)) <= 1e-12
    assert np.max(np.abs(cold.q - warm.q)) <= 1e-12
    # warm starts converge in fewer sweeps on a smooth trajectory
    assert warm.iterations[2:].sum() < cold.iterations[2:].sum()


def test_non_convergence_error():
    system = kepler()
    with pytest.raises(ConvergenceError) as info:
        integrate(system, AVF, gauss_legendre(4), 50.0, 3)
    assert info.value.step_index == 1
    assert info.value.iterations == 100


def test_non_finite_gradient_error():
    system = kepler()
    bad = State([0.0, 0.0], [0.0, 0.0])
    with np.errstate(invalid="ignore", divide="ignore"):
        with pytest.raises(NonFiniteGradientError):
            step(system, AVF, gauss_legendre(2), bad, 0.1, backend="python")


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(tolerance=0.0)
    with pytest.raises(ValueError):
        SolverOptions(max_iterations=0)
    with pytest.raises(ValueError):
        SolverOptions(guess="wild")


def test_state_validation():
    with pytest.raises(ValueError):
        State([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        State([np.inf], [0.0])
    s = State([1.0], [2.0])
    with pytest.raises(ValueError):
        s.p[0] = 3.0


def test_backend_selection_errors():
    system = linear_system()
    with pytest.raises(ValueError):
        step(system, AVF, gauss_legendre(2), system.initial, 0.1, backend="torch")


@pytest.mark.skipif(not compiled_available(), reason="compiled backend not built")
def test_backends_agree():
    cases = [
        (linear_system(), "ex31", (1.0,), 2),
        (henon_heiles(), "ex32", (1.0, 0.0), 5),
        (kepler(), "ex33", (1.0, 0.0), 6),
    ]
    for system, name, params, k in cases:
        tab = build_tableau(preset(name, params))
        quad = gauss_legendre(k)
        py = integrate(system, tab, quad, 0.05, 40, backend="python")
        cy = integrate(system, tab, quad, 0.05, 40, backend="compiled")
        assert np.max(np.abs(py.p - cy.p)) <= 1e-13
        assert np.max(np.abs(py.q - cy.q)) <= 1e-13
        assert np.array_equal(py.iterations, cy.iterations)


@pytest.mark.skipif(not compiled_available(), reason="compiled backend not built")
def test_compiled_rejects_custom_system():
    zero = lambda p, q: np.zeros_like(p)
    system = HamiltonianSystem(
        name="custom",
        dim=1,
        energy=lambda p, q: 0.0,
        grad_p=zero,
        grad_q=zero,
        initial=State([0.0], [0.0]),
        separable=True,
        poly_degree=1,
    )
    with pytest.raises(ValueError):
        step(system, AVF, gauss_legendre(2), system.initial, 0.1, backend="compiled")


def test_negative_h_integration():
    system = linear_system()
    fwd = integrate(system, AVF, gauss_legendre(2), 0.1, 20)
    back = integrate(system, AVF, gauss_legendre(2), -0.1, 20,
                     initial=fwd.final_state)
    assert abs(back.final_state.p[0] - system.initial.p[0]) <= 1e-10
    assert abs(back.final_state.q[0] - system.initial.q[0]) <= 1e-10


def test_interpolatory_quadrature_works_in_steps():
    # a non-Gauss rule exact to the needed degree preserves energy too
    system = linear_system()
    nodes = np.linspace(0.0, 1.0, 6)
    from csprk.quadrature import interpolatory

    quad = interpolatory(nodes)
    assert quad.exactness_degree >= 5
    traj = integrate(system, build_tableau(preset("ex31", [1.0])), quad, 0.1, 100)
    assert traj.max_invariant_error("H") <= 1e-11
