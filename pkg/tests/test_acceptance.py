"""Acceptance suite: the headline numerical claims, one test per criterion.

Each test pins its tolerances and prints the measured figures; pytest -v
gives the per-criterion pass/fail line. Everything here drives the public
API only and runs without the plotting package.
"""

import time

import numpy as np

from csprk import (
    AlphaTableau,
    SolverOptions,
    State,
    baseline_step,
    build_tableau,
    check_energy_condition,
    gauss_legendre,
    henon_heiles,
    integrate,
    integrate_baseline,
    interpolatory,
    kepler,
    linear_system,
    preset,
    step,
)


def final_error(system, traj):
    pe, qe = system.exact_solution(traj.times[-1])
    return max(float(np.max(np.abs(traj.p[-1] - pe))), float(np.max(np.abs(traj.q[-1] - qe))))


def fitted_slope(system, make_step_runner):
    hs = np.array([0.1, 0.05, 0.025, 0.0125])
    errs = np.array([make_step_runner(h) for h in hs])
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def test_criterion_1_energy_preservation_linear():
    # EP schemes I and II on the oscillator: 1000 steps at h=0.1 with 2 Gauss
    # nodes hold the energy to 1e-11, in under a second each
    system = linear_system()
    quad = gauss_legendre(2)
    opts = SolverOptions(tolerance=1e-14)
    for theta in (1.0, 2.0):
        tab = build_tableau(preset("ex31", [theta]))
        start = time.perf_counter()
        traj = integrate(system, tab, quad, 0.1, 1000, options=opts)
        elapsed = time.perf_counter() - start
        dev = traj.max_invariant_error("H")
        print(f"theta={theta}: max|H-H0| = {dev:.3e}, runtime = {elapsed:.3f}s")
        assert dev <= 1e-11
        assert elapsed < 1.0


def test_criterion_2_order_verification():
    system = linear_system()
    csprk_cases = [
        ("ex31", (1.0,), 2, 1),
        ("avf", (), 2, 2),
        ("ex32", (1.0, 0.0), 3, 2),
        ("ex33", (1.0, 1.0), 4, 4),
    ]
    for name, params, k, order in csprk_cases:
        tab = build_tableau(preset(name, params))
        quad = gauss_legendre(k)

        def run(h, tab=tab, quad=quad):
            traj = integrate(system, tab, quad, h, int(round(1.0 / h)))
            return final_error(system, traj)

        slope = fitted_slope(system, run)
        print(f"{name}{params}: slope = {slope:.3f} (want {order})")
        assert abs(slope - order) <= 0.15, (name, slope)

    baseline_cases = [
        ("explicit_euler", 1, system),
        ("implicit_euler", 1, system),
        ("symplectic_euler_1", 1, system),
        ("symplectic_euler_2", 1, system),
        ("implicit_midpoint", 2, system),
        # Verlet needs a separable Hamiltonian; measured on the b=0 variant
        ("stormer_verlet", 2, linear_system(b=0.0)),
        ("glrk4", 4, system),
    ]
    for name, order, sys_used in baseline_cases:
        def run(h, name=name, sys_used=sys_used):
            traj = integrate_baseline(name, sys_used, h, int(round(1.0 / h)))
            return final_error(sys_used, traj)

        slope = fitted_slope(sys_used, run)
        print(f"{name}: slope = {slope:.3f} (want {order})")
        assert abs(slope - order) <= 0.15, (name, slope)


def test_criterion_3_quadrature_exactness_threshold():
    # k = 5 = ceil(3*3/2) nodes make the step exactly energy-preserving on
    # the cubic Hamiltonian; k = 1 visibly does not
    system = henon_heiles()
    tab = build_tableau(preset("ex32", [1.0, 1.0]))
    rng = np.random.default_rng(2024)
    states = []
    for _ in range(100):
        p = system.initial.p + rng.uniform(-0.1, 0.1, 2)
        q = system.initial.q + rng.uniform(-0.1, 0.1, 2)
        states.append(State(p, q))

    quad5 = gauss_legendre(5)
    worst5 = 0.0
    for state in states:
        new, _ = step(system, tab, quad5, state, 0.1)
        worst5 = max(worst5, abs(system.energy(new.p, new.q) - system.energy(state.p, state.q)))
    print(f"k=5: worst per-step |dH| = {worst5:.3e}")
    assert worst5 <= 1e-12

    quad1 = gauss_legendre(1)
    worst1 = 0.0
    for state in states:
        new, _ = step(system, tab, quad1, state, 0.1)
        worst1 = max(worst1, abs(system.energy(new.p, new.q) - system.energy(state.p, state.q)))
    print(f"k=1: worst per-step |dH| = {worst1:.3e}")
    assert worst1 > 1e-8


def test_criterion_4_henon_heiles_long_run():
    system = henon_heiles()
    quad = gauss_legendre(5)
    for params in ((1.0, 0.0), (1.0, 1.0)):
        tab = build_tableau(preset("ex32", params))
        traj = integrate(system, tab, quad, 0.1, 10_000)
        dev = traj.max_invariant_error("H")
        print(f"ex32{params}: max|H-H0| = {dev:.3e} over 1e4 steps")
        assert dev <= 1e-10

    # the symplectic baselines do not preserve H but stay bounded: the late
    # maximum never exceeds 10x the maximum over the first tenth of the run
    for name in ("implicit_midpoint", "stormer_verlet"):
        traj = integrate_baseline(name, system, 0.1, 10_000)
        err = traj.invariant_errors["H"]
        early = float(np.max(err[:1001]))
        late = float(np.max(err))
        print(f"{name}: early max = {early:.3e}, overall max = {late:.3e}")
        assert late <= 10 * early, name


def test_criterion_5_kepler_invariants():
    system = kepler()
    quad = gauss_legendre(6)
    results = {}
    for theta1 in (0.0, 1.0, 2.0):
        tab = build_tableau(preset("ex33", [theta1, 0.0]))
        traj = integrate(system, tab, quad, 0.1, 1000)
        results[theta1] = {
            "H": traj.max_invariant_error("H"),
            "I": traj.max_invariant_error("I"),
            "L": traj.max_invariant_error("L"),
        }
        print(
            f"ex33({theta1},0): max|H-H0| = {results[theta1]['H']:.3e}, "
            f"max|I-I0| = {results[theta1]['I']:.3e}, "
            f"max|L-L0| = {results[theta1]['L']:.3e}"
        )

    # the family preserves the energy but not the other first integrals:
    # the vector invariant L drifts at the method's order
    for theta1, errs in results.items():
        assert errs["H"] <= 1e-10, (theta1, errs["H"])
        assert errs["L"] > 1e-10, (theta1, errs["L"])

    traj = integrate_baseline("glrk4", system, 0.1, 1000)
    errI = traj.max_invariant_error("I")
    print(f"glrk4: max|I-I0| = {errI:.3e}")
    assert errI <= 1e-12

    # Pinned drift threshold for the quadratic invariant. On this circular
    # orbit the angular-momentum error of these methods cancels by symmetry
    # and stays near 1e-12 (an eccentric start drifts at ~1e-5), so this
    # bound is not reachable from the configured initial state.
    for theta1, errs in results.items():
        assert errs["I"] > 1e-10, (
            f"ex33({theta1},0): max|I-I0| = {errs['I']:.3e} stays below 1e-10; "
            "on the circular orbit the angular-momentum error cancels to the "
            "1e-12 level (the same run from an eccentric state drifts at 1e-5, "
            "and the vector invariant L drifts at "
            f"{errs['L']:.3e} here)"
        )


def test_criterion_6_kepler_error_growth():
    # on the circular orbit the dominant error of both 4th-order methods is
    # phase drift: per-period maxima of the solution error grow linearly
    system = kepler()
    period = 2.0 * np.pi

    def per_period_maxima(traj):
        idx = np.floor(traj.times / period).astype(int)
        buckets = []
        for j in range(int(np.floor(traj.times[-1] / period))):
            sel = idx == j
            buckets.append(float(np.max(traj.solution_error[sel])))
        return np.array(buckets)

    runs = {
        "ex33(0,0)": integrate(
            system, build_tableau(preset("ex33", [0.0, 0.0])), gauss_legendre(6), 0.1, 1000
        ),
        "glrk4": integrate_baseline("glrk4", system, 0.1, 1000),
    }
    for label, traj in runs.items():
        maxima = per_period_maxima(traj)
        assert maxima.size >= 10
        t_mid = (np.arange(maxima.size) + 0.5) * period
        coeffs = np.polyfit(t_mid, maxima, 1)
        fit = np.polyval(coeffs, t_mid)
        ss_res = float(np.sum((maxima - fit) ** 2))
        ss_tot = float(np.sum((maxima - np.mean(maxima)) ** 2))
        r2 = 1.0 - ss_res / ss_tot
        print(f"{label}: slope = {coeffs[0]:.3e}/unit time, R^2 = {r2:.4f}")
        assert r2 >= 0.9, label


def test_criterion_7_construction_identities():
    rng = np.random.default_rng(77)
    tau21 = np.linspace(0.0, 1.0, 21)
    for _ in range(100):
        s = int(rng.integers(1, 5))
        r = int(rng.integers(1, 5))
        alpha = rng.uniform(-2.0, 2.0, size=(s, r))
        tab = build_tableau(AlphaTableau(s, r, alpha))
        report = check_energy_condition(tab)
        assert report.passed
        assert report.residual_zero <= 1e-12
        assert report.residual_weights <= 1e-12
        assert report.residual_symmetry <= 1e-12

        # identity border: B and Bhat collapse to the constant 1
        forced = alpha.copy()
        forced[0, :] = 0.0
        forced[:, 0] = 0.0
        forced[0, 0] = 1.0
        tab2 = build_tableau(AlphaTableau(s, r, forced))
        assert np.max(np.abs(tab2.b_values(tau21) - 1.0)) <= 1e-12
        assert np.max(np.abs(tab2.bhat_values(tau21) - 1.0)) <= 1e-12
    print("100 random alpha matrices: all construction identities hold")


def test_criterion_8_avf_oracle():
    # three parameter choices that all collapse to the same method
    tabs = [
        build_tableau(preset("ex31", [0.0])),
        build_tableau(preset("ex32", [0.0, 0.0])),
        build_tableau(preset("symmetric_eta_s", [1])),
    ]

    system = henon_heiles()
    quad = gauss_legendre(5)
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        p = system.initial.p + rng.uniform(-0.2, 0.2, 2)
        q = system.initial.q + rng.uniform(-0.2, 0.2, 2)
        state = State(p, q)
        results = [step(system, tab, quad, state, 0.1)[0] for tab in tabs]
        for i in range(len(results)):
            for j in range(i + 1, len(results)):
                worst = max(
                    worst,
                    float(np.max(np.abs(results[i].p - results[j].p))),
                    float(np.max(np.abs(results[i].q - results[j].q))),
                )
    print(f"pairwise step difference on random states: {worst:.3e}")
    assert worst <= 1e-12

    linear = linear_system()
    a, b, c = linear.kernel[1]
    L = np.array([[b, -c], [a, -b]])
    quad2 = gauss_legendre(3)
    state = linear.initial
    z0 = np.array([state.p[0], state.q[0]])
    h = 0.1
    want = np.linalg.solve(np.eye(2) - 0.5 * h * L, (np.eye(2) + 0.5 * h * L) @ z0)
    worst = 0.0
    for tab in tabs:
        new, _ = step(linear, tab, quad2, state, h)
        worst = max(worst, abs(new.p[0] - want[0]), abs(new.q[0] - want[1]))
    print(f"deviation from the directly solved midpoint map: {worst:.3e}")
    assert worst <= 1e-12


def test_criterion_9_quadrature_suite():
    for k in range(1, 21):
        quad = gauss_legendre(k)
        for m in range(2 * k):
            got = float(np.dot(quad.weights, quad.nodes**m))
            assert abs(got - 1.0 / (m + 1)) <= 1e-13, (k, m)
        assert np.max(np.abs(quad.nodes + quad.nodes[::-1] - 1.0)) <= 1e-14
        assert np.max(np.abs(quad.weights - quad.weights[::-1])) <= 1e-14

    trap = interpolatory([0.0, 1.0])
    assert np.max(np.abs(trap.weights - np.array([0.5, 0.5]))) <= 1e-14
    simpson = interpolatory([0.0, 0.5, 1.0])
    assert np.max(np.abs(simpson.weights - np.array([1 / 6, 2 / 3, 1 / 6]))) <= 1e-14
    print("gauss exactness/symmetry and closed-form interpolatory weights hold")
