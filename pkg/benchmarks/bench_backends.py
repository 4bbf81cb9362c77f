"""Compare the pure-Python and compiled stage-solver backends.

Runs the same integrations on both backends, checks that the results agree,
and reports per-step timings. Usage:

    python3 benchmarks/bench_backends.py [--steps N] [--repeats R]
"""

import argparse
import time

import numpy as np

from csprk import (
    build_tableau,
    compiled_available,
    gauss_legendre,
    henon_heiles,
    integrate,
    kepler,
    linear_system,
    preset,
    step,
)

CASES = [
    ("linear, ex31(1), k=2", linear_system(), preset("ex31", [1.0]), 2),
    ("linear, avf, k=2", linear_system(), preset("avf"), 2),
    ("henon-heiles, ex32(1,1), k=5", henon_heiles(), preset("ex32", [1.0, 1.0]), 5),
    ("kepler, ex33(0,0), k=6", kepler(), preset("ex33", [0.0, 0.0]), 6),
]


def run_case(system, alpha, k, steps, backend, repeats):
    tableau = build_tableau(alpha)
    quad = gauss_legendre(k)
    best = float("inf")
    traj = None
    for _ in range(repeats):
        start = time.perf_counter()
        traj = integrate(system, tableau, quad, 0.1, steps, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, traj


def map_agreement(system, alpha, k, traj):
    # compare single steps from identical states: pointwise trajectory
    # comparison would instead measure chaos amplifying 1-ulp differences
    tableau = build_tableau(alpha)
    quad = gauss_legendre(k)
    worst = 0.0
    for i in range(0, len(traj), max(1, len(traj) // 25)):
        state = traj.state(i)
        py, _ = step(system, tableau, quad, state, 0.1, backend="python")
        cy, _ = step(system, tableau, quad, state, 0.1, backend="compiled")
        worst = max(
            worst,
            float(np.max(np.abs(py.p - cy.p))),
            float(np.max(np.abs(py.q - cy.q))),
        )
    return worst


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=2000, help="steps per run")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats, best kept")
    args = parser.parse_args()

    if not compiled_available():
        raise SystemExit("compiled backend is not built; nothing to compare")

    header = f"{'case':34} {'python':>10} {'compiled':>10} {'speedup':>8}  agreement"
    print(header)
    print("-" * len(header))
    for label, system, alpha, k in CASES:
        t_py, traj_py = run_case(system, alpha, k, args.steps, "python", args.repeats)
        t_cy, _ = run_case(system, alpha, k, args.steps, "compiled", args.repeats)
        diff = map_agreement(system, alpha, k, traj_py)
        us_py = 1e6 * t_py / args.steps
        us_cy = 1e6 * t_cy / args.steps
        print(f"{label:34} {us_py:8.1f}us {us_cy:8.1f}us {t_py / t_cy:7.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()
