"""Command-line driver: trajectory runs, order measurements, method checks.

Subcommands:
  run    integrate one method on one problem, streaming a CSV of states and
         invariant errors (17 significant digits, deterministic bytes)
  order  integrate to t = 1 over a list of step sizes and report max-norm
         errors against the exact solution plus the fitted log-log slope
  check  verify a csPRK method: energy-condition residuals, largest passing
         simplifying assumptions, certified order, recommended node count

Exit codes: 0 success, 1 configuration error, 2 numerical failure (run flushes
the rows computed so far and appends a comment line naming the failed step).
"""

import argparse
import json
import sys

import numpy as np

from .baselines import BASELINES, _lookup, _step_impl
from .coefficients import (
    PreconditionError,
    build_tableau,
    check_energy_condition,
    estimate_order,
    load_tableau_json,
    max_simplifying_eta,
    max_simplifying_zeta,
    preset,
)
from .integrator import (
    ConvergenceError,
    NonFiniteGradientError,
    SolverOptions,
    State,
    Stepper,
)
from .problems import henon_heiles, kepler, linear_system
from .quadrature import gauss_legendre, interpolatory, min_nodes_for_exact_energy

_LINEAR_FLAGS = ("a", "b", "c", "p0", "q0")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for numerical
    # failures here, so remap parse problems to the config-error code.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _make_problem(args):
    name = args.problem
    overrides = [f for f in _LINEAR_FLAGS if getattr(args, f) is not None]
    if name == "linear":
        values = dict(a=1.0, b=-1.0, c=2.0, p0=0.5, q0=0.0)
        values.update({f: getattr(args, f) for f in overrides})
        return linear_system(**values)
    if overrides:
        raise ValueError(f"--{overrides[0]} only applies to the linear problem")
    if name == "henon-heiles":
        return henon_heiles()
    if name == "kepler":
        return kepler()
    raise ValueError(f"unknown problem {name!r}")


def _make_method(args):
    """Resolve the method spec to ('baseline', method) or ('csprk', tableau)."""
    sources = [s for s in ("method", "preset", "tableau") if getattr(args, s) is not None]
    if len(sources) != 1:
        raise ValueError("specify exactly one of --method, --preset, --tableau")
    if args.method is not None:
        return "baseline", _lookup(args.method)
    if args.preset is not None:
        params = _float_list(args.params) if args.params else []
        return "csprk", build_tableau(preset(args.preset, params))
    return "csprk", build_tableau(load_tableau_json(args.tableau))


def _make_quadrature(args, tableau, system):
    if args.quad is not None and args.nodes is not None:
        raise ValueError("--quad and --nodes are mutually exclusive")
    if args.nodes is not None:
        return interpolatory(_float_list(args.nodes))
    if args.quad is not None:
        return gauss_legendre(args.quad)
    if system.poly_degree is not None:
        k = min_nodes_for_exact_energy(system.poly_degree, tableau.s, tableau.r)
    else:
        k = max(tableau.s, tableau.r) + 2
    return gauss_legendre(k)


def _solver_options(args):
    return SolverOptions(
        tolerance=args.tol, max_iterations=args.max_iter, guess=args.guess
    )


def _fmt(x):
    return f"{x:.17g}"


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_run(args):
    system = _make_problem(args)
    kind, method = _make_method(args)
    opts = _solver_options(args)
    if args.steps < 0:
        raise ValueError("--steps must be non-negative")
    if kind == "baseline":
        if method.separable_only and not system.separable:
            raise ValueError(
                f"baseline {method.name!r} requires a separable Hamiltonian; "
                f"{system.name!r} is not separable"
            )
        stepper = None
    else:
        stepper = Stepper(system, method, _make_quadrature(args, method, system), options=opts)

    state = system.initial
    refs = {name: np.asarray(fn(state.p, state.q)) for name, fn in system.invariants.items()}
    track_exact = system.exact_solution is not None
    dim = state.dim
    header = (
        ["t"]
        + [f"p_{i+1}" for i in range(dim)]
        + [f"q_{i+1}" for i in range(dim)]
        + [f"err_{name}" for name in refs]
        + (["err_sol"] if track_exact else [])
        + ["iters"]
    )

    def row(state, iters):
        cells = [state.t, *state.p, *state.q]
        for name, ref in refs.items():
            val = np.asarray(system.invariants[name](state.p, state.q))
            cells.append(np.max(np.abs(val - ref)))
        if track_exact:
            pe, qe = system.exact_solution(state.t)
            cells.append(
                max(float(np.max(np.abs(state.p - pe))), float(np.max(np.abs(state.q - qe))))
            )
        return ",".join(_fmt(c) for c in cells) + f",{iters}\n"

    out, should_close = _open_out(args.out)
    try:
        out.write(",".join(header) + "\n")
        out.write(row(state, 0))
        t0 = state.t
        warm = None
        for i in range(1, args.steps + 1):
            try:
                if kind == "baseline":
                    p1, q1, iters = _step_impl(method, system, state, args.h, opts)
                    new_state = State(p1, q1, t0 + i * args.h)
                else:
                    new_state, stages = stepper.advance(state, args.h, warm=warm)
                    new_state = State(new_state.p, new_state.q, t0 + i * args.h)
                    iters = stages.iterations
                    if opts.guess == "previous_step":
                        lam, mu = stages.lam.copy(), stages.mu.copy()
                        lam[0] += new_state.p - state.p
                        mu[0] += new_state.q - state.q
                        warm = (lam, mu)
            except (ConvergenceError, NonFiniteGradientError) as exc:
                out.write(f"# error at step {i}: {exc}\n")
                out.flush()
                print(f"error: step {i}: {exc}", file=sys.stderr)
                return 2
            out.write(row(new_state, iters))
            state = new_state
        out.flush()
    finally:
        if should_close:
            out.close()
    return 0


def _measure_error(args, system, kind, method, opts, h):
    n = round(1.0 / h)
    if n < 1 or abs(n * h - 1.0) > 1e-9:
        raise ValueError(f"step size {h} does not divide the interval [0, 1]")
    state = system.initial
    t0 = state.t
    warm = None
    if kind == "csprk":
        stepper = Stepper(system, method, _make_quadrature(args, method, system), options=opts)
    for i in range(1, n + 1):
        if kind == "baseline":
            p1, q1, _ = _step_impl(method, system, state, h, opts)
            new_state = State(p1, q1, t0 + i * h)
        else:
            new_state, stages = stepper.advance(state, h, warm=warm)
            new_state = State(new_state.p, new_state.q, t0 + i * h)
            if opts.guess == "previous_step":
                lam, mu = stages.lam.copy(), stages.mu.copy()
                lam[0] += new_state.p - state.p
                mu[0] += new_state.q - state.q
                warm = (lam, mu)
        state = new_state
    pe, qe = system.exact_solution(state.t)
    return max(float(np.max(np.abs(state.p - pe))), float(np.max(np.abs(state.q - qe))))


def cmd_order(args):
    system = _make_problem(args)
    if system.exact_solution is None:
        raise ValueError(f"problem {system.name!r} has no exact solution for order runs")
    kind, method = _make_method(args)
    if kind == "baseline" and method.separable_only and not system.separable:
        raise ValueError(
            f"baseline {method.name!r} requires a separable Hamiltonian; "
            f"{system.name!r} is not separable"
        )
    opts = _solver_options(args)
    h_list = _float_list(args.h_list)
    if not h_list:
        raise ValueError("--h-list must contain at least one step size")
    errors = [_measure_error(args, system, kind, method, opts, h) for h in h_list]
    safe = [max(e, 1e-300) for e in errors]
    if len(h_list) >= 2:
        slope = float(np.polyfit(np.log(h_list), np.log(safe), 1)[0])
    else:
        slope = float("nan")
    report = {"h": h_list, "error": errors, "fitted_slope": slope}
    out, should_close = _open_out(args.out)
    try:
        json.dump(report, out, indent=2)
        out.write("\n")
    finally:
        if should_close:
            out.close()
    return 0


def cmd_check(args):
    if args.method is not None:
        raise ValueError("check applies to csPRK methods only, not baselines")
    _, tableau = _make_method(args)
    report = check_energy_condition(tableau, grid_size=args.grid)
    try:
        eta = max_simplifying_eta(tableau)
        zeta = max_simplifying_zeta(tableau)
    except PreconditionError:
        eta = None
        zeta = None
    payload = {
        "s": tableau.s,
        "r": tableau.r,
        "energy_condition": "pass" if report.passed else "fail",
        "residuals": {
            "stage_zero": report.residual_zero,
            "weights": report.residual_weights,
            "symmetry": report.residual_symmetry,
        },
        "eta": eta,
        "zeta": zeta,
        "certified_order": estimate_order(tableau),
    }
    if args.nu is not None:
        payload["k_min"] = min_nodes_for_exact_energy(args.nu, tableau.s, tableau.r)
    out, should_close = _open_out(args.out)
    try:
        json.dump(payload, out, indent=2)
        out.write("\n")
    finally:
        if should_close:
            out.close()
    return 0


def _add_method_flags(sub):
    sub.add_argument("--method", choices=sorted(BASELINES), help="baseline method name")
    sub.add_argument("--preset", help="csPRK preset name (avf, ex31, ex32, ex33, symmetric_eta_s)")
    sub.add_argument("--params", default="", help="comma-separated preset parameters")
    sub.add_argument("--tableau", help="path to a tableau JSON file {s, r, alpha}")


def _add_problem_flags(sub):
    sub.add_argument(
        "--problem", default="linear", choices=["linear", "henon-heiles", "kepler"]
    )
    for flag in _LINEAR_FLAGS:
        sub.add_argument(f"--{flag}", type=float, default=None,
                         help="linear problem parameter (linear only)")


def _add_solver_flags(sub):
    sub.add_argument("--quad", type=int, default=None,
                     help="Gauss-Legendre node count (default: smallest exact choice)")
    sub.add_argument("--nodes", default=None,
                     help="comma-separated custom quadrature nodes in [0, 1]")
    sub.add_argument("--tol", type=float, default=1e-14, help="stage solver tolerance")
    sub.add_argument("--max-iter", type=int, default=100, dest="max_iter")
    sub.add_argument("--guess", choices=["constant", "previous_step"], default="constant",
                     help="stage iteration initial guess strategy")


def build_parser():
    parser = _Parser(prog="csprk", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="integrate and write a trajectory CSV")
    _add_method_flags(run)
    _add_problem_flags(run)
    _add_solver_flags(run)
    run.add_argument("--h", type=float, default=0.1, help="step size")
    run.add_argument("--steps", type=int, default=1000, help="number of steps")
    run.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    run.set_defaults(func=cmd_run)

    order = subs.add_parser("order", help="measure convergence order on [0, 1]")
    _add_method_flags(order)
    _add_problem_flags(order)
    _add_solver_flags(order)
    order.add_argument("--h-list", default="0.1,0.05,0.025,0.0125", dest="h_list",
                       help="comma-separated step sizes, each dividing [0, 1]")
    order.add_argument("--out", default="-", help="output JSON path, '-' for stdout")
    order.set_defaults(func=cmd_order)

    check = subs.add_parser("check", help="verify a csPRK method's structure")
    _add_method_flags(check)
    check.add_argument("--nu", type=int, default=None,
                       help="polynomial degree of H for the node-count recommendation")
    check.add_argument("--grid", type=int, default=21,
                       help="sample grid size for condition residuals")
    check.add_argument("--out", default="-", help="output JSON path, '-' for stdout")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on bad flags and on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConvergenceError, NonFiniteGradientError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
