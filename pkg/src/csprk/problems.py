"""Built-in Hamiltonian benchmark systems.

Each system bundles the energy, the two gradient fields, optional extra
first integrals, an optional exact solution, and a default initial state.
Gradient callables must broadcast over leading axes: the stage solver
evaluates them on (k, dim) batches of quadrature-node states. The `kernel`
tag names a C implementation of the gradients in the compiled backend;
systems without a tag always run on the numpy backend.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .integrator import State


@dataclass(frozen=True)
class HamiltonianSystem:
    """A Hamiltonian system dp/dt = -dH/dq, dq/dt = dH/dp on R^dim x R^dim."""

    name: str
    dim: int
    energy: Callable
    grad_p: Callable
    grad_q: Callable
    initial: State
    separable: bool = False
    poly_degree: Optional[int] = None
    exact_solution: Optional[Callable] = None
    invariants: dict = field(default_factory=dict)
    kernel: Optional[tuple] = None


def _scalarize(val):
    val = np.asarray(val)
    return float(val) if val.ndim == 0 else val


def linear_system(a=1.0, b=-1.0, c=2.0, p0=0.5, q0=0.0):
    """Linear oscillator H = a p^2 / 2 + c q^2 / 2 - b p q with ac > b^2.

    The flow is z' = [[b, -c], [a, -b]] z, a rotation with frequency
    omega = sqrt(ac - b^2), which gives a closed-form solution from the
    default initial state (p0, q0).
    """
    omega_sq = a * c - b * b
    if omega_sq <= 0.0:
        raise ValueError("the linear benchmark requires ac - b^2 > 0")
    omega = math.sqrt(omega_sq)

    def energy(p, q):
        p = np.asarray(p, dtype=float)[..., 0]
        q = np.asarray(q, dtype=float)[..., 0]
        return _scalarize(0.5 * a * p * p + 0.5 * c * q * q - b * p * q)

    def grad_p(p, q):
        return a * np.asarray(p, dtype=float) - b * np.asarray(q, dtype=float)

    def grad_q(p, q):
        return c * np.asarray(q, dtype=float) - b * np.asarray(p, dtype=float)

    def exact(t):
        t = np.asarray(t, dtype=float)
        cos, sin = np.cos(omega * t), np.sin(omega * t)
        p = (cos + (b / omega) * sin) * p0 - (c / omega) * sin * q0
        q = (a / omega) * sin * p0 + (cos - (b / omega) * sin) * q0
        return p[..., None], q[..., None]

    return HamiltonianSystem(
        name="linear",
        dim=1,
        energy=energy,
        grad_p=grad_p,
        grad_q=grad_q,
        initial=State(np.array([p0]), np.array([q0]), 0.0),
        separable=(b == 0.0),
        poly_degree=2,
        exact_solution=exact,
        invariants={"H": energy},
        kernel=("linear", (a, b, c)),
    )


def henon_heiles():
    """Henon-Heiles system: harmonic oscillator pair with a cubic coupling.

    H = (p1^2 + p2^2) / 2 + (q1^2 + q2^2) / 2 + q1^2 q2 - q2^3 / 3.
    Chaotic for large energies; the default state has H = 1/6.
    """

    def energy(p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        kinetic = 0.5 * (p[..., 0] ** 2 + p[..., 1] ** 2)
        potential = (
            0.5 * (q[..., 0] ** 2 + q[..., 1] ** 2)
            + q[..., 0] ** 2 * q[..., 1]
            - q[..., 1] ** 3 / 3.0
        )
        return _scalarize(kinetic + potential)

    def grad_p(p, q):
        return np.asarray(p, dtype=float).copy()

    def grad_q(p, q):
        q = np.asarray(q, dtype=float)
        g = np.empty_like(q)
        g[..., 0] = q[..., 0] + 2.0 * q[..., 0] * q[..., 1]
        g[..., 1] = q[..., 1] + q[..., 0] ** 2 - q[..., 1] ** 2
        return g

    return HamiltonianSystem(
        name="henon-heiles",
        dim=2,
        energy=energy,
        grad_p=grad_p,
        grad_q=grad_q,
        initial=State(np.array([0.0, 0.0]), np.array([0.1, -0.5]), 0.0),
        separable=True,
        poly_degree=3,
        exact_solution=None,
        invariants={"H": energy},
        kernel=("henon_heiles", ()),
    )


def kepler():
    """Planar Kepler problem H = |p|^2 / 2 - 1 / |q|.

    The default state (p, q) = ((0, 1), (1, 0)) traces the unit circle with
    period 2 pi. Beyond H the flow conserves the angular momentum
    I = q1 p2 - q2 p1 and the Runge-Lenz vector
    L = (p2 I - q1 / |q|, -p1 I - q2 / |q|, 0).
    """

    def energy(p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        rad = np.sqrt(q[..., 0] ** 2 + q[..., 1] ** 2)
        return _scalarize(0.5 * (p[..., 0] ** 2 + p[..., 1] ** 2) - 1.0 / rad)

    def grad_p(p, q):
        return np.asarray(p, dtype=float).copy()

    def grad_q(p, q):
        q = np.asarray(q, dtype=float)
        rad = np.sqrt(q[..., 0] ** 2 + q[..., 1] ** 2)
        return q / rad[..., None] ** 3

    def angular_momentum(p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        return _scalarize(q[..., 0] * p[..., 1] - q[..., 1] * p[..., 0])

    def runge_lenz(p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        rad = np.sqrt(q[..., 0] ** 2 + q[..., 1] ** 2)
        ang = q[..., 0] * p[..., 1] - q[..., 1] * p[..., 0]
        return np.stack(
            [
                p[..., 1] * ang - q[..., 0] / rad,
                -p[..., 0] * ang - q[..., 1] / rad,
                np.zeros_like(rad),
            ],
            axis=-1,
        )

    def exact(t):
        t = np.asarray(t, dtype=float)
        p = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        q = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return p, q

    return HamiltonianSystem(
        name="kepler",
        dim=2,
        energy=energy,
        grad_p=grad_p,
        grad_q=grad_q,
        initial=State(np.array([0.0, 1.0]), np.array([1.0, 0.0]), 0.0),
        separable=True,
        poly_degree=None,
        exact_solution=exact,
        invariants={"H": energy, "I": angular_momentum, "L": runge_lenz},
        kernel=("kepler", ()),
    )
