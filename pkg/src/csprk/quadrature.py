"""Quadrature rules on [0, 1] for discretizing continuous-stage integrals.

Gauss-Legendre rules realize the exact-energy guarantee: a k-point Gauss rule
integrates degree 2k-1 exactly, and k >= ceil(max(s, r) * nu / 2) suffices
for a degree-nu polynomial Hamiltonian with stage polynomial degrees s and r.
Interpolatory rules on arbitrary distinct nodes are provided for comparison;
their weights come from an expanded Lagrange basis, which is the textbook
construction and grows ill-conditioned for large or clustered node sets.
"""

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Quadrature:
    """Nodes c_i in [0, 1] (strictly increasing), weights b_i summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int = field(default=-1)

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float)).copy()
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise ValueError("nodes and weights must be matching non-empty 1-D arrays")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise ValueError("nodes and weights must be finite")
        if np.any(nodes < 0.0) or np.any(nodes > 1.0):
            raise ValueError("nodes must lie in [0, 1]")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if abs(weights.sum() - 1.0) > 1e-14:
            raise ValueError("weights must sum to 1 within 1e-14")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size


def _legendre_pair(k, x):
    """Standard Legendre P_k and P_{k-1} on [-1, 1] by the recurrence."""
    pkm1 = np.ones_like(x)
    pk = x.copy()
    for j in range(1, k):
        pkm1, pk = pk, ((2 * j + 1) * x * pk - j * pkm1) / (j + 1)
    return pk, pkm1


def gauss_legendre(k):
    """k-point Gauss-Legendre rule on [0, 1], exact for degree 2k - 1.

    Roots of P_k on [-1, 1] are found by Newton iteration from the Chebyshev
    initial guess cos(pi (i - 1/4) / (k + 1/2)), with P_k evaluated by the
    three-term recurrence (stable for every k in range, unlike monomial
    coefficients). Nodes and weights are symmetrized about 1/2 afterward.
    """
    if not 1 <= k <= 64:
        raise ValueError("node count must satisfy 1 <= k <= 64")
    if k == 1:
        return Quadrature(np.array([0.5]), np.array([1.0]), exactness_degree=1)
    i = np.arange(1, k + 1)
    x = np.cos(np.pi * (i - 0.25) / (k + 0.5))
    dp = np.ones_like(x)
    for _ in range(100):
        pk, pkm1 = _legendre_pair(k, x)
        dp = k * (x * pk - pkm1) / (x * x - 1.0)
        dx = pk / dp
        x -= dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    pk, pkm1 = _legendre_pair(k, x)
    dp = k * (x * pk - pkm1) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    c = (x[order] + 1.0) / 2.0
    b = w[order] / 2.0
    # Enforce the c -> 1 - c symmetry that exact arithmetic would give.
    c = ((c - c[::-1]) + 1.0) / 2.0
    b = (b + b[::-1]) / 2.0
    return Quadrature(c, b, exactness_degree=2 * k - 1)


def _measured_exactness(nodes, weights, kmax, tol=1e-12):
    """Largest degree D <= kmax with |sum b c^m - 1/(m+1)| <= tol for all m <= D."""
    degree = -1
    power = np.ones_like(nodes)
    for m in range(kmax + 1):
        if abs(weights @ power - 1.0 / (m + 1)) > tol:
            break
        degree = m
        power = power * nodes
    return degree

def interpolatory(nodes):
    """Interpolatory rule on arbitrary distinct nodes in [0, 1].

    Weight i integrates the i-th Lagrange basis polynomial. The integral is
    taken with an internal k-point Gauss rule (exact: deg l_i = k - 1) and
    l_i is evaluated as a product of linear factors, which stays accurate
    where the expanded monomial form loses digits beyond k ~ 6. The reported
    exactness degree is measured on monomials (at least k - 1 by
    construction, higher for special node sets such as Gauss points).
    """
    c = np.sort(np.atleast_1d(np.asarray(nodes, dtype=float)))
    if c.ndim != 1 or c.size == 0:
        raise ValueError("nodes must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("nodes must be finite")
    if np.any(c < 0.0) or np.any(c > 1.0):
        raise ValueError("nodes must lie in [0, 1]")
    if np.any(np.diff(c) == 0.0):
        raise ValueError("duplicate nodes are not allowed")
    k = c.size
    base = gauss_legendre(k)
    b = np.empty(k)
    for i in range(k):
        others = np.delete(c, i)
        vals = np.prod(base.nodes[:, None] - others[None, :], axis=1)
        b[i] = np.dot(base.weights, vals) / np.prod(c[i] - others)
    return Quadrature(c, b, exactness_degree=_measured_exactness(c, b, 2 * k))


def min_nodes_for_exact_energy(nu, s, r):
    """Minimal Gauss node count for exact energy preservation.

    For a polynomial Hamiltonian of degree nu and stage polynomial degrees
    s (momenta) and r (positions), k >= max(s, r) * nu / 2 Gauss nodes make
    the discrete method preserve H exactly; the bound is ceil'd and at least 1.
    """
    if nu < 1 or s < 1 or r < 1:
        raise ValueError("nu, s and r must be positive integers")
    return max(1, (max(s, r) * nu + 1) // 2)
