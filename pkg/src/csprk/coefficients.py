"""Construction and analysis of continuous-stage PRK coefficient functions.

A method is defined by functions A(tau, sigma), Ahat(tau, sigma) on the unit
square and weight functions B, Bhat on [0, 1]. Everything here represents
them over the tensor basis

    A(tau, sigma)    = sum_ij a[i, j]    (int_0^tau L_i) L_j(sigma),
    Ahat(tau, sigma) = sum_ij ahat[i, j] (int_0^tau L_i) L_j(sigma),

with L_j the normalized shifted Legendre family. In that basis the energy
condition is structural: A(0, .) = Ahat(0, .) = 0 always holds,
A(1, sigma) = B(sigma) pins B to row 0, and the symmetry condition
d/dtau A(tau, sigma) = d/dsigma Ahat(sigma, tau) reads a[i, j] = ahat[j, i].
Building a method from a free coefficient matrix alpha by a = alpha,
ahat = alpha^T therefore satisfies the condition by construction, and the
Hamiltonian is preserved exactly once the integrals are discretized by a
sufficiently accurate quadrature.

Order conditions are checked in exact Legendre algebra using
int_0^1 L_j (int_0^tau L_k) dtau = xi_{k+1} [j = k+1] - xi_k [j = k-1+delta_k0],
so residuals of exact identities sit at rounding level rather than at the
level of monomial cancellation noise.
"""

import json
from dataclasses import dataclass

import numpy as np

from .polynomials import (
    UnitPolynomial,
    integral_basis_matrix,
    legendre,
    legendre_integral,
    legendre_values,
    xi,
)

_TOL = 1e-12  # shared tolerance for exact-identity residuals


class PreconditionError(ValueError):
    """A verification was requested whose precondition does not hold."""


@dataclass(frozen=True)
class AlphaTableau:
    """Free coefficient matrix alpha of shape (s, r) defining a method."""

    s: int
    r: int
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.atleast_2d(np.asarray(self.alpha, dtype=float)).copy()
        if not (1 <= self.s <= 31 and 1 <= self.r <= 31):
            raise ValueError("stage degrees must satisfy 1 <= s, r <= 31")
        if alpha.shape != (self.s, self.r):
            raise ValueError(f"alpha must have shape ({self.s}, {self.r}), got {alpha.shape}")
        if not np.all(np.isfinite(alpha)):
            raise ValueError("alpha entries must be finite")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    def to_dict(self):
        return {"s": self.s, "r": self.r, "alpha": self.alpha.tolist()}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValueError("tableau JSON must be an object")
        missing = {"s", "r", "alpha"} - set(data)
        if missing:
            raise ValueError(f"tableau JSON is missing keys: {sorted(missing)}")
        s, r = data["s"], data["r"]
        if not (isinstance(s, int) and isinstance(r, int)):
            raise ValueError("tableau fields s and r must be integers")
        return cls(s, r, data["alpha"])


def load_tableau_json(path):
    """Load an AlphaTableau from a JSON file {"s": ..., "r": ..., "alpha": [[...]]}."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid tableau JSON in {path}: {exc}") from exc
    return AlphaTableau.from_dict(data)


def _ivalues(n, x):
    """Values of int_0^tau L_i for i < n at the points x, shape (len(x), n)."""
    return legendre_values(n, x) @ integral_basis_matrix(n)


class CsprkTableau:
    """Coefficient functions of one method over the Legendre tensor basis.

    a has shape (s, rA): s is the tau-degree of A (and of the momentum stage
    polynomial), rA the number of sigma modes. ahat plays the same role for
    Ahat with shape (r, sH). B and Bhat are stored by their Legendre
    coefficients; the weight functions of a method built from alpha are
    B = sum_j alpha[0, j] L_j and Bhat = sum_i alpha[i, 0] L_i.
    """

    def __init__(self, a, ahat, b_legendre=None, bhat_legendre=None):
        self.a = np.atleast_2d(np.asarray(a, dtype=float))
        self.ahat = np.atleast_2d(np.asarray(ahat, dtype=float))
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.ahat))):
            raise ValueError("coefficient matrices must be finite")
        self.b_legendre = (
            self.a[0].copy() if b_legendre is None else np.asarray(b_legendre, dtype=float)
        )
        self.bhat_legendre = (
            self.ahat[0].copy() if bhat_legendre is None else np.asarray(bhat_legendre, dtype=float)
        )

    @property
    def s(self):
        return self.a.shape[0]

    @property
    def r(self):
        return self.ahat.shape[0]

    @property
    def B(self):
        return _legendre_combination(self.b_legendre, legendre)

    @property
    def Bhat(self):
        return _legendre_combination(self.bhat_legendre, legendre)

    @property
    def C(self):
        # C(tau) = int_0^1 A dsigma picks the L_0 sigma-mode: column 0 of a.
        return _legendre_combination(self.a[:, 0], legendre_integral)

    @property
    def Chat(self):
        return _legendre_combination(self.ahat[:, 0], legendre_integral)

    def a_values(self, tau, sigma):
        """Grid of A(tau_i, sigma_j), shape (len(tau), len(sigma))."""
        u = _ivalues(self.a.shape[0], tau)
        v = legendre_values(self.a.shape[1] - 1, sigma)
        return u @ self.a @ v.T

    def ahat_values(self, tau, sigma):
        u = _ivalues(self.ahat.shape[0], tau)
        v = legendre_values(self.ahat.shape[1] - 1, sigma)
        return u @ self.ahat @ v.T

    def a_dtau_values(self, tau, sigma):
        """Grid of d/dtau A(tau_i, sigma_j)."""
        u = legendre_values(self.a.shape[0] - 1, tau)
        v = legendre_values(self.a.shape[1] - 1, sigma)
        return u @ self.a @ v.T

    def ahat_dtau_values(self, tau, sigma):
        u = legendre_values(self.ahat.shape[0] - 1, tau)
        v = legendre_values(self.ahat.shape[1] - 1, sigma)
        return u @ self.ahat @ v.T

    def b_values(self, tau):
        return legendre_values(self.b_legendre.size - 1, tau) @ self.b_legendre

    def bhat_values(self, tau):
        return legendre_values(self.bhat_legendre.size - 1, tau) @ self.bhat_legendre

    def __repr__(self):
        return f"CsprkTableau(s={self.s}, r={self.r})"


def _legendre_combination(coeffs, basis):
    poly = UnitPolynomial([0.0])
    for j, c in enumerate(coeffs):
        if c != 0.0:
            poly = poly + basis(j) * float(c)
    return poly


def build_tableau(alpha):
    """Build the energy-preserving method defined by a free alpha matrix.

    a = alpha and ahat = alpha^T satisfy the symmetry condition identically;
    B and Bhat are row 0 and column 0 of alpha. Any real matrix therefore
    yields an energy-preserving method (order is a separate question).
    """
    if isinstance(alpha, AlphaTableau):
        alpha = alpha.alpha
    alpha = np.atleast_2d(np.asarray(alpha, dtype=float))
    if not np.all(np.isfinite(alpha)):
        raise ValueError("alpha entries must be finite")
    return CsprkTableau(
        alpha.copy(),
        alpha.T.copy(),
        b_legendre=alpha[0].copy(),
        bhat_legendre=alpha[:, 0].copy(),
    )


@dataclass(frozen=True)
class ConditionReport:
    """Grid residuals of the three energy-preservation conditions."""

    residual_zero: float
    residual_weights: float
    residual_symmetry: float
    tolerance: float

    @property
    def passed(self):
        return (
            self.residual_zero <= self.tolerance
            and self.residual_weights <= self.tolerance
            and self.residual_symmetry <= self.tolerance
        )


def check_energy_condition(tableau, grid_size=21, tolerance=_TOL):
    """Evaluate the three energy-preservation conditions on a sample grid.

    (i) A(0, sigma) = Ahat(0, sigma) = 0, (ii) A(1, sigma) = B(sigma) and
    Ahat(1, sigma) = Bhat(sigma), (iii) d/dtau A(tau, sigma) =
    d/dsigma Ahat(sigma, tau). Residuals are max-norm over a grid_size^2 grid.
    """
    g = np.linspace(0.0, 1.0, grid_size)
    zero = max(
        np.max(np.abs(tableau.a_values(np.array([0.0]), g))),
        np.max(np.abs(tableau.ahat_values(np.array([0.0]), g))),
    )
    weights = max(
        np.max(np.abs(tableau.a_values(np.array([1.0]), g)[0] - tableau.b_values(g))),
        np.max(np.abs(tableau.ahat_values(np.array([1.0]), g)[0] - tableau.bhat_values(g))),
    )
    symmetry = np.max(
        np.abs(tableau.a_dtau_values(g, g) - tableau.ahat_dtau_values(g, g).T)
    )
    return ConditionReport(float(zero), float(weights), float(symmetry), tolerance)


def _cross_integral(j, k):
    """int_0^1 L_j(x) (int_0^x L_k) dx, exact via orthonormality."""
    val = 0.0
    if j == k + 1:
        val += xi(k + 1)
    if j == (k - 1 if k > 0 else 0):
        val -= xi(k)
    return val


def _weight_moment(w_leg, col):
    """int_0^1 W(tau) V(tau) dtau for W = sum w_leg[j] L_j, V = sum col[k] int L_k."""
    total = 0.0
    for k, ck in enumerate(col):
        if ck == 0.0:
            continue
        for j, wj in enumerate(w_leg):
            if wj != 0.0:
                total += wj * ck * _cross_integral(j, k)
    return total


def _column(matrix, j):
    return matrix[:, j] if j < matrix.shape[1] else np.zeros(matrix.shape[0])


def _unit(n, j):
    e = np.zeros(n)
    if j < n:
        e[j] = 1.0
    return e


def _c_is_tau(tableau, tolerance):
    ca = _column(tableau.a, 0)
    ch = _column(tableau.ahat, 0)
    return (
        np.max(np.abs(ca - _unit(ca.size, 0))) <= tolerance
        and np.max(np.abs(ch - _unit(ch.size, 0))) <= tolerance
    )


def _simplifying_c_holds(tableau, eta, tolerance):
    # Column j of the coefficient matrix must be the j-th unit vector, which
    # is exactly int_0^1 A(tau, sigma) L_j(sigma) dsigma = int_0^tau L_j.
    for j in range(eta):
        ca = _column(tableau.a, j)
        ch = _column(tableau.ahat, j)
        if np.max(np.abs(ca - _unit(ca.size, j))) > tolerance:
            return False
        if np.max(np.abs(ch - _unit(ch.size, j))) > tolerance:
            return False
        if j >= tableau.a.shape[0] or j >= tableau.ahat.shape[0]:
            return False
    return True


def _simplifying_d_single(matrix, k, tolerance):
    # int_0^1 L_k(tau) A(tau, sigma) dtau must equal int_sigma^1 L_k, i.e.
    # delta_k0 - int_0^sigma L_k. Both sides are compared by their Legendre
    # coefficients in sigma.
    ncols = matrix.shape[1]
    size = max(ncols, k + 2)
    lhs = np.zeros(size)
    for j in range(ncols):
        lhs[j] = sum(matrix[i, j] * _cross_integral(k, i) for i in range(matrix.shape[0]))
    rhs = np.zeros(size)
    if k == 0:
        rhs[0] += 1.0
    rhs[k + 1] -= xi(k + 1)
    rhs[k - 1 if k > 0 else 0] += xi(k)
    return np.max(np.abs(lhs - rhs)) <= tolerance


def _simplifying_d_holds(tableau, zeta, tolerance):
    return all(
        _simplifying_d_single(m, k, tolerance)
        for k in range(zeta)
        for m in (tableau.a, tableau.ahat)
    )


def verify_simplifying_C(tableau, eta, tolerance=_TOL):
    """Check the reduced stage-consistency conditions C(eta) for both A and Ahat.

    Requires C(tau) = Chat(tau) = tau; raises PreconditionError otherwise.
    """
    if eta < 1:
        raise ValueError("eta must be a positive integer")
    if not _c_is_tau(tableau, tolerance):
        raise PreconditionError("C(eta) is only defined for methods with C = Chat = tau")
    return _simplifying_c_holds(tableau, eta, tolerance)


def verify_simplifying_D(tableau, zeta, tolerance=_TOL):
    """Check the reduced weight-consistency conditions D(zeta) for both A and Ahat.

    Requires C(tau) = Chat(tau) = tau; raises PreconditionError otherwise.
    zeta = 0 holds vacuously.
    """
    if zeta < 0:
        raise ValueError("zeta must be a non-negative integer")
    if not _c_is_tau(tableau, tolerance):
        raise PreconditionError("D(zeta) is only defined for methods with C = Chat = tau")
    return _simplifying_d_holds(tableau, zeta, tolerance)


def max_simplifying_eta(tableau, tolerance=_TOL):
    """Largest eta with C(eta) satisfied. Raises PreconditionError if C != tau."""
    if not _c_is_tau(tableau, tolerance):
        raise PreconditionError("C(eta) is only defined for methods with C = Chat = tau")
    eta = 0
    while eta < min(tableau.s, tableau.r) and _simplifying_c_holds(tableau, eta + 1, tolerance):
        eta += 1
    return eta


def max_simplifying_zeta(tableau, tolerance=_TOL):
    """Largest zeta with D(zeta) satisfied (0 is vacuous). Raises if C != tau."""
    if not _c_is_tau(tableau, tolerance):
        raise PreconditionError("D(zeta) is only defined for methods with C = Chat = tau")
    zeta = 0
    while zeta <= tableau.s + tableau.r and _simplifying_d_holds(tableau, zeta + 1, tolerance):
        zeta += 1
    return zeta


def estimate_order(tableau, tolerance=_TOL):
    """Certified classical order of the method, by direct verification.

    Orders 1 and 2 are checked directly: consistency requires
    int B = int Bhat = 1, and order 2 additionally requires the four moment
    conditions int B C = int B Chat = int Bhat C = int Bhat Chat = 1/2.
    When B = Bhat and C = Chat = tau, the simplifying assumptions give the
    sharper bound min(2 eta + 2, eta + zeta + 1) with eta, zeta the largest
    values passing C(eta) and D(zeta). The return value never overstates:
    it is the best order the implemented sufficient conditions certify.
    """
    if abs(tableau.b_legendre[0] - 1.0) > tolerance:
        return 0
    if abs(tableau.bhat_legendre[0] - 1.0) > tolerance:
        return 0
    order = 1
    moments = (
        _weight_moment(tableau.b_legendre, _column(tableau.a, 0)),
        _weight_moment(tableau.b_legendre, _column(tableau.ahat, 0)),
        _weight_moment(tableau.bhat_legendre, _column(tableau.a, 0)),
        _weight_moment(tableau.bhat_legendre, _column(tableau.ahat, 0)),
    )
    if all(abs(m - 0.5) <= tolerance for m in moments):
        order = 2
    nb = max(tableau.b_legendre.size, tableau.bhat_legendre.size)
    b_pad = np.zeros(nb)
    b_pad[: tableau.b_legendre.size] = tableau.b_legendre
    bh_pad = np.zeros(nb)
    bh_pad[: tableau.bhat_legendre.size] = tableau.bhat_legendre
    if np.max(np.abs(b_pad - bh_pad)) <= tolerance and _c_is_tau(tableau, tolerance):
        eta = max_simplifying_eta(tableau, tolerance)
        zeta = max_simplifying_zeta(tableau, tolerance)
        if eta >= 1:
            order = max(order, min(2 * eta + 2, eta + zeta + 1))
    return order


_PRESET_PARAM_COUNTS = {
    "avf": 0,
    "ex31": 1,
    "ex32": 2,
    "ex33": 2,
    "symmetric_eta_s": 1,
}


def preset(name, params=()):
    """Named method families.

    avf: the average vector field method (order 2), alpha = [[1]].
    ex31 (theta): s=2, r=1 one-parameter family; order 2 iff theta = 0.
    ex32 (theta1, theta2): s=3, r=2 family around the order-2 core.
    ex33 (theta1, theta2): s=4, r=3 family with eta = 2, order 4.
    symmetric_eta_s (s): alpha = identity of size s, order 2s.
    """
    params = [float(v) for v in params]
    if name not in _PRESET_PARAM_COUNTS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(_PRESET_PARAM_COUNTS)}")
    expected = _PRESET_PARAM_COUNTS[name]
    if len(params) != expected:
        raise ValueError(f"preset {name!r} takes {expected} parameter(s), got {len(params)}")
    if name == "avf":
        return AlphaTableau(1, 1, [[1.0]])
    if name == "ex31":
        theta = params[0]
        return AlphaTableau(2, 1, [[1.0], [theta / np.sqrt(3.0)]])
    if name == "ex32":
        t1, t2 = params
        return AlphaTableau(3, 2, [[1.0, 0.0], [0.0, t1 / 3.0], [0.0, t2 / np.sqrt(15.0)]])
    if name == "ex33":
        t1, t2 = params
        return AlphaTableau(
            4,
            3,
            [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, t1 / 5.0],
                [0.0, 0.0, t2 / np.sqrt(35.0)],
            ],
        )
    size = params[0]
    if size != int(size) or size < 1:
        raise ValueError("symmetric_eta_s takes a positive integer stage count")
    return AlphaTableau(int(size), int(size), np.eye(int(size)))
