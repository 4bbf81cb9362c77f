"""Polynomials on [0, 1] and the normalized shifted Legendre family.

The family used throughout is L_j = sqrt(2j+1) * Ptilde_j where Ptilde_j is
the shifted Legendre polynomial on [0, 1], so that

    int_0^1 L_j(x) L_k(x) dx = delta_jk,      int_0^1 L_j(x) dx = delta_j0.

Antiderivatives satisfy, with xi_0 = -1/2 and xi_j = 1/(2 sqrt(4j^2 - 1)),

    int_0^tau L_j = xi_{j+1} L_{j+1}(tau) - xi_j L_{j-1+delta_j0}(tau).

Coefficients are stored in the monomial basis. Monomial coefficients of L_j
grow to ~1e7 by j = 11, so a plain float64 representation loses ~6 digits at
the right end of [0, 1]. Construction therefore goes through exact integer /
rational arithmetic and each polynomial carries a double-double correction
array; evaluation uses compensated Horner. The visible contract (float64
monomial coefficients on [0, 1]) is unchanged.
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

# Hard cap on monomial degree. The tableaux in scope stay below ~8; the cap
# guards against runaway algebra, not a numerical limit.
DEGREE_CAP = 32

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _comp_horner(hi, lo, x):
    """Evaluate sum_k (hi_k + lo_k) x^k with a compensated Horner scheme.

    The running error term makes the result accurate to ~1 ulp of the value
    even when intermediate terms cancel by many orders of magnitude.
    """
    r = np.full_like(x, hi[-1])
    e = np.full_like(x, lo[-1])
    for k in range(len(hi) - 2, -1, -1):
        p, pe = _two_prod(r, x)
        r, se = _two_sum(p, hi[k])
        e = e * x + (pe + se + lo[k])
    return r + e


class UnitPolynomial:
    """Real polynomial on [0, 1] in the monomial basis.

    coeffs[k] multiplies x^k. Trailing zeros are trimmed; the zero polynomial
    keeps a single 0.0 coefficient. Instances are treated as immutable.
    """

    __slots__ = ("coeffs", "_lo")

    def __init__(self, coeffs, _lo=None):
        hi = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if hi.ndim != 1 or hi.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(hi)):
            raise ValueError("coefficients must be finite")
        lo = np.zeros_like(hi) if _lo is None else np.asarray(_lo, dtype=float).copy()
        n = hi.size
        while n > 1 and hi[n - 1] == 0.0 and lo[n - 1] == 0.0:
            n -= 1
        hi, lo = hi[:n], lo[:n]
        if n - 1 > DEGREE_CAP:
            raise ValueError(
                f"degree {n - 1} exceeds the cap of {DEGREE_CAP}; "
                "higher degrees are outside this library's scope"
            )
        self.coeffs = hi
        self._lo = lo

    @property
    def degree(self):
        return self.coeffs.size - 1

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        vals = _comp_horner(self.coeffs, self._lo, np.atleast_1d(arr))
        return float(vals[0]) if scalar else vals.reshape(arr.shape)

    def derivative(self):
        if self.degree == 0:
            return UnitPolynomial([0.0])
        k = np.arange(1.0, self.coeffs.size)
        hi, e = _two_prod(self.coeffs[1:], k)
        return UnitPolynomial(hi, e + self._lo[1:] * k)

    def antiderivative(self, constant=0.0):
        k = np.arange(1.0, self.coeffs.size + 1)
        q = self.coeffs / k
        p, e = _two_prod(q, k)
        qlo = ((self.coeffs - p) - e + self._lo) / k
        return UnitPolynomial(
            np.concatenate(([float(constant)], q)),
            np.concatenate(([0.0], qlo)),
        )

    def integral(self, lower=0.0, upper=1.0):
        anti = self.antiderivative()
        return anti(upper) - anti(lower)

    def legendre_coefficient(self, j):
        """Coefficient of L_j in the Legendre expansion: int_0^1 self * L_j."""
        return (self * legendre(j)).integral()

    def _binary(self, other, sign):
        n = max(self.coeffs.size, other.coeffs.size)
        hi = np.zeros(n)
        lo = np.zeros(n)
        a, al = np.zeros(n), np.zeros(n)
        a[: self.coeffs.size], al[: self.coeffs.size] = self.coeffs, self._lo
        b, bl = np.zeros(n), np.zeros(n)
        b[: other.coeffs.size], bl[: other.coeffs.size] = other.coeffs, other._lo
        hi, e = _two_sum(a, sign * b)
        lo = e + al + sign * bl
        return UnitPolynomial(hi, lo)

    def __add__(self, other):
        if isinstance(other, UnitPolynomial):
            return self._binary(other, 1.0)
        return self + UnitPolynomial([float(other)])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, UnitPolynomial):
            return self._binary(other, -1.0)
        return self - UnitPolynomial([float(other)])

    def __rsub__(self, other):
        return UnitPolynomial([float(other)]) - self

    def __neg__(self):
        return UnitPolynomial(-self.coeffs, -self._lo)

    def __mul__(self, other):
        if isinstance(other, UnitPolynomial):
            # Compensated convolution: np.convolve rounds every partial sum,
            # which costs ~6 digits once coefficients reach ~1e6. Track the
            # rounding of each product and each accumulation explicitly.
            n = self.coeffs.size + other.coeffs.size - 1
            hi = np.zeros(n)
            lo = np.zeros(n)
            for i in range(self.coeffs.size):
                sl = slice(i, i + other.coeffs.size)
                p, pe = _two_prod(self.coeffs[i], other.coeffs)
                s, se = _two_sum(hi[sl], p)
                hi[sl] = s
                lo[sl] += se + pe + self.coeffs[i] * other._lo + self._lo[i] * other.coeffs
            return UnitPolynomial(hi, lo)
        s = float(other)
        hi, e = _two_prod(self.coeffs, s)
        return UnitPolynomial(hi, e + self._lo * s)

    __rmul__ = __mul__

    def __repr__(self):
        return f"UnitPolynomial({self.coeffs.tolist()})"


def xi(j):
    """xi_0 = -1/2; xi_j = 1/(2 sqrt(4j^2 - 1)) for j >= 1."""
    if j < 0:
        raise ValueError("xi index must be non-negative")
    if j == 0:
        return -0.5
    return 1.0 / (2.0 * math.sqrt(4.0 * j * j - 1.0))


def _shifted_int_coeffs(j):
    # Ptilde_j(x) = sum_k (-1)^(j-k) C(j,k) C(j+k,k) x^k, all integers.
    return [(-1) ** (j - k) * math.comb(j, k) * math.comb(j + k, k) for k in range(j + 1)]


def _dd_sqrt_int(n):
    hi = math.sqrt(n)
    lo = float((Fraction(n) - Fraction(hi) ** 2) / (2 * Fraction(hi)))
    return hi, lo


def _dd_scale_fractions(fracs, n_under_sqrt):
    """Double-double coefficients of fr * sqrt(n) for exact rationals fr."""
    sh, sl = _dd_sqrt_int(n_under_sqrt)
    his = np.empty(len(fracs))
    los = np.empty(len(fracs))
    for i, fr in enumerate(fracs):
        fh = float(fr)
        fl = float(fr - Fraction(fh))
        p, e = _two_prod(fh, sh)
        his[i], los[i] = _two_sum(p, e + fh * sl + fl * sh)
    return his, los


@lru_cache(maxsize=None)
def legendre(j):
    """Normalized shifted Legendre polynomial L_j as a UnitPolynomial."""
    if j < 0:
        raise ValueError("Legendre index must be non-negative")
    if j > DEGREE_CAP:
        raise ValueError(f"L_{j} exceeds the degree cap of {DEGREE_CAP}")
    fracs = [Fraction(c) for c in _shifted_int_coeffs(j)]
    return UnitPolynomial(*_dd_scale_fractions(fracs, 2 * j + 1))


@lru_cache(maxsize=None)
def legendre_integral(j):
    """int_0^tau L_j(x) dx as a UnitPolynomial of degree j + 1."""
    if j < 0:
        raise ValueError("Legendre index must be non-negative")
    if j + 1 > DEGREE_CAP:
        raise ValueError(f"antiderivative of L_{j} exceeds the degree cap of {DEGREE_CAP}")
    ints = _shifted_int_coeffs(j)
    fracs = [Fraction(0)] + [Fraction(c, k + 1) for k, c in enumerate(ints)]
    return UnitPolynomial(*_dd_scale_fractions(fracs, 2 * j + 1))


def legendre_values(jmax, x):
    """Values L_0..L_jmax at the points x, shape (len(x), jmax + 1).

    Uses the three-term recurrence, which stays accurate to a few ulp for any
    index (monomial evaluation does not). This is the evaluation path for
    quadrature node polynomials and the integrator's collocation matrices.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, jmax + 1))
    out[:, 0] = 1.0
    if jmax >= 1:
        t = 2.0 * x - 1.0
        out[:, 1] = t
        for j in range(1, jmax):
            out[:, j + 1] = ((2 * j + 1) * t * out[:, j] - j * out[:, j - 1]) / (j + 1)
    out *= np.sqrt(2.0 * np.arange(jmax + 1) + 1.0)
    return out


def integral_basis_matrix(n):
    """Matrix M of shape (n+1, n) expressing {int_0^tau L_i}_{i<n} over {L_m}_{m<=n}.

    Column i holds the Legendre coefficients of int_0^tau L_i, i.e.
    M[i+1, i] = xi_{i+1} and M[i-1+delta_i0, i] -= xi_i.
    """
    m = np.zeros((n + 1, n))
    for i in range(n):
        m[i + 1, i] += xi(i + 1)
        m[i - 1 if i > 0 else 0, i] -= xi(i)
    return m
