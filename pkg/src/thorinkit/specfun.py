"""Special functions: incomplete gamma pair, incomplete beta, Gauss 2F1, E_p.

All functions are scalar, pure and written against ``math`` only (plus the
quadrature fallback from :mod:`thorinkit.numerics` for hypergeometric
arguments outside the series/transformation comfort zone).  Conventions:

* ``lower_inc_gamma(lam, x)``  = integral of exp(-u) u^(lam-1) over (0, x)
* ``upper_inc_gamma(s, x)``    = integral of exp(-u) u^(s-1)  over (x, inf),
  defined for every real ``s`` (non-positive values by downward recurrence
  ``G(s, x) = (G(s+1, x) - x^s exp(-x)) / s``)
* ``inc_beta(a, b, x)``        = integral of t^(a-1) (1-t)^(b-1) over (0, x),
  any real ``b``, strictly ``x < 1``
* ``gauss_2f1(a, b, c, z)``    for real parameters and ``z < 1``
* ``exp_integral_E(p, x)``     = x^(p-1) * upper_inc_gamma(1-p, x), p > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import QuadratureNonConvergence, QuadratureSpec, integrate_finite

__all__ = [
    "HypergeometricArgs",
    "Hyp2F1Error",
    "gamma_fn",
    "lower_inc_gamma",
    "upper_inc_gamma",
    "inc_beta",
    "gauss_2f1",
    "exp_integral_E",
    "pochhammer",
]

_EPS = 1.1e-16
_MAX_TERMS = 100_000
_EULER_GAMMA = 0.5772156649015328606


class Hyp2F1Error(RuntimeError):
    """2F1 series failed to converge within the term cap."""


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k."""
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


# ---------------------------------------------------------------------------
# Complete gamma (Lanczos, g = 7, 9 coefficients; |rel err| <~ 1e-13 on the
# positive real axis which comfortably meets the 1e-12 budget on (0, 30]).

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(z: float) -> float:
    """Complete gamma function for real non-pole arguments."""
    if z <= 0.0 and z == math.floor(z):
        raise ValueError(f"gamma pole at z={z!r}")
    if z < 0.5:
        # Reflection keeps the rational approximation on z >= 0.5.
        return math.pi / (math.sin(math.pi * z) * gamma_fn(1.0 - z))
    z -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


# ---------------------------------------------------------------------------
# Incomplete gamma pair


def _lower_series(lam: float, x: float) -> float:
    """gamma(lam, x) by the ascending series; reliable for x < lam + 1."""
    term = 1.0 / lam
    total = term
    n = 0
    while n < _MAX_TERMS:
        n += 1
        term *= x / (lam + n)
        total += term
        if abs(term) <= _EPS * abs(total):
            break
    return math.exp(lam * math.log(x) - x) * total


def _upper_cf(s: float, x: float) -> float:
    """Gamma(s, x) by Legendre's continued fraction; use for x >= s + 1."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            break
    return math.exp(-x + s * math.log(x)) * h


def _upper_small_s(s: float, x: float) -> float:
    """Gamma(s, x) for |s| <= 0.25 and x <= 1.3, avoiding the 1/s blow-up.

    Uses Gamma(s) - x^s/s = [ (Gamma(1+s) - 1) - (x^s - 1) ] / s with both
    brackets evaluated through expm1, then subtracts the alternating tail of
    the lower series.
    """
    lx = math.log(x)
    if s != 0.0:
        head = (math.expm1(math.lgamma(1.0 + s)) - math.expm1(s * lx)) / s
    else:
        head = -_EULER_GAMMA - lx
    term = 1.0
    tail = 0.0
    n = 0
    while n < _MAX_TERMS:
        n += 1
        term *= -x / n
        delta = term / (s + n)
        tail += delta
        if abs(delta) <= _EPS * max(abs(tail), 1e-30):
            break
    return head - math.exp(s * lx) * tail


def lower_inc_gamma(lam: float, x: float) -> float:
    """Lower incomplete gamma, monotone in x with limit Gamma(lam)."""
    if not lam > 0.0:
        raise ValueError(f"need lam > 0, got {lam!r}")
    if x < 0.0:
        raise ValueError(f"need x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if x < lam + 1.0:
        return _lower_series(lam, x)
    return gamma_fn(lam) - _upper_cf(lam, x)


def _upper_pos(s: float, x: float) -> float:
    if x >= s + 1.0:
        return _upper_cf(s, x)
    if s <= 0.25 and x <= 1.3:
        return _upper_small_s(s, x)
    return gamma_fn(s) - _lower_series(s, x)


def _e1(x: float) -> float:
    """E_1(x) for x > 0: series below 1, continued fraction above."""
    if x > 1.0:
        return _en_cf(1, x)
    total = -_EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, _MAX_TERMS):
        term *= -x / k
        total -= term / k
        if abs(term / k) <= _EPS * abs(total):
            break
    return total


def _en_cf(n: int, x: float) -> float:
    tiny = 1e-300
    b = x + n
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        a = -i * (n - 1 + i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            break
    return h * math.exp(-x)


def _en_series(n: int, x: float) -> float:
    nm1 = n - 1
    ans = 1.0 / nm1 if nm1 != 0 else -math.log(x) - _EULER_GAMMA
    fact = 1.0
    for i in range(1, _MAX_TERMS):
        fact *= -x / i
        if i != nm1:
            delta = -fact / (i - nm1)
        else:
            psi = -_EULER_GAMMA + sum(1.0 / ii for ii in range(1, nm1 + 1))
            delta = fact * (-math.log(x) + psi)
        ans += delta
        if abs(delta) < abs(ans) * _EPS:
            break
    return ans


def _en(n: int, x: float) -> float:
    """Generalized exponential integral for integer order n >= 1."""
    if n == 1:
        return _e1(x)
    if x > 1.0:
        return _en_cf(n, x)
    return _en_series(n, x)


def upper_inc_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma for any real s and x > 0."""
    if not x > 0.0:
        raise ValueError(f"need x > 0, got {x!r}")
    if s > 0.0:
        return _upper_pos(s, x)
    if s == math.floor(s):
        # Gamma(-n, x) = x^(-n) E_{n+1}(x); the recurrence denominator
        # vanishes at integer steps so this is the stable integer route.
        n = int(-s)
        return x ** s * _en(n + 1, x)
    m = int(math.ceil(-s))
    s0 = s + m
    g = _upper_pos(s0, x)
    lx = math.log(x)
    cur = s0
    for _ in range(m):
        cur -= 1.0
        g = (g - math.exp(cur * lx - x)) / cur
    return g


# ---------------------------------------------------------------------------
# Gauss hypergeometric


@dataclass(frozen=True)
class HypergeometricArgs:
    """Parameter bundle for 2F1(a, b; c; z) with z < 1 and c off the poles."""

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        if self.c <= 0.0 and self.c == math.floor(self.c):
            raise ValueError(f"c must avoid non-positive integers, got {self.c!r}")
        if not self.z < 1.0:
            raise ValueError(f"need z < 1, got {self.z!r}")


_SERIES_SWITCH = 0.5      # direct series below, Euler transform above
_QUAD_SWITCH = 0.98       # beyond this use the 1-z connection formula, or
                          # the Euler integral when c-a-b is near an integer
                          # (same fallback below z = -49)


def _rgamma(z: float) -> float:
    """1/Gamma(z), zero at the poles."""
    if z <= 0.0 and z == math.floor(z):
        return 0.0
    return 1.0 / gamma_fn(z)


def _series_2f1(a: float, b: float, c: float, z: float) -> float:
    term = 1.0
    total = 1.0
    small = 0
    for k in range(_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        if term == 0.0:
            return total
        total += term
        if abs(term) <= _EPS * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise Hyp2F1Error(
        f"2F1 series did not converge for a={a!r} b={b!r} c={c!r} z={z!r}")


def _quad_value(f, lo: float, hi: float, spec: QuadratureSpec) -> float:
    # Boundary-layer integrands (z -> 1) may stall just shy of the target;
    # accept the partial value once it is good to ~1e-9 relative.
    try:
        return integrate_finite(f, lo, hi, spec).value
    except QuadratureNonConvergence as err:
        if err.error <= 1e-9 * max(abs(err.value), 1e-300):
            return err.value
        raise


def _euler_integral(a: float, b: float, c: float, z: float) -> float:
    """2F1 via Euler's integral; needs c > b > 0 (or c > a > 0 after a swap).

    Split at 1/2 so each half carries its power-law endpoint on the left.
    """
    if not (c > b > 0.0):
        a, b = b, a
    if not (c > b > 0.0):
        raise Hyp2F1Error(
            f"Euler-integral fallback needs c > b > 0 or c > a > 0, "
            f"got a={a!r} b={b!r} c={c!r}")
    pref = gamma_fn(c) / (gamma_fn(b) * gamma_fn(c - b))
    spec_lo = QuadratureSpec(rel_tol=1e-11, max_subdivisions=16384,
                             endpoint_singularity_exponent=b - 1.0)
    spec_hi = QuadratureSpec(rel_tol=1e-11, max_subdivisions=16384,
                             endpoint_singularity_exponent=c - b - 1.0)
    lo = _quad_value(
        lambda t: t ** (b - 1.0) * (1.0 - t) ** (c - b - 1.0)
        * (1.0 - z * t) ** (-a),
        0.0, 0.5, spec_lo)
    hi = _quad_value(
        lambda u: (1.0 - u) ** (b - 1.0) * u ** (c - b - 1.0)
        * (1.0 - z * (1.0 - u)) ** (-a),
        0.0, 0.5, spec_hi)
    return pref * (lo + hi)


def _near_one(a: float, b: float, c: float, z: float) -> float:
    """Connection formula in powers of 1-z; needs c-a-b off the integers."""
    s = c - a - b
    eps = 1.0 - z
    head = (gamma_fn(c) * gamma_fn(s) * _rgamma(c - a) * _rgamma(c - b)
            * _series_2f1(a, b, 1.0 - s, eps))
    tail = (gamma_fn(c) * gamma_fn(-s) * _rgamma(a) * _rgamma(b)
            * _series_2f1(c - a, c - b, 1.0 + s, eps))
    return head + eps ** s * tail


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) for real parameters, z < 1.

    Dispatch: direct series on [0, 1/2); Euler transformation then series on
    [1/2, 0.98]; Pfaff transformation for z < 0, landing the new argument
    z/(z-1) in (0, 1) where the same rules apply; above 0.98 the 1-z
    connection formula when c-a-b is safely non-integer, else the Euler
    integral representation (adaptive quadrature).
    """
    HypergeometricArgs(a, b, c, z)
    if z == 0.0:
        return 1.0
    if z < 0.0:
        w = z / (z - 1.0)
        inner = gauss_2f1(c - a, b, c, w)
        return (1.0 - z) ** (-b) * inner
    if z < _SERIES_SWITCH:
        return _series_2f1(a, b, c, z)
    if z <= _QUAD_SWITCH:
        return (1.0 - z) ** (c - a - b) * _series_2f1(c - a, c - b, c, z)
    s = c - a - b
    if abs(s - round(s)) > 0.05:
        return _near_one(a, b, c, z)
    return _euler_integral(a, b, c, z)


def hyp2f1(args: HypergeometricArgs) -> float:
    return gauss_2f1(args.a, args.b, args.c, args.z)


# ---------------------------------------------------------------------------
# Incomplete beta and E_p


def inc_beta(a: float, b: float, x: float) -> float:
    """Incomplete beta B(a, b; x) for a > 0, any real b, 0 <= x < 1.

    Computed through B(a, b; x) = x^a / a * 2F1(a, 1-b; a+1; x), except for
    positive integer b where the binomial expansion of (1-t)^(b-1) gives the
    exact finite sum.  For b <= 0 the value grows without bound as x -> 1,
    which is the caller's regime to avoid (clamp x <= 1 - 1e-12).
    """
    if not a > 0.0:
        raise ValueError(f"need a > 0, got {a!r}")
    if not (0.0 <= x < 1.0):
        raise ValueError(f"need 0 <= x < 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if b >= 1.0 and b == math.floor(b):
        n = int(b)
        return math.fsum(math.comb(n - 1, j) * (-1.0) ** j * x ** (a + j)
                         / (a + j) for j in range(n))
    return x ** a / a * gauss_2f1(a, 1.0 - b, a + 1.0, x)


def exp_integral_E(p: float, x: float) -> float:
    """Generalized exponential integral E_p(x) for p > 0, x > 0."""
    if not p > 0.0:
        raise ValueError(f"need p > 0, got {p!r}")
    if not x > 0.0:
        raise ValueError(f"need x > 0, got {x!r}")
    if p == math.floor(p):
        return _en(int(p), x)
    return x ** (p - 1.0) * upper_inc_gamma(1.0 - p, x)
