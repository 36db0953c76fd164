"""Positive measures on [0, inf): atoms plus named density families.

A :class:`Measure` is a finite list of point masses together with density
pieces drawn from a closed set of families:

* ``PowerExp(r, rate, shift)`` -- weight * (s-shift)^(r-1) exp(-rate(s-shift))
  / Gamma(r) on (shift, inf).  ``m_r`` (Laplace transform t^-r) is the
  rate-0, shift-0 member; the gamma density is rate > 0; a shifted pure
  power is rate = 0, shift > 0.
* ``RationalSquare(shift)``    -- (1 + s - shift)^-2 on (shift, inf).
* ``EpKernel(p, shift)``       -- (s-1-shift)^(p-1) / (Gamma(p) (s-shift))
  on (1+shift, inf); its Laplace transform at x is x^(1-p) E_p(x) for
  shift = 0.
* ``TruncatedUnit(a, b)``      -- indicator density of (a, b).
* ``TabulatedDensity``         -- numeric density on a grid with linear
  interpolation (produced by generic density*density convolution).

The calculus implemented here: Laplace transforms at real or complex points
with positive real part (closed forms where the family admits one, adaptive
quadrature otherwise), convolution, multiplication by integer powers s^j,
repeated integration (the ``xi_n`` fractional integrals), the order-lambda
Stieltjes transform, and a Fubini cross-check used by the identity registry.
"""

from __future__ import annotations

import bisect
import math
import cmath
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .numerics import (QuadratureSpec, QuadratureNonConvergence,
                       integrate_finite, integrate_semi_infinite)
from .specfun import gamma_fn

__all__ = [
    "Measure",
    "PowerExp",
    "RationalSquare",
    "EpKernel",
    "TruncatedUnit",
    "TabulatedDensity",
    "UnsupportedCombination",
    "point_mass",
    "m_r",
    "lebesgue",
    "convolve",
    "fractional_integral",
    "fubini_check",
    "laplace_quadrature",
    "stieltjes_transform",
]

Number = Union[float, complex]

_PIECE_SPEC = QuadratureSpec(rel_tol=1e-11, max_subdivisions=16384)


class UnsupportedCombination(ValueError):
    """Requested measure operation has no supported rule for these pieces."""


def _require_positive_real_part(z: Number) -> None:
    if isinstance(z, complex):
        if not z.real > 0.0:
            raise ValueError(f"need Re z > 0, got {z!r}")
    elif not z > 0.0:
        raise ValueError(f"need z > 0, got {z!r}")


def _piece_quad(density: Callable[[float], float], lo: float, hi: float,
                exponent: Optional[float],
                spec: QuadratureSpec = _PIECE_SPEC,
                tail_power: Optional[float] = None) -> float:
    qspec = QuadratureSpec(spec.abs_tol, spec.rel_tol, spec.max_subdivisions,
                           exponent)
    if math.isinf(hi):
        return integrate_semi_infinite(density, lo, qspec,
                                       tail_power=tail_power).value
    return integrate_finite(density, lo, hi, qspec).value


# ---------------------------------------------------------------------------
# Density families


@dataclass(frozen=True)
class PowerExp:
    r: float
    rate: float = 0.0
    shift: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        if not self.r > 0.0:
            raise ValueError("r must be positive")
        if self.rate < 0.0 or self.shift < 0.0 or self.weight < 0.0:
            raise ValueError("rate, shift and weight must be non-negative")

    def support(self) -> Tuple[float, float]:
        return self.shift, math.inf

    def left_exponent(self) -> Optional[float]:
        return self.r - 1.0

    def density(self, s: float) -> float:
        u = s - self.shift
        if u <= 0.0:
            return 0.0
        return (self.weight * u ** (self.r - 1.0)
                * math.exp(-self.rate * u) / gamma_fn(self.r))

    def laplace(self, z: Number) -> Number:
        if isinstance(z, complex):
            return self.weight * cmath.exp(-z * self.shift) / (z + self.rate) ** self.r
        return self.weight * math.exp(-z * self.shift) * (z + self.rate) ** (-self.r)

    def shifted(self, delta: float) -> "PowerExp":
        return PowerExp(self.r, self.rate, self.shift + delta, self.weight)

    def scaled(self, w: float) -> "PowerExp":
        return PowerExp(self.r, self.rate, self.shift, self.weight * w)

    def power_weighted(self, j: int) -> List["PowerExp"]:
        # s^j = sum_i C(j,i) shift^(j-i) (s-shift)^i, and (s-shift)^i folds
        # into the family as r -> r+i with a Gamma-ratio weight.
        out = []
        for i in range(j + 1):
            coeff = math.comb(j, i) * self.shift ** (j - i)
            if coeff == 0.0:
                continue
            scale = coeff * gamma_fn(self.r + i) / gamma_fn(self.r)
            out.append(PowerExp(self.r + i, self.rate, self.shift,
                                self.weight * scale))
        return out

    def total_mass(self) -> float:
        if self.rate == 0.0:
            return math.inf
        return self.weight / self.rate ** self.r

    def laplace_zero_power(self) -> float:
        return self.r if self.rate == 0.0 else 0.0

    def laplace_infinity_power(self) -> Optional[float]:
        # Decay of the transform at infinity: exponential once the support
        # is bounded away from 0, else governed by the density power at 0.
        return None if self.shift > 0.0 else self.r

    def density_tail_power(self) -> Optional[float]:
        # density ~ s^-q at infinity; None means exponential decay
        return None if self.rate > 0.0 else 1.0 - self.r

    def bernstein_finite(self, lam: float) -> bool:
        return self.rate > 0.0 or self.r < lam


@dataclass(frozen=True)
class RationalSquare:
    shift: float = 0.0
    weight: float = 1.0

    def support(self) -> Tuple[float, float]:
        return self.shift, math.inf

    def left_exponent(self) -> Optional[float]:
        return None

    def density(self, s: float) -> float:
        u = s - self.shift
        if u <= 0.0:
            return 0.0
        return self.weight / (1.0 + u) ** 2

    def laplace(self, z: Number) -> Optional[Number]:
        return None

    def shifted(self, delta: float) -> "RationalSquare":
        return RationalSquare(self.shift + delta, self.weight)

    def scaled(self, w: float) -> "RationalSquare":
        return RationalSquare(self.shift, self.weight * w)

    def power_weighted(self, j: int):
        raise UnsupportedCombination("power weighting of RationalSquare")

    def total_mass(self) -> float:
        return self.weight

    def laplace_zero_power(self) -> float:
        return 0.0

    def laplace_infinity_power(self) -> Optional[float]:
        return None if self.shift > 0.0 else 1.0

    def density_tail_power(self) -> Optional[float]:
        return 2.0

    def bernstein_finite(self, lam: float) -> bool:
        return True


@dataclass(frozen=True)
class EpKernel:
    p: float
    shift: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        if not self.p > 0.0:
            raise ValueError("p must be positive")

    def support(self) -> Tuple[float, float]:
        return 1.0 + self.shift, math.inf

    def left_exponent(self) -> Optional[float]:
        return self.p - 1.0

    def density(self, s: float) -> float:
        u = s - self.shift
        if u <= 1.0:
            return 0.0
        return self.weight * (u - 1.0) ** (self.p - 1.0) / (gamma_fn(self.p) * u)

    def laplace(self, z: Number) -> Optional[Number]:
        return None

    def shifted(self, delta: float) -> "EpKernel":
        return EpKernel(self.p, self.shift + delta, self.weight)

    def scaled(self, w: float) -> "EpKernel":
        return EpKernel(self.p, self.shift, self.weight * w)

    def power_weighted(self, j: int):
        raise UnsupportedCombination("power weighting of EpKernel")

    def total_mass(self) -> float:
        if self.p >= 1.0:
            return math.inf
        return _piece_quad(self.density, *self.support(),
                           self.left_exponent(),
                           tail_power=self.density_tail_power())

    def laplace_zero_power(self) -> float:
        return max(self.p - 1.0, 0.0)

    def laplace_infinity_power(self) -> Optional[float]:
        return None  # support bounded away from 0 -> exponential decay

    def density_tail_power(self) -> Optional[float]:
        return 2.0 - self.p

    def bernstein_finite(self, lam: float) -> bool:
        return self.p < lam + 1.0


@dataclass(frozen=True)
class TruncatedUnit:
    a: float
    b: float
    weight: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.a < self.b):
            raise ValueError("need 0 <= a < b")

    def support(self) -> Tuple[float, float]:
        return self.a, self.b

    def left_exponent(self) -> Optional[float]:
        return None

    def density(self, s: float) -> float:
        return self.weight if self.a < s < self.b else 0.0

    def laplace(self, z: Number) -> Number:
        if isinstance(z, complex):
            return self.weight * (cmath.exp(-z * self.a) - cmath.exp(-z * self.b)) / z
        return self.weight * (math.exp(-z * self.a) - math.exp(-z * self.b)) / z

    def shifted(self, delta: float) -> "TruncatedUnit":
        return TruncatedUnit(self.a + delta, self.b + delta, self.weight)

    def scaled(self, w: float) -> "TruncatedUnit":
        return TruncatedUnit(self.a, self.b, self.weight * w)

    def power_weighted(self, j: int):
        raise UnsupportedCombination("power weighting of TruncatedUnit")

    def total_mass(self) -> float:
        return self.weight * (self.b - self.a)

    def laplace_zero_power(self) -> float:
        return 0.0

    def laplace_infinity_power(self) -> Optional[float]:
        return None if self.a > 0.0 else 1.0

    def density_tail_power(self) -> Optional[float]:
        return None  # finite support

    def bernstein_finite(self, lam: float) -> bool:
        return True


@dataclass(frozen=True)
class TabulatedDensity:
    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    weight: float = 1.0

    def __post_init__(self):
        if len(self.grid) != len(self.values) or len(self.grid) < 2:
            raise ValueError("grid and values must match with length >= 2")

    def support(self) -> Tuple[float, float]:
        return self.grid[0], self.grid[-1]

    def left_exponent(self) -> Optional[float]:
        return None

    def density(self, s: float) -> float:
        if s <= self.grid[0] or s >= self.grid[-1]:
            return 0.0
        i = bisect.bisect_right(self.grid, s) - 1
        x0, x1 = self.grid[i], self.grid[i + 1]
        y0, y1 = self.values[i], self.values[i + 1]
        frac = (s - x0) / (x1 - x0)
        return self.weight * (y0 + frac * (y1 - y0))

    def laplace(self, z: Number) -> Optional[Number]:
        return None

    def shifted(self, delta: float) -> "TabulatedDensity":
        return TabulatedDensity(tuple(g + delta for g in self.grid),
                                self.values, self.weight)

    def scaled(self, w: float) -> "TabulatedDensity":
        return TabulatedDensity(self.grid, self.values, self.weight * w)

    def power_weighted(self, j: int):
        raise UnsupportedCombination("power weighting of TabulatedDensity")

    def total_mass(self) -> float:
        acc = 0.0
        for i in range(len(self.grid) - 1):
            acc += 0.5 * (self.values[i] + self.values[i + 1]) * (
                self.grid[i + 1] - self.grid[i])
        return self.weight * acc

    def laplace_zero_power(self) -> float:
        return 0.0

    def laplace_infinity_power(self) -> Optional[float]:
        return None if self.grid[0] > 0.0 else 1.0

    def density_tail_power(self) -> Optional[float]:
        return None  # finite support

    def bernstein_finite(self, lam: float) -> bool:
        return True


Piece = Union[PowerExp, RationalSquare, EpKernel, TruncatedUnit, TabulatedDensity]


# ---------------------------------------------------------------------------
# Measure


@dataclass(frozen=True)
class Measure:
    atoms: Tuple[Tuple[float, float], ...] = ()
    pieces: Tuple[Piece, ...] = ()
    _mass_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for loc, mass in self.atoms:
            if loc < 0.0 or mass <= 0.0:
                raise ValueError(f"invalid atom ({loc!r}, {mass!r})")

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.atoms + other.atoms, self.pieces + other.pieces)

    def scaled(self, w: float) -> "Measure":
        if w < 0.0:
            raise ValueError("scale must be non-negative")
        return Measure(tuple((loc, mass * w) for loc, mass in self.atoms),
                       tuple(p.scaled(w) for p in self.pieces))

    def power_weighted(self, j: int) -> "Measure":
        """The measure s^j dmu(s) for a non-negative integer j."""
        if j < 0:
            raise ValueError("j must be >= 0")
        if j == 0:
            return Measure(self.atoms, self.pieces)
        atoms = tuple((loc, mass * loc ** j) for loc, mass in self.atoms
                      if loc > 0.0)
        pieces: List[Piece] = []
        for p in self.pieces:
            pieces.extend(p.power_weighted(j))
        return Measure(atoms, tuple(pieces))

    # -- transforms ----------------------------------------------------------

    def laplace(self, z: Number, quadrature_only: bool = False) -> Number:
        """L(mu)(z) for Re z > 0; closed family forms unless disabled."""
        _require_positive_real_part(z)
        if isinstance(z, complex):
            total: Number = complex(
                sum(mass * cmath.exp(-z * loc) for loc, mass in self.atoms))
        else:
            total = math.fsum(mass * math.exp(-z * loc)
                              for loc, mass in self.atoms)
        for p in self.pieces:
            closed = None if quadrature_only else p.laplace(z)
            total += _laplace_piece(p, z) if closed is None else closed
        return total

    def mass_up_to(self, t: float) -> float:
        """mu([0, t]), cached per t."""
        cached = self._mass_cache.get(t)
        if cached is not None:
            return cached
        total = sum(mass for loc, mass in self.atoms if loc <= t)
        for p in self.pieces:
            lo, hi = p.support()
            if t > lo:
                total += _piece_quad(p.density, lo, min(t, hi),
                                     p.left_exponent())
        self._mass_cache[t] = total
        return total

    def bernstein_integral(self, lam: float) -> float:
        """Integral of (1+t)^-lam dmu(t); math.inf when divergent."""
        if any(not p.bernstein_finite(lam) for p in self.pieces):
            return math.inf
        total = sum(mass / (1.0 + loc) ** lam for loc, mass in self.atoms)
        for p in self.pieces:
            lo, hi = p.support()
            dtp = p.density_tail_power()
            total += _piece_quad(lambda s, p=p: p.density(s) / (1.0 + s) ** lam,
                                 lo, hi, p.left_exponent(),
                                 tail_power=None if dtp is None else dtp + lam)
        return total

    # -- asymptotic descriptors (used for integrability checks) --------------

    def laplace_zero_power(self) -> float:
        """rho with L(mu)(t) ~ t^-rho as t -> 0+ (0 for finite measures)."""
        powers = [p.laplace_zero_power() for p in self.pieces]
        return max(powers, default=0.0)

    def laplace_infinity_power(self) -> Optional[float]:
        """Power decay of L(mu) at infinity; None means exponential."""
        candidates: List[float] = []
        for loc, mass in self.atoms:
            if loc == 0.0:
                candidates.append(0.0)
        for p in self.pieces:
            power = p.laplace_infinity_power()
            if power is not None:
                candidates.append(power)
        if not candidates:
            return None
        return min(candidates)

    def is_zero(self) -> bool:
        return not self.atoms and not self.pieces


def _laplace_piece(p: Piece, z: Number) -> Number:
    lo, hi = p.support()
    if isinstance(z, complex):
        re = _piece_quad(lambda s: p.density(s) * math.exp(-z.real * s)
                         * math.cos(z.imag * s), lo, hi, p.left_exponent())
        im = _piece_quad(lambda s: -p.density(s) * math.exp(-z.real * s)
                         * math.sin(z.imag * s), lo, hi, p.left_exponent())
        return complex(re, im)
    return _piece_quad(lambda s: p.density(s) * math.exp(-z * s),
                       lo, hi, p.left_exponent())


def laplace_quadrature(mu: Measure, z: Number) -> Number:
    """L(mu)(z) forcing quadrature for every density piece."""
    return mu.laplace(z, quadrature_only=True)


# ---------------------------------------------------------------------------
# Constructors


def point_mass(loc: float, mass: float = 1.0) -> Measure:
    return Measure(atoms=((loc, mass),))


def m_r(r: float, weight: float = 1.0) -> Measure:
    """The measure with density s^(r-1)/Gamma(r); L(m_r)(t) = t^-r."""
    return Measure(pieces=(PowerExp(r, weight=weight),))


def lebesgue() -> Measure:
    """Lebesgue measure on (0, inf) (= m_1)."""
    return m_r(1.0)


# ---------------------------------------------------------------------------
# Convolution


def convolve(mu: Measure, nu: Measure) -> Measure:
    """Convolution measure: image of the product under (x, t) -> x + t."""
    atoms: dict = {}
    for loc1, m1 in mu.atoms:
        for loc2, m2 in nu.atoms:
            loc = loc1 + loc2
            atoms[loc] = atoms.get(loc, 0.0) + m1 * m2
    pieces: List[Piece] = []
    for loc1, m1 in mu.atoms:
        for p in nu.pieces:
            pieces.append(p.shifted(loc1).scaled(m1))
    for loc2, m2 in nu.atoms:
        for p in mu.pieces:
            pieces.append(p.shifted(loc2).scaled(m2))
    for p in mu.pieces:
        for q in nu.pieces:
            pieces.append(_convolve_pieces(p, q))
    return Measure(tuple(sorted(atoms.items())), tuple(pieces))


def _convolve_pieces(p: Piece, q: Piece) -> Piece:
    if isinstance(p, PowerExp) and isinstance(q, PowerExp) and p.rate == q.rate:
        # Gamma densities with a common rate convolve within the family.
        return PowerExp(p.r + q.r, p.rate, p.shift + q.shift,
                        p.weight * q.weight)
    return _tabulate_convolution(p, q)


def _effective_upper(p: Piece) -> float:
    lo, hi = p.support()
    if not math.isinf(hi):
        return hi
    if isinstance(p, PowerExp):
        if p.rate == 0.0:
            raise UnsupportedCombination(
                "numeric convolution with an infinite-mass power density")
        return p.shift + (40.0 + 10.0 * p.r) / p.rate
    if isinstance(p, RationalSquare):
        return p.shift + 1e6
    if isinstance(p, EpKernel):
        if p.p >= 1.0:
            raise UnsupportedCombination(
                "numeric convolution with an infinite-mass E_p kernel")
        return 1.0 + p.shift + 1e6
    raise UnsupportedCombination(f"no support horizon for {type(p).__name__}")


_CONV_GRID = 512


def _tabulate_convolution(p: Piece, q: Piece) -> TabulatedDensity:
    """Demonstration-grade density*density convolution on a geometric grid."""
    lo_p, _ = p.support()
    lo_q, _ = q.support()
    hi_p = _effective_upper(p)
    hi_q = _effective_upper(q)
    lo = lo_p + lo_q
    hi = hi_p + hi_q
    span = hi - lo
    start = max(span * 1e-6, 1e-9)
    grid = [lo] + [lo + start * (span / start) ** (i / (_CONV_GRID - 2))
                   for i in range(_CONV_GRID - 1)]
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-8)
    values = []
    for s in grid:
        a = max(lo_p, s - hi_q)
        b = min(hi_p, s - lo_q)
        if b <= a:
            values.append(0.0)
            continue
        exponent = p.left_exponent() if a == lo_p else None
        try:
            val = _piece_quad(lambda u: p.density(u) * q.density(s - u),
                              a, b, exponent, spec)
        except QuadratureNonConvergence as err:
            val = err.value
        values.append(max(val, 0.0))
    return TabulatedDensity(tuple(grid), tuple(values))


# ---------------------------------------------------------------------------
# Fractional integrals and the Fubini cross-check


def fractional_integral(mu: Measure, n: int) -> Callable[[float], float]:
    """xi_n(t) = (1/(n-1)!) integral of (t-u)^(n-1) dmu(u) over (0, t].

    xi_1 is the distribution function of mu; each xi_n is non-negative and
    non-decreasing.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    fact = math.factorial(n - 1)

    def xi(t: float) -> float:
        if t <= 0.0:
            return 0.0
        total = 0.0
        for loc, mass in mu.atoms:
            if loc <= t:
                total += mass * (t - loc) ** (n - 1) / fact
        for p in mu.pieces:
            lo, hi = p.support()
            top = min(t, hi)
            if top > lo:
                total += _piece_quad(
                    lambda u: p.density(u) * (t - u) ** (n - 1),
                    lo, top, p.left_exponent()) / fact
        return total

    return xi


def fubini_check(g: Callable[[float], float], mu: Measure,
                 spec: QuadratureSpec = _PIECE_SPEC) -> Tuple[float, float]:
    """Both sides of  integral g(t) L(mu)(t) dt = integral L(g)(s) dmu(s).

    The two sides are computed by independent quadratures; the caller
    compares them.
    """
    lhs = integrate_semi_infinite(lambda t: g(t) * mu.laplace(t), 0.0,
                                  spec).value
    inner_spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12)

    def laplace_g(s: float) -> float:
        return integrate_semi_infinite(lambda t: math.exp(-s * t) * g(t),
                                       0.0, inner_spec).value

    rhs = sum(mass * laplace_g(loc) for loc, mass in mu.atoms)
    for p in mu.pieces:
        lo, hi = p.support()
        dtp = p.density_tail_power()
        # L(g)(s) decays at least like 1/s for integrable g
        rhs += _piece_quad(lambda s: p.density(s) * laplace_g(s),
                           lo, hi, p.left_exponent(),
                           QuadratureSpec(abs_tol=1e-13, rel_tol=1e-9),
                           tail_power=None if dtp is None else dtp + 1.0)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Stieltjes transform


def stieltjes_transform(nu: Measure, z: Number, lam: float = 1.0,
                        c: float = 0.0) -> Number:
    """integral of (z+t)^-lam dnu(t) plus c, for z off (-inf, 0].

    For lam = 1 and Im z > 0 the imaginary part is always <= 0 (the Pick
    property of Stieltjes transforms); higher orders need not satisfy it.
    """
    if isinstance(z, complex) and z.imag != 0.0:
        total: Number = complex(sum(mass * (z + loc) ** (-lam)
                                    for loc, mass in nu.atoms))
        for p in nu.pieces:
            lo, hi = p.support()
            dtp = p.density_tail_power()
            tail = None if dtp is None else dtp + lam
            re = _piece_quad(lambda t: (p.density(t) * (z + t) ** (-lam)).real,
                             lo, hi, p.left_exponent(), tail_power=tail)
            im = _piece_quad(lambda t: (p.density(t) * (z + t) ** (-lam)).imag,
                             lo, hi, p.left_exponent(), tail_power=tail)
            total += complex(re, im)
        return total + c
    x = z.real if isinstance(z, complex) else z
    _require_positive_real_part(x)
    total = sum(mass * (x + loc) ** (-lam) for loc, mass in nu.atoms)
    for p in nu.pieces:
        lo, hi = p.support()
        dtp = p.density_tail_power()
        total += _piece_quad(lambda t: p.density(t) * (x + t) ** (-lam),
                             lo, hi, p.left_exponent(),
                             tail_power=None if dtp is None else dtp + lam)
    return total + c
