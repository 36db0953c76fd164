"""Adaptive quadrature and finite-difference kernels.

Everything downstream (special functions, measure transforms, the identity
registry) funnels its integrals through the two ``integrate_*`` entry points
here, so this module is deliberately small, deterministic and dependency-free.

Quadrature is adaptive Gauss-Kronrod 7-15 with bisection of the interval
carrying the largest local error estimate.  Semi-infinite integrals are mapped
onto (0, 1) by ``t = a + u/(1-u)``; a declared power-law weight ``t**sigma`` at
the left endpoint is absorbed by the substitution ``t = a + v**(1/(1+sigma))``
so the transformed integrand is bounded.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

__all__ = [
    "QuadratureSpec",
    "DifferenceProbe",
    "QuadratureResult",
    "QuadratureError",
    "QuadratureNonConvergence",
    "DEFAULT_SPEC",
    "integrate_finite",
    "integrate_semi_infinite",
    "alternating_differences",
    "DifferenceRecord",
    "log_binomial",
    "binomial",
]


class QuadratureError(ValueError):
    """Bad quadrature input (NaN from the integrand, invalid bounds...)."""


class QuadratureNonConvergence(RuntimeError):
    """Subdivision budget exhausted; carries the partial result.

    Attributes
    ----------
    value, error : best integral value and error estimate reached so far.
    """

    def __init__(self, msg: str, value: float, error: float):
        super().__init__(msg)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and budget for one adaptive integration."""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-10
    max_subdivisions: int = 4096
    endpoint_singularity_exponent: Optional[float] = None

    def __post_init__(self):
        if not self.abs_tol >= 0.0:
            raise ValueError("abs_tol must be >= 0")
        if not (1e-14 <= self.rel_tol <= 1e-2):
            raise ValueError("rel_tol must lie in [1e-14, 1e-2]")
        if not (0 < self.max_subdivisions <= 10**6):
            raise ValueError("max_subdivisions must be in (0, 1e6]")
        sig = self.endpoint_singularity_exponent
        if sig is not None and not sig > -1.0:
            raise ValueError("endpoint singularity exponent must exceed -1")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float

    def __float__(self) -> float:
        return self.value


# Kronrod-15 abscissae on [-1, 1] (non-negative half) and weights, with the
# embedded Gauss-7 weights on the odd-indexed abscissae.
_XK = (
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
)
_WK = (
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.06309209262997855,
    0.02293532201052922,
)
_WG = (
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    """One Gauss-Kronrod 7-15 panel; returns (K15 value, |K15 - G7|).

    Sample points are clamped strictly inside (a, b): the rule is open, but
    rounding can push the outermost nodes of a very narrow panel onto an
    endpoint, where integrands with (integrable) endpoint singularities blow
    up or divide by zero.
    """
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)

    f0 = f(mid)
    if math.isnan(f0):
        raise QuadratureError(f"integrand returned NaN at {mid!r}")
    vals_hi = [0.0] * 8
    vals_lo = [0.0] * 8
    vals_hi[0] = f0
    kron = _WK[0] * f0
    gauss = _WG[0] * f0
    for i in range(1, 8):
        xi = h * _XK[i]
        hi_pt = mid + xi
        if hi_pt >= b:
            hi_pt = math.nextafter(b, a)
        lo_pt = mid - xi
        if lo_pt <= a:
            lo_pt = math.nextafter(a, b)
        fp = f(hi_pt)
        fm = f(lo_pt)
        if math.isnan(fp) or math.isnan(fm):
            raise QuadratureError("integrand returned NaN")
        vals_hi[i] = fp
        vals_lo[i] = fm
        pair = fp + fm
        kron += _WK[i] * pair
        if i % 2 == 0:
            gauss += _WG[i // 2] * pair
    # QUADPACK-style error estimate: inflate |K - G| by how rough the
    # integrand is on the panel, so endpoint singularities keep refining.
    mean = 0.5 * kron
    resasc = _WK[0] * abs(f0 - mean)
    for i in range(1, 8):
        resasc += _WK[i] * (abs(vals_hi[i] - mean) + abs(vals_lo[i] - mean))
    resasc *= abs(h)
    err = abs(kron - gauss) * abs(h)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    return kron * h, err


def _adaptive(f: Callable[[float], float], a: float, b: float,
              spec: QuadratureSpec) -> QuadratureResult:
    value, err = _gk15(f, a, b)
    # (neg error, insertion counter, a, b, value, error, frozen); the counter
    # makes heap ordering total, hence deterministic.  A frozen panel has
    # reached floating-point resolution and cannot be split further.
    heap = [(-err, 0, a, b, value, err, False)]
    total = value
    total_err = err
    count = 1
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if count >= spec.max_subdivisions:
            raise QuadratureNonConvergence(
                f"no convergence after {count} subdivisions "
                f"(value={total!r}, error={total_err!r})",
                total, total_err)
        neg_e, _, lo, hi, v, e, frozen = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if frozen or mid <= lo or mid >= hi:
            # Nothing left to refine: the worst panel is already at float
            # resolution.  Its own value is the honest scale of what may
            # still be missing (undeclared endpoint singularity).
            e_floor = max(e, abs(v))
            heapq.heappush(heap, (0.0, count, lo, hi, v, e_floor, True))
            count += 1
            total = sum(item[4] for item in heap)
            total_err = sum(item[5] for item in heap)
            if frozen:
                raise QuadratureNonConvergence(
                    "refinement stalled at floating-point resolution "
                    f"(value={total!r}, error={total_err!r}); declare the "
                    "endpoint singularity exponent instead",
                    total, total_err)
            continue
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += (v1 + v2) - v
        total_err += (e1 + e2) - e
        heapq.heappush(heap, (-e1, count, lo, mid, v1, e1, False))
        count += 1
        heapq.heappush(heap, (-e2, count, mid, hi, v2, e2, False))
        count += 1
        if count % 64 == 0:
            # Refresh the accumulated sums to curb cancellation drift.
            total = sum(item[4] for item in heap)
            total_err = sum(item[5] for item in heap)
    total = sum(item[4] for item in heap)
    total_err = sum(item[5] for item in heap)
    return QuadratureResult(total, total_err)


def integrate_finite(f: Callable[[float], float], a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_SPEC) -> QuadratureResult:
    """Integrate ``f`` over (a, b).

    A power-law singularity ``(t-a)**sigma`` at the left endpoint, declared via
    ``spec.endpoint_singularity_exponent``, is removed by substituting
    ``t = a + v**(1/(1+sigma))``.
    """
    if not a < b:
        raise QuadratureError(f"need a < b, got a={a!r}, b={b!r}")
    sig = spec.endpoint_singularity_exponent
    if sig is not None and abs(sig) > 1e-12:
        p = 1.0 / (1.0 + sig)
        vmax = (b - a) ** (1.0 + sig)

        def transformed(v: float) -> float:
            if v <= 0.0:
                return 0.0
            t = a + v ** p
            if t <= a:
                return 0.0
            return f(t) * p * v ** (p - 1.0)

        return _adaptive(transformed, 0.0, vmax, spec)
    return _adaptive(f, a, b, spec)


def integrate_semi_infinite(f: Callable[[float], float], a: float,
                            spec: QuadratureSpec = DEFAULT_SPEC,
                            tail_power: Optional[float] = None) -> QuadratureResult:
    """Integrate ``f`` over (a, inf) via the map ``t = a + u/(1-u)``.

    The integrand must decay integrably: exponentially, or like ``t**-q``
    with ``q > 1``.  A known power tail should be declared via ``tail_power``
    (= q); the mapped integrand then behaves like ``(1-u)**(q-2)`` at ``u = 1``
    and the declared-singularity machinery takes over.  Declaring a
    non-integrable tail (q <= 1) raises immediately.
    """
    if tail_power is not None and tail_power <= 1.0:
        raise QuadratureError(
            f"tail power {tail_power!r} <= 1: the integral diverges")

    def mapped(u: float) -> float:
        w = 1.0 - u
        if w <= 0.0:
            return 0.0
        t = a + u / w
        val = f(t)
        if val == 0.0:
            return 0.0
        return val / (w * w)

    inner = QuadratureSpec(spec.abs_tol, spec.rel_tol, spec.max_subdivisions,
                           spec.endpoint_singularity_exponent)
    if tail_power is None or tail_power >= 3.0:
        return integrate_finite(mapped, 0.0, 1.0, inner)
    lo_half = integrate_finite(mapped, 0.0, 0.5, inner)
    hi_spec = QuadratureSpec(spec.abs_tol, spec.rel_tol, spec.max_subdivisions,
                             tail_power - 2.0)
    hi_half = integrate_finite(lambda v: mapped(1.0 - v), 0.0, 0.5, hi_spec)
    return QuadratureResult(lo_half.value + hi_half.value,
                            lo_half.error + hi_half.error)


# ---------------------------------------------------------------------------
# Finite differences


@dataclass(frozen=True)
class DifferenceProbe:
    """Grid, step and maximal order for alternating finite differences."""

    h: float = 0.05
    max_order: int = 8
    grid: Sequence[float] = (0.1, 0.5, 1.0, 2.0, 5.0)

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError("h must be positive")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if not all(x > 0.0 for x in self.grid):
            raise ValueError("grid points must be positive")


@dataclass(frozen=True)
class DifferenceRecord:
    x: float
    order: int
    value: float          # (-1)^n Delta_h^n f(x)
    violation: bool


def log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binomial(n: int, k: int) -> float:
    """C(n, k) as a float; exact integer arithmetic up to n = 30."""
    if n <= 30:
        return float(math.comb(n, k))
    return math.exp(log_binomial(n, k))


_ORDER_CAP = 60


def alternating_differences(f: Callable[[float], float],
                            probe: DifferenceProbe) -> List[DifferenceRecord]:
    """Evaluate (-1)^n Delta_h^n f on the probe grid for 1 <= n <= max_order.

    With the forward difference Delta_h this equals
    ``sum_k (-1)^k C(n,k) f(x + k h)`` and is non-negative for every
    completely monotonic f (e.g. ``exp(-x)`` gives ``exp(-x)(1-exp(-h))^n``).
    A value is flagged as a violation only below ``-max(1e-10, 1e-8*|f(x)|)``;
    a pass is necessary evidence only -- finitely many samples can never
    certify membership.
    """
    n_max = min(probe.max_order, _ORDER_CAP)
    records: List[DifferenceRecord] = []
    for x in probe.grid:
        fx = f(x)
        if math.isnan(fx):
            raise QuadratureError(f"f(x) is NaN at x={x!r}")
        tol = max(1e-10, 1e-8 * abs(fx))
        values = [f(x + k * probe.h) for k in range(n_max + 1)]
        for n in range(1, n_max + 1):
            acc = 0.0
            for k in range(n + 1):
                term = binomial(n, k) * values[k]
                acc += term if (k % 2 == 0) else -term
            records.append(DifferenceRecord(x, n, acc, acc < -tol))
    return records


def has_violation(records: Sequence[DifferenceRecord]) -> bool:
    return any(r.violation for r in records)
