"""Function classes built from the incomplete-gamma kernel.

Three constructible families over a positive measure:

* :class:`GeneralizedBernsteinFn` -- order-lambda Bernstein functions
  ``a x^lam + b + integral gamma(lam, x t) t^-lam dmu(t)``.
* :class:`ThorinBernsteinFn` -- the subfamily where the measure density is a
  completely monotonic function of order alpha, carried here as
  ``phi(t) = t^-alpha L(sigma)(t)``; evaluation is available through the
  defining integral, the incomplete-beta form and the hypergeometric form,
  which must agree.
* :class:`StieltjesFn` -- ``integral (x+t)^-lam dnu(t) + c`` with an
  alternative evaluation through the double Laplace representation
  ``c + (1/Gamma(lam)) L(t^{lam-1} L(nu)(t))(x)``.

Plus the surrounding machinery: the map ``f -> x L(f)(x)`` onto Stieltjes
functions, membership probes (finite differences, the upper-half-plane sign
test, the logarithmic-derivative test), the pointwise approximation scheme
through ``(1 + tx/k)^-k`` kernels, the derived measures ``sigma_n`` for
higher derivatives of phi, and the Lomax distribution function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .numerics import (DifferenceProbe, DifferenceRecord, QuadratureSpec,
                       alternating_differences, integrate_finite,
                       integrate_semi_infinite)
from .specfun import (gamma_fn, gauss_2f1, inc_beta, lower_inc_gamma,
                      pochhammer, upper_inc_gamma)
from .measures import (Measure, PowerExp, UnsupportedCombination, convolve,
                       m_r, point_mass, stieltjes_transform)

__all__ = [
    "GeneralizedBernsteinFn",
    "ThorinBernsteinFn",
    "StieltjesFn",
    "ApproximationState",
    "ApproximationResult",
    "ProbeReport",
    "eval_thorin",
    "thorin_derivative",
    "characterization_check",
    "phi_map",
    "laplace_of_thorin",
    "cm_membership_probe",
    "stieltjes_violation_probe",
    "log_cm_necessary_probe",
    "h_k",
    "sup_h_k",
    "build_approximation",
    "build_sigma_n",
    "discrete_phi_derivative",
    "lomax_F",
]

_QUAD = QuadratureSpec(rel_tol=1e-9, max_subdivisions=16384)
_DERIV_REL_STEP = 1e-4


def _spec_with_exponent(sig: Optional[float],
                        base: QuadratureSpec = _QUAD) -> QuadratureSpec:
    if sig is not None and abs(sig) < 1e-12:
        sig = None
    return QuadratureSpec(base.abs_tol, base.rel_tol, base.max_subdivisions,
                          sig)


# ---------------------------------------------------------------------------
# Generalized Bernstein functions


@dataclass(frozen=True)
class GeneralizedBernsteinFn:
    """f(x) = a x^lam + b + integral gamma(lam, x t) t^-lam dmu(t)."""

    lam: float
    a: float = 0.0
    b: float = 0.0
    mu: Measure = Measure()

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("lam must be positive")
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError("a and b must be non-negative")
        if any(loc <= 0.0 for loc, _ in self.mu.atoms):
            raise ValueError("mu must live on (0, inf)")
        if math.isinf(self.mu.bernstein_integral(self.lam)):
            raise ValueError(
                "mu fails the convergence condition: (1+t)^-lam not integrable")

    def __call__(self, x: float) -> float:
        if not x > 0.0:
            raise ValueError("x must be positive")
        lam = self.lam
        total = self.a * x ** lam + self.b
        for loc, mass in self.mu.atoms:
            total += mass * lower_inc_gamma(lam, x * loc) / loc ** lam
        for p in self.mu.pieces:
            lo, hi = p.support()
            spec = _spec_with_exponent(p.left_exponent() if lo == 0.0 else None)
            integrand = (lambda t, p=p:
                         lower_inc_gamma(lam, x * t) * t ** (-lam) * p.density(t))
            if math.isinf(hi):
                dtp = p.density_tail_power()
                total += integrate_semi_infinite(
                    integrand, lo, spec,
                    tail_power=None if dtp is None else dtp + lam).value
            else:
                total += integrate_finite(integrand, lo, hi, spec).value
        return total


def phi_map(f: Union[GeneralizedBernsteinFn, Callable[[float], float]],
            x: float) -> float:
    """x * L(f)(x): the bijection sending order-lam Bernstein functions to
    order-lam Stieltjes functions."""
    if not x > 0.0:
        raise ValueError("x must be positive")
    val = integrate_semi_infinite(lambda t: math.exp(-x * t) * f(t)
                                  if t > 0.0 else 0.0, 0.0, _QUAD).value
    return x * val


# ---------------------------------------------------------------------------
# Thorin-Bernstein functions


@dataclass(frozen=True)
class ThorinBernsteinFn:
    """f(x) = a x^lam + b + integral gamma(lam, x t) phi(t) dt with
    phi(t) = t^-alpha L(sigma)(t)."""

    lam: float
    alpha: float
    a: float = 0.0
    b: float = 0.0
    sigma: Measure = Measure()

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("lam must be positive")
        if not self.alpha < self.lam + 1.0:
            raise ValueError("need alpha < lam + 1")
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError("a and b must be non-negative")
        if any(loc <= 0.0 for loc, _ in self.sigma.atoms):
            raise ValueError("sigma must live on (0, inf)")
        if not self.sigma.is_zero():
            # t^lam phi(t) / (1+t)^lam must be integrable on (0, inf).
            rho0 = self.sigma.laplace_zero_power()
            if not self.lam - self.alpha - rho0 > -1.0:
                raise ValueError("integral diverges at 0: lam - alpha too small "
                                 "against the measure's transform growth")
            pinf = self.sigma.laplace_infinity_power()
            if pinf is not None and not self.alpha + pinf > 1.0:
                raise ValueError("integral diverges at infinity: alpha + decay "
                                 "power of L(sigma) must exceed 1")

    def phi(self, t: float) -> float:
        return t ** (-self.alpha) * self.sigma.laplace(t)

    # -- evaluation paths ----------------------------------------------------

    def _eval_defining(self, x: float) -> float:
        lam, alpha = self.lam, self.alpha
        rho0 = self.sigma.laplace_zero_power()
        spec = _spec_with_exponent(min(lam - alpha - rho0, 2.0))
        pinf = self.sigma.laplace_infinity_power()
        val = integrate_semi_infinite(
            lambda t: lower_inc_gamma(lam, x * t) * self.phi(t), 0.0, spec,
            tail_power=None if pinf is None else alpha + pinf).value
        return self.a * x ** lam + self.b + val

    def _eval_beta(self, x: float) -> float:
        lam, alpha = self.lam, self.alpha
        pref = gamma_fn(lam + 1.0 - alpha)
        total = self.a * x ** lam + self.b
        for loc, mass in self.sigma.atoms:
            total += pref * mass * inc_beta(lam, 1.0 - alpha, x / (x + loc)) \
                * loc ** (alpha - 1.0)
        for p in self.sigma.pieces:
            lo, hi = p.support()
            sig = None
            if lo == 0.0 and alpha < 1.0:
                sig = (alpha - 1.0) + (p.left_exponent() or 0.0)
            spec = _spec_with_exponent(sig)
            integrand = (lambda s, p=p:
                         inc_beta(lam, 1.0 - alpha, x / (x + s))
                         * s ** (alpha - 1.0) * p.density(s))
            if math.isinf(hi):
                dtp = p.density_tail_power()
                total += pref * integrate_semi_infinite(
                    integrand, lo, spec,
                    tail_power=None if dtp is None
                    else lam + 1.0 - alpha + dtp).value
            else:
                total += pref * integrate_finite(integrand, lo, hi, spec).value
        return total

    def _eval_hyper(self, x: float) -> float:
        # 2F1(alpha, 1; lam+1; -x/s) representation.
        lam, alpha = self.lam, self.alpha
        pref = gamma_fn(lam + 1.0 - alpha) * x ** lam / lam
        total = self.a * x ** lam + self.b

        def kernel(s: float) -> float:
            return (gauss_2f1(alpha, 1.0, lam + 1.0, -x / s)
                    * (s + x) ** (alpha - lam) / s)

        for loc, mass in self.sigma.atoms:
            total += pref * mass * kernel(loc)
        for p in self.sigma.pieces:
            lo, hi = p.support()
            sig = None
            if lo == 0.0 and alpha < 1.0:
                sig = (alpha - 1.0) + (p.left_exponent() or 0.0)
            spec = _spec_with_exponent(sig)
            integrand = lambda s, p=p: kernel(s) * p.density(s)
            if math.isinf(hi):
                dtp = p.density_tail_power()
                total += pref * integrate_semi_infinite(
                    integrand, lo, spec,
                    tail_power=None if dtp is None
                    else lam + 1.0 - alpha + dtp).value
            else:
                total += pref * integrate_finite(integrand, lo, hi, spec).value
        return total

    def _eval_hyper_b(self, x: float) -> float:
        # 2F1(lam, alpha; lam+1; x/(x+s)) variant of the same representation.
        lam, alpha = self.lam, self.alpha
        pref = gamma_fn(lam + 1.0 - alpha) * x ** lam / lam
        total = self.a * x ** lam + self.b

        def kernel(s: float) -> float:
            return (gauss_2f1(lam, alpha, lam + 1.0, x / (x + s))
                    * (s + x) ** (-lam) * s ** (alpha - 1.0))

        for loc, mass in self.sigma.atoms:
            total += pref * mass * kernel(loc)
        for p in self.sigma.pieces:
            lo, hi = p.support()
            sig = None
            if lo == 0.0 and alpha < 1.0:
                sig = (alpha - 1.0) + (p.left_exponent() or 0.0)
            spec = _spec_with_exponent(sig)
            integrand = lambda s, p=p: kernel(s) * p.density(s)
            if math.isinf(hi):
                dtp = p.density_tail_power()
                total += pref * integrate_semi_infinite(
                    integrand, lo, spec,
                    tail_power=None if dtp is None
                    else lam + 1.0 - alpha + dtp).value
            else:
                total += pref * integrate_finite(integrand, lo, hi, spec).value
        return total

    def __call__(self, x: float, representation: str = "beta_form") -> float:
        if not x > 0.0:
            raise ValueError("x must be positive")
        if representation == "beta_form":
            return self._eval_beta(x)
        if representation == "defining":
            return self._eval_defining(x)
        if representation == "hyper_form":
            return self._eval_hyper(x)
        if representation == "hyper_b_form":
            return self._eval_hyper_b(x)
        raise ValueError(f"unknown representation {representation!r}")

    def derivative(self, x: float) -> float:
        """f'(x) = lam a x^(lam-1)
        + Gamma(lam+1-alpha) x^(lam-1) integral (s+x)^-(lam+1-alpha) dsigma(s)."""
        if not x > 0.0:
            raise ValueError("x must be positive")
        lam, alpha = self.lam, self.alpha
        order = lam + 1.0 - alpha
        tail = stieltjes_transform(self.sigma, x, order) if not self.sigma.is_zero() else 0.0
        return lam * self.a * x ** (lam - 1.0) \
            + gamma_fn(order) * x ** (lam - 1.0) * tail

    def stieltjes_factor(self) -> "StieltjesFn":
        """The Stieltjes function equal to x^(1-lam) f'(x)."""
        order = self.lam + 1.0 - self.alpha
        return StieltjesFn(order, self.sigma.scaled(gamma_fn(order)),
                           self.lam * self.a)

    def laplace(self, x: float) -> float:
        """L(f)(x) by quadrature against the beta-form evaluation."""
        if not x > 0.0:
            raise ValueError("x must be positive")
        return integrate_semi_infinite(
            lambda t: math.exp(-x * t) * self._eval_beta(t) if t > 0.0 else 0.0,
            0.0, _QUAD).value


def eval_thorin(f: ThorinBernsteinFn, x: float,
                representation: str = "beta_form") -> float:
    return f(x, representation)


def thorin_derivative(f: ThorinBernsteinFn, x: float) -> float:
    return f.derivative(x)


@dataclass(frozen=True)
class CheckRow:
    x: float
    lhs: float
    rhs: float
    rel_err: float


@dataclass(frozen=True)
class CheckReport:
    rows: Tuple[CheckRow, ...]
    max_rel_err: float

    def ok(self, tol: float) -> bool:
        return self.max_rel_err <= tol


def _rel_err(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def characterization_check(f: ThorinBernsteinFn,
                           grid: Sequence[float]) -> CheckReport:
    """x^(1-lam) f'(x) against the order-(lam+1-alpha) Stieltjes evaluation.

    The left side differentiates the beta-form evaluation numerically; the
    right side goes through the double-Laplace Stieltjes representation, so
    the two sides share no closed-form algebra.
    """
    g = f.stieltjes_factor()
    rows = []
    for x in grid:
        h = _DERIV_REL_STEP * x
        deriv = (f(x + h) - f(x - h)) / (2.0 * h)
        lhs = x ** (1.0 - f.lam) * deriv
        rhs = g(x, representation="laplace_form")
        rows.append(CheckRow(x, lhs, rhs, _rel_err(lhs, rhs)))
    return CheckReport(tuple(rows), max(r.rel_err for r in rows))


def laplace_of_thorin(f: ThorinBernsteinFn, x: float) -> dict:
    """L(f)(x) plus the decomposition x^alpha L(f)(x) - b x^(alpha-1).

    The decomposition is cross-checked against the closed double-integral
    form, available when sigma is purely atomic.
    """
    lam, alpha = f.lam, f.alpha
    lap = f.laplace(x)
    stieltjes_part = x ** alpha * lap - f.b * x ** (alpha - 1.0)
    double_form = None
    if not f.sigma.pieces:
        pref = gamma_fn(lam + 1.0 - alpha)

        def outer(v: float) -> float:
            inner = sum(mass * loc ** (alpha - 1.0) * math.exp(-v * loc)
                        for loc, mass in f.sigma.atoms)
            return inner * v ** (lam - 1.0) * (x + v) ** (alpha - lam - 1.0)

        spec = _spec_with_exponent(lam - 1.0)
        tail = integrate_semi_infinite(outer, 0.0, spec).value if f.sigma.atoms else 0.0
        double_form = (f.a * gamma_fn(lam + 1.0) * x ** (alpha - lam - 1.0)
                       + pref * tail)
    return {"laplace": lap, "stieltjes_part": stieltjes_part,
            "double_form": double_form}


# ---------------------------------------------------------------------------
# Stieltjes functions


@dataclass(frozen=True)
class StieltjesFn:
    """g(x) = integral (x+t)^-lam dnu(t) + c."""

    lam: float
    nu: Measure = Measure()
    c: float = 0.0

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("lam must be positive")
        if self.c < 0.0:
            raise ValueError("c must be non-negative")

    def __call__(self, x, representation: str = "direct"):
        if representation == "direct":
            return stieltjes_transform(self.nu, x, self.lam, self.c)
        if representation == "laplace_form":
            if isinstance(x, complex):
                raise ValueError("laplace_form evaluation is real-only")
            lam = self.lam
            rho0 = self.nu.laplace_zero_power()
            spec = _spec_with_exponent(lam - 1.0 - rho0)
            if self.nu.is_zero():
                return self.c
            val = integrate_semi_infinite(
                lambda t: math.exp(-x * t) * t ** (lam - 1.0)
                * self.nu.laplace(t), 0.0, spec).value
            return self.c + val / gamma_fn(lam)
        raise ValueError(f"unknown representation {representation!r}")


# ---------------------------------------------------------------------------
# Probes


@dataclass(frozen=True)
class ProbeReport:
    records: Tuple[DifferenceRecord, ...]
    violations: Tuple[DifferenceRecord, ...]

    @property
    def consistent(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        # Finitely many samples never certify membership, only rule it out.
        return "consistent" if self.consistent else "violated"


def cm_membership_probe(f: Callable[[float], float],
                        probe: DifferenceProbe) -> ProbeReport:
    """Alternating-difference test for complete monotonicity, order 0..N."""
    records: List[DifferenceRecord] = []
    for x in probe.grid:
        fx = f(x)
        tol = max(1e-10, 1e-8 * abs(fx))
        records.append(DifferenceRecord(x, 0, fx, fx < -tol))
    records.extend(alternating_differences(f, probe))
    violations = tuple(r for r in records if r.violation)
    return ProbeReport(tuple(records), violations)


@dataclass(frozen=True)
class PickRecord:
    z: complex
    im: float


@dataclass(frozen=True)
class PickReport:
    records: Tuple[PickRecord, ...]
    max_im: float
    witness: complex


def stieltjes_violation_probe(g: Callable[[complex], complex],
                              points: Sequence[complex]) -> PickReport:
    """max Im g over upper-half-plane points.

    A Stieltjes transform satisfies Im g <= 0 there, so a strictly positive
    maximum certifies that g is not a Stieltjes function; the converse
    direction is never claimed.
    """
    records = []
    for z in points:
        if not z.imag > 0.0:
            raise ValueError(f"points must have Im z > 0, got {z!r}")
        records.append(PickRecord(z, complex(g(z)).imag))
    best = max(records, key=lambda r: r.im)
    return PickReport(tuple(records), best.im, best.z)


def log_cm_necessary_probe(f: Callable[[float], float],
                           probe: DifferenceProbe) -> ProbeReport:
    """Necessary-condition test for logarithmic complete monotonicity.

    Builds d(x) = -(log f)'(x) by central differences and runs the
    alternating-difference probe (orders 0..N) on d.  A violation certifies
    that f is not logarithmically completely monotonic.
    """

    def neg_log_deriv(x: float) -> float:
        fx = f(x)
        if not fx > 0.0:
            raise ValueError(f"f must be positive on the probe range, "
                             f"f({x!r}) = {fx!r}")
        h = _DERIV_REL_STEP * x
        return -(f(x + h) - f(x - h)) / (2.0 * h * fx)

    return cm_membership_probe(neg_log_deriv, probe)


# ---------------------------------------------------------------------------
# The pointwise approximation construction


def h_k(k: int, s: float) -> float:
    """(1 + s/k)^-k - exp(-s); non-negative, decreasing in k, sup <= e/k."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if s < 0.0:
        raise ValueError("s must be non-negative")
    return (1.0 + s / k) ** (-k) - math.exp(-s)


def sup_h_k(k: int, hi: float = 30.0, iters: int = 200) -> float:
    """Numerically located supremum of h_k on [0, inf) (ternary search;
    h_k has a single interior maximum)."""
    lo = 0.0
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if h_k(k, m1) < h_k(k, m2):
            lo = m1
        else:
            hi = m2
    return h_k(k, 0.5 * (lo + hi))


@dataclass(frozen=True)
class ApproximationState:
    n: int
    sigma_mass: float     # sigma([0, n])
    k_n: int
    lam: float

    def __post_init__(self):
        if self.sigma_mass > 0.0:
            bound = 1.0 / (self.n * self.sigma_mass)
            if sup_h_k(self.k_n) > bound + 1e-12:
                raise ValueError("k_n too small: sup h_k exceeds 1/(n sigma([0,n]))")


@dataclass(frozen=True)
class ApproximationResult:
    state: ApproximationState
    F_n: Callable[[float], float]
    g_n: Callable[[float], float]
    f_n: Callable[[float], float]


def build_approximation(lam: float, sigma: Measure,
                        n: int) -> Optional[ApproximationResult]:
    """Stage n of the pointwise approximation of the function with
    x^(1-lam) f'(x) = L(sigma)(x).

    Chooses k_n = ceil(e n sigma([0,n])) so that sup h_{k_n} <= 1/(n
    sigma([0,n])), builds g_n(x) = integral_0^n (1+tx/k_n)^-k_n dsigma(t)
    and F_n(x) = integral_0^x t^(lam-1) g_n(t) dt.  Returns None when
    sigma([0, n]) = 0 (the index is skipped).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    mass = sigma.mass_up_to(float(n))
    if mass <= 0.0:
        return None
    k_n = math.ceil(math.e * n * mass)
    state = ApproximationState(n, mass, k_n, lam)

    def truncated(kernel: Callable[[float, float], float], x: float) -> float:
        total = sum(m * kernel(loc, x) for loc, m in sigma.atoms if loc <= n)
        for p in sigma.pieces:
            lo, hi = p.support()
            top = min(float(n), hi)
            if top > lo:
                spec = _spec_with_exponent(p.left_exponent() if lo == 0.0 else None)
                total += integrate_finite(
                    lambda t, p=p: p.density(t) * kernel(t, x), lo, top,
                    spec).value
        return total

    def g_n(x: float) -> float:
        return truncated(lambda t, x: (1.0 + t * x / k_n) ** (-k_n), x)

    def f_n(x: float) -> float:
        return truncated(lambda t, x: math.exp(-x * t), x)

    def F_n(x: float) -> float:
        if x <= 0.0:
            return 0.0
        spec = _spec_with_exponent(lam - 1.0)
        return integrate_finite(lambda t: t ** (lam - 1.0) * g_n(t),
                                0.0, x, spec).value

    return ApproximationResult(state, F_n, g_n, f_n)


# ---------------------------------------------------------------------------
# sigma_n: measures for the higher derivatives of phi


def build_sigma_n(sigma: Measure, alpha: float, n: int) -> Measure:
    """The measure with (-1)^(n-1) phi^(n-1)(t) = t^-alpha L(sigma_n)(t),
    where phi(t) = t^-alpha L(sigma)(t):

        sigma_n = s^(n-1) dsigma
                  + sum_{k=1}^{n-1} C(n-1,k) (alpha)_k m_k * (s^(n-1-k) dsigma)
    """
    if alpha < 0.0:
        raise ValueError("alpha must be non-negative")
    if n < 1:
        raise ValueError("n must be a positive integer")
    result = sigma.power_weighted(n - 1)
    for k in range(1, n):
        coeff = math.comb(n - 1, k) * pochhammer(alpha, k)
        if coeff == 0.0:
            continue
        result = result + convolve(m_r(float(k)),
                                   sigma.power_weighted(n - 1 - k)).scaled(coeff)
    return result


def discrete_phi_derivative(sigma: Measure, alpha: float, n: int,
                            t: float) -> float:
    """(-1)^n phi^(n)(t) in closed form for purely atomic sigma.

    Leibniz on phi(t) = t^-alpha sum_i m_i exp(-c_i t):
    (-1)^n phi^(n)(t) = sum_i m_i exp(-c_i t)
                        sum_k C(n,k) (alpha)_k t^(-alpha-k) c_i^(n-k).
    """
    if sigma.pieces:
        raise UnsupportedCombination("closed derivative needs atomic sigma")
    total = 0.0
    for loc, mass in sigma.atoms:
        inner = sum(math.comb(n, k) * pochhammer(alpha, k)
                    * t ** (-alpha - k) * loc ** (n - k)
                    for k in range(n + 1))
        total += mass * math.exp(-loc * t) * inner
    return total


# ---------------------------------------------------------------------------
# Lomax distribution function


def lomax_F(lam: float, t: float, method: str = "closed") -> float:
    """Randomized-Lomax distribution function.

    ``closed``     : 1 - lam t^lam e^t Gamma(-lam, t)
    ``quadrature`` : (1/Gamma(lam)) integral gamma(lam, t u) (1+u)^-2 du
    """
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    if not t > 0.0:
        raise ValueError("t must be positive")
    if method == "closed":
        return 1.0 - lam * math.exp(lam * math.log(t) + t) \
            * upper_inc_gamma(-lam, t)
    if method == "quadrature":
        val = integrate_semi_infinite(
            lambda u: lower_inc_gamma(lam, t * u) / (1.0 + u) ** 2,
            0.0, _QUAD, tail_power=2.0).value
        return val / gamma_fn(lam)
    raise ValueError(f"unknown method {method!r}")
