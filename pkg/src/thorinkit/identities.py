"""Registry of closed-form identities verified over parameter grids.

Every :class:`IdentityCase` carries two evaluators that compute the same
quantity through genuinely different routes (a quadrature of a defining
integral against a closed special-function form, two different
transformation chains, and so on).  Evaluators carry static path tags;
``assert_independent`` checks that the two sides of a case share no route
beyond the shared quadrature kernels and the complete-gamma prefactors.

``run_identity`` sweeps a case over its grid and produces a
:class:`VerificationReport`; ``run_all`` runs the registry (optionally in
threads, capped by the ``THORINKIT_THREADS`` environment variable) and the
reports serialize to JSON and to a flat CSV with one row per grid point.
"""

from __future__ import annotations

import cmath
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .numerics import QuadratureSpec, integrate_finite, integrate_semi_infinite
from .specfun import (exp_integral_E, gamma_fn, gauss_2f1, inc_beta,
                      lower_inc_gamma, upper_inc_gamma)
from .measures import (Measure, PowerExp, convolve, fubini_check,
                       laplace_quadrature, m_r, point_mass)
from .function_classes import (ThorinBernsteinFn, build_sigma_n,
                               discrete_phi_derivative, laplace_of_thorin,
                               lomax_F, sup_h_k)

__all__ = [
    "Side",
    "IdentityCase",
    "PointResult",
    "VerificationReport",
    "default_registry",
    "default_thorin_corpus",
    "run_identity",
    "run_all",
    "reports_to_json",
    "reports_to_csv",
    "assert_independent",
    "IndependenceError",
]

Params = Dict[str, object]

# Tag prefixes that the two sides of an identity may legitimately share:
# the quadrature/difference kernels, and the complete gamma function (it
# only ever enters as a common scale factor).
SHARED_TAG_PREFIXES = ("numerics", "specfun.gamma")

_Q8 = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-10, max_subdivisions=16384)


def _spec(exponent: Optional[float] = None,
          base: QuadratureSpec = _Q8) -> QuadratureSpec:
    if exponent is not None and (abs(exponent) < 1e-12 or exponent > 2.5):
        exponent = None
    return QuadratureSpec(base.abs_tol, base.rel_tol, base.max_subdivisions,
                          exponent)


@dataclass(frozen=True)
class Side:
    fn: Callable[[Params], float]
    tags: frozenset


class IndependenceError(AssertionError):
    pass


def assert_independent(case: "IdentityCase") -> None:
    shared = case.lhs.tags & case.rhs.tags
    bad = {t for t in shared
           if not any(t == p or t.startswith(p + ".")
                      for p in SHARED_TAG_PREFIXES)}
    if bad:
        raise IndependenceError(
            f"{case.id}: sides share non-shared-listed routes {sorted(bad)}")


@dataclass(frozen=True)
class IdentityCase:
    id: str
    title: str
    lhs: Side
    rhs: Side
    grid: Tuple[Params, ...]
    rel_tol: float
    mode: str = "equality"       # equality | upper_bound | positivity
    threshold: float = 0.0       # positivity: pass iff max lhs > threshold


@dataclass(frozen=True)
class PointResult:
    params: Params
    lhs: Optional[float]
    rhs: Optional[float]
    rel_err: Optional[float]
    status: str                  # "ok" or "error: ..."


@dataclass(frozen=True)
class VerificationReport:
    id: str
    title: str
    mode: str
    rel_tol: float
    grid_size: int
    max_rel_err: float
    argmax_params: Optional[Params]
    passed: bool
    n_failed: int
    wall_time: float
    points: Tuple[PointResult, ...]


def _rel_err(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def run_identity(case: IdentityCase,
                 grid: Optional[Sequence[Params]] = None,
                 rel_tol: Optional[float] = None) -> VerificationReport:
    """Evaluate both sides of a case over its grid.

    A point where a side raises is recorded with an error status and fails
    the report; the sweep always continues.
    """
    assert_independent(case)
    pts = tuple(grid) if grid is not None else case.grid
    if not pts:
        raise ValueError(f"{case.id}: empty grid")
    tol = case.rel_tol if rel_tol is None else rel_tol
    t0 = time.perf_counter()
    results: List[PointResult] = []
    max_err = -math.inf
    argmax: Optional[Params] = None
    n_failed = 0
    for params in pts:
        try:
            lhs = case.lhs.fn(params)
            rhs = case.rhs.fn(params)
        except Exception as exc:  # recorded, never silently skipped
            results.append(PointResult(params, None, None, None,
                                       f"error: {type(exc).__name__}: {exc}"))
            n_failed += 1
            continue
        if case.mode == "equality":
            err = _rel_err(lhs, rhs)
        elif case.mode == "upper_bound":
            err = max(0.0, (lhs - rhs) / max(abs(rhs), 1e-300))
        elif case.mode == "positivity":
            err = lhs
        else:
            raise ValueError(f"unknown mode {case.mode!r}")
        results.append(PointResult(params, lhs, rhs, err, "ok"))
        if err > max_err:
            max_err = err
            argmax = params
    if case.mode == "positivity":
        passed = n_failed == 0 and max_err > case.threshold
    else:
        passed = n_failed == 0 and max_err <= tol
    return VerificationReport(case.id, case.title, case.mode, tol, len(pts),
                              max_err, argmax, passed, n_failed,
                              time.perf_counter() - t0, tuple(results))


def run_all(ids: Optional[Sequence[str]] = None,
            rel_tol: Optional[float] = None,
            threads: Optional[int] = None) -> List[VerificationReport]:
    """Run the registry (or a subset); reports come back in registry order.

    ``threads`` defaults to the THORINKIT_THREADS environment variable;
    0 or 1 means sequential.
    """
    registry = default_registry()
    if ids is not None:
        known = {c.id for c in registry}
        unknown = [i for i in ids if i not in known]
        if unknown:
            raise KeyError(f"unknown identity ids: {unknown}")
        registry = [c for c in registry if c.id in set(ids)]
    if threads is None:
        threads = int(os.environ.get("THORINKIT_THREADS", "0"))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: run_identity(c, rel_tol=rel_tol),
                                 registry))
    return [run_identity(c, rel_tol=rel_tol) for c in registry]


# ---------------------------------------------------------------------------
# Serialization


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _params_str(params: Params) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))


def reports_to_csv(reports: Sequence[VerificationReport]) -> str:
    lines = ["id,params,lhs,rhs,rel_err,status"]
    for rep in reports:
        for pt in rep.points:
            lines.append(",".join([
                rep.id,
                _params_str(pt.params),
                "" if pt.lhs is None else _fmt(pt.lhs),
                "" if pt.rhs is None else _fmt(pt.rhs),
                "" if pt.rel_err is None else _fmt(pt.rel_err),
                pt.status.split(":")[0],
            ]))
    return "\n".join(lines) + "\n"


def reports_to_json(reports: Sequence[VerificationReport],
                    include_points: bool = True) -> str:
    payload = {
        "all_passed": all(r.passed for r in reports),
        "reports": [],
    }
    for rep in reports:
        entry = {
            "id": rep.id,
            "title": rep.title,
            "mode": rep.mode,
            "rel_tol": rep.rel_tol,
            "grid_size": rep.grid_size,
            "max_rel_err": rep.max_rel_err,
            "argmax_params": rep.argmax_params,
            "passed": rep.passed,
            "n_failed": rep.n_failed,
            "wall_time_s": rep.wall_time,
        }
        if include_points:
            entry["points"] = [
                {"params": pt.params, "lhs": pt.lhs, "rhs": pt.rhs,
                 "rel_err": pt.rel_err, "status": pt.status}
                for pt in rep.points
            ]
        payload["reports"].append(entry)
    return json.dumps(payload, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Default parameter pools


_LAMS = (0.5, 1.0, 2.5)
_XS = (0.1, 1.0, 10.0)
_SCS = (0.5, 2.0)
_PS = (0.5, 1.5)
_BETAS = (0.5, 1.5)


def _alphas(lam: float) -> Tuple[float, ...]:
    return (-0.5, 0.0, 0.5, 1.0, min(lam + 0.9, 2.0))


def default_thorin_corpus() -> Tuple[ThorinBernsteinFn, ...]:
    """Six reference instances spanning point-mass and m_1 measures."""
    return (
        ThorinBernsteinFn(1.0, 1.0, a=0.1, b=0.2, sigma=point_mass(1.0)),
        ThorinBernsteinFn(2.0, 0.0, sigma=point_mass(2.0)),
        ThorinBernsteinFn(2.5, 1.7, sigma=m_r(1.0)),
        ThorinBernsteinFn(1.0, 0.5, sigma=m_r(1.0)),
        ThorinBernsteinFn(3.0, 3.0, sigma=point_mass(1.0)),
        ThorinBernsteinFn(0.5, -0.5, sigma=point_mass(0.5)),
    )


# ---------------------------------------------------------------------------
# Evaluators
#
# Each evaluator takes the parameter dict of one grid point.  The defining
# integrals are written out explicitly here (rather than delegating to the
# class evaluators) wherever that keeps the two sides of a case on separate
# routes.


def _i1_lhs(p: Params) -> float:
    lam, x, s = p["lam"], p["x"], p["s"]
    return integrate_semi_infinite(
        lambda t: math.exp(-x * t) * lower_inc_gamma(lam, s * t),
        0.0, _spec(lam)).value


def _i1_rhs(p: Params) -> float:
    lam, x, s = p["lam"], p["x"], p["s"]
    return gamma_fn(lam) / x * (s / (x + s)) ** lam


def _i2_defining(p: Params) -> float:
    lam, alpha, x = p["lam"], p["alpha"], p["x"]
    if p["mu"] == "point":
        c = p["c"]
        return integrate_semi_infinite(
            lambda t: lower_inc_gamma(lam, x * t) * t ** (-alpha)
            * math.exp(-c * t), 0.0, _spec(lam - alpha)).value
    # mu = m_1: L(mu)(t) = 1/t
    return integrate_semi_infinite(
        lambda t: lower_inc_gamma(lam, x * t) * t ** (-alpha - 1.0),
        0.0, _spec(lam - alpha - 1.0), tail_power=alpha + 1.0).value


def _i2_double(p: Params) -> float:
    lam, alpha, x = p["lam"], p["alpha"], p["x"]
    pref = gamma_fn(lam + 1.0 - alpha)

    def inner(s: float) -> float:
        return integrate_finite(
            lambda u: u ** (lam - 1.0) * (s + u) ** (alpha - lam - 1.0),
            0.0, x, _spec(lam - 1.0)).value

    if p["mu"] == "point":
        return pref * inner(p["c"])
    sig = alpha - 1.0 if alpha < 1.0 else None
    return pref * integrate_semi_infinite(
        inner, 0.0, _spec(sig), tail_power=lam + 1.0 - alpha).value


def _i2_beta(p: Params) -> float:
    lam, alpha, x = p["lam"], p["alpha"], p["x"]
    pref = gamma_fn(lam + 1.0 - alpha)
    if p["mu"] == "point":
        c = p["c"]
        return pref * inc_beta(lam, 1.0 - alpha, x / (x + c)) \
            * c ** (alpha - 1.0)
    sig = alpha - 1.0 if alpha < 1.0 else None
    return pref * integrate_semi_infinite(
        lambda s: inc_beta(lam, 1.0 - alpha, x / (x + s)) * s ** (alpha - 1.0),
        0.0, _spec(sig), tail_power=lam + 1.0 - alpha).value


def _i3_rhs(p: Params) -> float:
    lam, alpha, x, s = p["lam"], p["alpha"], p["x"], p["s"]
    return (gamma_fn(lam + 1.0 - alpha) * x ** lam / lam
            * gauss_2f1(alpha, 1.0, lam + 1.0, -x / s)
            * (s + x) ** (alpha - lam) / s)


def _i4_lhs(p: Params) -> float:
    lam, alpha, x, s = p["lam"], p["alpha"], p["x"], p["s"]
    z = x / (x + s)
    return (gamma_fn(lam + 1.0 - alpha) * x ** lam / lam
            * gauss_2f1(lam, alpha, lam + 1.0, z)
            * (s + x) ** (-lam) * s ** (alpha - 1.0))


def _i4_rhs(p: Params) -> float:
    lam, alpha, x, s = p["lam"], p["alpha"], p["x"], p["s"]
    z = x / (x + s)
    bval = integrate_finite(
        lambda t: t ** (lam - 1.0) * (1.0 - t) ** (-alpha),
        0.0, z, _spec(lam - 1.0)).value
    return gamma_fn(lam + 1.0 - alpha) * bval * s ** (alpha - 1.0)


def _i5_lhs(p: Params) -> float:
    lam, alpha, z = p["lam"], p["alpha"], p["z"]
    return gauss_2f1(lam, alpha, lam + 1.0, z) / lam


def _i5_rhs(p: Params) -> float:
    # z^-lam int_0^{z/(1-z)} u^(lam-1) (1+u)^(alpha-lam-1) du, parametrized
    # by u = w rho so the oriented limits for z < 0 stay on the real line.
    lam, alpha, z = p["lam"], p["alpha"], p["z"]
    w = z / (1.0 - z)
    val = integrate_finite(
        lambda r: r ** (lam - 1.0) * (1.0 + w * r) ** (alpha - lam - 1.0),
        0.0, 1.0, _spec(lam - 1.0)).value
    return (1.0 - z) ** (-lam) * val


def _log_tail(x_over_c: float, n: int) -> float:
    # (-1)^(n-1) [log(1+w) + sum_{k=1}^{n-1} (-1)^k w^k / k],  w = x/c
    w = x_over_c
    acc = math.log1p(w)
    for k in range(1, n):
        acc += (-1.0) ** k * w ** k / k
    return (-1.0) ** (n - 1) * acc


def _i6_lhs(p: Params) -> float:
    n, c, x = p["n"], p["c"], p["x"]
    return integrate_semi_infinite(
        lambda t: lower_inc_gamma(float(n), x * t) * t ** (-float(n))
        * math.exp(-c * t), 0.0, _spec()).value


def _i6_rhs(p: Params) -> float:
    n, c, x = p["n"], p["c"], p["x"]
    return _log_tail(x / c, n) * c ** (n - 1)


def _i7_lhs(p: Params) -> float:
    n, c, x = p["n"], p["c"], p["x"]
    return (x / c) ** n * integrate_semi_infinite(
        lambda t: math.exp(-x * t / c) * exp_integral_E(float(n), t),
        0.0, _spec()).value


def _i7_rhs(p: Params) -> float:
    return _log_tail(p["x"] / p["c"], p["n"])


_I8_MEASURES = {
    "c05": ((0.5, 1.0),),
    "c2": ((2.0, 1.0),),
    "two": ((0.5, 1.0), (2.0, 0.7)),
}


def _i8_lhs(p: Params) -> float:
    x = p["x"]
    return sum(mass * math.log((x + c) / c) for c, mass in _I8_MEASURES[p["mu"]])


def _i8_rhs(p: Params) -> float:
    x = p["x"]
    atoms = _I8_MEASURES[p["mu"]]
    return integrate_semi_infinite(
        lambda t: lower_inc_gamma(1.0, x * t) / t
        * sum(mass * math.exp(-c * t) for c, mass in atoms),
        0.0, _spec()).value


def _i9_lhs(p: Params) -> float:
    alpha, c, x, a = p["alpha"], p["c"], p["x"], p["a"]
    return a + integrate_semi_infinite(
        lambda t: t ** (1.0 - alpha) * math.exp(-(x + c) * t),
        0.0, _spec(1.0 - alpha)).value


def _i9_rhs(p: Params) -> float:
    alpha, c, x, a = p["alpha"], p["c"], p["x"], p["a"]
    return a + gamma_fn(2.0 - alpha) * (x + c) ** (alpha - 2.0)


_IM_RESIDUE_TOL = 1e-10


def _i10_lhs(p: Params) -> float:
    z = p["z"]
    if p["form"] == "tanh":
        return 2.0 * math.atanh(math.sqrt(z))
    pq, q = p["p"], p["q"]
    root = z ** (1.0 / q)
    acc = 0.0j
    for k in range(q):
        omega = cmath.exp(2j * math.pi * k / q)
        acc += cmath.exp(-2j * math.pi * k * pq / q) \
            * (-cmath.log(1.0 - root * omega))
    if abs(acc.imag) > _IM_RESIDUE_TOL:
        raise ArithmeticError(f"imaginary residue {acc.imag!r} too large")
    return acc.real


def _i10_rhs(p: Params) -> float:
    z, pq, q = p["z"], p["p"], p["q"]
    acc = 0.0
    k = 0
    while True:
        term = z ** k / (pq + k * q)
        acc += term
        if term <= 1e-18 * acc:
            break
        k += 1
    return q * z ** (pq / q) * acc


def _i11_lhs(p: Params) -> float:
    lam, beta, n, c, x = p["lam"], p["beta"], p["n"], p["c"], p["x"]
    return integrate_semi_infinite(
        lambda t: lower_inc_gamma(lam, x * t) * t ** (-beta - n)
        * math.exp(-c * t), 0.0, _spec(lam - beta - n)).value


def _i11_rhs(p: Params) -> float:
    lam, beta, n, c, x = p["lam"], p["beta"], p["n"], p["c"], p["x"]
    fact = math.factorial(n - 1)

    def integrand(t: float) -> float:
        return (inc_beta(lam, 1.0 - beta, x / (x + t))
                * (t - c) ** (n - 1) / fact * t ** (beta - 1.0))

    return gamma_fn(lam - beta + 1.0) * integrate_semi_infinite(
        integrand, c, _spec(float(n - 1)),
        tail_power=lam + 2.0 - beta - n).value


def _i12_lhs(p: Params) -> float:
    return lomax_F(p["lam"], p["x"], method="closed")


def _i12_rhs(p: Params) -> float:
    return lomax_F(p["lam"], p["x"], method="quadrature")


def _i13_lhs(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]
    sig = lam - max(pe - 1.0, 0.0)
    return integrate_semi_infinite(
        lambda t: lower_inc_gamma(lam, x * t) * exp_integral_E(pe, t),
        0.0, _spec(sig)).value


def _i13_rhs(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]
    return gamma_fn(lam) * x ** (-pe) * inc_beta(lam + pe, -pe, x / (x + 1.0))


def _i14_lhs(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]

    def integrand(u: float) -> float:
        zz = x * (1.0 - u) / (1.0 + x * (1.0 - u))
        return inc_beta(lam, pe, zz) * u ** (pe - 1.0)

    return gamma_fn(lam + pe) / gamma_fn(pe) * integrate_finite(
        integrand, 0.0, 1.0, _spec(pe - 1.0)).value


def _i14_rhs(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]
    z = x / (x + 1.0)
    bval = integrate_finite(
        lambda t: t ** (lam + pe - 1.0) * (1.0 - t) ** (-pe - 1.0),
        0.0, z, _spec(lam + pe - 1.0)).value
    return gamma_fn(lam) * x ** (-pe) * bval


def _i15_integral(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]
    return gamma_fn(lam) * x ** lam / gamma_fn(pe) * integrate_semi_infinite(
        lambda s: (s - 1.0) ** (pe - 1.0) / ((x + s) ** lam * s * s),
        1.0, _spec(pe - 1.0), tail_power=lam + 3.0 - pe).value


def _i15_hyper_neg(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]
    return (gamma_fn(lam - pe + 2.0) / (lam * (lam + 1.0)) * x ** lam
            * gauss_2f1(lam, lam - pe + 2.0, lam + 2.0, -x))


def _i15_hyper_pos(p: Params) -> float:
    lam, pe, x = p["lam"], p["p"], p["x"]
    w = x / (x + 1.0)
    return (gamma_fn(lam - pe + 2.0) / (lam * (lam + 1.0)) * w ** lam
            * gauss_2f1(lam, pe, lam + 2.0, w))


_I15_SIDES = {
    "integral": Side(_i15_integral, frozenset({"numerics.quad",
                                               "specfun.gamma"})),
    "hyper_neg": Side(_i15_hyper_neg, frozenset({"specfun.hyp2f1.neg",
                                                 "specfun.gamma"})),
    "hyper_pos": Side(_i15_hyper_pos, frozenset({"specfun.hyp2f1.pos",
                                                 "specfun.gamma"})),
}


def _i15_lhs(p: Params) -> float:
    return _I15_SIDES[p["pair"].split("/")[0]].fn(p)


def _i15_rhs(p: Params) -> float:
    return _I15_SIDES[p["pair"].split("/")[1]].fn(p)


def _i16_lhs(p: Params) -> float:
    f = default_thorin_corpus()[p["instance"]]
    x = p["x"]
    h = 1e-4 * x
    deriv = (f(x + h) - f(x - h)) / (2.0 * h)
    return x ** (1.0 - f.lam) * deriv


def _i16_rhs(p: Params) -> float:
    f = default_thorin_corpus()[p["instance"]]
    return f.stieltjes_factor()(p["x"], representation="laplace_form")


def _i17_case(p: Params) -> ThorinBernsteinFn:
    return ThorinBernsteinFn(p["lam"], p["alpha"], a=p["a"], b=p["b"],
                             sigma=point_mass(p["c"]))


def _i17_lhs(p: Params) -> float:
    return laplace_of_thorin(_i17_case(p), p["x"])["stieltjes_part"]


def _i17_rhs(p: Params) -> float:
    return laplace_of_thorin(_i17_case(p), p["x"])["double_form"]


def _i18_lhs(p: Params) -> float:
    return discrete_phi_derivative(point_mass(p["c"]), p["alpha"],
                                   p["n"] - 1, p["t"])


def _i18_rhs(p: Params) -> float:
    sn = build_sigma_n(point_mass(p["c"]), p["alpha"], p["n"])
    return p["t"] ** (-p["alpha"]) * laplace_quadrature(sn, p["t"])


def _gamma2_exp(t: float) -> float:
    return lower_inc_gamma(2.0, t) * math.exp(-t)


_I19_FUNCTIONS = {
    "exp": lambda t: math.exp(-t),
    "texp": lambda t: t * math.exp(-t),
    "gamma2exp": _gamma2_exp,
}

_I19_MEASURES = {
    "eps1": point_mass(1.0),
    "atoms": point_mass(0.5) + point_mass(2.0, 0.7),
    "gamma21": Measure(pieces=(PowerExp(2.0, rate=1.0),)),
}


def _i19_lhs(p: Params) -> float:
    return fubini_check(_I19_FUNCTIONS[p["g"]], _I19_MEASURES[p["mu"]])[0]


def _i19_rhs(p: Params) -> float:
    return fubini_check(_I19_FUNCTIONS[p["g"]], _I19_MEASURES[p["mu"]])[1]


def _i20_measures(p: Params) -> Tuple[Measure, Measure]:
    kind = p["kind"]
    if kind == "atoms":
        return point_mass(p["a"]), point_mass(p["b2"], 0.7)
    if kind == "atom_mr":
        return point_mass(p["a"]), m_r(p["r"])
    if kind == "powerexp":
        return (Measure(pieces=(PowerExp(1.0, rate=1.0),)),
                Measure(pieces=(PowerExp(1.5, rate=1.0),)))
    raise ValueError(kind)


def _i20_lhs(p: Params) -> float:
    beta = p["beta"]
    mu, nu = _i20_measures(p)
    lmu = mu.laplace
    lnu = nu.laplace
    if p["kind"] == "powerexp":
        tail = 3.5 - beta
    elif p["kind"] == "atom_mr":
        tail = None  # exponential from the atom factor
    else:
        tail = None
    sig = beta - 1.0 - (p["r"] if p["kind"] == "atom_mr" else 0.0)
    return integrate_semi_infinite(
        lambda t: t ** (beta - 1.0) * lmu(t) * lnu(t),
        0.0, _spec(sig), tail_power=tail).value


def _i20_rhs(p: Params) -> float:
    beta = p["beta"]
    mu, nu = _i20_measures(p)
    conv = convolve(mu, nu)
    total = sum(mass * loc ** (-beta) for loc, mass in conv.atoms)
    for piece in conv.pieces:
        lo, hi = piece.support()
        dtp = piece.density_tail_power()
        tail = None if dtp is None else dtp + beta
        sig = piece.left_exponent()
        if lo == 0.0 and sig is not None:
            sig -= beta  # the s^-beta weight sharpens the endpoint power
        total += integrate_semi_infinite(
            lambda s, piece=piece: piece.density(s) * s ** (-beta),
            lo, _spec(sig), tail_power=tail).value
    return gamma_fn(beta) * total


def _i21_lhs(p: Params) -> float:
    k = p["k"]
    return k * sup_h_k(k)


def _i21_rhs(p: Params) -> float:
    return math.e


def _n1_g(z: complex) -> complex:
    # Laplace transform of 2(1-t) on (0,1): completely monotonic on (0,inf)
    # but not a Stieltjes function.
    return 2.0 * ((1.0 - cmath.exp(-z)) / z
                  - (1.0 - (1.0 + z) * cmath.exp(-z)) / (z * z))


def _n1_lhs(p: Params) -> float:
    z = p["r"] * cmath.exp(1j * p["theta"])
    return _n1_g(z).imag


def _n1_rhs(p: Params) -> float:
    return 0.0


# ---------------------------------------------------------------------------
# Grids


def _grid(*items: Params) -> Tuple[Params, ...]:
    return tuple(items)


def _i1_grid() -> Tuple[Params, ...]:
    return tuple({"lam": lam, "x": x, "s": s}
                 for lam in _LAMS for x in _XS for s in _SCS)


def _i2_grid() -> Tuple[Params, ...]:
    pts: List[Params] = []
    for pair in ("double", "beta"):
        for lam in _LAMS:
            for alpha in _alphas(lam):
                for x in _XS:
                    for c in _SCS:
                        pts.append({"mu": "point", "pair": pair, "lam": lam,
                                    "alpha": alpha, "x": x, "c": c})
        for lam in _LAMS:
            # m_1 needs 0 < alpha < lam; integer alpha is excluded because
            # the beta side then meets the logarithmic z -> 1 regime.
            for alpha in _alphas(lam):
                if 0.0 < alpha < lam and alpha != math.floor(alpha):
                    for x in _XS:
                        pts.append({"mu": "m1", "pair": pair, "lam": lam,
                                    "alpha": alpha, "x": x})
    return tuple(pts)


def _i3_grid() -> Tuple[Params, ...]:
    return tuple({"lam": lam, "alpha": alpha, "x": x, "s": s}
                 for lam in _LAMS for alpha in _alphas(lam)
                 for x in _XS for s in _SCS)


def _i5_grid() -> Tuple[Params, ...]:
    return tuple({"lam": lam, "alpha": alpha, "z": z}
                 for lam in _LAMS for alpha in (-0.5, 0.5, 1.7)
                 for z in (-0.6, -0.2, 0.3, 0.7, 0.95))


def _i6_grid() -> Tuple[Params, ...]:
    return tuple({"n": n, "c": c, "x": x}
                 for n in (1, 2, 3) for c in _SCS for x in _XS)


def _i8_grid() -> Tuple[Params, ...]:
    return tuple({"mu": mu, "x": x} for mu in ("c05", "c2", "two")
                 for x in _XS)


def _i9_grid() -> Tuple[Params, ...]:
    return tuple({"alpha": 0.5, "c": c, "x": x, "a": a}
                 for c in _SCS for x in _XS for a in (0.0, 0.3))


def _i10_grid() -> Tuple[Params, ...]:
    pts: List[Params] = []
    for pq, q in ((1, 2), (1, 3), (2, 3)):
        for z in (0.2, 0.4, 0.7):
            pts.append({"form": "roots", "p": pq, "q": q, "z": z})
    for z in (0.2, 0.4, 0.7):
        pts.append({"form": "tanh", "p": 1, "q": 2, "z": z})
    return tuple(pts)


def _i11_grid() -> Tuple[Params, ...]:
    pts: List[Params] = []
    for lam in _LAMS:
        for beta in _BETAS:
            for n in (1, 2):
                if beta + n < lam + 1.0:
                    for c in _SCS:
                        for x in _XS:
                            pts.append({"lam": lam, "beta": beta, "n": n,
                                        "c": c, "x": x})
    return tuple(pts)


def _i12_grid() -> Tuple[Params, ...]:
    return tuple({"lam": lam, "x": x} for lam in _LAMS for x in _XS)


def _i13_grid() -> Tuple[Params, ...]:
    return tuple({"lam": lam, "p": pe, "x": x}
                 for lam in _LAMS for pe in _PS for x in _XS)


def _i15_grid() -> Tuple[Params, ...]:
    pts: List[Params] = []
    for pair in ("integral/hyper_neg", "integral/hyper_pos",
                 "hyper_neg/hyper_pos"):
        for lam in _LAMS:
            for pe in _PS:
                if pe < lam + 1.0:
                    for x in _XS:
                        pts.append({"pair": pair, "lam": lam, "p": pe, "x": x})
    return tuple(pts)


def _i16_grid() -> Tuple[Params, ...]:
    return tuple({"instance": i, "x": x}
                 for i in range(len(default_thorin_corpus())) for x in _XS)


def _i17_grid() -> Tuple[Params, ...]:
    pairs = ((0.5, -0.5), (1.0, 0.5), (1.0, 1.0), (2.5, 1.0), (2.5, 2.0))
    pts: List[Params] = []
    for lam, alpha in pairs:
        for c in _SCS:
            for x in _XS:
                for a, b in ((0.0, 0.0), (0.5, 0.7)):
                    pts.append({"lam": lam, "alpha": alpha, "c": c, "x": x,
                                "a": a, "b": b})
    return tuple(pts)


def _i18_grid() -> Tuple[Params, ...]:
    return tuple({"alpha": alpha, "n": n, "c": c, "t": t}
                 for alpha in (0.0, 0.5, 1.5) for n in (1, 2, 3)
                 for c in _SCS for t in (0.5, 1.0, 2.0))


def _i19_grid() -> Tuple[Params, ...]:
    return tuple({"g": g, "mu": mu}
                 for g in ("exp", "texp", "gamma2exp")
                 for mu in ("eps1", "atoms", "gamma21"))


def _i20_grid() -> Tuple[Params, ...]:
    pts: List[Params] = []
    for beta in _BETAS:
        for a in _SCS:
            pts.append({"kind": "atoms", "beta": beta, "a": a, "b2": 2.0,
                        "r": 0.0})
    for r in (1.0, 1.25):
        pts.append({"kind": "atom_mr", "beta": 1.5, "a": 0.5, "b2": 0.0,
                    "r": r})
    for beta in _BETAS:
        pts.append({"kind": "powerexp", "beta": beta, "a": 0.0, "b2": 0.0,
                    "r": 0.0})
    return tuple(pts)


def _i21_grid() -> Tuple[Params, ...]:
    return tuple({"k": k} for k in range(1, 101))


def _n1_grid() -> Tuple[Params, ...]:
    return tuple({"r": r, "theta": th}
                 for r in (0.5, 1.0, 2.0, 4.0, 8.0)
                 for th in (math.pi / 6, math.pi / 3, math.pi / 2,
                            2 * math.pi / 3, 5 * math.pi / 6))


# ---------------------------------------------------------------------------
# Registry


def default_registry() -> Tuple[IdentityCase, ...]:
    T = frozenset
    cases = [
        IdentityCase(
            "I1",
            "int_0^inf e^(-x t) gamma(lam, t s) dt = Gamma(lam) s^lam / "
            "(x (x+s)^lam)",
            Side(_i1_lhs, T({"numerics.quad", "specfun.lower_inc_gamma"})),
            Side(_i1_rhs, T({"specfun.gamma", "closed.power"})),
            _i1_grid(), 1e-8),
        IdentityCase(
            "I2",
            "int gamma(lam, x t) t^-alpha L(mu)(t) dt against the double "
            "u-integral (pair=double) and the incomplete-beta form "
            "(pair=beta)",
            Side(_i2_defining, T({"numerics.quad",
                                  "specfun.lower_inc_gamma"})),
            Side(lambda p: _i2_double(p) if p["pair"] == "double"
                 else _i2_beta(p),
                 T({"numerics.quad", "specfun.inc_beta", "specfun.gamma"})),
            _i2_grid(), 1e-6),
        IdentityCase(
            "I3",
            "defining integral (point mass) = Gamma(lam+1-alpha) x^lam/lam "
            "2F1(alpha,1;lam+1;-x/s) (s+x)^(alpha-lam)/s",
            Side(_i2_defining, T({"numerics.quad",
                                  "specfun.lower_inc_gamma"})),
            Side(_i3_rhs, T({"specfun.hyp2f1.neg", "specfun.gamma"})),
            tuple(dict(p, mu="point", pair="-", c=p["s"])
                  for p in _i3_grid()), 1e-6),
        IdentityCase(
            "I4",
            "2F1(lam,alpha;lam+1;x/(x+s)) form = incomplete-beta form "
            "(computed by direct quadrature), point mass",
            Side(_i4_lhs, T({"specfun.hyp2f1.pos", "specfun.gamma"})),
            Side(_i4_rhs, T({"numerics.quad", "specfun.gamma"})),
            _i3_grid(), 1e-6),
        IdentityCase(
            "I5",
            "2F1(lam,alpha;lam+1;z)/lam = z^-lam int_0^(z/(1-z)) u^(lam-1) "
            "(1+u)^(alpha-lam-1) du",
            Side(_i5_lhs, T({"specfun.hyp2f1.pos", "specfun.hyp2f1.neg"})),
            Side(_i5_rhs, T({"numerics.quad"})),
            _i5_grid(), 1e-8),
        IdentityCase(
            "I6",
            "int gamma(n, x t) t^-n e^(-c t) dt = (-1)^(n-1) c^(n-1) "
            "[log((x+c)/c) + sum (-1)^k x^k/(k c^k)]",
            Side(_i6_lhs, T({"numerics.quad", "specfun.lower_inc_gamma"})),
            Side(_i6_rhs, T({"closed.log"})),
            _i6_grid(), 1e-6),
        IdentityCase(
            "I7",
            "(x/c)^n int e^(-x t/c) E_n(t) dt = the alternating log form",
            Side(_i7_lhs, T({"numerics.quad", "specfun.exp_integral"})),
            Side(_i7_rhs, T({"closed.log"})),
            _i6_grid(), 1e-6),
        IdentityCase(
            "I8",
            "sum m_i log((x+c_i)/c_i) = int gamma(1, x t) t^-1 L(mu)(t) dt",
            Side(_i8_lhs, T({"closed.log"})),
            Side(_i8_rhs, T({"numerics.quad", "specfun.lower_inc_gamma"})),
            _i8_grid(), 1e-8),
        IdentityCase(
            "I9",
            "f'(x) = a + Gamma(2-alpha)/(x+c)^(2-alpha) for lam = 1, "
            "0 < alpha < 1 (left side by differentiated defining integral)",
            Side(_i9_lhs, T({"numerics.quad"})),
            Side(_i9_rhs, T({"specfun.gamma", "closed.power"})),
            _i9_grid(), 1e-8),
        IdentityCase(
            "I10",
            "roots-of-unity resummation of sum z^(k+p/q)/(k+p/q), with the "
            "arctanh special case for half-integer order",
            Side(_i10_lhs, T({"cmath.roots", "closed.atanh"})),
            Side(_i10_rhs, T({"series.power"})),
            _i10_grid(), 1e-8),
        IdentityCase(
            "I11",
            "int gamma(lam,x t) t^(-beta-n) e^(-c t) dt = Gamma(lam-beta+1) "
            "int B(lam,1-beta;x/(x+t)) xi_n(t) t^(beta-1) dt, mu = eps_c",
            Side(_i11_lhs, T({"numerics.quad", "specfun.lower_inc_gamma"})),
            Side(_i11_rhs, T({"numerics.quad", "specfun.inc_beta",
                              "specfun.gamma"})),
            _i11_grid(), 1e-6),
        IdentityCase(
            "I12",
            "1 - lam x^lam e^x Gamma(-lam, x) = (1/Gamma(lam)) "
            "int gamma(lam, x t) (1+t)^-2 dt",
            Side(_i12_lhs, T({"specfun.upper_inc_gamma",
                              "classes.lomax_closed"})),
            Side(_i12_rhs, T({"numerics.quad", "specfun.lower_inc_gamma",
                              "specfun.gamma", "classes.lomax_quad"})),
            _i12_grid(), 1e-6),
        IdentityCase(
            "I13",
            "int gamma(lam, x t) E_p(t) dt = Gamma(lam) x^-p "
            "B(lam+p, -p; x/(x+1))",
            Side(_i13_lhs, T({"numerics.quad", "specfun.lower_inc_gamma",
                              "specfun.exp_integral"})),
            Side(_i13_rhs, T({"specfun.inc_beta", "specfun.gamma"})),
            _i13_grid(), 1e-8),
        IdentityCase(
            "I14",
            "Gamma(lam+p)/Gamma(p) int_0^1 B(lam, p; x(1-u)/(1+x(1-u))) "
            "u^(p-1) du = Gamma(lam) x^-p B(lam+p, -p; x/(x+1)) "
            "(right side by direct quadrature)",
            Side(_i14_lhs, T({"numerics.quad", "specfun.inc_beta",
                              "specfun.gamma"})),
            Side(_i14_rhs, T({"numerics.quad", "specfun.gamma"})),
            _i13_grid(), 1e-6),
        IdentityCase(
            "I15",
            "the s-integral over the E_p kernel, the 2F1(..., -x) form and "
            "the Pfaff-transformed 2F1(..., x/(x+1)) form agree pairwise",
            Side(_i15_lhs, T({"numerics.quad", "specfun.hyp2f1.neg",
                              "specfun.gamma"})),
            Side(_i15_rhs, T({"specfun.hyp2f1.pos", "specfun.gamma"})),
            _i15_grid(), 1e-6),
        IdentityCase(
            "I16",
            "x^(1-lam) f'(x) (finite difference of the beta-form "
            "evaluation) = the order-(lam+1-alpha) Stieltjes function "
            "through its double-Laplace representation",
            Side(_i16_lhs, T({"classes.eval_beta", "numerics.fd",
                              "specfun.inc_beta", "specfun.gamma"})),
            Side(_i16_rhs, T({"classes.stieltjes_laplace", "numerics.quad",
                              "measures.laplace", "specfun.gamma"})),
            _i16_grid(), 1e-6),
        IdentityCase(
            "I17",
            "x^alpha L(f)(x) - b x^(alpha-1) = a Gamma(lam+1) "
            "x^(alpha-lam-1) + the double-integral Stieltjes form",
            Side(_i17_lhs, T({"numerics.quad", "classes.eval_beta",
                              "specfun.inc_beta", "specfun.gamma"})),
            Side(_i17_rhs, T({"numerics.quad", "closed.double_integral",
                              "specfun.gamma"})),
            _i17_grid(), 1e-6),
        IdentityCase(
            "I18",
            "(-1)^(n-1) phi^(n-1)(t) (Leibniz closed form) = t^-alpha "
            "L(sigma_n)(t) with sigma_n built from powers and convolutions",
            Side(_i18_lhs, T({"classes.leibniz"})),
            Side(_i18_rhs, T({"measures.convolve", "measures.laplace_quad",
                              "numerics.quad"})),
            _i18_grid(), 1e-6),
        IdentityCase(
            "I19",
            "int g(t) L(mu)(t) dt = int L(g)(s) dmu(s)",
            Side(_i19_lhs, T({"numerics.quad", "measures.laplace"})),
            Side(_i19_rhs, T({"numerics.quad", "measures.atoms"})),
            _i19_grid(), 1e-8),
        IdentityCase(
            "I20",
            "int t^(beta-1) L(mu)(t) L(nu)(t) dt = Gamma(beta) "
            "int s^-beta d(mu*nu)(s)",
            Side(_i20_lhs, T({"numerics.quad", "measures.laplace"})),
            Side(_i20_rhs, T({"numerics.quad", "measures.convolve",
                              "specfun.gamma"})),
            _i20_grid(), 1e-8),
        IdentityCase(
            "I21",
            "k sup_s [(1+s/k)^-k - e^-s] <= e for k = 1..100",
            Side(_i21_lhs, T({"classes.h_k"})),
            Side(_i21_rhs, T({"closed.const"})),
            _i21_grid(), 0.0, mode="upper_bound"),
        IdentityCase(
            "N1",
            "the Laplace transform of 2(1-t) 1_(0,1)(t) has Im g > 0 "
            "somewhere in the upper half plane (not a Stieltjes function)",
            Side(_n1_lhs, T({"closed.laplace_witness"})),
            Side(_n1_rhs, T({"closed.const"})),
            _n1_grid(), 0.0, mode="positivity", threshold=1e-6),
    ]
    return tuple(cases)
