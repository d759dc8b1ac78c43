"""Double-exponential quadrature for beta-type integrals on [0, 1].

Integrands are called as ``f(t, u)`` with ``u = 1 - t`` supplied separately:
near t = 1 the difference 1 - t cannot be recovered from t in floating
point, and the (1 - t)^(beta-1) factors need it to full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np

from qsv.classical import gamma_ratio, hyp2f1, hyp2f1_array, shifted_factorial
from qsv.errors import ConstraintError, DivergenceError, PoleError, TruncationError
from qsv.qcore import INNER_POLICY
from qsv.result import CheckResult, compare, guarded

CLASSICAL_TOL = 1e-7
HALFLINE_TOL = 1e-6
CROSS_TOL = 1e-8

# admissible-region margins shared by samplers and checks
ARG_BOUND = 0.95
DEN_MARGIN = 1e-3

# the largest |2y| for which 1/(1+e^{2y}) is still a normal double
_EXP_LIMIT = 690.0
# target size of the neglected endpoint contribution (relative)
_TAIL_TARGET = 1e-18


@dataclass(frozen=True)
class QuadratureRequest:
    """An integral over (0, 1).

    ``endpoint_exponents`` (p0, p1) describe f ~ t^p0 near 0 and (1-t)^p1
    near 1; they set how far into each endpoint the nodes must reach.
    """

    integrand: Callable
    endpoint_exponents: tuple = (0.0, 0.0)
    tol: float = 1e-12
    max_refinement: int = 10

    def __post_init__(self):
        p0, p1 = self.endpoint_exponents
        if not (p0 > -1 and p1 > -1):
            raise ValueError("endpoint exponents must exceed -1 for integrability")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    levels: int
    nodes: int
    converged: bool
    history: tuple = ()


def _tanh_sinh_nodes(x):
    """Map x in R to (t, u, weight) for dt over (0, 1)."""
    y = np.clip(0.5 * math.pi * np.sinh(x), -_EXP_LIMIT / 2, _EXP_LIMIT / 2)
    t = 1.0 / (1.0 + np.exp(-2 * y))
    u = 1.0 / (1.0 + np.exp(2 * y))
    w = math.pi * np.cosh(x) * t * u
    return t, u, w


def _exp_sinh_halfline_nodes(x):
    """t = s/(1+s) with s = exp((pi/2) sinh x) over s in (0, inf).

    dt = ds/(1+s)^2 = t u ds/s, and ds/s = (pi/2) cosh x dx.
    """
    v = np.clip(0.5 * math.pi * np.sinh(x), -_EXP_LIMIT, _EXP_LIMIT)
    t = 1.0 / (1.0 + np.exp(-v))
    u = 1.0 / (1.0 + np.exp(v))
    w = 0.5 * math.pi * np.cosh(x) * t * u
    return t, u, w


def _x_limits(exponents, scale):
    """How far the x-grid must reach so the cut endpoint mass is negligible.

    Near t = 0 the integrand times weight behaves like t^(p0+1) and
    t ~ exp(-scale*|y|), so |y| = log(1/target)/(scale (p0+1)) is enough.
    """
    limits = []
    for p in exponents:
        y = math.log(1 / _TAIL_TARGET) / (scale * (p + 1)) + 4.0
        y = min(y, _EXP_LIMIT / scale)
        limits.append(math.asinh(y / (0.5 * math.pi)))
    return limits  # (toward t=0, toward t=1)


def _de_integrate(req: QuadratureRequest, node_map, scale) -> QuadratureResult:
    lo, hi = _x_limits(req.endpoint_exponents, scale)
    h = 1.0
    contributions = []

    def evaluate(xs):
        t, u, w = node_map(xs)
        values = np.asarray(req.integrand(t, u), dtype=float) * w
        if not np.all(np.isfinite(values)):
            i = int(np.argmax(~np.isfinite(values)))
            raise DivergenceError(f"integrand not finite at t={t[i]!r}", index=i)
        return values.tolist()

    xs = np.arange(-math.floor(lo / h), math.floor(hi / h) + 1) * h
    contributions.extend(evaluate(xs))
    estimates = [h * math.fsum(contributions)]
    error = math.inf
    for level in range(1, req.max_refinement + 1):
        h /= 2
        # only the odd multiples of the new step are new nodes
        n_lo, n_hi = math.floor(lo / h), math.floor(hi / h)
        odd = np.arange(-n_lo, n_hi + 1)
        odd = odd[odd % 2 != 0] * h
        contributions.extend(evaluate(odd))
        estimates.append(h * math.fsum(contributions))
        error = abs(estimates[-1] - estimates[-2])
        if level >= 3 and error <= req.tol * max(abs(estimates[-1]), 1e-300):
            return QuadratureResult(estimates[-1], error, level, len(contributions), True,
                                    tuple(estimates))
    return QuadratureResult(estimates[-1], error, req.max_refinement, len(contributions), False,
                            tuple(estimates))


def integrate(req: QuadratureRequest) -> QuadratureResult:
    """Tanh-sinh quadrature over (0, 1) with step halving until two levels agree."""
    return _de_integrate(req, _tanh_sinh_nodes, 2.0)


def integrate_halfline(req: QuadratureRequest) -> QuadratureResult:
    """The same integral after t = s/(1+s), s over (0, inf), by exp-sinh."""
    return _de_integrate(req, _exp_sinh_halfline_nodes, 1.0)


def _value_or_raise(res: QuadratureResult) -> float:
    if not res.converged:
        raise TruncationError(f"quadrature did not settle (last change {res.error:.3g})",
                              partial=res.value, terms=res.nodes)
    return res.value


# ---------------------------------------------------------------------------
# the beta family


class Selector(str, Enum):
    BETAF_1_1 = "BETAF_1_1"
    SPEC2_1_2 = "SPEC2_1_2"
    SPEC3_1_3 = "SPEC3_1_3"
    BETAT_5_1 = "BETAT_5_1"
    SPEC1_5_2 = "SPEC1_5_2"
    ERDELYI_5_4 = "ERDELYI_5_4"
    SPEC5_5_5 = "SPEC5_5_5"
    BETAT2_5_6 = "BETAT2_5_6"
    SPEC4_5_7 = "SPEC4_5_7"


@dataclass(frozen=True)
class BetaFamilyParams:
    """Parameters of one classical beta-type integral.

    ``b``, ``mu``, ``lam`` and ``x`` are only read by the fractional
    integral (ERDELYI_5_4), where ``a``, ``b``, ``c`` are the 2F1 parameters.
    """

    alpha: float = 1.0
    beta: float = 1.0
    a: float = 0.0
    c: float = 10.0
    e: float = 0.0
    m: int = 0
    selector: Selector = Selector.BETAT_5_1
    b: float = 0.0
    mu: float = 1.0
    lam: float = 1.0
    x: float = 0.0


def _positive(values, what, scale=1.0):
    values = np.asarray(values)
    if np.min(values) <= DEN_MARGIN * max(1.0, abs(scale)):
        raise ConstraintError(f"{what} must stay positive on [0, 1]")
    return values


def _bases(a, c, t):
    """The three algebraic bases of the a, c family, screened to be positive."""
    s = a + t
    D = _positive(c - a * s, "c - a(a+t)", c)
    E = _positive(c - (a + 1) * s, "c - (a+1)(a+t)", c)
    F = _positive(c - s * s, "c - (a+t)^2", c)
    return D, E, F


def _screen_bases(a, c):
    """Positivity of the bases on all of [0, 1], checked on a fine grid and
    at the quadratic's vertex where it could dip."""
    grid = np.concatenate([np.linspace(0, 1, 401), [min(max(-a, 0.0), 1.0)]])
    _bases(a, c, grid)
    if c - (a + 1) ** 2 <= 0:
        raise ConstraintError("c - (a+1)^2 must be positive")


def _check_arg(x, what):
    if np.max(np.abs(x), initial=0.0) > ARG_BOUND:
        raise DivergenceError(f"{what}: 2F1 argument exceeds {ARG_BOUND}")


def _terminating_2f1_neg_m(beta, m, x):
    """2F1(-beta, -m; -2beta; x) as a degree-m polynomial."""
    coeff, total = 1.0, np.ones_like(x)
    power = np.ones_like(x)
    for j in range(m):
        den = (-2 * beta + j) * (j + 1)
        if abs(-2 * beta + j) <= 1e-12:
            raise PoleError(f"(-2beta)_j vanishes at j={j + 1}", index=j + 1, factor="-2beta")
        coeff *= (-beta + j) * (-m + j) / den
        power = power * x
        total = total + coeff * power
    return total


def _family_core(a, c, beta, t):
    """(c-(a+1)^2) (c-a(a+t))^beta (c-(a+1)(a+t))^(beta-1) / (c-(a+t)^2)^(2beta)."""
    D, E, F = _bases(a, c, t)
    return (c - (a + 1) ** 2) * np.exp(beta * np.log(D) + (beta - 1) * np.log(E)
                                       - 2 * beta * np.log(F)), D


def _request(p: BetaFamilyParams, tol: float):
    """Integrand, endpoint exponents and closed form for one selector."""
    S = Selector
    al, be, a, c, e, m = p.alpha, p.beta, p.a, p.c, p.e, p.m
    sel = S(p.selector)
    uses_alpha = sel in (S.BETAF_1_1, S.BETAT_5_1, S.SPEC1_5_2, S.SPEC5_5_5)
    if sel is not S.ERDELYI_5_4 and not (be > 0 and (al > 0 or not uses_alpha)):
        raise ConstraintError("needs alpha, beta > 0")

    if sel is S.BETAF_1_1:
        def f(t, u):
            return t ** (al - 1) * u ** (be - 1)
        return f, (al - 1, be - 1), gamma_ratio([al, be], [al + be])

    if sel is S.BETAT_5_1:
        _screen_bases(a, c)

        def f(t, u):
            core, D = _family_core(a, c, be, t)
            arg = (a + t) * t / D
            _check_arg(arg, "(a+t)t/(c-a(a+t))")
            return core * hyp2f1_array(al - be - 1, -be, al, arg, INNER_POLICY) \
                * t ** (al - 1) * u ** (be - 1)
        return f, (al - 1, be - 1), gamma_ratio([al, be], [al + be])

    if sel is S.SPEC2_1_2:
        _screen_bases(a, c)

        def f(t, u):
            core, _ = _family_core(a, c, be, t)
            return core * t**be * u ** (be - 1)
        return f, (be, be - 1), gamma_ratio([be, be], [2 * be]) / 2

    if sel is S.SPEC3_1_3:
        _screen_bases(a, c)

        def f(t, u):
            D, E, F = _bases(a, c, t)
            core = (c - (a + 1) ** 2) * np.exp((be - 1) * (np.log(D) + np.log(E))
                                               - 2 * be * np.log(F))
            return core * (c - (a - t) * (a + t)) * t ** (be - 1) * u ** (be - 1)
        return f, (be - 1, be - 1), gamma_ratio([be, be], [2 * be])

    if sel is S.SPEC1_5_2:
        if not a > 0:
            raise ConstraintError("needs a > 0")
        beta_int = float(be).is_integer()
        if 1 / a > ARG_BOUND and not beta_int:
            raise ConstraintError(f"needs 1/a <= {ARG_BOUND} unless the 2F1 terminates")

        def f(t, u):
            lead = np.exp(be * math.log(a) + (be + 1) * math.log(a + 1)
                          - (2 * be + 1) * np.log(a + t))
            return lead * hyp2f1_array(al - be - 1, -be, al, -t / a, INNER_POLICY) \
                * t ** (al - 1) * u ** (be - 1)
        return f, (al - 1, be - 1), gamma_ratio([al, be], [al + be])

    if sel is S.SPEC5_5_5:
        if not c > 1 / ARG_BOUND:
            raise ConstraintError(f"needs c > {1 / ARG_BOUND:.4g}")

        def f(t, u):
            lead = (c - 1) * np.exp(be * math.log(c) + (be - 1) * np.log(c - t)
                                    - 2 * be * np.log(c - t * t))
            return lead * hyp2f1_array(al - be - 1, -be, al, t * t / c, INNER_POLICY) \
                * t ** (al - 1) * u ** (be - 1)
        return f, (al - 1, be - 1), gamma_ratio([al, be], [al + be])

    if sel in (S.BETAT2_5_6, S.SPEC4_5_7):
        if m < 0:
            raise ConstraintError("m must be a nonnegative integer")
        if not be > max(0, m - 1):
            raise ConstraintError("needs beta > max(0, m - 1)")
        if not e < 1 - DEN_MARGIN:
            raise ConstraintError("needs e < 1 so that 1 - et > 0 on [0, 1]")
        if sel is S.BETAT2_5_6:
            _screen_bases(a, c)

        def f(t, u):
            one_et = 1 - e * t
            if sel is S.BETAT2_5_6:
                core, D = _family_core(a, c, be, t)
                arg = (c - (a + t) ** 2) / (D * one_et)
            else:
                core, arg = 1.0, 1 / one_et
            return core * _terminating_2f1_neg_m(be, m, arg) * (one_et / (1 - e)) ** m \
                * t ** (be - m) * u ** (be - 1)
        return f, (be - m, be - 1), gamma_ratio([be, be], [2 * be]) / 2

    if sel is S.ERDELYI_5_4:
        b, mu, lam, x = p.b, p.mu, p.lam, p.x
        if not c > mu > 0:
            raise ConstraintError("needs c > mu > 0")
        if abs(x) > ARG_BOUND:
            raise ConstraintError(f"needs |x| <= {ARG_BOUND}")

        def f(t, u):
            one_xt = 1 - x * t
            return (t ** (mu - 1) * u ** (c - mu - 1) * one_xt ** (lam - a - b)
                    * hyp2f1_array(lam - a, lam - b, mu, x * t, INNER_POLICY)
                    * hyp2f1_array(a + b - lam, lam - mu, c - mu, u * x / one_xt, INNER_POLICY)
                    * gamma_ratio([c], [mu, c - mu]))
        return f, (mu - 1, c - mu - 1), float(hyp2f1(a, b, c, x, INNER_POLICY))

    raise ValueError(f"unknown selector {p.selector!r}")


CLOSED_FORM_LABEL = {
    Selector.BETAF_1_1: "Gamma(alpha)Gamma(beta)/Gamma(alpha+beta)",
    Selector.BETAT_5_1: "Gamma(alpha)Gamma(beta)/Gamma(alpha+beta)",
    Selector.SPEC1_5_2: "Gamma(alpha)Gamma(beta)/Gamma(alpha+beta)",
    Selector.SPEC5_5_5: "Gamma(alpha)Gamma(beta)/Gamma(alpha+beta)",
    Selector.SPEC2_1_2: "Gamma(beta)^2/(2 Gamma(2beta))",
    Selector.BETAT2_5_6: "Gamma(beta)^2/(2 Gamma(2beta))",
    Selector.SPEC4_5_7: "Gamma(beta)^2/(2 Gamma(2beta))",
    Selector.SPEC3_1_3: "Gamma(beta)^2/Gamma(2beta)",
    Selector.ERDELYI_5_4: "2F1(a, b; c; x)",
}


def family_integral(p: BetaFamilyParams, tol: float = 1e-12, halfline: bool = False):
    """Return ``(QuadratureResult, closed_form)`` for the selected integral."""
    f, exps, closed = _request(p, tol)
    req = QuadratureRequest(f, exps, tol)
    res = integrate_halfline(req) if halfline else integrate(req)
    return res, closed


@guarded
def check_family(p: BetaFamilyParams, tol: float = CLASSICAL_TOL) -> CheckResult:
    """Quadrature of the selected integral against its gamma-ratio closed form."""
    res, closed = family_integral(p)
    value = _value_or_raise(res)
    return compare(value, closed, tol, terms_used=res.nodes, quad_error=res.error,
                   levels=res.levels)


def check_beta(alpha, beta, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(BetaFamilyParams(alpha=alpha, beta=beta, selector=Selector.BETAF_1_1),
                        tol)


def check_betat(p: BetaFamilyParams, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(replace(p, selector=Selector.BETAT_5_1), tol)


def check_spec2(beta, a, c, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(BetaFamilyParams(beta=beta, a=a, c=c, selector=Selector.SPEC2_1_2), tol)


def check_spec3(beta, a, c, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(BetaFamilyParams(beta=beta, a=a, c=c, selector=Selector.SPEC3_1_3), tol)


def check_spec1(alpha, beta, a, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(BetaFamilyParams(alpha=alpha, beta=beta, a=a,
                                         selector=Selector.SPEC1_5_2), tol)


def check_spec5(alpha, beta, c, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(BetaFamilyParams(alpha=alpha, beta=beta, c=c,
                                         selector=Selector.SPEC5_5_5), tol)


def check_betat2(p: BetaFamilyParams, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(replace(p, selector=Selector.BETAT2_5_6), tol)


def check_spec4(beta, m: int, e, tol: float = CLASSICAL_TOL) -> CheckResult:
    return check_family(BetaFamilyParams(beta=beta, m=m, e=e, selector=Selector.SPEC4_5_7), tol)


def check_erdelyi(a, b, c, mu, lam, x, tol: float = CLASSICAL_TOL) -> CheckResult:
    """Fractional integral representation of 2F1(a, b; c; x)."""
    return check_family(BetaFamilyParams(a=a, b=b, c=c, mu=mu, lam=lam, x=x,
                                         selector=Selector.ERDELYI_5_4), tol)


# values used by the q -> 1 probes


def beta_integral(alpha, beta) -> float:
    return _value_or_raise(family_integral(
        BetaFamilyParams(alpha=alpha, beta=beta, selector=Selector.BETAF_1_1))[0])


def betat_integral(p: BetaFamilyParams) -> float:
    return _value_or_raise(family_integral(replace(p, selector=Selector.BETAT_5_1))[0])


def betat2_integral(p: BetaFamilyParams) -> float:
    return _value_or_raise(family_integral(replace(p, selector=Selector.BETAT2_5_6))[0])


# ---------------------------------------------------------------------------
# cross-checks between family members


def _pair(p1: BetaFamilyParams, p2: BetaFamilyParams, scale, tol, route) -> CheckResult:
    r1, _ = family_integral(p1)
    r2, _ = family_integral(p2)
    return compare(_value_or_raise(r1), scale * _value_or_raise(r2), tol,
                   terms_used=r1.nodes + r2.nodes, route=route)


@guarded
def betat_alpha_beta_plus_one_check(beta, a, c, tol: float = CROSS_TOL) -> CheckResult:
    return _pair(BetaFamilyParams(alpha=beta + 1, beta=beta, a=a, c=c),
                 BetaFamilyParams(beta=beta, a=a, c=c, selector=Selector.SPEC2_1_2), 1.0, tol,
                 "alpha=beta+1")


@guarded
def betat_alpha_equals_beta_check(beta, a, c, tol: float = CROSS_TOL) -> CheckResult:
    return _pair(BetaFamilyParams(alpha=beta, beta=beta, a=a, c=c),
                 BetaFamilyParams(beta=beta, a=a, c=c, selector=Selector.SPEC3_1_3), 1.0, tol,
                 "alpha=beta")


@guarded
def betat2_e0_check(beta, a, c, m: int, tol: float = CROSS_TOL) -> CheckResult:
    """At e = 0 the terminating-2F1 integrand is (-beta)_m/(-2beta)_m times the
    alpha = beta+1-m integrand (Pfaff's transformation)."""
    scale = shifted_factorial(-beta, m) / shifted_factorial(-2 * beta, m)
    return _pair(BetaFamilyParams(beta=beta, a=a, c=c, m=m, selector=Selector.BETAT2_5_6),
                 BetaFamilyParams(alpha=beta + 1 - m, beta=beta, a=a, c=c), scale, tol,
                 "e=0, alpha=beta+1-m")


@guarded
def erdelyi_route_check(alpha, beta, a, tol: float = CROSS_TOL) -> CheckResult:
    """lambda=mu=alpha, a->beta+1, b=c->alpha+beta, x->-1/a turns the fractional
    integral into the c = 0 member of the family."""
    erd = BetaFamilyParams(a=beta + 1, b=alpha + beta, c=alpha + beta, mu=alpha, lam=alpha,
                           x=-1 / a, selector=Selector.ERDELYI_5_4)
    r1, lhs = family_integral(erd)
    r2, _ = family_integral(BetaFamilyParams(alpha=alpha, beta=beta, a=a,
                                             selector=Selector.SPEC1_5_2))
    # the c=0 member equals a^beta (a+1)^(beta+1) J = B(alpha, beta) while the
    # fractional integral is Gamma(a+b)/(Gamma(a)Gamma(b)) a^(2beta+1) J
    scale = gamma_ratio([alpha + beta], [alpha, beta]) * (a / (a + 1)) ** (beta + 1)
    return compare(_value_or_raise(r1), scale * _value_or_raise(r2), tol,
                   terms_used=r1.nodes + r2.nodes, route="erdelyi -> c=0 member",
                   erdelyi_closed_form=lhs)


@guarded
def halfline_transform_check(p: BetaFamilyParams, tol: float = HALFLINE_TOL) -> CheckResult:
    """The integral over [0, 1] against the same integral after t = s/(1+s)."""
    direct, _ = family_integral(p)
    half, _ = family_integral(p, halfline=True)
    return compare(_value_or_raise(half), _value_or_raise(direct), tol,
                   terms_used=direct.nodes + half.nodes)


LIMIT_TARGET = {
    (Selector.BETAT_5_1, "c"): Selector.BETAF_1_1,
    (Selector.SPEC1_5_2, "a"): Selector.BETAF_1_1,
    (Selector.SPEC5_5_5, "c"): Selector.BETAF_1_1,
    (Selector.BETAT2_5_6, "c"): Selector.SPEC4_5_7,
}


def large_parameter_trend(p: BetaFamilyParams, which: str = "c",
                          magnitudes=(1e4, 1e6, 1e8), grid=np.linspace(0.05, 0.95, 37)):
    """Max pointwise distance between the integrand with ``which`` made large and
    the limiting integrand.  Closed forms do not depend on a or c, so the
    limit is visible only in the integrands."""
    target = LIMIT_TARGET.get((Selector(p.selector), which))
    if target is None:
        raise ValueError(f"no documented {which} -> infinity limit for {p.selector}")
    f_lim, _, _ = _request(replace(p, selector=target), 1e-12)
    limit = f_lim(grid, 1 - grid)
    out = []
    for mag in magnitudes:
        f, _, _ = _request(replace(p, **{which: mag}), 1e-12)
        out.append(float(np.max(np.abs(f(grid, 1 - grid) - limit))))
    return out


# ---------------------------------------------------------------------------
# seeded samplers

BETA_GRID = (0.5, 0.9, 1.2, 2.5)


def _sample_beta(rng, low=0.3, high=3.0):
    """Half the draws come from the fixed non-integer grid."""
    if rng.random() < 0.5:
        return float(BETA_GRID[int(rng.integers(len(BETA_GRID)))])
    return float(rng.uniform(low, high))


def _admissible(p: BetaFamilyParams) -> bool:
    try:
        f, _, _ = _request(p, 1e-12)
        grid = np.linspace(1e-6, 1 - 1e-6, 201)
        f(grid, 1 - grid)
    except (ConstraintError, DivergenceError, PoleError, ZeroDivisionError):
        return False
    return True


def sample_family(selector: Selector, rng, attempts: int = 2000):
    """One admissible parameter set for ``selector`` or None."""
    S = Selector
    sel = S(selector)
    for _ in range(attempts):
        beta = _sample_beta(rng)
        alpha = float(rng.uniform(0.3, 4.0))
        a = float(rng.uniform(-0.5, 1.5))
        c = float(rng.uniform(6.0, 25.0))
        if sel is S.BETAF_1_1:
            p = BetaFamilyParams(alpha=alpha, beta=beta, selector=sel)
        elif sel in (S.BETAT_5_1, S.SPEC2_1_2, S.SPEC3_1_3):
            p = BetaFamilyParams(alpha=alpha, beta=beta, a=a, c=c, selector=sel)
        elif sel is S.SPEC1_5_2:
            p = BetaFamilyParams(alpha=alpha, beta=beta, a=float(rng.uniform(1.1, 6.0)),
                                 selector=sel)
        elif sel is S.SPEC5_5_5:
            p = BetaFamilyParams(alpha=alpha, beta=beta, c=float(rng.uniform(1.2, 20.0)),
                                 selector=sel)
        elif sel in (S.BETAT2_5_6, S.SPEC4_5_7):
            m = int(rng.integers(0, 4))
            if beta <= max(0, m - 1) + 0.05:
                beta = float(rng.uniform(max(0.3, m - 0.95), m + 2.0))
            if any(abs(2 * beta - j) < 0.05 for j in range(m)):
                continue
            p = BetaFamilyParams(beta=beta, a=a, c=c, e=float(rng.uniform(-0.9, 0.9)), m=m,
                                 selector=sel)
        elif sel is S.ERDELYI_5_4:
            cc = float(rng.uniform(1.0, 4.0))
            p = BetaFamilyParams(a=float(rng.uniform(-1.5, 2.0)), b=float(rng.uniform(-1.5, 2.0)),
                                 c=cc, mu=float(rng.uniform(0.2, cc - 0.2)),
                                 lam=float(rng.uniform(-1.0, 2.0)),
                                 x=float(rng.uniform(-0.8, 0.8)), selector=sel)
        else:
            raise ValueError(f"unknown selector {selector!r}")
        if _admissible(p):
            return p
    return None
