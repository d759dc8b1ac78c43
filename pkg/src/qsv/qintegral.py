"""Thomae q-integrals and the q-beta type evaluations built on them.

    int_0^1 f(t) d_q t = (1 - q) sum_{k>=0} f(q^k) q^k

Integrands are evaluated on whole blocks of nodes t = q^k at once, which is
what keeps q = 0.999 (tens of thousands of nodes) affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from qsv.errors import ConstraintError, DivergenceError, PoleError, TruncationError
from qsv.qcore import (
    DEFAULT_POLICY,
    INNER_POLICY,
    SeriesSpec,
    TruncationPolicy,
    budget_for_base,
    check_base,
    eval_series_counted,
    qgamma_ratio,
    qpoch_finite,
    log_qpoch_infinite_array,
    sum_terms,
)
from qsv.result import DIVERGED, FAIL, PASS, CheckResult, compare, guarded

Q_BETA_TOL = 1e-10
QBETAT_TOL = 1e-8

CHUNK = 4096
# |denominator| at or below this is treated as a pole
POLE_ATOL = 1e-12

DEFAULT_Q_SCHEDULE = (0.9, 0.99, 0.999)
LARGE_MAGNITUDES = (1e4, 1e6, 1e8)


@dataclass(frozen=True)
class QIntegrand:
    """A function of t sampled at t = q^k.

    With ``vectorized`` set the evaluator receives a numpy array of nodes
    (and the matching array of k) and returns an array.
    """

    evaluator: Callable
    label: str = ""
    vectorized: bool = False


def q_integrate_counted(f: QIntegrand, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Return ``((1-q) sum f(q^k) q^k, nodes_used)``."""
    q = float(check_base(q))
    policy = budget_for_base(policy, q)
    if not f.vectorized:
        total, used = sum_terms(lambda k: f.evaluator(q**k) * q**k, policy)
        return (1 - q) * total, used

    # keep blocks short enough that q^k cannot underflow inside one
    chunk = min(CHUNK, max(64, int(600 / -math.log(q))))
    pieces = []
    running = 0.0
    k0 = 0
    while k0 < policy.max_terms:
        ks = np.arange(k0, min(k0 + chunk, policy.max_terms))
        t = np.exp(ks * math.log(q))
        values = np.asarray(f.evaluator(t, ks), dtype=float) * t
        bad = ~np.isfinite(values)
        if bad.any():
            first = int(ks[np.argmax(bad)])
            raise DivergenceError(f"{f.label or 'integrand'} not finite at k={first}", index=first)
        pieces.extend(values.tolist())
        running = math.fsum(pieces)
        tail = np.abs(values[-policy.consecutive_small:])
        if np.all(tail <= policy.threshold(running)):
            return (1 - q) * running, len(pieces)
        k0 += len(ks)
    raise TruncationError("q-integral did not settle within max_terms",
                          partial=(1 - q) * running, terms=len(pieces))


def q_integrate(f: QIntegrand, q, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return q_integrate_counted(f, q, policy)[0]


def _pole_screen(den, ks, what):
    den = np.asarray(den)
    hit = np.abs(den) <= POLE_ATOL
    if hit.any():
        i = int(np.argmax(hit))
        k = int(np.broadcast_to(ks, den.shape)[i])
        raise PoleError(f"{what} vanishes at t=q^{k}", index=k, factor=what)
    return den


def _product_ratio(numerators, denominators, q, ks, policy, what):
    """prod (u;q)_inf over numerators / prod over denominators, in log space.

    At q near 1 the individual products under- or overflow long before
    their ratio does.
    """
    sign, total = 1.0, 0.0
    for u in numerators:
        s, lg = log_qpoch_infinite_array(u, q, policy)
        sign = sign * s
        total = total + lg
    for u in denominators:
        s, lg = log_qpoch_infinite_array(u, q, policy)
        _pole_screen(s, ks, what)
        sign = sign * s
        total = total - lg
    with np.errstate(invalid="ignore"):
        return np.where(sign == 0, 0.0, sign * np.exp(total))


# ---------------------------------------------------------------------------
# q-beta integral


def q_beta_integrand(alpha, beta, q, policy: TruncationPolicy = DEFAULT_POLICY) -> QIntegrand:
    """(qt;q)_inf / (q^beta t;q)_inf * t^(alpha-1)."""

    def f(t, ks):
        return (_product_ratio([q * t], [q**beta * t], q, ks, policy, "(q^b t;q)_inf")
                * t ** (alpha - 1))

    return QIntegrand(f, f"q-beta({alpha}, {beta})", vectorized=True)


def q_beta_closed_form(alpha, beta, q, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return qgamma_ratio([alpha, beta], [alpha + beta], q, policy)


@guarded
def check_q_beta(alpha, beta, q, policy: TruncationPolicy = DEFAULT_POLICY,
                 tol: float = Q_BETA_TOL) -> CheckResult:
    if not (alpha > 0 and beta > 0):
        raise ConstraintError("q-beta integral needs alpha, beta > 0")
    lhs, n = q_integrate_counted(q_beta_integrand(alpha, beta, q, policy), q, policy)
    return compare(lhs, q_beta_closed_form(alpha, beta, q, policy), tol, terms_used=n)


# ---------------------------------------------------------------------------
# the generalized q-beta integrals


@dataclass(frozen=True)
class QBetaParams:
    alpha: float = 1.0
    beta: float = 1.0
    a: float = 0.0
    c: float = 10.0
    e: float = 0.0
    m: int = 0
    q: float = 0.5


def _shared_factors(p: QBetaParams, t, ks, policy):
    """Prefactor and infinite-product block common to both integrals.

    Returns ``(prefactor * products, x, w, D)`` where x is the argument of
    the inner series in the alpha-family.
    """
    q, a, c, beta = p.q, p.a, p.c, p.beta
    qb = q**beta
    w = a + qb * t
    D = _pole_screen(c - a * w, ks, "c - a(a + q^b t)")
    pref = ((c - (a + 1) * (a + qb)) / _pole_screen(c - (a + 1) * w, ks, "c - (a+1)(a + q^b t)")
            * (c - w * w) / _pole_screen(c - (a + qb) * w, ks, "c - (a + q^b)(a + q^b t)"))
    x = w * q ** (2 * beta + 1) * t / D
    block = _product_ratio([q * t, w / D, x], [qb * t, w * t / D, w * q ** (beta + 1) / D],
                           q, ks, policy, "infinite-product block")
    return pref * block, x, w, D


def qbetat_integrand(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY) -> QIntegrand:
    q, alpha, beta = p.q, p.alpha, p.beta

    def f(t, ks):
        block, x, _, _ = _shared_factors(p, t, ks, policy)
        if np.max(np.abs(x), initial=0.0) >= 1:
            i = int(np.argmax(np.abs(x)))
            raise DivergenceError(f"inner 2phi1 argument |x| >= 1 at t=q^{int(ks[i])}",
                                  index=int(ks[i]))
        spec = SeriesSpec.qphi((q ** (alpha - beta - 1), q**-beta), (q**alpha,), q, x)
        phi, _ = eval_series_counted(spec, INNER_POLICY)
        return block * phi * t ** (alpha - 1)

    return QIntegrand(f, "generalized q-beta", vectorized=True)


def qbetat_closed_form(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return q_beta_closed_form(p.alpha, p.beta, p.q, policy)


@guarded
def check_qbetat(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY,
                 tol: float = QBETAT_TOL) -> CheckResult:
    """Generalized q-beta integral with an inner 2phi1, against the q-beta value."""
    if not (p.alpha > 0 and p.beta > 0):
        raise ConstraintError("needs alpha, beta > 0")
    lhs, n = q_integrate_counted(qbetat_integrand(p, policy), p.q, policy)
    return compare(lhs, qbetat_closed_form(p, policy), tol, terms_used=n)


def _terminating_3phi2(num, den, q, m):
    """sum_{j<=m} of a 3phi2 at argument q whose parameters may be arrays."""
    term = 1.0
    total = 1.0
    for j in range(m):
        ratio = q / (1 - q ** (j + 1))
        for x in num:
            ratio = ratio * (1 - x * q**j)
        for x in den:
            ratio = ratio / (1 - x * q**j)
        term = term * ratio
        total = total + term
    return total


def qbetat2_integrand(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY) -> QIntegrand:
    q, beta, e, m = p.q, p.beta, p.e, p.m
    e_ratio = 1 / qpoch_finite(e, q, m)

    def f(t, ks):
        block, _, w, D = _shared_factors(p, t, ks, policy)
        for j in range(m):
            _pole_screen(1 - e * t * q**j, ks, "1 - e t q^j")
        inner = _terminating_3phi2((q**-beta, w * t / D, q**-m), (q ** (-2 * beta), e * t), q, m)
        et = np.ones_like(t)
        for j in range(m):
            et = et * (1 - e * t * q**j)
        return block * inner * et * e_ratio * t ** (beta - m)

    return QIntegrand(f, "q-beta type, terminating 3phi2", vectorized=True)


def qbetat2_closed_form(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return qgamma_ratio([p.beta + 1, p.beta], [2 * p.beta + 1], p.q, policy)


def _qbetat2_constraints(p: QBetaParams):
    if p.m < 0:
        raise ConstraintError("m must be a nonnegative integer")
    if not p.beta > max(0, p.m - 1):
        raise ConstraintError("needs beta > max(0, m - 1)")
    for j in range(p.m):
        if abs(1 - p.q ** (j - 2 * p.beta)) <= POLE_ATOL:
            raise PoleError(f"(q^-2b;q)_j vanishes at j={j + 1}", index=j + 1, factor="q^-2b")
        if abs(1 - p.e * p.q**j) <= POLE_ATOL:
            raise PoleError(f"(e;q)_m vanishes at j={j}", index=j, factor="e")


@guarded
def check_qbetat2(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY,
                  tol: float = QBETAT_TOL) -> CheckResult:
    _qbetat2_constraints(p)
    lhs, n = q_integrate_counted(qbetat2_integrand(p, policy), p.q, policy)
    return compare(lhs, qbetat2_closed_form(p, policy), tol, terms_used=n)


@guarded
def qbetat2_e0_check(p: QBetaParams, policy: TruncationPolicy = DEFAULT_POLICY,
                     tol: float = QBETAT_TOL) -> CheckResult:
    """At e = 0 the terminating-3phi2 integral is a multiple of the alpha-family at
    alpha = beta + 1 - m; the multiple is (q^{beta+1-m};q)_m / (q^{2beta+1-m};q)_m."""
    p0 = replace(p, e=0.0)
    _qbetat2_constraints(p0)
    q, beta, m = p.q, p.beta, p.m
    own, n1 = q_integrate_counted(qbetat2_integrand(p0, policy), q, policy)
    other, n2 = q_integrate_counted(qbetat_integrand(replace(p0, alpha=beta + 1 - m), policy),
                                    q, policy)
    scale = qpoch_finite(q ** (beta + 1 - m), q, m) / qpoch_finite(q ** (2 * beta + 1 - m), q, m)
    return compare(own, scale * other, tol, terms_used=n1 + n2, route="e=0, alpha=beta+1-m")


def qbetat_large_parameter_trend(p: QBetaParams, which: str = "c",
                                 magnitudes=LARGE_MAGNITUDES, nodes: int = 200,
                                 policy: TruncationPolicy = DEFAULT_POLICY):
    """Max distance over the first ``nodes`` nodes between the generalized
    integrand (c or a made large) and the plain q-beta integrand.

    Both integrals have the same value for every a and c, so comparing
    values would show nothing; the limit is a statement about integrands.
    """
    if which not in ("a", "c"):
        raise ValueError("which must be 'a' or 'c'")
    ks = np.arange(nodes)
    t = np.exp(ks * math.log(p.q))
    target = q_beta_integrand(p.alpha, p.beta, p.q, policy).evaluator(t, ks)
    out = []
    for mag in magnitudes:
        big = replace(p, **{which: mag})
        values = qbetat_integrand(big, policy).evaluator(t, ks)
        out.append(float(np.max(np.abs(values - target))))
    return out


# ---------------------------------------------------------------------------
# seeded parameter samplers


def _screen_family(a, c, beta, q, grid=np.linspace(0.0, 1.0, 201), margin=0.1, x_bound=0.8):
    """Denominators stay >= margin*|c| and the inner argument stays inside
    x_bound for every t in [0, 1] (covers every node q^k and the q -> 1 limit)."""
    for qb in (q**beta, 1.0):
        w = a + qb * grid
        D = c - a * w
        dens = (D, c - (a + 1) * w, c - (a + qb) * w, c - w * w)
        if any(np.min(np.abs(d)) < margin * abs(c) for d in dens):
            return False
        if np.max(np.abs(w * grid / D)) > x_bound or np.max(np.abs(w / D)) > x_bound:
            return False
    return True


def sample_q_beta(rng, q):
    return {"alpha": float(rng.uniform(0.2, 4.0)), "beta": float(rng.uniform(0.2, 4.0))}


def sample_qbetat(rng, q, attempts: int = 1000):
    for _ in range(attempts):
        p = QBetaParams(alpha=float(rng.uniform(0.3, 4.0)), beta=float(rng.uniform(0.3, 3.0)),
                        a=float(rng.uniform(-0.5, 1.0)), c=float(rng.uniform(6.0, 20.0)), q=q)
        if _screen_family(p.a, p.c, p.beta, q):
            return p
    return None


def sample_qbetat2(rng, q, attempts: int = 1000):
    for _ in range(attempts):
        m = int(rng.integers(0, 4))
        beta = float(rng.uniform(max(0.3, m - 0.7), m + 2.5))
        p = QBetaParams(beta=beta, a=float(rng.uniform(-0.5, 1.0)),
                        c=float(rng.uniform(6.0, 20.0)), e=float(rng.uniform(-0.9, 0.9)),
                        m=m, q=q)
        near_pole = any(abs(1 - q ** (j - 2 * beta)) < 0.05 for j in range(m))
        if not near_pole and _screen_family(p.a, p.c, beta, q):
            return p
    return None


# ---------------------------------------------------------------------------
# q -> 1


def _classical_value(check, params):
    from qsv import quadrature

    if check is check_q_beta:
        alpha, beta = params["alpha"], params["beta"]
        return quadrature.beta_integral(alpha, beta)
    p = params if isinstance(params, QBetaParams) else QBetaParams(**params)
    if check is check_qbetat:
        return quadrature.betat_integral(quadrature.BetaFamilyParams(
            alpha=p.alpha, beta=p.beta, a=p.a, c=p.c))
    if check is check_qbetat2:
        return quadrature.betat2_integral(quadrature.BetaFamilyParams(
            beta=p.beta, a=p.a, c=p.c, e=p.e, m=p.m))
    raise ValueError("q_limit_probe supports check_q_beta, check_qbetat and check_qbetat2")


def _q_value(check, params, q, policy):
    if check is check_q_beta:
        integrand = q_beta_integrand(params["alpha"], params["beta"], q, policy)
    else:
        p = params if isinstance(params, QBetaParams) else QBetaParams(**params)
        p = replace(p, q=q)
        integrand = (qbetat_integrand if check is check_qbetat else qbetat2_integrand)(p, policy)
    return q_integrate_counted(integrand, q, policy)


def q_limit_probe(check, params, q_schedule=DEFAULT_Q_SCHEDULE,
                  policy: TruncationPolicy = DEFAULT_POLICY):
    """Evaluate the q-integral along ``q_schedule`` against its classical integral.

    Each result carries lhs = I_q, rhs = I_classical and abs_err = the
    deviation.  A result passes when its deviation is below the previous
    one (the first passes by definition).
    """
    classical = _classical_value(check, params)
    out = []
    previous = math.inf
    for q in q_schedule:
        try:
            value, n = _q_value(check, params, q, policy)
        except (DivergenceError, TruncationError) as exc:
            out.append(CheckResult(math.nan, classical, math.nan, math.nan, DIVERGED,
                                   diagnostics={"q": q, "reason": str(exc)}))
            previous = math.inf
            continue
        dev = abs(value - classical)
        rel = dev / max(abs(value), abs(classical), 1e-300)
        out.append(CheckResult(value, classical, dev, rel, PASS if dev < previous else FAIL,
                               terms_used=n, tol=previous, diagnostics={"q": q}))
        previous = dev
    return out


def deviations_decreasing(results) -> bool:
    return all(r.status == PASS for r in results)
