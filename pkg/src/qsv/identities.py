"""Series identities: summations, transformations and the curious expansions.

Every ``check_*`` function evaluates both sides of one identity at a concrete
parameter point and returns a :class:`~qsv.result.CheckResult`.  Poles,
constraint violations and divergent inner series come back as statuses
(``skipped-pole`` / ``diverged``) rather than exceptions.

Several expansions share the summand building blocks

    w_k = a + b q^k,     D_k = c - a w_k,     u_k = w_k / D_k,
    P_k = (c - (a+1)(a+b)) / (c - (a+1) w_k) * (c - w_k^2) / (c - (a+b) w_k),

which are computed once per term by :func:`_expansion_terms`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from qsv.errors import ConstraintError, DivergenceError, PoleError
from qsv.qcore import (
    DEFAULT_POLICY,
    INNER_POLICY,
    SeriesSpec,
    TruncationPolicy,
    eval_series_counted,
    qpoch_finite,
    qpoch_infinite,
    sum_terms,
)
from qsv.result import CheckResult, compare, guarded

# denominators smaller than this (relative to their scale) count as poles
POLE_MARGIN = 1e-12

SUMMATION_TOL = 1e-9
EXPANSION_TOL = 1e-8
FLOAT_TERMINATING_TOL = 1e-11


def _nz(x, what, k=None, scale=1.0):
    if isinstance(x, Fraction):
        if x == 0:
            raise PoleError(f"{what} vanishes" + (f" at k={k}" if k is not None else ""),
                            index=k, factor=what)
        return x
    if not math.isfinite(x) or abs(x) <= POLE_MARGIN * max(1.0, abs(scale)):
        raise PoleError(f"{what} vanishes" + (f" at k={k}" if k is not None else ""),
                        index=k, factor=what)
    return x


def _phi(num, den, q, z, policy=DEFAULT_POLICY):
    return eval_series_counted(SeriesSpec.qphi(num, den, q, z), policy)


def _P(a, q, policy=DEFAULT_POLICY):
    return qpoch_infinite(a, q, policy)


def _Pd(a, q, what, k=None, policy=DEFAULT_POLICY):
    """An infinite product that sits in a denominator."""
    return _nz(qpoch_infinite(a, q, policy), f"({what};q)_inf", k)


def _abs(term):
    return lambda k: abs(term(k))


def _agree(first: CheckResult, second: CheckResult, tol: float, **diag) -> CheckResult:
    """Cross-check two evaluations of the same quantity (lhs with lhs, rhs with rhs)."""
    for r in (first, second):
        if r.status not in ("pass", "fail"):
            return r
    a = compare(first.lhs, second.lhs, tol)
    b = compare(first.rhs, second.rhs, tol)
    worst = a if a.rel_err >= b.rel_err else b
    worst.terms_used = first.terms_used + second.terms_used
    worst.diagnostics.update(diag)
    return worst


# ---------------------------------------------------------------------------
# classical summations and transformations


@guarded
def check_q_kummer(a, b, q, policy: TruncationPolicy = DEFAULT_POLICY,
                   tol: float = SUMMATION_TOL) -> CheckResult:
    if not abs(q / b) < 1:
        raise ConstraintError("q-Kummer needs |q/b| < 1")
    lhs, n = _phi((a, b), (a * q / b,), q, -q / b, policy)
    q2 = q * q
    rhs = _P(-q, q) * _P(a * q, q2) * _P(a * q * q / (b * b), q2) / (
        _Pd(-q / b, q, "-q/b") * _Pd(a * q / b, q, "aq/b"))
    return compare(lhs, rhs, tol, terms_used=n)


@guarded
def check_rogers_6phi5(a, b, c, d, q, policy: TruncationPolicy = DEFAULT_POLICY,
                       tol: float = SUMMATION_TOL) -> CheckResult:
    if a <= 0:
        raise ConstraintError("very-well-poised 6phi5 needs a > 0 for a real sqrt(a)")
    z = a * q / (b * c * d)
    if not abs(z) < 1:
        raise ConstraintError("Rogers 6phi5 needs |aq/bcd| < 1")
    r = math.sqrt(a)
    lhs, n = _phi((a, q * r, -q * r, b, c, d), (r, -r, a * q / b, a * q / c, a * q / d), q, z,
                  policy)
    aq = a * q
    rhs = (_P(aq, q) * _P(aq / (b * c), q) * _P(aq / (b * d), q) * _P(aq / (c * d), q)) / (
        _Pd(aq / b, q, "aq/b") * _Pd(aq / c, q, "aq/c") * _Pd(aq / d, q, "aq/d")
        * _Pd(z, q, "aq/bcd"))
    return compare(lhs, rhs, tol, terms_used=n)


@guarded
def rogers_to_kummer_check(a, b, q, tol: float = SUMMATION_TOL) -> CheckResult:
    """Setting c = sqrt(a), d = -sqrt(a) in Rogers' 6phi5 gives q-Kummer."""
    r = math.sqrt(a)
    return _agree(check_rogers_6phi5(a, b, r, -r, q), check_q_kummer(a, b, q), tol,
                  route="c=sqrt(a), d=-sqrt(a)")


@guarded
def check_heine_ii(a, b, c, z, q, policy: TruncationPolicy = DEFAULT_POLICY,
                   tol: float = SUMMATION_TOL) -> CheckResult:
    if not (abs(z) < 1 and abs(c / b) < 1):
        raise ConstraintError("second Heine iterate needs |z| < 1 and |c/b| < 1")
    lhs, n1 = _phi((a, b), (c,), q, z, policy)
    inner, n2 = _phi((a * b * z / c, b), (b * z,), q, c / b, policy)
    rhs = _P(c / b, q) * _P(b * z, q) / (_Pd(c, q, "c") * _Pd(z, q, "z")) * inner
    return compare(lhs, rhs, tol, terms_used=n1 + n2)


@guarded
def check_q_gauss(a, b, c, q, policy: TruncationPolicy = DEFAULT_POLICY,
                  tol: float = SUMMATION_TOL) -> CheckResult:
    z = c / (a * b)
    if not abs(z) < 1:
        raise ConstraintError("q-Gauss needs |c/ab| < 1")
    lhs, n = _phi((a, b), (c,), q, z, policy)
    rhs = _P(c / a, q) * _P(c / b, q) / (_Pd(c, q, "c") * _Pd(z, q, "c/ab"))
    return compare(lhs, rhs, tol, terms_used=n)


@guarded
def check_lemma23(a, b, c, d, m: int, q, policy: TruncationPolicy = DEFAULT_POLICY,
                  tol: float = SUMMATION_TOL) -> CheckResult:
    """Nonterminating 3phi2 equal to a product times an (m+1)-term 3phi2."""
    if m < 0:
        raise ConstraintError("m must be a nonnegative integer")
    z = c * q**-m / (a * b)
    if not abs(z) < 1:
        raise ConstraintError("needs |c q^-m / ab| < 1")
    lhs, n1 = _phi((a, b, d * q**m), (c, d), q, z, policy)
    finite, n2 = _phi((a, b, q**-m), (a * b * q / c, d), q, q, policy)
    rhs = _P(c / a, q) * _P(c / b, q) / (_Pd(c, q, "c") * _Pd(c / (a * b), q, "c/ab")) * finite
    return compare(lhs, rhs, tol, terms_used=n1 + n2)


@guarded
def check_lemma23_m1(a, b, c, d, q, policy: TruncationPolicy = DEFAULT_POLICY,
                     tol: float = SUMMATION_TOL) -> CheckResult:
    """The m = 1 case written with an explicit two-term factor."""
    z = c / (a * b * q)
    if not abs(z) < 1:
        raise ConstraintError("needs |c / abq| < 1")
    lhs, n = _phi((a, b, d * q), (c, d), q, z, policy)
    factor = 1 - (1 - a) * (1 - b) / (_nz(1 - a * b * q / c, "1-abq/c") * _nz(1 - d, "1-d"))
    rhs = factor * _P(c / a, q) * _P(c / b, q) / (_Pd(c, q, "c") * _Pd(c / (a * b), q, "c/ab"))
    return compare(lhs, rhs, tol, terms_used=n)


# ---------------------------------------------------------------------------
# the curious expansions


@dataclass
class _Summand:
    pref: float  # P_k
    u: float  # u_k


def _expansion_terms(a, b, c, q, k) -> _Summand:
    w = a + b * q**k
    D = _nz(c - a * w, "c - a(a+bq^k)", k, c)
    pref = (c - (a + 1) * (a + b)) / _nz(c - (a + 1) * w, "c - (a+1)(a+bq^k)", k, c) * (
        c - w * w) / _nz(c - (a + b) * w, "c - (a+b)(a+bq^k)", k, c)
    return _Summand(pref, w / D)


def curious_3_1_rhs(a, b, c, q, policy: TruncationPolicy = DEFAULT_POLICY,
        absolute: bool = False):
    """The k-sum of the basic curious expansion; returns (value, terms)."""

    def term(k):
        s = _expansion_terms(a, b, c, q, k)
        return (s.pref * qpoch_finite(b, q, k) * qpoch_finite(s.u, q, k)
                * _P(s.u * b * b * q ** (k + 1), q)
                / (qpoch_finite(q, q, k) * _Pd(s.u * b * q, q, "u_k bq", k)) * (b * q) ** k)

    return sum_terms(_abs(term) if absolute else term, policy)


@guarded
def check_curious_3_1(a, b, c, q, policy: TruncationPolicy = DEFAULT_POLICY,
                      tol: float = EXPANSION_TOL) -> CheckResult:
    if not abs(b * q) < 1:
        raise ConstraintError("needs |bq| < 1")
    rhs, n = curious_3_1_rhs(a, b, c, q, policy)
    lhs = _P(b * b * q, q) / _Pd(b * q, q, "bq")
    return compare(lhs, rhs, tol, terms_used=n)


@guarded
def curious_3_1_c0_check(a, b, q, tol: float = EXPANSION_TOL) -> CheckResult:
    """c = 0 collapses the expansion to q-Gauss with A=b, B=-1/a, C=-b^2 q/a."""
    rhs, n = curious_3_1_rhs(a, b, 0.0, q)
    A, B, C = b, -1 / a, -b * b * q / a
    gauss = check_q_gauss(A, B, C, q)
    if gauss.status not in ("pass", "fail"):
        return gauss
    scale = _P(C, q) / _Pd(C / A, q, "C/A")
    return compare(rhs, gauss.lhs * scale, tol, terms_used=n + gauss.terms_used,
                   route="c=0 -> q-Gauss")


def vwp_8phi7_sum(b, c, q, policy: TruncationPolicy = DEFAULT_POLICY,
                  absolute: bool = False):
    """The very-well-poised 8phi7 sum that the expansion becomes at a = 0."""

    def term(k):
        return ((1 - b * b * q ** (2 * k) / c) / _nz(1 - b * b / c, "1-b^2/c")
                * qpoch_finite(b * b / c, q, k) * qpoch_finite(b, q, k)
                * qpoch_finite(b / c, q, 2 * k)
                / _nz(qpoch_finite(q, q, k) * qpoch_finite(b * q / c, q, k)
                      * qpoch_finite(b**3 * q / c, q, 2 * k), "8phi7 denominator", k)
                * (b * q) ** k)

    return sum_terms(_abs(term) if absolute else term, policy)


@guarded
def curious_3_1_a0_check(b, c, q, tol: float = EXPANSION_TOL) -> CheckResult:
    """a = 0: the 8phi7 summation, and its agreement with the expansion's k-sum."""
    s8, n1 = vwp_8phi7_sum(b, c, q)
    lhs8 = _P(b * b * q, q) * _P(b * b * q / c, q) / (
        _Pd(b * q, q, "bq") * _Pd(b**3 * q / c, q, "b^3q/c"))
    own = compare(lhs8, s8, tol)
    rhs, n2 = curious_3_1_rhs(0.0, b, c, q)
    via = compare(rhs * _P(b * b * q / c, q) / _Pd(b**3 * q / c, q, "b^3q/c"), s8, tol)
    worst = own if own.rel_err >= via.rel_err else via
    worst.terms_used = n1 + n2
    worst.diagnostics["route"] = "a=0 -> very-well-poised 8phi7"
    return worst


def theorem_3_1_rhs(a, b, c, q, policy: TruncationPolicy = DEFAULT_POLICY,
        absolute: bool = False):
    q2 = q * q

    def term(k):
        s = _expansion_terms(a, b, c, q, k)
        return (s.pref * qpoch_finite(b, q, k) * _P(s.u, q)
                / (qpoch_finite(q, q, k) * _Pd(s.u * b * q, q, "u_k bq", k))
                * _P(s.u * b * b * q ** (k + 2), q2) / _Pd(s.u * q**k, q2, "u_k q^k", k)
                * (-q) ** k)

    return sum_terms(_abs(term) if absolute else term, policy)


@guarded
def check_theorem_3_1(a, b, c, q, policy: TruncationPolicy = DEFAULT_POLICY,
                      tol: float = EXPANSION_TOL) -> CheckResult:
    rhs, n = theorem_3_1_rhs(a, b, c, q, policy)
    lhs = _P(-b * q, q) / _Pd(-q, q, "-q")
    return compare(lhs, rhs, tol, terms_used=n)


def quadratic_3_4_rhs(a, b, q, policy: TruncationPolicy = DEFAULT_POLICY,
        absolute: bool = False):
    q2 = q * q

    def term(k):
        return (qpoch_finite(b, q, k) / qpoch_finite(q, q, k)
                * _P(a * b * b * q ** (2 + k), q2) / _Pd(a * q**k, q2, "a q^k", k) * (-q) ** k)

    return sum_terms(_abs(term) if absolute else term, policy)


def quadratic_3_4_parity_split(a, b, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Even and odd k recombined as two balanced 3phi2 series in base q^2."""
    q2 = q * q
    even, n1 = _phi((b, b * q, a), (q, a * b * b * q * q), q2, q2, policy)
    odd, n2 = _phi((b * q, b * q * q, a * q), (q**3, a * b * b * q**3), q2, q2, policy)
    first = _P(a * b * b * q * q, q2) / _Pd(a, q2, "a") * even
    second = q * (1 - b) / (1 - q) * _P(a * b * b * q**3, q2) / _Pd(a * q, q2, "aq") * odd
    return first - second, n1 + n2, _cancellation(first, second)


def _cancellation(x, y):
    """How much precision x - y loses: (|x| + |y|) / |x - y|."""
    diff = abs(x - y)
    return math.inf if diff == 0 else (abs(x) + abs(y)) / diff


@guarded
def check_quadratic_3_4(a, b, q, policy: TruncationPolicy = DEFAULT_POLICY,
                        tol: float = EXPANSION_TOL) -> CheckResult:
    """Quadratic expansion; the parity-split form is checked against the same sum.

    The split subtracts two series that can be far larger than their
    difference, so its tolerance is widened by the measured cancellation.
    """
    rhs, n = quadratic_3_4_rhs(a, b, q, policy)
    lhs = _P(-b * q, q) * _P(a * b * q, q) / (_Pd(-q, q, "-q") * _Pd(a, q, "a"))
    main = compare(lhs, rhs, tol, terms_used=n)
    split, n2, cond = quadratic_3_4_parity_split(a, b, q, policy)
    parity = compare(split, rhs, max(tol, 64 * 2.0**-52 * cond), cancellation=cond)
    main.diagnostics.update(parity_rel_err=parity.rel_err, parity_cancellation=cond,
                            parity_status=parity.status)
    if parity.status != "pass":
        main.status = parity.status
    main.terms_used += n2
    return main


@guarded
def theorem_3_1_c0_check(a, b, q, tol: float = EXPANSION_TOL) -> CheckResult:
    """c = 0 with a -> -1/a turns the base-q^2 expansion into the quadratic one."""
    full, n1 = theorem_3_1_rhs(-1 / a, b, 0.0, q)
    quad, n2 = quadratic_3_4_rhs(a, b, q)
    scale = _P(a * b * q, q) / _Pd(a, q, "a")
    return compare(full * scale, quad, tol, terms_used=n1 + n2, route="c=0, a->-1/a")


def theorem_3_2_rhs(a, b, c, z, q, policy: TruncationPolicy = DEFAULT_POLICY,
                    absolute: bool = False):
    inner_terms = [0]

    def term(k):
        s = _expansion_terms(a, b, c, q, k)
        x = s.u * b * b * q ** (k + 1)
        try:
            inner, m = _phi((1 / b, z / (b * b * q)), (z / b,), q, x, INNER_POLICY)
        except DivergenceError as exc:
            raise DivergenceError(f"inner 2phi1 diverges at k={k}: {exc}", index=k) from exc
        inner_terms[0] += m
        return (s.pref * inner * qpoch_finite(b, q, k) * qpoch_finite(s.u, q, k)
                * _P(x, q) / (qpoch_finite(q, q, k) * _Pd(s.u * b * q, q, "u_k bq", k))
                * (z / b) ** k)

    value, n = sum_terms(_abs(term) if absolute else term, policy)
    return value, n + inner_terms[0]


@guarded
def check_theorem_3_2(a, b, c, z, q, policy: TruncationPolicy = DEFAULT_POLICY,
                      tol: float = EXPANSION_TOL) -> CheckResult:
    if not abs(z / b) < 1:
        raise ConstraintError("needs |z/b| < 1")
    rhs, n = theorem_3_2_rhs(a, b, c, z, q, policy)
    lhs = _P(z, q) / _Pd(z / b, q, "z/b")
    return compare(lhs, rhs, tol, terms_used=n)


@guarded
def theorem_3_2_z_check(a, b, c, q, which: str, tol: float = EXPANSION_TOL) -> CheckResult:
    """z = b^2 q reproduces the basic expansion, z = -bq the base-q^2 one."""
    if which == "b2q":
        own, n1 = theorem_3_2_rhs(a, b, c, b * b * q, q)
        other, n2 = curious_3_1_rhs(a, b, c, q)
    elif which == "-bq":
        own, n1 = theorem_3_2_rhs(a, b, c, -b * q, q)
        other, n2 = theorem_3_1_rhs(a, b, c, q)
    else:
        raise ValueError("which must be 'b2q' or '-bq'")
    return compare(own, other, tol, terms_used=n1 + n2, route=f"z={which}")


def theorem_3_3_rhs(a, b, c, e, m: int, q, policy: TruncationPolicy = DEFAULT_POLICY,
        absolute: bool = False):
    def term(k):
        s = _expansion_terms(a, b, c, q, k)
        inner, _ = _phi((1 / b, s.u * q**k, q**-m), (1 / (b * b), e * q**k), q, q, INNER_POLICY)
        return (s.pref * inner
                * qpoch_finite(e * q**m, q, k) / _nz(qpoch_finite(e, q, k), "(e;q)_k", k)
                * qpoch_finite(b, q, k) * qpoch_finite(s.u, q, k)
                * _P(s.u * b * b * q ** (k + 1), q)
                / (qpoch_finite(q, q, k) * _Pd(s.u * b * q, q, "u_k bq", k))
                * (b * q ** (1 - m)) ** k)

    return sum_terms(_abs(term) if absolute else term, policy)


@guarded
def check_theorem_3_3(a, b, c, e, m: int, q, policy: TruncationPolicy = DEFAULT_POLICY,
                      tol: float = EXPANSION_TOL) -> CheckResult:
    if m < 0:
        raise ConstraintError("m must be a nonnegative integer")
    if not abs(b * q ** (1 - m)) < 1:
        raise ConstraintError("needs |b q^(1-m)| < 1")
    rhs, n = theorem_3_3_rhs(a, b, c, e, m, q, policy)
    lhs = _P(b * b * q, q) / _Pd(b * q, q, "bq")
    return compare(lhs, rhs, tol, terms_used=n)


@guarded
def theorem_3_3_m0_check(a, b, c, e, q, tol: float = EXPANSION_TOL) -> CheckResult:
    own, n1 = theorem_3_3_rhs(a, b, c, e, 0, q)
    other, n2 = curious_3_1_rhs(a, b, c, q)
    return compare(own, other, tol, terms_used=n1 + n2, route="m=0")


def theorem_3_3_large_e(a, b, c, m: int, q, magnitudes=(1e4, 1e6, 1e8)):
    """Deviation of the m-dependent sum from the basic expansion as e grows."""
    base, _ = curious_3_1_rhs(a, b, c, q)
    return [abs(theorem_3_3_rhs(a, b, c, e, m, q)[0] - base) for e in magnitudes]


# ---------------------------------------------------------------------------
# terminating sums


def _ten_phi_nine_terms(a, b, n: int, q):
    """Terms of the very-well-poised 10phi9 with each +-sqrt pair merged.

    (x;q)_k (-x;q)_k = (x^2;q^2)_k, so no square roots are needed and
    rational data stay rational.
    """
    q2 = q * q
    out = []
    for k in range(n + 1):
        num = ((1 - a * q ** (2 * k)) * qpoch_finite(a, q, k) * qpoch_finite(b, q2, k)
               * qpoch_finite(b * q, q2, k) * qpoch_finite(a / b, q, k)
               * qpoch_finite(a * a * q ** (n + 1) / b, q, k) * qpoch_finite(q**-n, q, k))
        den = ((1 - a) * qpoch_finite(q, q, k) * qpoch_finite(a * a * q2 / b, q2, k)
               * qpoch_finite(a * a * q / b, q2, k) * qpoch_finite(b * q, q, k)
               * qpoch_finite(b * q**-n / a, q, k) * qpoch_finite(a * q ** (n + 1), q, k))
        out.append(num / _nz(den, "10phi9 denominator", k) * q**k)
    return out


def ten_phi_nine_spec(a, b, n: int, q) -> SeriesSpec:
    """The 10phi9 written out with its square-root parameters (floats)."""
    ra, rb, rbq, rqb = math.sqrt(a), math.sqrt(b), math.sqrt(b * q), math.sqrt(q / b)
    num = (a, q * ra, -q * ra, rb, -rb, rbq, -rbq, a / b, a * a * q ** (n + 1) / b, q**-n)
    den = (ra, -ra, a * q / rb, -a * q / rb, a * rqb, -a * rqb, b * q, b * q**-n / a,
           a * q ** (n + 1))
    return SeriesSpec.qphi(num, den, q, q)


def ten_phi_nine_rhs(a, b, n: int, q):
    return (qpoch_finite(a * q, q, n) * qpoch_finite(a * a * q / (b * b), q, n)
            / _nz(qpoch_finite(a * q / b, q, n) * qpoch_finite(a * a * q / b, q, n),
                  "10phi9 right side denominator"))


def _exact_inputs(*values):
    return all(isinstance(v, (int, Fraction)) for v in values)


@guarded
def check_10phi9(a, b, n: int, q, tol: float = FLOAT_TERMINATING_TOL) -> CheckResult:
    """Terminating very-well-poised 10phi9 summation.

    Rational a, b, q are summed exactly (paired form); floats go through the
    generic series engine with the explicit square-root parameters.
    """
    if n < 0:
        raise ConstraintError("n must be a nonnegative integer")
    if _exact_inputs(a, b, q):
        a, b, q = Fraction(a), Fraction(b), Fraction(q)
        lhs = sum(_ten_phi_nine_terms(a, b, n, q), Fraction(0))
        return compare(lhs, Fraction(ten_phi_nine_rhs(a, b, n, q)), 0.0, terms_used=n + 1)
    if a <= 0 or b <= 0:
        raise ConstraintError("float path needs a, b > 0 for real square roots")
    lhs, used = eval_series_counted(ten_phi_nine_spec(a, b, n, q))
    return compare(lhs, ten_phi_nine_rhs(a, b, n, q), tol, terms_used=used)


def terminating_3_2_terms(a, b, c, n: int, q):
    out = []
    for k in range(n + 1):
        s = _nz(a - q**-k, "a - q^-k", k)
        R = (b + a * s) / s
        lead = ((b + (a - c) * (a - 1)) / _nz(b + (a - c) * s, "b+(a-c)(a-q^-k)", k)
                * (b + s * s) / _nz(b + (a - 1) * s, "b+(a-1)(a-q^-k)", k))
        num = (qpoch_finite(q**-n, q, k) * qpoch_finite(c, q, k) * qpoch_finite(R / c, q, k)
               * qpoch_finite(c * q * R, q, n))
        den = (qpoch_finite(q, q, k) * qpoch_finite(q**-n / c, q, k)
               * qpoch_finite(c * q * R, q, k) * qpoch_finite(q * R, q, n))
        out.append(lead * num / _nz(den, "Pochhammer denominator", k) * q**k)
    return out


@guarded
def check_terminating_3_2(a, b, c, n: int, q, tol: float = 1e-10) -> CheckResult:
    """Terminating non-hypergeometric sum for (c^2 q;q)_n / (cq;q)_n."""
    if n < 0:
        raise ConstraintError("n must be a nonnegative integer")
    exact = _exact_inputs(a, b, c, q)
    if exact:
        a, b, c, q = Fraction(a), Fraction(b), Fraction(c), Fraction(q)
    terms = terminating_3_2_terms(a, b, c, n, q)
    lhs = qpoch_finite(c * c * q, q, n) / _nz(qpoch_finite(c * q, q, n), "(cq;q)_n")
    if exact:
        # n = 0 gives int / int, which Python turns into a float
        lhs, rhs = Fraction(lhs), sum(terms, Fraction(0))
    else:
        rhs = math.fsum(terms)
    return compare(lhs, rhs, tol, terms_used=n + 1)


@guarded
def terminating_3_2_a0_check(b, c, n: int, q, tol: float = 1e-10) -> CheckResult:
    """At a = 0 the sum is the 10phi9 with a -> -b, b -> -b/c times a finite ratio."""
    exact = _exact_inputs(b, c, q)
    if exact:
        b, c, q = Fraction(b), Fraction(c), Fraction(q)
        total = sum
    else:
        total = math.fsum
    zero = Fraction(0) if exact else 0.0
    own = total(terminating_3_2_terms(zero, b, c, n, q))
    ten = total(_ten_phi_nine_terms(-b, -b / c, n, q))
    scale = qpoch_finite(-b * c * q, q, n) / _nz(qpoch_finite(-b * q, q, n), "(-bq;q)_n")
    if exact:
        own, scale = Fraction(own), Fraction(scale)
    return compare(own, ten * scale, tol, terms_used=2 * (n + 1), route="a=0 -> 10phi9")


# ---------------------------------------------------------------------------
# descriptors and samplers


@dataclass
class IdentityDescriptor:
    """One registry entry: what it checks, how to sample it, how to run it."""

    id: str
    description: str
    free_params: dict
    sample: Callable  # (rng, q) -> params dict, None when nothing admissible found
    run: Callable  # (params, q, policy) -> CheckResult
    uses_q: bool = True
    tol: float = EXPANSION_TOL
    exact: bool = False
    extra: dict = field(default_factory=dict)


def _u(rng, lo, hi):
    return float(rng.uniform(lo, hi))


def _signed(rng, lo, hi):
    return _u(rng, lo, hi) * (1 if rng.random() < 0.5 else -1)


def _far_from_poles(values, q, margin=0.02):
    """Each x keeps |1 - x q^j| >= margin for every j (products and Pochhammers)."""
    for x in values:
        j = 0
        while abs(x * q**j) >= 0.5:
            if abs(1 - x * q**j) < margin:
                return False
            j += 1
            if j > 10000:
                return False
    return True


def _screen_expansion(a, b, c, q, margin=0.15, u_bound=0.75):
    """Keep the k-dependent denominators of the expansions well away from zero."""
    for k in range(0, 200):
        w = a + b * q**k
        for den in (c - a * w, c - (a + 1) * w, c - (a + b) * w):
            if abs(den) < margin * abs(c):
                return False
        u = w / (c - a * w)
        if abs(u) > u_bound or abs(u * b * q) > 0.9 or abs(u * b * b * q) > 0.9:
            return False
        if abs(b * q**k) < 1e-17:
            break
    return True


def _series_condition(num, den, q, z, max_terms=5000):
    """sum |t_k| / |sum t_k| for a qphi series; inf when the sum is ~0."""
    t, total, absolute = 1.0, 1.0, 1.0
    for k in range(max_terms):
        ratio = z / (1 - q ** (k + 1))
        for x in num:
            ratio *= 1 - x * q**k
        for x in den:
            d = 1 - x * q**k
            if d == 0:
                return math.inf
            ratio /= d
        t *= ratio
        total += t
        absolute += abs(t)
        if abs(t) <= 1e-18 * absolute:
            break
    return math.inf if total == 0 else absolute / abs(total)


# double precision leaves about 1e-16 * condition of relative accuracy
CONDITION_LIMIT = 1e5


def _sum_well_conditioned(rhs, *args) -> bool:
    """Condition screen for a k-sum builder that accepts ``absolute=True``."""
    try:
        value, _ = rhs(*args)
        magnitude, _ = rhs(*args, absolute=True)
    except (ArithmeticError, ValueError):
        return False
    return value != 0 and magnitude / abs(value) <= CONDITION_LIMIT


def _well_conditioned(*series):
    return all(_series_condition(*s) <= CONDITION_LIMIT for s in series)


def _rejection(draw, accept, rng, attempts=2000):
    for _ in range(attempts):
        p = draw(rng)
        if accept(p):
            return p
    return None


def _sample_kummer(rng, q):
    return _rejection(lambda r: {"a": _u(r, -1, 1), "b": _signed(r, 1.2, 6)},
                      lambda p: _far_from_poles([p["a"] * q / p["b"], -q / p["b"]], q)
                      and _well_conditioned(((p["a"], p["b"]), (p["a"] * q / p["b"],), q,
                                             -q / p["b"])), rng)


def _sample_rogers(rng, q):
    def draw(r):
        return {"a": _u(r, 0.05, 1), "b": _signed(r, 1.2, 5), "c": _signed(r, 1.2, 5),
                "d": _signed(r, 1.2, 5)}

    def ok(p):
        a, b, c, d = p["a"], p["b"], p["c"], p["d"]
        r = math.sqrt(a)
        return (_far_from_poles([a * q / b, a * q / c, a * q / d, a * q / (b * c * d)], q)
                and _well_conditioned(((a, q * r, -q * r, b, c, d),
                                       (r, -r, a * q / b, a * q / c, a * q / d), q,
                                       a * q / (b * c * d))))

    return _rejection(draw, ok, rng)


def _sample_heine(rng, q):
    def draw(r):
        return {"a": _u(r, -1, 1), "b": _signed(r, 1.2, 5), "c": _u(r, -1, 1),
                "z": _u(r, -0.8, 0.8)}

    def ok(p):
        a, b, c, z = p["a"], p["b"], p["c"], p["z"]
        return (abs(c / b) < 0.85 and _far_from_poles([c, z, b * z], q, 0.05)
                and _well_conditioned(((a, b), (c,), q, z),
                                      ((a * b * z / c, b), (b * z,), q, c / b)))

    return _rejection(draw, ok, rng)


def _sample_gauss(rng, q):
    def draw(r):
        a, b = _signed(r, 1.2, 5), _signed(r, 1.2, 5)
        return {"a": a, "b": b, "c": _signed(r, 0.05, 0.85) * a * b}

    def ok(p):
        a, b, c = p["a"], p["b"], p["c"]
        # zeros of the closed form make the sum cancel catastrophically
        return (_far_from_poles([c, c / (a * b)], q, 0.05)
                and _far_from_poles([c / a, c / b], q, 0.2)
                and _well_conditioned(((a, b), (c,), q, c / (a * b))))

    return _rejection(draw, ok, rng)


def _sample_lemma23(rng, q, m=None):
    def draw(r):
        mm = int(r.integers(0, 4)) if m is None else m
        a, b = _signed(r, 1.2, 4), _signed(r, 1.2, 4)
        return {"a": a, "b": b, "c": _signed(r, 0.05, 0.8) * a * b * q**mm,
                "d": _u(r, -0.9, 0.9), "m": mm}

    def ok(p):
        a, b, c, d = p["a"], p["b"], p["c"], p["d"]
        mm = p.get("m", 1)
        return (_far_from_poles([c, c / (a * b), d, a * b * q / c], q, 0.05)
                and _far_from_poles([c / a, c / b], q, 0.2)
                and _well_conditioned(((a, b, d * q**mm), (c, d), q, c * q**-mm / (a * b))))

    return _rejection(draw, ok, rng)


def _sample_lemma23_m1(rng, q):
    p = _sample_lemma23(rng, q, m=1)
    if p is not None:
        del p["m"]
    return p


def _expansion_draw(r, b_lo=-0.9, b_hi=0.9):
    return {"a": _u(r, -1, 1), "b": _u(r, b_lo, b_hi), "c": _signed(r, 5, 20)}


def _sample_curious(rng, q):
    return _rejection(_expansion_draw,
                      lambda p: _screen_expansion(p["a"], p["b"], p["c"], q), rng)


def _sample_theorem_3_1(rng, q):
    return _rejection(_expansion_draw,
                      lambda p: _screen_expansion(p["a"], p["b"], p["c"], q)
                      and _sum_well_conditioned(theorem_3_1_rhs, p["a"], p["b"], p["c"], q),
                      rng)


def _sample_quadratic(rng, q):
    return _rejection(lambda r: {"a": _u(r, -0.9, 0.9), "b": _u(r, -1, 1)},
                      lambda p: _far_from_poles([p["a"]], q, 0.05)
                      and _sum_well_conditioned(quadratic_3_4_rhs, p["a"], p["b"], q), rng)


def _sample_theorem_3_2(rng, q):
    def draw(r):
        p = _expansion_draw(r)
        p["b"] = _signed(r, 0.4, 0.9)
        p["z"] = _u(r, -0.8, 0.8) * p["b"]
        return p

    return _rejection(draw, lambda p: _screen_expansion(p["a"], p["b"], p["c"], q), rng)


def _sample_theorem_3_3(rng, q):
    def draw(r):
        p = _expansion_draw(r)
        m = int(r.integers(0, 4))
        p["b"] = _signed(r, 0.1, 0.8) * min(q ** (m - 1), 1.0)
        p["e"] = _u(r, -0.9, 0.9)
        p["m"] = m
        return p

    def ok(p):
        b, m = p["b"], p["m"]
        if not abs(b * q ** (1 - p["m"])) < 0.85:
            return False
        return (_screen_expansion(p["a"], b, p["c"], q)
                and _far_from_poles([1 / (b * b), p["e"]], q, 0.05) and (m == 0 or abs(b) > 0.02))

    return _rejection(draw, ok, rng)


def _rational(rng, lo, hi, den_max=9):
    den = int(rng.integers(1, den_max + 1))
    num = int(rng.integers(math.ceil(lo * den), math.floor(hi * den) + 1))
    return Fraction(num, den)


def _pole_free(check, *args) -> bool:
    """Admissibility for exact samplers: reject only parameter sets that hit a pole."""
    try:
        return check(*args).status != "skipped-pole"
    except ZeroDivisionError:
        return False


def rational_base(q) -> Fraction:
    return Fraction(str(q)) if not isinstance(q, Fraction) else q


def _sample_ten_phi_nine(rng, q):
    qf = rational_base(q)

    def draw(r):
        ra = _rational(r, 0.1, 3)
        rb = _rational(r, 0.1, 3)
        return {"a": ra * ra, "b": rb * rb, "n": int(r.integers(0, 7))}

    def ok(p):
        return _pole_free(check_10phi9, p["a"], p["b"], p["n"], qf)

    return _rejection(draw, ok, rng, attempts=200)


def _sample_terminating_3_2(rng, q):
    qf = rational_base(q)

    def draw(r):
        return {"a": _rational(r, -3, 3), "b": _rational(r, -5, 5), "c": _rational(r, -3, 3),
                "n": int(r.integers(0, 7))}

    def ok(p):
        if p["c"] == 0:
            return False
        return _pole_free(check_terminating_3_2, p["a"], p["b"], p["c"], p["n"], qf)

    return _rejection(draw, ok, rng, attempts=200)


def _run(fn, *names):
    def run(params, q, policy=DEFAULT_POLICY):
        return fn(*(params[n] for n in names), q, policy)

    return run


def _run_exact(fn, *names):
    def run(params, q, policy=DEFAULT_POLICY):
        return fn(*(params[n] for n in names), rational_base(q))

    return run


IDENTITY_DESCRIPTORS = [
    IdentityDescriptor("Q_KUMMER", "q-Kummer summation of a 2phi1 at -q/b",
                       {"a": (-1, 1), "b": "|b| in [1.2, 6]"}, _sample_kummer,
                       _run(check_q_kummer, "a", "b"), tol=SUMMATION_TOL),
    IdentityDescriptor("ROGERS_6PHI5", "nonterminating very-well-poised 6phi5 summation",
                       {"a": (0.05, 1), "b,c,d": "|.| in [1.2, 5]"}, _sample_rogers,
                       _run(check_rogers_6phi5, "a", "b", "c", "d"), tol=SUMMATION_TOL),
    IdentityDescriptor("HEINE_II", "second iterate of Heine's 2phi1 transformation",
                       {"a": (-1, 1), "b": "|b| in [1.2, 5]", "c": (-1, 1), "z": (-0.8, 0.8)},
                       _sample_heine, _run(check_heine_ii, "a", "b", "c", "z"), tol=SUMMATION_TOL),
    IdentityDescriptor("LEM23_3PHI2", "nonterminating 3phi2 summed by an (m+1)-term 3phi2",
                       {"a,b": "|.| in [1.2, 4]", "c": "|c q^-m/ab| in [0.05, 0.8]",
                        "d": (-0.9, 0.9), "m": [0, 1, 2, 3]}, _sample_lemma23,
                       _run(check_lemma23, "a", "b", "c", "d", "m"), tol=SUMMATION_TOL),
    IdentityDescriptor("Q_GAUSS", "q-Gauss summation of a 2phi1 at c/ab",
                       {"a,b": "|.| in [1.2, 5]", "c": "|c/ab| in [0.05, 0.85]"},
                       _sample_gauss, _run(check_q_gauss, "a", "b", "c"), tol=SUMMATION_TOL),
    IdentityDescriptor("LEM23_M1_CASE", "m = 1 case of the 3phi2 summation in closed form",
                       {"a,b": "|.| in [1.2, 4]", "c": "|c/abq| in [0.05, 0.8]",
                        "d": (-0.9, 0.9)}, _sample_lemma23_m1,
                       _run(check_lemma23_m1, "a", "b", "c", "d"), tol=SUMMATION_TOL),
    IdentityDescriptor("CURIOUS_3_1", "non-hypergeometric expansion of (b^2q;q)/(bq;q)",
                       {"a": (-1, 1), "b": (-0.9, 0.9), "c": "|c| in [5, 20]"},
                       _sample_curious, _run(check_curious_3_1, "a", "b", "c")),
    IdentityDescriptor("TEN_PHI_9", "terminating very-well-poised 10phi9 summation (exact)",
                       {"a,b": "rational squares", "n": list(range(7))}, _sample_ten_phi_nine,
                       _run_exact(check_10phi9, "a", "b", "n"), tol=0.0, exact=True),
    IdentityDescriptor("TERMINATING_3_2", "terminating non-hypergeometric sum (exact)",
                       {"a": (-3, 3), "b": (-5, 5), "c": (-3, 3), "n": list(range(7))},
                       _sample_terminating_3_2,
                       _run_exact(check_terminating_3_2, "a", "b", "c", "n"), tol=0.0,
                       exact=True),
    IdentityDescriptor("THEOREM_3_1", "alternating expansion with base-q^2 products",
                       {"a": (-1, 1), "b": (-0.9, 0.9), "c": "|c| in [5, 20]"},
                       _sample_theorem_3_1, _run(check_theorem_3_1, "a", "b", "c")),
    IdentityDescriptor("QUADRATIC_3_4", "quadratic expansion and its parity split",
                       {"a": (-0.9, 0.9), "b": (-1, 1)}, _sample_quadratic,
                       _run(check_quadratic_3_4, "a", "b")),
    IdentityDescriptor("THEOREM_3_2", "expansion of (z;q)/(z/b;q) with an inner 2phi1",
                       {"a": (-1, 1), "b": "|b| in [0.4, 0.9]", "c": "|c| in [5, 20]",
                        "z": "|z/b| < 0.8"}, _sample_theorem_3_2,
                       _run(check_theorem_3_2, "a", "b", "c", "z")),
    IdentityDescriptor("THEOREM_3_3", "expansion with an inner terminating 3phi2",
                       {"a": (-1, 1), "b": "|b q^(1-m)| < 0.85", "c": "|c| in [5, 20]",
                        "e": (-0.9, 0.9), "m": [0, 1, 2, 3]}, _sample_theorem_3_3,
                       _run(check_theorem_3_3, "a", "b", "c", "e", "m")),
]
