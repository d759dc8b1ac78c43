"""Ordinary shifted factorials, gamma ratios and hypergeometric series."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from qsv.errors import ConstraintError, PoleError
from qsv.qcore import (
    DEFAULT_POLICY,
    ORDINARY_KIND,
    SeriesSpec,
    TruncationPolicy,
    eval_series_counted,
    eval_series_exact,
    termination_index,
)
from qsv.result import CheckResult, compare, guarded


def shifted_factorial(a, k: int):
    """(a)_k = a (a+1) ... (a+k-1); exact for rational ``a``."""
    if k < 0:
        raise ValueError("shifted factorial needs k >= 0")
    return math.prod((a + j for j in range(k)), start=1)


def _check_pole(x):
    if x <= 0 and float(x) == math.floor(float(x)):
        raise PoleError(f"gamma pole at x={x}", factor=x)


def gamma_fn(x) -> float:
    _check_pole(x)
    return math.gamma(float(x))


def _log_gamma(x):
    _check_pole(x)
    x = float(x)
    sign = 1 if x > 0 or math.floor(-x) % 2 == 1 else -1
    return sign, math.lgamma(x)


def gamma_ratio(numerator_args, denominator_args) -> float:
    """prod Gamma(num) / prod Gamma(den), via log-gamma to dodge overflow."""
    sign, total = 1, 0.0
    for x in numerator_args:
        s, lg = _log_gamma(x)
        sign *= s
        total += lg
    for x in denominator_args:
        s, lg = _log_gamma(x)
        sign *= s
        total -= lg
    return sign * math.exp(total)


def beta_fn(alpha, beta) -> float:
    return gamma_ratio([alpha, beta], [alpha + beta])


def eval_hyper(spec: SeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY):
    """Value of an ordinary rF(r-1) series (float or elementwise array)."""
    if spec.kind != ORDINARY_KIND:
        raise ValueError("eval_hyper needs an ordinary-kind SeriesSpec")
    return eval_series_counted(spec, policy)[0]


def hyp2f1(a, b, c, x, policy: TruncationPolicy = DEFAULT_POLICY):
    spec = SeriesSpec.hyper((a, b), (c,), x)
    if isinstance(x, Fraction) or (spec.is_exact and termination_index(spec) is not None):
        return eval_series_exact(spec)
    return eval_series_counted(spec, policy)[0]


def hyp2f1_poly(a, b, c):
    """Coefficients (lowest degree first) of a terminating 2F1 in its argument."""
    spec = SeriesSpec.hyper((a, b), (c,), 0.0)
    n = termination_index(spec)
    if n is None:
        raise ConstraintError("2F1 does not terminate")
    coeffs = [1.0]
    for k in range(n):
        den = (k + 1) * (c + k)
        if den == 0 or abs(den) <= 1e-13:
            raise PoleError(f"(c)_k vanishes at k={k + 1}", index=k + 1, factor=c)
        coeffs.append(coeffs[-1] * (a + k) * (b + k) / den)
    return np.array(coeffs)


def hyp2f1_array(a, b, c, x, policy: TruncationPolicy = DEFAULT_POLICY):
    """2F1 over an array of arguments; terminating cases go through a polynomial."""
    x = np.asarray(x, dtype=float)
    spec = SeriesSpec.hyper((a, b), (c,), x)
    if termination_index(spec) is not None:
        return np.polynomial.polynomial.polyval(x, hyp2f1_poly(a, b, c))
    return eval_series_counted(spec, policy)[0]


def gauss_sum_unit(a, b, c, n_base: int = 4000):
    """2F1(a, b; c; 1) by summing the series itself.

    The partial sums behave like S - N^{-s}(A0 + A1/N + ...), s = c-a-b, so
    three partial sums at N, 2N, 4N are combined to cancel A0 and A1.
    """
    s = c - a - b
    if s <= 0:
        raise ConstraintError("Gauss summation needs c - a - b > 0")
    spec = SeriesSpec.hyper((a, b), (c,), 1.0)
    n = termination_index(spec)
    if n is not None:
        return float(sum(_terms_upto(a, b, c, n + 1)))
    terms = _terms_upto(a, b, c, 4 * n_base)
    partial = {N: math.fsum(terms[:N]) for N in (n_base, 2 * n_base, 4 * n_base)}
    # solve S_N = S - A0 N^-s - A1 N^-(s+1) at N, 2N, 4N
    rows = [[1.0, -(N ** -s), -(N ** -(s + 1))] for N in partial]
    sol = np.linalg.solve(np.array(rows), np.array(list(partial.values())))
    return float(sol[0])


def _terms_upto(a, b, c, count):
    out = []
    t = 1.0
    for k in range(count):
        out.append(t)
        t *= (a + k) * (b + k) / ((k + 1) * (c + k))
    return out


@guarded
def gauss_summation_check(a, b, c, tol: float = 1e-8) -> CheckResult:
    """2F1(a,b;c;1) = Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b))."""
    lhs = gauss_sum_unit(a, b, c)
    rhs = gamma_ratio([c, c - a - b], [c - a, c - b])
    return compare(lhs, rhs, tol)


@guarded
def legendre_duplication_check(beta, tol: float = 1e-12) -> CheckResult:
    """Gamma(2b) = pi^{-1/2} 2^{2b-1} Gamma(b) Gamma(b+1/2).

    Also confirms the rewritten left side Gamma(b)^2/(2 Gamma(2b)) equals
    sqrt(pi)/4^b * Gamma(b)/Gamma(b+1/2); the worse of the two is reported.
    """
    _check_pole(2 * beta)
    lhs = gamma_fn(2 * beta)
    rhs = 2 ** (2 * beta - 1) * gamma_fn(beta) * gamma_fn(beta + 0.5) / math.sqrt(math.pi)
    main = compare(lhs, rhs, tol)
    alt = compare(gamma_ratio([beta, beta], [2 * beta]) / 2,
                  math.sqrt(math.pi) / 4**beta * gamma_ratio([beta], [beta + 0.5]), tol)
    if alt.rel_err > main.rel_err:
        alt.diagnostics["form"] = "sqrt(pi)/4^beta"
        return alt
    return main


@guarded
def pfaff_transform_check(m: int, b, c, x, tol: float = 1e-12) -> CheckResult:
    """2F1(-m,b;c;x) = (c-b)_m/(c)_m 2F1(-m,b;b+1-m-c;1-x), terminating."""
    if m < 0:
        raise ConstraintError("m must be a nonnegative integer")
    exact = all(isinstance(v, (int, Fraction)) for v in (b, c, x))
    if exact:
        b, c, x = Fraction(b), Fraction(c), Fraction(x)
        num, den = (-m, b), (c,)
        lhs = eval_series_exact(SeriesSpec.hyper(num, den, x))
        inner = eval_series_exact(SeriesSpec.hyper(num, (b + 1 - m - c,), 1 - x))
    else:
        lhs = eval_series_counted(SeriesSpec.hyper((-m, b), (c,), x))[0]
        inner = eval_series_counted(SeriesSpec.hyper((-m, b), (b + 1 - m - c,), 1 - x))[0]
    cm = shifted_factorial(c, m)
    if cm == 0:
        raise PoleError("(c)_m vanishes", factor=c)
    return compare(lhs, shifted_factorial(c - b, m) / cm * inner, tol, terms_used=m + 1)
