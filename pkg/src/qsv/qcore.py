"""q-shifted factorials, the q-gamma function and basic hypergeometric series.

Infinite products are evaluated in two stages: factors with ``|a q^j| > 1/2``
are multiplied directly, the remaining tail is summed as a logarithm,

    log (v;q)_inf = -sum_{n>=1} v^n / (n (1 - q^n)),   |v| <= 1/2,

which converges geometrically in ``v`` whatever the base.  This keeps the
cost bounded as ``q -> 1`` (a direct product at q = 0.999 needs ~37000
factors to reach 1e-16).  All products are available in log form so that
values such as ``(q;q)_inf`` at q = 0.999, which underflow, can still be
combined into finite ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from numbers import Rational

import numpy as np

from qsv.errors import ConstraintError, DivergenceError, PoleError, TruncationError

TAIL_SWITCH = 0.5
# a numerator parameter counts as q^{-n} (or -n) within this relative distance
TERMINATION_RTOL = 1e-12
# float denominator factors at or below this magnitude are treated as poles
POLE_ATOL = 1e-13

Q_KIND = "q"
ORDINARY_KIND = "ordinary"


@dataclass(frozen=True)
class TruncationPolicy:
    """Tail rules for infinite sums and products.

    A sum stops after ``consecutive_small`` successive terms fall below
    ``max(abs_floor, rel_floor * |partial sum|)``.
    """

    abs_floor: float = 1e-16
    rel_floor: float = 1e-15
    consecutive_small: int = 3
    max_terms: int = 10000

    def __post_init__(self):
        if not (self.abs_floor > 0 and self.rel_floor > 0):
            raise ValueError("truncation floors must be positive")
        if self.consecutive_small < 1 or self.max_terms < 1:
            raise ValueError("consecutive_small and max_terms must be >= 1")

    def threshold(self, partial: float) -> float:
        return max(self.abs_floor, self.rel_floor * abs(partial))

    def with_budget(self, max_terms: int) -> "TruncationPolicy":
        return replace(self, max_terms=max(self.max_terms, int(max_terms)))


DEFAULT_POLICY = TruncationPolicy()
# inner series inside summands get a tighter relative floor
INNER_POLICY = TruncationPolicy(rel_floor=1e-16)


def check_base(q):
    """Return ``q`` unchanged if it is a valid base, 0 < q < 1."""
    if not 0 < q < 1:
        raise ValueError(f"base must lie in (0, 1), got {q!r}")
    return q


def budget_for_base(policy: TruncationPolicy, q: float, scale: float = 100.0):
    """Widen ``max_terms`` to ~scale/(1-q); q-sums need O(1/(1-q)) terms."""
    return policy.with_budget(math.ceil(scale / (1.0 - float(q))))


def _is_zero(x) -> bool:
    if isinstance(x, Rational):
        return x == 0
    return abs(x) <= POLE_ATOL


# ---------------------------------------------------------------------------
# q-shifted factorials


def qpoch_finite(a, q, k: int):
    """(a;q)_k for any integer k.

    Works for floats and exact rationals alike.  For negative k this is
    ``1 / prod_{j=1}^{|k|} (1 - a q^{-j})``.
    """
    k = int(k)
    if k >= 0:
        return math.prod((1 - a * q**j for j in range(k)), start=1)
    den = 1
    for j in range(1, -k + 1):
        f = 1 - a * q**-j
        if _is_zero(f):
            raise PoleError(f"(a;q)_{k}: factor 1 - a q^-{j} vanishes",
                            index=j, factor=f)
        den *= f
    return 1 / den


def log_qpoch_infinite(a, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Return ``(sign, log|(a;q)_inf|)``; sign is 0 when the product vanishes."""
    a = float(a)
    q = float(check_base(q))
    sign = 1
    logs = []
    j = 0
    x = a
    while abs(x) > TAIL_SWITCH:
        if j >= policy.max_terms:
            raise TruncationError("(a;q)_inf: direct factors exceeded max_terms",
                                  partial=sign * math.exp(math.fsum(logs)), terms=j)
        f = 1.0 - x
        if f == 0.0:
            return 0, -math.inf
        if f < 0:
            sign = -sign
        logs.append(math.log(abs(f)))
        j += 1
        x = a * q**j
    if x != 0.0:
        logq = math.log(q)
        vn = 1.0
        small = 0
        n = 0
        while True:
            n += 1
            if n > policy.max_terms:
                raise TruncationError("(a;q)_inf: tail series exceeded max_terms",
                                      partial=sign * math.exp(math.fsum(logs)),
                                      terms=j + n)
            vn *= x
            term = vn / (n * math.expm1(n * logq))  # = -v^n / (n (1 - q^n))
            logs.append(term)
            if abs(term) < policy.abs_floor:
                small += 1
                if small >= policy.consecutive_small:
                    break
            else:
                small = 0
    return sign, math.fsum(logs)


def qpoch_infinite(a, q, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """(a;q)_inf = prod_{j>=0} (1 - a q^j)."""
    sign, logabs = log_qpoch_infinite(a, q, policy)
    if sign == 0:
        return 0.0
    return sign * math.exp(logabs)


def log_qpoch_infinite_array(u, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Vectorised :func:`log_qpoch_infinite` over an array of ``a`` values."""
    u = np.asarray(u, dtype=float)
    q = float(check_base(q))
    sign = np.ones(u.shape)
    logabs = np.zeros(u.shape)
    v = u.copy()
    j = 0
    with np.errstate(divide="ignore"):
        while True:
            big = np.abs(v) > TAIL_SWITCH
            if not big.any():
                break
            if j >= policy.max_terms:
                raise TruncationError("(a;q)_inf: direct factors exceeded max_terms",
                                      terms=j)
            f = 1.0 - v[big]
            sign[big] *= np.sign(f)
            logabs[big] += np.log(np.abs(f))
            j += 1
            v[big] = u[big] * q**j
    logq = math.log(q)
    vn = np.ones(u.shape)
    tail = np.zeros(u.shape)
    comp = np.zeros(u.shape)
    small = 0
    for n in range(1, policy.max_terms + 1):
        vn *= v
        term = vn / (n * math.expm1(n * logq))
        # Neumaier compensated accumulation
        t = tail + term
        comp += np.where(np.abs(tail) >= np.abs(term), (tail - t) + term, (term - t) + tail)
        tail = t
        if np.max(np.abs(term), initial=0.0) < policy.abs_floor:
            small += 1
            if small >= policy.consecutive_small:
                break
        else:
            small = 0
    else:
        raise TruncationError("(a;q)_inf: tail series exceeded max_terms")
    logabs = logabs + tail + comp
    logabs[sign == 0] = -np.inf
    return sign, logabs


def qpoch_infinite_array(u, q, policy: TruncationPolicy = DEFAULT_POLICY):
    sign, logabs = log_qpoch_infinite_array(u, q, policy)
    return sign * np.exp(logabs)


# ---------------------------------------------------------------------------
# q-gamma


def _check_gamma_arg(x):
    if x <= 0 and float(x) == math.floor(float(x)):
        raise PoleError(f"gamma pole at nonpositive integer x={x}", factor=x)


def log_qgamma(x, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Return ``(sign, log|Gamma_q(x)|)``."""
    _check_gamma_arg(x)
    q = float(check_base(q))
    x = float(x)
    s1, l1 = log_qpoch_infinite(q, q, policy)
    s2, l2 = log_qpoch_infinite(q**x, q, policy)
    if s2 == 0:
        raise PoleError(f"q-gamma pole at x={x}", factor=x)
    return s1 * s2, (1.0 - x) * math.log1p(-q) + l1 - l2


def qgamma(x, q, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Thomae's q-gamma, (1-q)^{1-x} (q;q)_inf / (q^x;q)_inf."""
    sign, logabs = log_qgamma(x, q, policy)
    return sign * math.exp(logabs)


def qgamma_ratio(numerator_args, denominator_args, q,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """prod Gamma_q(num) / prod Gamma_q(den), combined in log space."""
    sign, total = 1, 0.0
    for x in numerator_args:
        s, lg = log_qgamma(x, q, policy)
        sign *= s
        total += lg
    for x in denominator_args:
        s, lg = log_qgamma(x, q, policy)
        sign *= s
        total -= lg
    return sign * math.exp(total)


# ---------------------------------------------------------------------------
# hypergeometric series


@dataclass(frozen=True)
class SeriesSpec:
    """One r-phi-(r-1) (kind "q") or rF(r-1) (kind "ordinary") evaluation.

    ``argument`` may be a float, an exact rational, or a numpy array (the
    parameters are shared and the series is summed elementwise).
    """

    numerator: tuple
    denominator: tuple
    argument: object
    base: object = None
    kind: str = Q_KIND

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(self.numerator))
        object.__setattr__(self, "denominator", tuple(self.denominator))
        if self.kind not in (Q_KIND, ORDINARY_KIND):
            raise ValueError(f"unknown series kind {self.kind!r}")
        if len(self.denominator) != len(self.numerator) - 1:
            raise ValueError("need r numerator and r-1 denominator parameters")
        if self.kind == Q_KIND:
            if self.base is None:
                raise ValueError("q-series need a base")
            check_base(self.base)

    @classmethod
    def qphi(cls, numerator, denominator, q, z):
        return cls(tuple(numerator), tuple(denominator), z, q, Q_KIND)

    @classmethod
    def hyper(cls, numerator, denominator, z):
        return cls(tuple(numerator), tuple(denominator), z, None, ORDINARY_KIND)

    @property
    def is_exact(self) -> bool:
        vals = self.numerator + self.denominator + (self.argument,)
        if self.kind == Q_KIND:
            vals += (self.base,)
        return all(isinstance(v, Rational) for v in vals)


def termination_index(spec: SeriesSpec, max_terms: int = DEFAULT_POLICY.max_terms):
    """Smallest n such that some numerator parameter is q^{-n} (or -n), else None."""
    best = None
    for p in spec.numerator:
        n = _termination_of(p, spec, max_terms)
        if n is not None and (best is None or n < best):
            best = n
    return best


def _termination_of(p, spec, max_terms):
    if spec.kind == ORDINARY_KIND:
        if isinstance(p, Rational):
            return int(-p) if p <= 0 and p == int(p) else None
        n = round(-p)
        if 0 <= n <= max_terms and abs(p + n) <= TERMINATION_RTOL * max(1.0, n):
            return n
        return None
    q = spec.base
    if p <= 0:
        return None
    n = round(math.log(float(p)) / -math.log(float(q)))
    if not 0 <= n <= max_terms:
        return None
    if isinstance(p, Rational) and isinstance(q, Rational):
        return n if p * Fraction(q) ** n == 1 else None
    target = float(q) ** -n
    return n if abs(float(p) - target) <= TERMINATION_RTOL * target else None


def _ratio_factory(spec: SeriesSpec):
    """Return k -> c_{k+1}/c_k, the parameter part of the term ratio."""
    num, den = spec.numerator, spec.denominator
    if spec.kind == Q_KIND:
        q = spec.base

        def ratio(k):
            qk = q**k
            d = 1 - q ** (k + 1)
            for b in den:
                f = 1 - b * qk
                if _is_zero(f):
                    raise PoleError(f"denominator ({b};q)_k vanishes at k={k + 1}",
                                    index=k + 1, factor=b)
                d *= f
            r = 1
            for a in num:
                r *= 1 - a * qk
            return r / d
    else:

        def ratio(k):
            d = k + 1
            for b in den:
                f = b + k
                if _is_zero(f):
                    raise PoleError(f"denominator ({b})_k vanishes at k={k + 1}",
                                    index=k + 1, factor=b)
                d *= f
            r = 1
            for a in num:
                r *= a + k
            return r / d

    return ratio


def eval_series_counted(spec: SeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY):
    """Like :func:`eval_series` but also return the number of terms summed."""
    if isinstance(spec.argument, np.ndarray):
        return _sum_array(spec, policy)
    return _sum_scalar(spec, policy)


def eval_series(spec: SeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY):
    """Floating-point value of a basic (or ordinary) hypergeometric series.

    Terminating series are summed exactly up to the last nonzero term;
    nonterminating ones need ``|z| < 1`` and stop per ``policy``.
    """
    return eval_series_counted(spec, policy)[0]


def _sum_scalar(spec, policy):
    n_stop = termination_index(spec, policy.max_terms)
    z = float(spec.argument)
    if n_stop is None and abs(z) >= 1:
        raise DivergenceError(f"nonterminating series with |z| = {abs(z)} >= 1")
    ratio = _ratio_factory(spec)
    terms = [1.0]
    term = running = 1.0
    small = 0
    limit = n_stop if n_stop is not None else policy.max_terms
    k = 0
    while k < limit:
        term *= float(ratio(k)) * z
        k += 1
        terms.append(term)
        running += term
        if n_stop is None:
            if abs(term) <= policy.threshold(running):
                small += 1
                if small >= policy.consecutive_small:
                    break
            else:
                small = 0
    else:
        if n_stop is None:
            raise TruncationError("series did not converge within max_terms",
                                  partial=math.fsum(terms), terms=k + 1)
    return math.fsum(terms), k + 1


def _sum_array(spec, policy):
    n_stop = termination_index(spec, policy.max_terms)
    z = np.asarray(spec.argument, dtype=float)
    if n_stop is None and z.size and np.max(np.abs(z)) >= 1:
        bad = int(np.argmax(np.abs(z)))
        raise DivergenceError("nonterminating series with |z| >= 1", index=bad)
    ratio = _ratio_factory(spec)
    total = np.ones(z.shape)
    comp = np.zeros(z.shape)
    term = np.ones(z.shape)
    small = 0
    limit = n_stop if n_stop is not None else policy.max_terms
    k = 0
    while k < limit:
        term = term * (float(ratio(k)) * z)
        k += 1
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        if n_stop is None:
            floor = np.maximum(policy.abs_floor, policy.rel_floor * np.abs(total))
            if np.all(np.abs(term) <= floor):
                small += 1
                if small >= policy.consecutive_small:
                    break
            else:
                small = 0
    else:
        if n_stop is None:
            raise TruncationError("series did not converge within max_terms",
                                  terms=k + 1)
    return total + comp, k + 1


def eval_series_exact(spec: SeriesSpec) -> Fraction:
    """Exact rational value of a terminating series with rational data."""
    if not spec.is_exact:
        raise ConstraintError("exact evaluation needs rational parameters")
    if spec.kind == Q_KIND:
        spec = replace(spec, base=Fraction(spec.base))
    n_stop = termination_index(spec, max_terms=10**6)
    if n_stop is None:
        raise ConstraintError("exact evaluation needs a terminating series")
    ratio = _ratio_factory(spec)
    z = Fraction(spec.argument)
    term = total = Fraction(1)
    for k in range(n_stop):
        term *= ratio(k) * z
        total += term
    return total


def sum_terms(term, policy: TruncationPolicy = DEFAULT_POLICY, start: int = 0):
    """Sum ``term(start) + term(start+1) + ...`` until the tail criterion holds.

    Returns ``(value, terms_used)``.  Used for the outer sums whose summands
    are not hypergeometric (infinite products inside each term).
    """
    terms = []
    running = 0.0
    small = 0
    for i in range(start, start + policy.max_terms):
        t = float(term(i))
        if not math.isfinite(t):
            raise DivergenceError(f"non-finite term at index {i}", index=i)
        terms.append(t)
        running += t
        if abs(t) <= policy.threshold(running):
            small += 1
            if small >= policy.consecutive_small:
                return math.fsum(terms), len(terms)
        else:
            small = 0
    raise TruncationError("sum did not settle within max_terms",
                          partial=math.fsum(terms), terms=len(terms))
