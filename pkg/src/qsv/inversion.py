"""An explicit inverse pair of lower-triangular matrices.

Entries are computed in whatever arithmetic the parameters carry, so
rational inputs give exact entries and exact delta sums.  Floats are only
used for the infinite sums of :func:`apply_inverse_relation`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from qsv.errors import PoleError
from qsv.qcore import (
    DEFAULT_POLICY,
    INNER_POLICY,
    SeriesSpec,
    TruncationPolicy,
    eval_series,
    qpoch_finite,
    qpoch_infinite,
    sum_terms,
)
from qsv.result import CheckResult, compare, guarded

GENERAL = "general"
SPECIAL = "special"
IDENTITY = "identity"

F_TO_G = "f-to-g"
G_TO_F = "g-to-f"

DEFAULT_WINDOW = 12


def _exact(*values):
    return all(isinstance(v, (int, Fraction)) for v in values)


def _div(num, den, what):
    if den == 0:
        raise PoleError(f"{what}: zero denominator", factor=den)
    return num / den


@dataclass(frozen=True)
class MatrixPair:
    """Parameters of one inverse pair (f, g).

    The general kind takes sequences ``a_seq``, ``c_seq`` and a scalar ``d``;
    the special kind is the substitution a_j = a + q^j, c_j = a + b q^j,
    d = c, written with q-shifted factorials.
    """

    kind: str
    a_seq: Callable[[int], object] | None = None
    c_seq: Callable[[int], object] | None = None
    d: object = None
    a: object = None
    b: object = None
    c: object = None
    q: object = None

    @classmethod
    def general(cls, a_seq, c_seq, d):
        return cls(GENERAL, a_seq=a_seq, c_seq=c_seq, d=d)

    @classmethod
    def special(cls, a, b, c, q):
        return cls(SPECIAL, a=a, b=b, c=c, q=q)

    @classmethod
    def identity(cls):
        return cls(IDENTITY)

    def as_general(self) -> "MatrixPair":
        """The general-kind pair the special kind was specialised from."""
        if self.kind != SPECIAL:
            return self
        a, b, q = self.a, self.b, self.q
        return MatrixPair.general(lambda j: a + q**j, lambda j: a + b * q**j, self.c)


def f_entry(pair: MatrixPair, n: int, k: int):
    if n < k:
        return 0
    if n == k:
        return 1
    if pair.kind == IDENTITY:
        return 0
    if pair.kind == SPECIAL:
        a, b, c, q = pair.a, pair.b, pair.c, pair.q
        w = a + b * q**k
        D = c - a * w
        num = qpoch_finite(1 / b, q, n - k) * qpoch_finite(_div(w * q**k, D, "f"), q, n - k)
        den = qpoch_finite(q, q, n - k) * qpoch_finite(_div(w * b * q ** (k + 1), D, "f"), q, n - k)
        return _div(num, den, f"f[{n},{k}]")
    A, C, d = pair.a_seq, pair.c_seq, pair.d
    ck = C(k)
    dk = _div(d, ck, "f")
    num = math.prod(((A(j) - dk) * (A(j) - ck) for j in range(k, n)), start=1)
    den = math.prod(((C(j) - dk) * (C(j) - ck) for j in range(k + 1, n + 1)), start=1)
    return _div(num, den, f"f[{n},{k}]")


def g_entry(pair: MatrixPair, k: int, l: int):
    if k < l:
        return 0
    if k == l:
        return 1
    if pair.kind == IDENTITY:
        return 0
    if pair.kind == SPECIAL:
        a, b, c, q = pair.a, pair.b, pair.c, pair.q
        w = a + b * q**k
        D = c - a * w
        lead = _div(c - (a + b * q**l) * (a + q**l), c - w * (a + q**k), f"g[{k},{l}]")
        if _exact(a, b, c, q):
            sign = -1 if (k - l) % 2 else 1
            signed = sign * q ** math.comb(k - l, 2) * qpoch_finite(q ** (l - k + 1) / b, q, k - l)
        else:
            # same value; the displayed form overflows in floats for large k-l
            signed = qpoch_finite(b, q, k - l) / b ** (k - l)
        num = signed * qpoch_finite(_div(w * q ** (l + 1), D, "g"), q, k - l)
        den = qpoch_finite(q, q, k - l) * qpoch_finite(_div(w * b * q**l, D, "g"), q, k - l)
        return lead * _div(num, den, f"g[{k},{l}]")
    A, C, d = pair.a_seq, pair.c_seq, pair.d
    ck = C(k)
    dk = _div(d, ck, "g")
    lead = _div((A(l) * C(l) - d) * (A(l) - C(l)), (A(k) * ck - d) * (A(k) - ck), f"g[{k},{l}]")
    num = math.prod(((A(j) - dk) * (A(j) - ck) for j in range(l + 1, k + 1)), start=1)
    den = math.prod(((C(j) - dk) * (C(j) - ck) for j in range(l, k)), start=1)
    return lead * _div(num, den, f"g[{k},{l}]")


def delta_check(pair: MatrixPair, n: int, l: int, order: str = "fg"):
    """sum_{l<=k<=n} f_{nk} g_{kl} (order "fg") or g_{nk} f_{kl} (order "gf")."""
    if n < l:
        raise ValueError("delta_check needs n >= l")
    if order == "fg":
        return sum((f_entry(pair, n, k) * g_entry(pair, k, l) for k in range(l, n + 1)), 0)
    if order == "gf":
        return sum((g_entry(pair, n, k) * f_entry(pair, k, l) for k in range(l, n + 1)), 0)
    raise ValueError(f"unknown order {order!r}")


def delta_failures(pair: MatrixPair, window: int = DEFAULT_WINDOW):
    """All (order, n, l) in the window where the delta sum is not exactly delta_{nl}."""
    bad = []
    for order in ("fg", "gf"):
        for n in range(window + 1):
            for l in range(n + 1):
                if delta_check(pair, n, l, order) != (1 if n == l else 0):
                    bad.append((order, n, l))
    return bad


def _pole_free(pair: MatrixPair, window: int, margin) -> bool:
    """Reject pairs whose window entries hit (or come near) a vanishing factor."""
    if pair.kind == SPECIAL:
        pair = pair.as_general()
    A, C, d = pair.a_seq, pair.c_seq, pair.d
    cs = [C(j) for j in range(window + 1)]
    if any(abs(ck) <= margin for ck in cs):
        return False
    for k, ck in enumerate(cs):
        if abs(A(k) * ck - d) <= margin or abs(A(k) - ck) <= margin:
            return False
        for j, cj in enumerate(cs):
            if j != k and (abs(cj - ck) <= margin or abs(cj - d / ck) <= margin):
                return False
    return True


def sample_general_pair(rng: random.Random, window: int = DEFAULT_WINDOW,
                        margin=Fraction(1, 10**6)) -> MatrixPair:
    """Random rational affine sequences a_j = a0 + a1 j, c_j = c0 + c1 j and d."""
    while True:
        a0, a1, c0, c1, d = (Fraction(rng.randint(-40, 40), rng.randint(1, 12)) for _ in range(5))
        pair = MatrixPair.general(lambda j, a0=a0, a1=a1: a0 + a1 * j,
                                  lambda j, c0=c0, c1=c1: c0 + c1 * j, d)
        if c1 != 0 and d != 0 and _pole_free(pair, window, margin):
            return pair


def sample_special_pair(rng: random.Random, window: int = DEFAULT_WINDOW,
                        margin=Fraction(1, 10**6)) -> MatrixPair:
    while True:
        q = Fraction(rng.randint(1, 9), 10)
        a = Fraction(rng.randint(-30, 30), rng.randint(1, 9))
        b = Fraction(rng.choice([-1, 1]) * rng.randint(1, 30), rng.randint(1, 9))
        c = Fraction(rng.randint(-60, 60), rng.randint(1, 9))
        if b == 1:
            continue
        pair = MatrixPair.special(a, b, c, q)
        if _pole_free(pair, window, margin) and _special_pole_free(pair, window):
            return pair


def _special_pole_free(pair, window):
    try:
        for n in range(window + 1):
            for k in range(n + 1):
                f_entry(pair, n, k)
                g_entry(pair, n, k)
    except ZeroDivisionError:
        return False
    return True


# ---------------------------------------------------------------------------
# rotated inverse relations


@dataclass(frozen=True)
class InverseRelationCase:
    """Sequences a_n, b_k claimed to satisfy sum_{n>=k} f_{nk} a_n = b_k."""

    pair: MatrixPair
    a_seq: Callable[[int], float]
    b_seq: Callable[[int], float]
    direction: str = F_TO_G
    policy: TruncationPolicy = DEFAULT_POLICY


@guarded
def apply_inverse_relation(case: InverseRelationCase, target_index: int,
                           tol: float = 1e-9) -> CheckResult:
    """Evaluate the opposite side of a rotated inverse relation.

    With direction f-to-g the input is assumed to satisfy the f-relation, so
    sum_{k>=l} g_{kl} b_k is evaluated and compared with a_l; g-to-f does the
    converse and compares sum_{n>=k} f_{nk} a_n with b_k.
    """
    pair, policy = case.pair, case.policy
    i = target_index
    if case.direction == F_TO_G:
        value, terms = sum_terms(lambda k: g_entry(pair, k, i) * case.b_seq(k), policy, i)
        expected = case.a_seq(i)
    elif case.direction == G_TO_F:
        value, terms = sum_terms(lambda n: f_entry(pair, n, i) * case.a_seq(n), policy, i)
        expected = case.b_seq(i)
    else:
        raise ValueError(f"unknown direction {case.direction!r}")
    return compare(value, expected, tol, terms_used=terms)


def _u(a, b, c, q, k, shift=0):
    w = a + b * q**k
    return w * q**shift / (c - a * w)


def kummer_relation_case(a, b, c, q, direction=F_TO_G, policy=DEFAULT_POLICY):
    """a_n = (-bq)^n and the b_k that q-Kummer summation produces."""
    P = qpoch_infinite

    def b_seq(k):
        u = _u(a, b, c, q, k)
        return (-b * q) ** k * P(-q, q) * P(u * q ** (k + 1), q * q) * P(
            u * b * b * q ** (k + 2), q * q) / (P(-b * q, q) * P(u * b * q ** (k + 1), q))

    return InverseRelationCase(MatrixPair.special(a, b, c, q), lambda n: (-b * q) ** n,
                               b_seq, direction, policy)


def heine_relation_case(a, b, c, z, q, direction=F_TO_G, policy=DEFAULT_POLICY):
    """a_n = z^n and the b_k from the second iterate of Heine's transformation."""
    P = qpoch_infinite

    def b_seq(k):
        u = _u(a, b, c, q, k)
        x = u * b * b * q ** (k + 1)
        inner = eval_series(SeriesSpec.qphi((1 / b, z / (b * b * q)), (z / b,), q, x), INNER_POLICY)
        return z**k * P(z / b, q) * P(x, q) / (P(z, q) * P(u * b * q ** (k + 1), q)) * inner

    return InverseRelationCase(MatrixPair.special(a, b, c, q), lambda n: z**n, b_seq,
                               direction, policy)


def lemma23_relation_case(a, b, c, e, m, q, direction=F_TO_G, policy=DEFAULT_POLICY):
    """The (m+1)-term 3phi2 summation sequences."""
    P = qpoch_infinite
    ratio = b * b * q ** (1 - m)

    def a_seq(n):
        return qpoch_finite(e * q**m, q, n) / qpoch_finite(e, q, n) * ratio**n

    def b_seq(k):
        u = _u(a, b, c, q, k)
        inner = eval_series(SeriesSpec.qphi((1 / b, u * q**k, q**-m), (1 / (b * b), e * q**k), q, q),
                            INNER_POLICY)
        return inner * qpoch_finite(e * q**m, q, k) / qpoch_finite(e, q, k) * P(b * q, q) * P(
            u * b * b * q ** (k + 1), q) / (P(b * b * q, q) * P(u * b * q ** (k + 1), q)) * ratio**k

    return InverseRelationCase(MatrixPair.special(a, b, c, q), a_seq, b_seq, direction, policy)
