import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsv import qintegral as qi
from qsv.qcore import qgamma
from qsv.quadrature import beta_integral


def test_geometric_oracles():
    q = 0.5
    assert qi.q_integrate(qi.QIntegrand(lambda t: 1.0), q) == pytest.approx(1.0, rel=1e-15)
    assert qi.q_integrate(qi.QIntegrand(lambda t: t), q) == pytest.approx(1 / (1 + q), rel=1e-15)
    assert qi.q_integrate(qi.QIntegrand(lambda t: t * t), q) == pytest.approx(4 / 7, rel=1e-15)


def test_vectorized_matches_scalar():
    q = 0.7
    scalar = qi.q_integrate(qi.QIntegrand(lambda t: math.sqrt(t) * (1 - t)), q)
    vec = qi.q_integrate(qi.QIntegrand(lambda t, ks: np.sqrt(t) * (1 - t), vectorized=True), q)
    assert vec == pytest.approx(scalar, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 6), q=st.floats(0.05, 0.95))
def test_monomials(n, q):
    # int t^n d_q t = (1-q)/(1-q^{n+1})
    got = qi.q_integrate(qi.QIntegrand(lambda t: t**n), q)
    assert got == pytest.approx((1 - q) / (1 - q ** (n + 1)), rel=1e-13)


def test_q_beta_examples():
    r = qi.check_q_beta(1.0, 1.0, 0.5)
    assert r.lhs == pytest.approx(1.0, rel=1e-14) and r.status == "pass"
    r = qi.check_q_beta(2.5, 1.7, 0.5)
    assert r.status == "pass" and r.rel_err <= 1e-10


def test_q_beta_against_mpmath_sum():
    # mpmath nsum of the Thomae sum and mpmath qgamma ratio, 30 digits
    r = qi.check_q_beta(2.3, 1.6, 0.5)
    assert r.lhs == pytest.approx(0.412836186798968002922330942004, rel=1e-13)
    assert r.rhs == pytest.approx(0.412836186798968002922330942004, rel=1e-13)


def test_q_beta_rejects_nonpositive():
    assert qi.check_q_beta(-0.5, 1.0, 0.5).status == "skipped-pole"


def test_qbetat_examples():
    p = qi.QBetaParams(alpha=2.2, beta=1.4, a=0.6, c=11.0, q=0.5)
    r = qi.check_qbetat(p)
    assert r.status == "pass" and r.rel_err <= 1e-8
    r = qi.check_qbetat(qi.QBetaParams(alpha=2.2, beta=1.2, a=0.5, c=9.0, q=0.5))
    assert r.status == "pass" and r.rel_err <= 1e-9


def test_qbetat_large_c_matches_q_beta():
    p = qi.QBetaParams(alpha=2.0, beta=1.5, a=0.3, c=1e8, q=0.5)
    big = qi.check_qbetat(p)
    plain = qi.check_q_beta(2.0, 1.5, 0.5)
    assert big.lhs == pytest.approx(plain.lhs, rel=1e-6)


@pytest.mark.parametrize("which", ["c", "a"])
def test_large_parameter_trend(which):
    p = qi.QBetaParams(alpha=2.2, beta=1.4, a=0.6, c=11.0, q=0.5)
    devs = qi.qbetat_large_parameter_trend(p, which)
    assert devs[0] > devs[1] > devs[2]


def test_qbetat2_examples():
    r = qi.check_qbetat2(qi.QBetaParams(beta=2.1, a=0.3, c=10.0, e=0.2, m=2, q=0.5))
    assert r.status == "pass" and r.rel_err <= 1e-8
    # m = 0, e = 0 is the alpha = beta + 1 member of the 2phi1 family
    p0 = qi.QBetaParams(beta=1.3, a=0.4, c=8.0, q=0.5)
    r2 = qi.check_qbetat2(p0)
    r1 = qi.check_qbetat(qi.QBetaParams(alpha=2.3, beta=1.3, a=0.4, c=8.0, q=0.5))
    assert r2.lhs == pytest.approx(r1.lhs, rel=1e-12)
    r = qi.qbetat2_e0_check(qi.QBetaParams(beta=1.5, a=0.4, c=8.0, m=1, q=0.5))
    assert r.status == "pass" and r.rel_err <= 1e-8


def test_q_limit_probe_decreasing():
    res = qi.q_limit_probe(qi.check_q_beta, {"alpha": 2.0, "beta": 3.0})
    assert qi.deviations_decreasing(res)
    assert res[-1].rhs == pytest.approx(beta_integral(2.0, 3.0), rel=1e-12)
    p = qi.QBetaParams(alpha=2.2, beta=1.4, a=0.6, c=11.0)
    assert qi.deviations_decreasing(qi.q_limit_probe(qi.check_qbetat, p))


def test_constant_integrand_no_deviation():
    for q in qi.DEFAULT_Q_SCHEDULE:
        assert qi.q_integrate(qi.QIntegrand(lambda t: 1.0), q) == pytest.approx(1.0, rel=1e-12)


def test_samplers_produce_passing_cases():
    rng = np.random.default_rng(3)
    for q in (0.3, 0.8):
        p = qi.sample_qbetat(rng, q)
        assert qi.check_qbetat(p).status == "pass"
        p = qi.sample_qbetat2(rng, q)
        assert qi.check_qbetat2(p).status == "pass"


def test_qgamma_consistency_at_half_integers():
    # Gamma_q(1/2)^2 / Gamma_q(1) is the q-beta value at alpha = beta = 1/2
    q = 0.6
    r = qi.check_q_beta(0.5, 0.5, q)
    assert r.rhs == pytest.approx(qgamma(0.5, q) ** 2, rel=1e-13)
