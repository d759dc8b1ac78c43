import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsv import identities as ids
from qsv.qcore import eval_series


def ok(result, tol=None):
    assert result.status == "pass", (result.status, result.rel_err, result.diagnostics)
    if tol is not None:
        assert result.rel_err <= tol


# ---- summation lemmas -------------------------------------------------------

def test_q_kummer_examples():
    ok(ids.check_q_kummer(0.0, 4.0, 0.5), 1e-10)
    ok(ids.check_q_kummer(0.3, 100.0, 0.5), 1e-9)


def test_q_kummer_brute_force():
    # independent 500-term sum of the left side at a = 0, b = 4
    q, b = 0.5, 4.0
    z = -q / b
    total, term = 0.0, 1.0
    for k in range(500):
        total += term
        term *= (1 - b * q**k) / ((1 - q ** (k + 1)) * (1 - q ** (k + 1) * 0 / b)) * z
    r = ids.check_q_kummer(0.0, b, q)
    assert r.lhs == pytest.approx(total, rel=1e-13)


def test_rogers_examples():
    ok(ids.check_rogers_6phi5(0.09, 2.0, 3.0, 4.0, 0.5), 1e-10)
    r = ids.rogers_to_kummer_check(0.25, 4.0, 0.5)
    ok(r, 1e-10)
    kummer = ids.check_q_kummer(0.25, 4.0, 0.5)
    assert r.lhs == pytest.approx(kummer.lhs, rel=1e-12)


def test_rogers_negative_a_is_skipped():
    r = ids.check_rogers_6phi5(-0.2, 2.0, 3.0, 4.0, 0.5)
    assert r.status == "skipped-pole"
    assert r.diagnostics["reason"].startswith("constraint")


def test_heine_examples():
    r = ids.check_heine_ii(0.3, 2.0, 0.7, 0.0, 0.5)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0)
    ok(ids.check_heine_ii(0.3, 2.0, 0.3, 0.4, 0.5), 1e-10)
    ok(ids.check_heine_ii(0.2, 5.0, 0.7, 0.5, 0.6), 1e-10)


def test_heine_out_of_domain():
    assert ids.check_heine_ii(0.2, 0.5, 0.7, 0.5, 0.6).status == "skipped-pole"


def test_q_gauss_examples():
    r = ids.check_q_gauss(3.0, 1.0, 0.6, 0.5)
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0)
    ok(ids.check_q_gauss(3.0, 4.0, 0.6, 0.5), 1e-10)
    ok(ids.check_q_gauss(2.0, 2.0, 0.9, 0.8), 1e-9)


def test_lemma23_examples():
    ok(ids.check_lemma23(2.0, 3.0, 0.4, 0.15, 2, 0.5), 1e-9)
    # m = 0 is q-Gauss whatever d is
    r0 = ids.check_lemma23(3.0, 4.0, 0.6, 0.27, 0, 0.5)
    gauss = ids.check_q_gauss(3.0, 4.0, 0.6, 0.5)
    assert r0.rhs == pytest.approx(gauss.rhs, rel=1e-13)


def test_lemma23_m1_two_term_factor():
    a, b, c, d, q = 2.0, 3.0, 0.4, 0.15, 0.5
    r = ids.check_lemma23_m1(a, b, c, d, q)
    ok(r, 1e-9)
    gauss = ids.check_q_gauss(a, b, c, q).rhs
    factor = 1 - (1 - a) * (1 - b) / ((1 - a * b * q / c) * (1 - d))
    assert r.rhs == pytest.approx(gauss * factor, rel=1e-12)


# ---- expansions -------------------------------------------------------------

def test_curious_examples():
    ok(ids.check_curious_3_1(1.0, 0.3, 10.0, 0.5), 1e-9)
    ok(ids.curious_3_1_c0_check(2.5, 0.4, 0.5), 1e-8)
    ok(ids.curious_3_1_a0_check(0.3, 9.0, 0.5), 1e-8)


def test_theorem_3_1_examples():
    ok(ids.check_theorem_3_1(0.4, 0.6, 8.0, 0.5), 1e-9)
    r = ids.check_theorem_3_1(0.4, 1.0, 8.0, 0.5)
    assert r.lhs == pytest.approx(1.0, rel=1e-14) and r.rhs == pytest.approx(1.0, rel=1e-14)
    ok(ids.theorem_3_1_c0_check(0.5, 0.3, 0.5), 1e-8)


def test_quadratic_examples():
    ok(ids.check_quadratic_3_4(0.2, 0.7, 0.5), 1e-10)
    r = ids.check_quadratic_3_4(0.3, 1.0, 0.5)
    ok(r, 1e-12)
    assert r.terms_used >= 1
    assert r.diagnostics["parity_status"] == "pass"


def test_theorem_3_2_examples():
    ok(ids.check_theorem_3_2(1.0, 0.5, 12.0, 0.2, 0.5), 1e-8)
    ok(ids.theorem_3_2_z_check(0.3, 0.6, 10.0, 0.5, "b2q"), 1e-8)
    ok(ids.theorem_3_2_z_check(0.3, 0.6, 10.0, 0.5, "-bq"), 1e-8)


def test_theorem_3_3_examples():
    ok(ids.check_theorem_3_3(0.8, 0.2, 9.0, 0.3, 2, 0.5), 1e-8)
    ok(ids.theorem_3_3_m0_check(0.8, 0.2, 9.0, 0.3, 0.5), 1e-8)


def test_theorem_3_3_large_e_limit():
    # the sum equals the same product for every e, so large e stays on the basic value
    devs = ids.theorem_3_3_large_e(0.8, 0.2, 9.0, 2, 0.5, magnitudes=(1e2, 1e4, 1e6))
    base, _ = ids.curious_3_1_rhs(0.8, 0.2, 9.0, 0.5)
    assert max(devs) <= 1e-5 * abs(base)


def test_near_pole_reports_index():
    # c = a (a + b q^k) at k = 2 makes D_k vanish
    a, b, q = 0.5, 0.8, 0.5
    c = a * (a + b * q**2)
    r = ids.check_curious_3_1(a, b, c, q)
    assert r.status == "skipped-pole"
    assert "index" in r.diagnostics


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-1, 1), b=st.floats(-0.9, 0.9), c=st.floats(5, 20), q=st.floats(0.2, 0.85))
def test_curious_property(a, b, c, q):
    if not ids._screen_expansion(a, b, c, q):
        return
    r = ids.check_curious_3_1(a, b, c, q)
    assert r.status == "pass", (r.rel_err, r.diagnostics)


# ---- terminating sums -------------------------------------------------------

def test_10phi9_examples():
    r = ids.check_10phi9(Fraction(1, 4), Fraction(1, 9), 0, Fraction(1, 2))
    assert r.lhs == 1 and r.rhs == 1 and r.exact
    r = ids.check_10phi9(Fraction(1, 4), Fraction(1, 9), 1, Fraction(1, 2))
    assert r.exact and r.status == "pass" and r.abs_err == 0
    ok(ids.check_10phi9(0.3, 0.12, 4, 0.5), 1e-11)


def test_10phi9_paired_form_matches_sqrt_form():
    a, b, n, q = 0.3, 0.12, 4, 0.5
    paired = math.fsum(ids._ten_phi_nine_terms(a, b, n, q))
    spec = eval_series(ids.ten_phi_nine_spec(a, b, n, q))
    assert paired == pytest.approx(spec, rel=1e-12)


def test_terminating_3_2_examples():
    r = ids.check_terminating_3_2(2.0, 5.0, 0.3, 0, 0.5)
    assert r.lhs == 1 and r.rhs == 1
    # a = 2 puts a - q^{-1} = 0 on the range; a nearby generic point passes
    assert ids.check_terminating_3_2(2.0, 5.0, 0.3, 3, 0.5).status == "skipped-pole"
    ok(ids.check_terminating_3_2(2.5, 5.0, 0.3, 3, 0.5), 1e-10)
    r = ids.terminating_3_2_a0_check(Fraction(3, 2), Fraction(2, 7), 4, Fraction(1, 3))
    assert r.status == "pass" and r.exact


@settings(max_examples=30, deadline=None)
@given(a=st.fractions(-3, 3, max_denominator=9), b=st.fractions(-5, 5, max_denominator=9),
       c=st.fractions(-3, 3, max_denominator=9), n=st.integers(0, 5))
def test_terminating_3_2_exact_property(a, b, c, n):
    if c == 0:
        return
    r = ids.check_terminating_3_2(a, b, c, n, Fraction(1, 2))
    assert r.status in ("pass", "skipped-pole")
    if r.status == "pass":
        assert r.exact and r.abs_err == 0


# ---- descriptors ------------------------------------------------------------

def test_descriptor_ids_unique():
    names = [d.id for d in ids.IDENTITY_DESCRIPTORS]
    assert len(names) == len(set(names)) == 13


@pytest.mark.parametrize("d", ids.IDENTITY_DESCRIPTORS, ids=lambda d: d.id)
def test_descriptor_samples_pass(d):
    rng = np.random.default_rng(7)
    for _ in range(4):
        p = d.sample(rng, 0.5)
        assert p is not None
        r = d.run(p, 0.5)
        assert r.status == "pass", (d.id, p, r.rel_err, r.diagnostics)
