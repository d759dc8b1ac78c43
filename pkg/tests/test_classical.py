import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsv.classical import (beta_fn, gamma_fn, gamma_ratio, gauss_sum_unit,
                           gauss_summation_check, hyp2f1, hyp2f1_array, hyp2f1_poly,
                           legendre_duplication_check, pfaff_transform_check,
                           shifted_factorial)
from qsv.errors import PoleError


def test_shifted_factorial():
    assert shifted_factorial(3, 4) == 3 * 4 * 5 * 6
    assert shifted_factorial(Fraction(1, 2), 3) == Fraction(15, 8)
    assert shifted_factorial(-2, 3) == 0
    assert shifted_factorial(7.5, 0) == 1


def test_gamma_values():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert beta_fn(2, 3) == pytest.approx(1 / 12, rel=1e-15)
    with pytest.raises(PoleError):
        gamma_fn(-2)


def test_gamma_ratio_large_arguments():
    # mpmath reference; the plain quotient would overflow
    assert gamma_ratio([200.5], [200.0]) == pytest.approx(14.133299559727925473210124817,
                                                         rel=1e-13)


def test_hyp2f1_matches_mpmath():
    assert hyp2f1(0.3, 0.7, 1.5, 0.4) == pytest.approx(1.0691512361389890667738672458, rel=1e-14)
    assert hyp2f1(-1.5, 2.25, 0.6, -0.7) == pytest.approx(6.14036239649304952031130323682,
                                                         rel=1e-13)


def test_hyp2f1_elementary():
    x = 0.37
    assert hyp2f1(1, 1, 2, x) == pytest.approx(-math.log(1 - x) / x, rel=1e-14)
    assert hyp2f1(0.5, 1, 1.5, -x * x) == pytest.approx(math.atan(x) / x, rel=1e-14)


def test_terminating_polynomial():
    coeffs = hyp2f1_poly(-3, 2.5, 1.5)
    assert len(coeffs) == 4
    x = np.array([-2.0, 0.5, 3.0])
    direct = [sum(shifted_factorial(-3, k) * shifted_factorial(2.5, k)
                  / (shifted_factorial(1.5, k) * math.factorial(k)) * t**k for k in range(4))
              for t in x]
    np.testing.assert_allclose(hyp2f1_array(-3, 2.5, 1.5, x), direct, rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), c=st.floats(0.3, 4), x=st.floats(-0.8, 0.8))
def test_euler_transformation(a, b, c, x):
    # 2F1(a,b;c;x) = (1-x)^(c-a-b) 2F1(c-a,c-b;c;x)
    lhs = hyp2f1(a, b, c, x)
    rhs = (1 - x) ** (c - a - b) * hyp2f1(c - a, c - b, c, x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-11)


def test_gauss_sum_unit():
    assert gauss_sum_unit(0.3, 0.4, 2.1) == pytest.approx(
        gamma_ratio([2.1, 1.4], [1.8, 1.7]), rel=1e-9)
    assert gauss_summation_check(-0.5, 1.2, 2.6).status == "pass"


@pytest.mark.parametrize("beta", [0.5, 0.9, 1.2, 2.5, 7.25])
def test_legendre_duplication(beta):
    assert legendre_duplication_check(beta).status == "pass"


def test_pfaff_exact_and_float():
    r = pfaff_transform_check(4, Fraction(3, 7), Fraction(9, 5), Fraction(2, 3))
    assert r.status == "pass" and r.exact
    assert pfaff_transform_check(3, 0.4, 2.2, 0.3).status == "pass"
