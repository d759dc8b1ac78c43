import random
from fractions import Fraction

import pytest

from qsv.inversion import (F_TO_G, G_TO_F, MatrixPair, delta_check, delta_failures, f_entry,
                           g_entry, heine_relation_case, kummer_relation_case,
                           lemma23_relation_case, apply_inverse_relation,
                           sample_general_pair, sample_special_pair)

N = 7


def _brute_inverse(pair, size):
    """Invert the unit lower-triangular F by forward substitution (exact)."""
    F = [[f_entry(pair, n, k) for k in range(size)] for n in range(size)]
    G = [[Fraction(0)] * size for _ in range(size)]
    for l in range(size):
        G[l][l] = Fraction(1)
        for k in range(l + 1, size):
            G[k][l] = -sum(F[k][j] * G[j][l] for j in range(l, k))
    return G


@pytest.mark.parametrize("seed", range(3))
def test_general_g_is_brute_force_inverse(seed):
    pair = sample_general_pair(random.Random(seed), window=N)
    G = _brute_inverse(pair, N)
    for k in range(N):
        for l in range(k + 1):
            assert g_entry(pair, k, l) == G[k][l]


@pytest.mark.parametrize("seed", range(3))
def test_special_g_is_brute_force_inverse(seed):
    pair = sample_special_pair(random.Random(seed), window=N)
    G = _brute_inverse(pair, N)
    for k in range(N):
        for l in range(k + 1):
            assert g_entry(pair, k, l) == G[k][l]


def test_special_matches_its_general_form():
    pair = MatrixPair.special(Fraction(1, 3), Fraction(5, 2), Fraction(7, 1), Fraction(1, 2))
    general = pair.as_general()
    for n in range(6):
        for k in range(n + 1):
            assert f_entry(pair, n, k) == f_entry(general, n, k)
            assert g_entry(pair, n, k) == g_entry(general, n, k)


def test_delta_exact_both_orders():
    pair = sample_special_pair(random.Random(11), window=8)
    assert delta_failures(pair, window=8) == []
    assert delta_check(pair, 5, 2, "gf") == 0
    assert delta_check(pair, 4, 4) == 1


def test_delta_detects_a_wrong_pair():
    good = sample_general_pair(random.Random(5), window=5)
    bad = MatrixPair.general(good.a_seq, lambda j: good.c_seq(j) + (j == 2), good.d)
    # f from one pair with g from a perturbed pair must break orthogonality
    broken = [(n, l) for n in range(5) for l in range(n + 1)
              if sum(f_entry(good, n, k) * g_entry(bad, k, l) for k in range(l, n + 1))
              != (n == l)]
    assert broken


def test_identity_pair():
    ident = MatrixPair.identity()
    assert f_entry(ident, 3, 1) == 0 and g_entry(ident, 2, 2) == 1


def test_float_g_entry_matches_exact():
    a, b, c, q = Fraction(1, 5), Fraction(3, 10), Fraction(12), Fraction(1, 2)
    exact = MatrixPair.special(a, b, c, q)
    flt = MatrixPair.special(float(a), float(b), float(c), float(q))
    for k in range(8):
        for l in range(k + 1):
            assert float(g_entry(exact, k, l)) == pytest.approx(g_entry(flt, k, l), rel=1e-10)


@pytest.mark.parametrize("direction", [F_TO_G, G_TO_F])
@pytest.mark.parametrize("index", [0, 2])
def test_inverse_relations(direction, index):
    q = 0.5
    cases = [kummer_relation_case(0.3, 0.4, 9.0, q, direction),
             heine_relation_case(-0.2, 0.5, 11.0, 0.25, q, direction),
             lemma23_relation_case(0.1, 0.3, 8.0, 0.4, 2, q, direction)]
    for case in cases:
        r = apply_inverse_relation(case, index)
        assert r.status == "pass", r
