"""Every verifiable ID with its seeded sampler and runner.

The sampler for case ``index`` of ``id`` at base ``q`` draws from a numpy
generator seeded by (seed, crc32(id), q in micro-units, index), so any one
case can be regenerated on its own and results do not depend on run order.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from qsv import identities as ids
from qsv import inversion as inv
from qsv import qintegral as qi
from qsv import quadrature as qd
from qsv.result import FAIL, PASS, CheckResult, compare, guarded


@dataclass(frozen=True)
class Entry:
    id: str
    description: str
    group: str
    sample: Callable  # (rng, q) -> params dict or None
    run: Callable  # (params, q) -> CheckResult
    uses_q: bool = True
    tol: float = 1e-8


def case_rng(seed: int, entry_id: str, q, index: int) -> np.random.Generator:
    q_key = 0 if q is None else int(round(float(q) * 1_000_000))
    return np.random.default_rng(np.random.SeedSequence(
        [int(seed) & (2**64 - 1), zlib.crc32(entry_id.encode()), q_key, int(index)]))


def with_tol(result: CheckResult, tol: float) -> CheckResult:
    """Re-judge a float comparison against a different tolerance."""
    if result.exact or result.status not in (PASS, FAIL):
        return result
    return replace(result, tol=tol, status=PASS if result.rel_err <= tol else FAIL)


# ---------------------------------------------------------------------------
# series identities


def _identity_entries():
    out = []
    for d in ids.IDENTITY_DESCRIPTORS:
        out.append(Entry(d.id, d.description, "series",
                         d.sample, lambda p, q, d=d: d.run(p, q),
                         uses_q=True, tol=d.tol))
    return out


def _cross(id_, description, sample, run, tol=ids.EXPANSION_TOL):
    return Entry(id_, description, "cross-check", sample, run, uses_q=True, tol=tol)


def _sample_c0(rng, q):
    def draw(r):
        return {"a": ids._signed(r, 1.5, 4.0), "b": ids._u(r, -0.9, 0.9)}

    def ok(p):
        return ids._sum_well_conditioned(ids.curious_3_1_rhs, p["a"], p["b"], 0.0, q)

    return ids._rejection(draw, ok, rng)


def _sample_a0(rng, q):
    def draw(r):
        return {"b": ids._u(r, -0.9, 0.9), "c": ids._signed(r, 5.0, 20.0)}

    def ok(p):
        b, c = p["b"], p["c"]
        return (ids._screen_expansion(0.0, b, c, q)
                and ids._far_from_poles([b * q / c, b**3 * q / c, b * b / c], q, 0.05))

    return ids._rejection(draw, ok, rng)


def _sample_quadratic_c0(rng, q):
    def draw(r):
        return {"a": ids._signed(r, 0.05, 0.9), "b": ids._u(r, -1.0, 1.0)}

    def ok(p):
        a, b = p["a"], p["b"]
        return (ids._far_from_poles([a], q, 0.05)
                and ids._sum_well_conditioned(ids.quadratic_3_4_rhs, a, b, q)
                and ids._sum_well_conditioned(ids.theorem_3_1_rhs, -1 / a, b, 0.0, q))

    return ids._rejection(draw, ok, rng)


def _sample_z_special(rng, q):
    def draw(r):
        return {"a": ids._u(r, -1.0, 1.0), "b": ids._signed(r, 0.4, 0.9),
                "c": ids._signed(r, 5.0, 20.0)}

    def ok(p):
        a, b, c = p["a"], p["b"], p["c"]
        return (ids._screen_expansion(a, b, c, q)
                and ids._sum_well_conditioned(ids.theorem_3_1_rhs, a, b, c, q))

    return ids._rejection(draw, ok, rng)


def _sample_m0(rng, q):
    p = ids._sample_theorem_3_3(rng, q)
    if p is not None:
        p.pop("m")
    return p


def _sample_rogers_kummer(rng, q):
    def draw(r):
        return {"a": ids._u(r, 0.05, 1.0), "b": ids._signed(r, 1.2, 6.0)}

    def ok(p):
        a, b = p["a"], p["b"]
        return (ids._far_from_poles([a * q / b, -q / b, a * q * q / (b * b)], q)
                and ids._well_conditioned(((a, b), (a * q / b,), q, -q / b)))

    return ids._rejection(draw, ok, rng)


def _sample_terminating_a0(rng, q):
    qf = ids.rational_base(q)

    def draw(r):
        return {"b": ids._rational(r, -5, 5), "c": ids._rational(r, -3, 3),
                "n": int(r.integers(0, 7))}

    def ok(p):
        if p["b"] == 0 or p["c"] == 0:
            return False
        return ids._pole_free(ids.terminating_3_2_a0_check, p["b"], p["c"], p["n"], qf)

    return ids._rejection(draw, ok, rng, attempts=200)


def _cross_entries():
    return [
        _cross("CROSS_ROGERS_TO_KUMMER", "6phi5 with c=sqrt(a), d=-sqrt(a) equals q-Kummer",
               _sample_rogers_kummer,
               lambda p, q: ids.rogers_to_kummer_check(p["a"], p["b"], q), ids.SUMMATION_TOL),
        _cross("CROSS_CURIOUS_3_1_C0", "basic expansion at c=0 against q-Gauss", _sample_c0,
               lambda p, q: ids.curious_3_1_c0_check(p["a"], p["b"], q)),
        _cross("CROSS_CURIOUS_3_1_A0", "basic expansion at a=0 against the 8phi7 sum",
               _sample_a0, lambda p, q: ids.curious_3_1_a0_check(p["b"], p["c"], q)),
        _cross("CROSS_THEOREM_3_1_C0", "base-q^2 expansion at c=0, a->-1/a, against the "
               "quadratic expansion", _sample_quadratic_c0,
               lambda p, q: ids.theorem_3_1_c0_check(p["a"], p["b"], q)),
        _cross("CROSS_THEOREM_3_2_Z_B2Q", "inner-2phi1 expansion at z=b^2q against the "
               "basic expansion", _sample_z_special,
               lambda p, q: ids.theorem_3_2_z_check(p["a"], p["b"], p["c"], q, "b2q")),
        _cross("CROSS_THEOREM_3_2_Z_NEG_BQ", "inner-2phi1 expansion at z=-bq against the "
               "base-q^2 expansion", _sample_z_special,
               lambda p, q: ids.theorem_3_2_z_check(p["a"], p["b"], p["c"], q, "-bq")),
        _cross("CROSS_THEOREM_3_3_M0", "inner-3phi2 expansion at m=0 against the basic "
               "expansion", _sample_m0,
               lambda p, q: ids.theorem_3_3_m0_check(p["a"], p["b"], p["c"], p["e"], q)),
        _cross("CROSS_TERMINATING_3_2_A0", "terminating sum at a=0 against the 10phi9 "
               "(exact)", _sample_terminating_a0,
               lambda p, q: ids.terminating_3_2_a0_check(p["b"], p["c"], p["n"],
                                                         ids.rational_base(q)), 0.0),
    ]


# ---------------------------------------------------------------------------
# inversion


def _random_from(rng) -> random.Random:
    return random.Random(int(rng.integers(0, 2**63)))


@guarded
def delta_check_result(pair: inv.MatrixPair, window: int = inv.DEFAULT_WINDOW) -> CheckResult:
    """Exact delta-orthogonality over the window; lhs counts failing (n, l)."""
    bad = inv.delta_failures(pair, window)
    result = compare(len(bad), 0, 0.0, terms_used=2 * (window + 1) * (window + 2) // 2)
    result.exact = True
    if bad:
        result.diagnostics["first_failures"] = [list(b) for b in bad[:5]]
    return result


def _sample_general_pair(rng, q):
    return {"pair_seed": int(rng.integers(0, 2**63))}


def _run_general(p, q):
    return delta_check_result(inv.sample_general_pair(random.Random(p["pair_seed"])))


def _run_special(p, q):
    return delta_check_result(inv.sample_special_pair(random.Random(p["pair_seed"])))


RELATION_KINDS = ("kummer", "heine", "lemma23")


def _sample_relation(rng, q):
    while True:
        kind = RELATION_KINDS[int(rng.integers(len(RELATION_KINDS)))]
        p = {"kind": kind, "a": ids._u(rng, -1.0, 1.0), "b": ids._u(rng, 0.2, 0.6),
             "c": ids._signed(rng, 5.0, 20.0),
             "direction": inv.F_TO_G if rng.random() < 0.5 else inv.G_TO_F,
             "index": int(rng.integers(0, 4))}
        if kind == "heine":
            p["z"] = ids._u(rng, -0.8, 0.8) * p["b"]
        if kind == "lemma23":
            p["m"] = int(rng.integers(0, 3))
            p["b"] = ids._u(rng, 0.2, 0.6) * min(q ** (p["m"] - 1), 1.0)
            p["e"] = ids._u(rng, -0.9, 0.9)
        if ids._screen_expansion(p["a"], p["b"], p["c"], q):
            return p


def _run_relation(p, q):
    a, b, c, direction = p["a"], p["b"], p["c"], p["direction"]
    if p["kind"] == "kummer":
        case = inv.kummer_relation_case(a, b, c, q, direction)
    elif p["kind"] == "heine":
        case = inv.heine_relation_case(a, b, c, p["z"], q, direction)
    else:
        case = inv.lemma23_relation_case(a, b, c, p["e"], p["m"], q, direction)
    return inv.apply_inverse_relation(case, p["index"])


def _inversion_entries():
    return [
        Entry("INVERSION_GENERAL", "general inverse pair: exact delta-orthogonality, n <= 12",
              "inversion", _sample_general_pair, _run_general, uses_q=False, tol=0.0),
        Entry("INVERSION_SPECIAL", "specialised q-inverse pair: exact delta-orthogonality, "
              "n <= 12", "inversion", _sample_general_pair, _run_special, uses_q=False,
              tol=0.0),
        Entry("INVERSE_RELATION", "rotated inverse relations built from q-Kummer, Heine and "
              "the 3phi2 summation", "inversion", _sample_relation, _run_relation, tol=1e-9),
    ]


# ---------------------------------------------------------------------------
# q-integrals


def _qbeta_params(p: qi.QBetaParams):
    d = asdict(p)
    d.pop("q")
    return d


def _q_entries():
    def sample_t(rng, q):
        p = qi.sample_qbetat(rng, q)
        return None if p is None else _qbeta_params(p)

    def sample_t2(rng, q):
        p = qi.sample_qbetat2(rng, q)
        return None if p is None else _qbeta_params(p)

    return [
        Entry("Q_BETA", "q-beta integral against the q-gamma ratio", "qintegral",
              qi.sample_q_beta, lambda p, q: qi.check_q_beta(p["alpha"], p["beta"], q),
              tol=qi.Q_BETA_TOL),
        Entry("QBETAT", "generalized q-beta integral with an inner 2phi1", "qintegral",
              sample_t, lambda p, q: qi.check_qbetat(qi.QBetaParams(q=q, **p)),
              tol=qi.QBETAT_TOL),
        Entry("QBETAT2", "q-beta type integral with an inner terminating 3phi2", "qintegral",
              sample_t2, lambda p, q: qi.check_qbetat2(qi.QBetaParams(q=q, **p)),
              tol=qi.QBETAT_TOL),
        Entry("CROSS_QBETAT2_E0", "terminating-3phi2 q-integral at e=0 against the 2phi1 "
              "family at alpha=beta+1-m", "cross-check", sample_t2,
              lambda p, q: qi.qbetat2_e0_check(qi.QBetaParams(q=q, **p)), tol=qi.QBETAT_TOL),
    ]


# ---------------------------------------------------------------------------
# classical integrals

CLASSICAL_DESCRIPTIONS = {
    qd.Selector.BETAF_1_1: "Euler beta integral",
    qd.Selector.SPEC2_1_2: "algebraic beta-type integral, value Gamma(b)^2/(2Gamma(2b))",
    qd.Selector.SPEC3_1_3: "algebraic beta-type integral, value Gamma(b)^2/Gamma(2b)",
    qd.Selector.BETAT_5_1: "beta-type integral with an inner 2F1 in (a+t)t/(c-a(a+t))",
    qd.Selector.SPEC1_5_2: "c = 0 member: integral with (a+t)^(-2beta-1) and 2F1(-t/a)",
    qd.Selector.ERDELYI_5_4: "fractional integral representation of 2F1(a,b;c;x)",
    qd.Selector.SPEC5_5_5: "a = 0 member: integral with (c-t), (c-t^2) and 2F1(t^2/c)",
    qd.Selector.BETAT2_5_6: "beta-type integral with a terminating 2F1(-beta,-m;-2beta;.)",
    qd.Selector.SPEC4_5_7: "c -> infinity member with 2F1(-beta,-m;-2beta;1/(1-et))",
}


def _family_params(p: qd.BetaFamilyParams):
    d = asdict(p)
    d["selector"] = qd.Selector(p.selector).value
    return d


def _classical_entries():
    out = []
    for sel in qd.Selector:
        def sample(rng, q, sel=sel):
            p = qd.sample_family(sel, rng)
            return None if p is None else _family_params(p)

        out.append(Entry(sel.value, CLASSICAL_DESCRIPTIONS[sel], "classical", sample,
                         lambda p, q: qd.check_family(qd.BetaFamilyParams(**p)),
                         uses_q=False, tol=qd.CLASSICAL_TOL))

    def sample_pm(rng, q):
        p = qd.sample_family(qd.Selector.BETAT2_5_6, rng)
        return None if p is None else {"beta": p.beta, "a": p.a, "c": p.c, "m": p.m}

    def sample_ab(rng, q):
        p = qd.sample_family(qd.Selector.SPEC2_1_2, rng)
        if p is None:
            return None
        # the 2F1 argument must stay in range for both alpha = beta and beta + 1
        return {"beta": p.beta, "a": p.a, "c": p.c}

    def sample_erd(rng, q):
        p = qd.sample_family(qd.Selector.SPEC1_5_2, rng)
        return None if p is None else {"alpha": p.alpha, "beta": p.beta, "a": p.a}

    def sample_half(rng, q):
        sel = list(qd.Selector)[int(rng.integers(len(qd.Selector)))]
        p = qd.sample_family(sel, rng)
        return None if p is None else _family_params(p)

    out += [
        Entry("CROSS_BETAT_ALPHA_BETA_PLUS_1", "2F1 family at alpha=beta+1 against the "
              "algebraic Gamma(b)^2/(2Gamma(2b)) integral", "cross-check", sample_ab,
              lambda p, q: qd.betat_alpha_beta_plus_one_check(p["beta"], p["a"], p["c"]),
              uses_q=False, tol=qd.CROSS_TOL),
        Entry("CROSS_BETAT_ALPHA_EQ_BETA", "2F1 family at alpha=beta against the algebraic "
              "Gamma(b)^2/Gamma(2b) integral", "cross-check", sample_ab,
              lambda p, q: qd.betat_alpha_equals_beta_check(p["beta"], p["a"], p["c"]),
              uses_q=False, tol=qd.CROSS_TOL),
        Entry("CROSS_BETAT2_E0", "terminating-2F1 integral at e=0 against the 2F1 family at "
              "alpha=beta+1-m (Pfaff)", "cross-check", sample_pm,
              lambda p, q: qd.betat2_e0_check(p["beta"], p["a"], p["c"], p["m"]),
              uses_q=False, tol=qd.CROSS_TOL),
        Entry("CROSS_ERDELYI_ROUTE", "fractional integral specialised to the c=0 member",
              "cross-check", sample_erd,
              lambda p, q: qd.erdelyi_route_check(p["alpha"], p["beta"], p["a"]),
              uses_q=False, tol=qd.CROSS_TOL),
        Entry("HALFLINE", "integral over [0,1] against the half-line substitution t=s/(1+s)",
              "classical", sample_half,
              lambda p, q: qd.halfline_transform_check(qd.BetaFamilyParams(**p)),
              uses_q=False, tol=qd.HALFLINE_TOL),
    ]
    return out


REGISTRY = {e.id: e for e in (_identity_entries() + _cross_entries() + _inversion_entries()
                              + _q_entries() + _classical_entries())}


def lookup(name: str) -> Entry:
    """Case-insensitive lookup of a registry ID."""
    key = name.strip().upper()
    if key not in REGISTRY:
        raise KeyError(name)
    return REGISTRY[key]
