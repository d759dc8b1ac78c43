"""One test per acceptance criterion; tolerances and sample counts pinned here."""

import json
import random
import subprocess
import sys
import time
from collections import defaultdict

import numpy as np
import pytest

from qsv import inversion as inv
from qsv import qintegral as qi
from qsv import quadrature as qd
from qsv.registry import REGISTRY, case_rng

BASES = (0.3, 0.5, 0.8)
SEED = 20240601


def run_entry(entry_id, q, count, seed=SEED):
    entry = REGISTRY[entry_id]
    out = []
    for i in range(count):
        params = entry.sample(case_rng(seed, entry_id, q, i), q)
        assert params is not None, f"{entry_id}: no admissible sample at q={q}, index {i}"
        out.append((params, entry.run(params, q)))
    return out


def assert_all_within(entry_id, results, tol):
    bad = [(p, r.status, r.rel_err) for p, r in results
           if r.status != "pass" or not r.rel_err <= tol]
    assert not bad, f"{entry_id}: {len(bad)} failures, first {bad[:3]}"


def test_criterion_1_exact_inversion():
    start = time.perf_counter()
    for sampler in (inv.sample_general_pair, inv.sample_special_pair):
        for seed in range(20):
            pair = sampler(random.Random(SEED + seed), window=12)
            assert inv.delta_failures(pair, window=12) == [], (sampler.__name__, seed)
            # spot-check that the entries really are exact rationals
            assert inv.delta_check(pair, 12, 0) == 0 and inv.delta_check(pair, 7, 7, "gf") == 1
    assert time.perf_counter() - start < 30


def test_criterion_2_summation_lemmas():
    start = time.perf_counter()
    ms = set()
    for entry_id in ("Q_KUMMER", "ROGERS_6PHI5", "HEINE_II", "LEM23_3PHI2", "Q_GAUSS"):
        for q in BASES:
            results = run_entry(entry_id, q, 100)
            assert_all_within(entry_id, results, 1e-9)
            if entry_id == "LEM23_3PHI2":
                ms.update(p["m"] for p, _ in results)
    assert ms == {0, 1, 2, 3}
    assert time.perf_counter() - start < 60


def test_criterion_3_expansions_and_specializations():
    for entry_id in ("CURIOUS_3_1", "THEOREM_3_1", "QUADRATIC_3_4", "THEOREM_3_2",
                     "THEOREM_3_3"):
        for q in BASES:
            assert_all_within(entry_id, run_entry(entry_id, q, 50), 1e-8)
    cross = ("CROSS_CURIOUS_3_1_C0", "CROSS_CURIOUS_3_1_A0", "CROSS_THEOREM_3_1_C0",
             "CROSS_THEOREM_3_2_Z_B2Q", "CROSS_THEOREM_3_2_Z_NEG_BQ", "CROSS_THEOREM_3_3_M0")
    for entry_id in cross:
        for q in BASES:
            assert_all_within(entry_id, run_entry(entry_id, q, 20), 1e-8)


def test_criterion_4_exact_terminating_sums():
    for entry_id in ("TEN_PHI_9", "TERMINATING_3_2"):
        ns = set()
        for q in BASES:
            for params, r in run_entry(entry_id, q, 10):
                assert r.exact and r.status == "pass" and r.abs_err == 0, (entry_id, params)
                assert params["n"] <= 6
                ns.add(params["n"])
        assert len(ns) > 3
    # square-root constraint of the 10phi9: a and b are rational squares
    for params, _ in run_entry("TEN_PHI_9", 0.5, 10):
        for key in ("a", "b"):
            v = params[key]
            assert round(v.numerator**0.5) ** 2 == v.numerator
            assert round(v.denominator**0.5) ** 2 == v.denominator


def test_criterion_5_q_integrals():
    for entry_id, tol in (("Q_BETA", 1e-10), ("QBETAT", 1e-8), ("QBETAT2", 1e-8)):
        for q in BASES:
            assert_all_within(entry_id, run_entry(entry_id, q, 30), tol)


GRID_SETS = {
    qd.Selector.BETAF_1_1: dict(alpha=1.7),
    qd.Selector.SPEC2_1_2: dict(a=0.4, c=11.0),
    qd.Selector.SPEC3_1_3: dict(a=0.4, c=11.0),
    qd.Selector.BETAT_5_1: dict(alpha=2.1, a=0.4, c=11.0),
    qd.Selector.SPEC1_5_2: dict(alpha=1.4, a=2.5),
    qd.Selector.SPEC5_5_5: dict(alpha=1.4, c=6.0),
    qd.Selector.BETAT2_5_6: dict(a=0.4, c=11.0, e=0.3),
    qd.Selector.SPEC4_5_7: dict(e=-0.4),
}


def test_criterion_6_classical_integrals():
    start = time.perf_counter()
    for sel in qd.Selector:
        assert_all_within(sel.value, run_entry(sel.value, None, 25), 1e-7)
    # the non-integer beta grid, run explicitly for every beta-dependent selector
    for sel, extra in GRID_SETS.items():
        for beta in qd.BETA_GRID:
            ms = [m for m in range(4) if beta > max(0, m - 1)] if "e" in extra else [0]
            for m in ms:
                p = qd.BetaFamilyParams(beta=beta, m=m, selector=sel, **extra)
                r = qd.check_family(p)
                assert r.status == "pass" and r.rel_err <= 1e-7, (p, r)
    anchor = qd.check_spec2(1.0, 1.0, 5.0)
    assert abs(anchor.lhs - 0.5) <= 1e-7
    assert time.perf_counter() - start < 120


Q_BETA_SETS = [(2.0, 3.0), (0.5, 0.5), (1.5, 2.5), (3.0, 1.2), (0.8, 1.7)]
QBETAT_SETS = [qi.QBetaParams(alpha=2.2, beta=1.4, a=0.6, c=11.0),
               qi.QBetaParams(alpha=1.5, beta=0.9, a=0.2, c=8.0),
               qi.QBetaParams(alpha=3.0, beta=2.0, a=-0.3, c=15.0),
               qi.QBetaParams(alpha=0.8, beta=1.2, a=0.5, c=10.0),
               qi.QBetaParams(alpha=2.5, beta=0.6, a=0.0, c=7.0)]


def test_criterion_7_q_to_1_bridge():
    for alpha, beta in Q_BETA_SETS:
        res = qi.q_limit_probe(qi.check_q_beta, {"alpha": alpha, "beta": beta})
        devs = [r.abs_err for r in res]
        assert devs[0] > devs[1] > devs[2], (alpha, beta, devs)
    for p in QBETAT_SETS:
        res = qi.q_limit_probe(qi.check_qbetat, p)
        devs = [r.abs_err for r in res]
        assert devs[0] > devs[1] > devs[2], (p, devs)


def test_criterion_8_halfline_transform():
    results = run_entry("HALFLINE", None, 10)
    assert_all_within("HALFLINE", results, 1e-6)
    assert len(results) == 10


def _verify_payload():
    proc = subprocess.run([sys.executable, "-m", "qsv", "verify", "--suite", "all",
                           "--seed", "42"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    report.pop("wall_time_s")
    return json.dumps(report, sort_keys=True).encode(), report


def test_criterion_9_determinism():
    first, report = _verify_payload()
    second, _ = _verify_payload()
    assert first == second
    assert {r["id"] for r in report["results"]} == set(REGISTRY)
