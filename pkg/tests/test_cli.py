import csv
import io
import json
import subprocess
import sys

import pytest

from qsv import cli
from qsv.registry import REGISTRY, case_rng, lookup, with_tol
from qsv.result import compare


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_q_gauss_example(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, _ = run(["verify", "--suite", "q_gauss", "--q", "0.5", "--samples", "50",
                      "--seed", "42", "--report", str(path)], capsys)
    report = json.loads(path.read_text())
    assert code == 0
    assert report["summary"]["pass"] == 50 == report["summary"]["total"]


def test_report_schema(capsys):
    code, out, _ = run(["verify", "--suite", "Q_KUMMER,TEN_PHI_9,BETAF_1_1", "--samples", "2",
                        "--q", "0.3,0.5"], capsys)
    report = json.loads(out)
    assert set(report) == {"version", "config", "results", "summary", "wall_time_s"}
    assert code == 0
    for r in report["results"]:
        assert list(r) == list(cli.RESULT_FIELDS)
        assert isinstance(r["lhs"], str) and isinstance(r["terms_used"], int)
    # q-free entries run once, q-dependent ones once per base
    counts = {i: sum(r["id"] == i for r in report["results"]) for i in
              ("Q_KUMMER", "TEN_PHI_9", "BETAF_1_1")}
    assert counts == {"Q_KUMMER": 4, "TEN_PHI_9": 4, "BETAF_1_1": 2}
    tallies = {s: sum(r["status"] == s for r in report["results"]) for s in report["summary"]
               if s != "total"}
    assert all(report["summary"][s] == n for s, n in tallies.items())
    # exact entries keep rational parameters as p/q strings
    ten = next(r for r in report["results"] if r["id"] == "TEN_PHI_9")
    assert "/" in ten["params"]["a"] or ten["params"]["a"].lstrip("-").isdigit()


def test_seventeen_digit_roundtrip():
    x = 0.1 + 0.2
    assert float(cli.fmt_number(x)) == x
    from fractions import Fraction
    assert cli.fmt_number(Fraction(3, 7)) == "3/7"


def test_determinism_and_threads(monkeypatch, capsys):
    argv = ["verify", "--suite", "curious_3_1,q_beta,inversion_special", "--samples", "3",
            "--seed", "7"]
    _, a, _ = run(argv, capsys)
    monkeypatch.setenv("QSV_THREADS", "4")
    _, b, _ = run(argv, capsys)
    assert json.loads(a)["results"] == json.loads(b)["results"]
    _, c, _ = run(argv[:-1] + ["8"], capsys)
    assert json.loads(a)["results"] != json.loads(c)["results"]


def test_case_rng_independent_of_order():
    x = case_rng(1, "Q_GAUSS", 0.5, 3).random()
    case_rng(1, "Q_GAUSS", 0.5, 2).random()
    assert case_rng(1, "Q_GAUSS", 0.5, 3).random() == x


def test_csv_report(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, _, _ = run(["verify", "--suite", "q_kummer", "--samples", "2", "--format", "csv",
                      "--report", str(path)], capsys)
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert code == 0 and len(rows) == 2
    assert set(rows[0]) == set(cli.RESULT_FIELDS)
    assert rows[0]["params"].startswith("a=")


def test_tol_override_makes_failures(capsys):
    code, out, _ = run(["verify", "--suite", "q_beta", "--samples", "3", "--tol",
                        "Q_BETA=1e-300"], capsys)
    report = json.loads(out)
    assert code == 1 and report["summary"]["fail"] >= 1


def test_with_tol_leaves_exact_results():
    from fractions import Fraction
    exact = compare(Fraction(1, 3), Fraction(1, 3), 0.0)
    assert with_tol(exact, 1e-300) is exact


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", ""],
    ["verify", "--suite", "no_such_id"],
    ["verify", "--q", "1.5"],
    ["verify", "--samples", "0"],
    ["verify", "--tol", "Q_BETA"],
    ["verify", "--tol", "NOPE=1e-3", "--suite", "q_beta"],
    ["eval", "integral", "--selector", "BOGUS"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 2


def test_io_error(tmp_path, capsys):
    code = cli.main(["verify", "--suite", "q_kummer", "--samples", "1", "--report",
                     str(tmp_path / "missing" / "r.json")])
    assert code == 3


def test_atomic_write_leaves_no_temp(tmp_path):
    path = tmp_path / "out.json"
    cli.write_atomic(str(path), "{}")
    assert path.read_text() == "{}"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_eval_examples(capsys):
    code, out, _ = run(["eval", "series", "--kind", "qphi", "--num", "0.3,0.5", "--den", "0.7",
                        "--q", "0.5", "--z", "0.2"], capsys)
    assert code == 0
    assert float(json.loads(out)["value"]) == pytest.approx(1.62334615578663512, rel=1e-14)
    code, out, _ = run(["eval", "integral", "--selector", "SPEC2_1_2", "--beta", "1", "--a", "1",
                        "--c", "5"], capsys)
    assert abs(float(json.loads(out)["value"]) - 0.5) <= 1e-7
    code, out, _ = run(["eval", "qintegral", "--f", "one", "--q", "0.5"], capsys)
    assert float(json.loads(out)["value"]) == pytest.approx(1.0)
    code, out, _ = run(["eval", "series", "--kind", "hyper", "--num", "1,1", "--den", "2",
                        "--z", "0.5"], capsys)
    assert code == 0


def test_eval_numeric_failure(capsys):
    code, _, err = run(["eval", "series", "--num", "0.3,0.5", "--den", "0.7", "--z", "3"], capsys)
    assert code == 1 and "qsv:" in err


def test_list(capsys):
    code, out, _ = run(["list"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == len(REGISTRY)
    assert all(line.split()[0] in REGISTRY for line in lines)


def test_lookup_case_insensitive():
    assert lookup("q_gauss").id == "Q_GAUSS"
    with pytest.raises(KeyError):
        lookup("missing")


def test_registry_covers_spec_ids():
    required = {"Q_KUMMER", "ROGERS_6PHI5", "HEINE_II", "LEM23_3PHI2", "Q_GAUSS",
                "LEM23_M1_CASE", "CURIOUS_3_1", "TEN_PHI_9", "TERMINATING_3_2", "THEOREM_3_1",
                "QUADRATIC_3_4", "THEOREM_3_2", "THEOREM_3_3", "BETAF_1_1", "SPEC2_1_2",
                "SPEC3_1_3", "BETAT_5_1", "SPEC1_5_2", "ERDELYI_5_4", "SPEC5_5_5",
                "BETAT2_5_6", "SPEC4_5_7"}
    assert required <= set(REGISTRY)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qsv", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "Q_GAUSS" in proc.stdout
