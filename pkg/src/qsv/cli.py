"""``qsv`` command line: ``verify``, ``eval`` and ``list``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from qsv import __version__
from qsv.errors import QSVError
from qsv.result import DIVERGED, FAIL, SKIPPED_POLE, STATUSES, failed_result

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
RESULT_FIELDS = ("id", "params", "lhs", "rhs", "abs_err", "rel_err", "status", "terms_used")


class UsageError(Exception):
    pass


@dataclass
class SuiteConfig:
    suites: list
    q_values: list = field(default_factory=lambda: [0.5])
    seed: int = 0
    samples_per_identity: int = 10
    tol_overrides: dict = field(default_factory=dict)
    report_path: str | None = None
    report_format: str = "json"


def fmt_number(x):
    """17 significant digits round-trip a double; Fractions stay exact."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return format(x, ".17g")
    if hasattr(x, "item"):  # numpy scalar
        return fmt_number(x.item())
    return str(x)


# ---------------------------------------------------------------------------
# argument parsing


def _csv_floats(text, what):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what}: expected comma-separated numbers")
    return values


def _q_list(text):
    values = _csv_floats(text, "--q")
    if not values or not all(0 < v < 1 for v in values):
        raise argparse.ArgumentTypeError("--q values must lie in (0, 1)")
    return values


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer")
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _tol_item(text):
    key, sep, value = text.partition("=")
    try:
        tol = float(value)
    except ValueError:
        tol = -1.0
    if not sep or not key or not tol >= 0:
        raise argparse.ArgumentTypeError("--tol expects ID=nonnegative-number")
    return key.strip().upper(), tol


def resolve_suites(spec: str) -> list:
    from qsv.registry import REGISTRY

    names = [s.strip() for s in spec.split(",") if s.strip()]
    if not names:
        raise UsageError("empty suite selection")
    ids = []
    for name in names:
        if name.lower() == "all":
            ids.extend(REGISTRY)
        elif name.upper() in REGISTRY:
            ids.append(name.upper())
        else:
            raise UsageError(f"unknown suite ID {name!r}; see `qsv list`")
    return list(dict.fromkeys(ids))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsv", description="Numerical verification of "
                                     "basic hypergeometric expansions and beta-type integrals.")
    parser.add_argument("--version", action="version", version=f"qsv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run seeded checks and write a report")
    v.add_argument("--suite", default="all", help="comma-separated IDs, or 'all'")
    v.add_argument("--q", type=_q_list, default=[0.5], help="comma-separated bases in (0,1)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=_positive_int, default=10)
    v.add_argument("--tol", type=_tol_item, action="append", default=[],
                   metavar="ID=TOL", help="override an entry's tolerance (repeatable)")
    v.add_argument("--report", default=None, help="report path (stdout when omitted)")
    v.add_argument("--format", choices=("json", "csv"), default="json")

    e = sub.add_parser("eval", help="evaluate a single series or integral")
    esub = e.add_subparsers(dest="what", required=True)

    s = esub.add_parser("series")
    s.add_argument("--kind", choices=("qphi", "hyper"), default="qphi")
    s.add_argument("--num", type=lambda t: _csv_floats(t, "--num"), default=[])
    s.add_argument("--den", type=lambda t: _csv_floats(t, "--den"), default=[])
    s.add_argument("--q", type=float, default=0.5)
    s.add_argument("--z", type=float, required=True)

    qi = esub.add_parser("qintegral")
    qi.add_argument("--f", choices=("one", "t", "qbeta", "qbetat", "qbetat2"), default="one")
    qi.add_argument("--q", type=float, default=0.5)
    for name, default in (("alpha", 1.0), ("beta", 1.0), ("a", 0.0), ("c", 10.0), ("e", 0.0)):
        qi.add_argument(f"--{name}", type=float, default=default)
    qi.add_argument("--m", type=int, default=0)

    it = esub.add_parser("integral")
    it.add_argument("--selector", required=True, type=str.upper)
    for name, default in (("alpha", 1.0), ("beta", 1.0), ("a", 0.0), ("c", 10.0), ("e", 0.0),
                          ("b", 0.0), ("mu", 1.0), ("lam", 1.0), ("x", 0.0)):
        it.add_argument(f"--{name}", type=float, default=default)
    it.add_argument("--m", type=int, default=0)
    it.add_argument("--tol", type=float, default=1e-12)
    it.add_argument("--halfline", action="store_true")

    sub.add_parser("list", help="print every registry ID with a description")
    return parser


# ---------------------------------------------------------------------------
# verify


def _cases(config: SuiteConfig):
    from qsv.registry import lookup

    for entry_id in config.suites:
        entry = lookup(entry_id)
        for q in (config.q_values if entry.uses_q else [None]):
            for index in range(config.samples_per_identity):
                yield entry, q, index


def _run_case(config: SuiteConfig, entry, q, index):
    from qsv.registry import case_rng, with_tol

    rng = case_rng(config.seed, entry.id, q, index)
    params = entry.sample(rng, q)
    if params is None:
        result = failed_result(SKIPPED_POLE, reason="no admissible sample")
    else:
        result = entry.run(params, q)
    tol = config.tol_overrides.get(entry.id)
    if tol is not None:
        result = with_tol(result, tol)
    shown = dict(params or {})
    if q is not None:
        shown["q"] = q
    return {
        "id": entry.id,
        "params": {k: fmt_number(v) for k, v in shown.items()},
        "lhs": fmt_number(result.lhs),
        "rhs": fmt_number(result.rhs),
        "abs_err": fmt_number(result.abs_err),
        "rel_err": fmt_number(result.rel_err),
        "status": result.status,
        "terms_used": int(result.terms_used),
    }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QSV_THREADS", "1")))
    except ValueError:
        return 1


def run_verify(config: SuiteConfig) -> tuple[dict, int]:
    """Execute the selected checks; return the report and the exit code."""
    start = time.perf_counter()
    cases = list(_cases(config))
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda c: _run_case(config, *c), cases))
    summary = {s: 0 for s in STATUSES}
    for r in results:
        summary[r["status"]] += 1
    summary["total"] = len(results)
    report = {
        "version": __version__,
        "config": {
            "suites": config.suites,
            "q_values": [fmt_number(q) for q in config.q_values],
            "seed": config.seed,
            "samples_per_identity": config.samples_per_identity,
            "tol_overrides": {k: fmt_number(v) for k, v in sorted(config.tol_overrides.items())},
            "report_format": config.report_format,
        },
        "results": results,
        "summary": summary,
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    code = EXIT_FAIL if summary[FAIL] or summary[DIVERGED] else EXIT_OK
    return report, code


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_FIELDS)
    for r in report["results"]:
        params = ";".join(f"{k}={v}" for k, v in r["params"].items())
        writer.writerow([params if k == "params" else r[k] for k in RESULT_FIELDS])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qsv-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _verify(args) -> int:
    config = SuiteConfig(suites=resolve_suites(args.suite), q_values=args.q, seed=args.seed,
                         samples_per_identity=args.samples, tol_overrides=dict(args.tol),
                         report_path=args.report, report_format=args.format)
    from qsv.registry import REGISTRY

    unknown = [k for k in config.tol_overrides if k not in REGISTRY]
    if unknown:
        raise UsageError(f"--tol names unknown IDs: {', '.join(unknown)}")
    report, code = run_verify(config)
    text = render(report, config.report_format)
    if config.report_path is None:
        sys.stdout.write(text)
    else:
        try:
            write_atomic(config.report_path, text)
        except OSError as exc:
            print(f"qsv: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
        s = report["summary"]
        print(f"{s['total']} checks: " + ", ".join(f"{s[k]} {k}" for k in STATUSES)
              + f" -> {config.report_path}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# eval


def _eval_series(args):
    from qsv.qcore import SeriesSpec, eval_series_counted

    if args.kind == "qphi":
        spec = SeriesSpec.qphi(args.num, args.den, args.q, args.z)
    else:
        spec = SeriesSpec.hyper(args.num, args.den, args.z)
    value, terms = eval_series_counted(spec)
    return {"value": value, "terms_used": terms}


def _eval_qintegral(args):
    from qsv import qintegral as qi

    q = args.q
    if args.f == "one":
        f = qi.QIntegrand(lambda t: 1.0, "1")
    elif args.f == "t":
        f = qi.QIntegrand(lambda t: t, "t")
    elif args.f == "qbeta":
        f = qi.q_beta_integrand(args.alpha, args.beta, q)
    else:
        p = qi.QBetaParams(alpha=args.alpha, beta=args.beta, a=args.a, c=args.c, e=args.e,
                           m=args.m, q=q)
        f = qi.qbetat_integrand(p) if args.f == "qbetat" else qi.qbetat2_integrand(p)
    value, nodes = qi.q_integrate_counted(f, q)
    return {"value": value, "terms_used": nodes}


def _eval_integral(args):
    from qsv import quadrature as qd

    try:
        selector = qd.Selector(args.selector)
    except ValueError:
        raise UsageError(f"unknown selector {args.selector!r}; choose from "
                         + ", ".join(s.value for s in qd.Selector))
    p = qd.BetaFamilyParams(alpha=args.alpha, beta=args.beta, a=args.a, c=args.c, e=args.e,
                            m=args.m, selector=selector, b=args.b, mu=args.mu, lam=args.lam,
                            x=args.x)
    res, closed = qd.family_integral(p, args.tol, halfline=args.halfline)
    return {"value": res.value, "error": res.error, "closed_form": closed,
            "terms_used": res.nodes, "converged": res.converged}


def _eval(args) -> int:
    handler = {"series": _eval_series, "qintegral": _eval_qintegral,
               "integral": _eval_integral}[args.what]
    try:
        out = handler(args)
    except (QSVError, ValueError, ArithmeticError) as exc:
        print(f"qsv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps({k: fmt_number(v) for k, v in out.items()}))
    return EXIT_OK


def _list(args) -> int:
    from qsv.registry import REGISTRY

    width = max(map(len, REGISTRY))
    for entry in REGISTRY.values():
        print(f"{entry.id:<{width}}  [{entry.group}] {entry.description}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return {"verify": _verify, "eval": _eval, "list": _list}[args.command](args)
    except UsageError as exc:
        print(f"qsv: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
