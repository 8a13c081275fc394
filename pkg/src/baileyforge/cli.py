"""Command line runner: ``baileyforge list | verify | coeffs | bench``.

Exit codes: 0 when everything requested passed, 1 when any check failed or
errored, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import contextvars
import json
import os
import statistics
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import catalog, hecke_rogers
from .errors import BaileyForgeError, UnknownIdentity
from .report import ERROR, FAIL, PASS, SCHEMA_VERSION, VerificationReport, honesty_note
from .series import HalfExp, QSeries, invert_unit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "BAILEYFORGE_THREADS"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    order: HalfExp
    identities: list[str] = field(default_factory=list)
    ks: list[int] = field(default_factory=lambda: [2])
    as_json: bool = False
    out: str | None = None
    self_audit: bool = False

    def __post_init__(self):
        if self.order.steps <= 0:
            raise UsageError("--order must be positive")
        if any(k < 2 for k in self.ks):
            raise UsageError("--k values must be >= 2")


def parse_order(text: str) -> HalfExp:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--order expects a rational like 30 or 61/2, got {text!r}") from None
    if (2 * value).denominator != 1:
        raise UsageError(f"--order {text} is not on the half-integer grid")
    return HalfExp.of(value)


def parse_ks(text: str | None) -> list[int]:
    if text is None:
        return [2]
    try:
        ks = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--k expects comma-separated integers, got {text!r}") from None
    if not ks:
        raise UsageError("--k needs at least one value")
    return ks


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def write_atomic(path: str, text: str) -> None:
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=os.path.dirname(target))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- list ------------------------------------------------------------------------

def cmd_list(as_json: bool = False, stream=sys.stdout) -> int:
    rows = [(i, catalog.identity(i).location) for i in catalog.identity_ids()]
    if as_json:
        json.dump([{"id": i, "paper_location": loc} for i, loc in rows], stream, indent=2)
        stream.write("\n")
    else:
        width = max(len(i) for i, _ in rows)
        for i, loc in rows:
            stream.write(f"{i:<{width}}  {loc}\n")
    return EXIT_OK


# -- verify ----------------------------------------------------------------------

def _jobs(cfg: RunConfig) -> list[tuple[str, dict]]:
    jobs = []
    for ident in cfg.identities:
        case = catalog.identity(ident)
        if case.family:
            jobs += [(case.id, {"k": k}) for k in cfg.ks]
        else:
            jobs.append((case.id, {}))
    return jobs


def _run_one(ident: str, params: dict, order: HalfExp, self_audit: bool) -> VerificationReport:
    t0 = time.perf_counter()
    try:
        with hecke_rogers.audit_mode(self_audit):
            return catalog.verify(ident, order, **params)
    except (BaileyForgeError, ArithmeticError, ValueError, AssertionError) as exc:
        case = catalog.identity(ident)
        return VerificationReport(ident, order, ERROR, elapsed_ms=(time.perf_counter() - t0) * 1e3,
                                  params=params, location=case.location,
                                  message=f"{type(exc).__name__}: {exc}")


def audit_reports(order: HalfExp, ks: Sequence[int]) -> list[VerificationReport]:
    """One report per double sum: does ``(n_max, n_max + 5]`` stay above ``order``?"""
    out = []
    for spec in hecke_rogers.all_specs(tuple(sorted({1, *ks}))):
        t0 = time.perf_counter()
        bad = hecke_rogers.audit_bound(spec, order)
        out.append(VerificationReport(
            f"audit:{spec.name}", order, FAIL if bad else PASS,
            elapsed_ms=(time.perf_counter() - t0) * 1e3,
            failed_index=bad[0][0] if bad else None,
            location="enumeration bound self-audit",
            message=f"{len(bad)} terms past n_max" if bad else ""))
    return out


def run_verify(cfg: RunConfig) -> list[VerificationReport]:
    jobs = _jobs(cfg)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        futures = [pool.submit(contextvars.copy_context().run, _run_one, i, p, cfg.order, cfg.self_audit)
                   for i, p in jobs]
        reports = [f.result() for f in futures]
    if cfg.self_audit:
        reports += audit_reports(cfg.order, cfg.ks)
    return reports


def report_payload(cfg: RunConfig, reports: list[VerificationReport]) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "order": str(cfg.order),
        "note": honesty_note(cfg.order),
        "summary": {s: sum(r.status == s for r in reports) for s in (PASS, FAIL, ERROR)},
        "reports": [r.to_dict() for r in reports],
    }


def cmd_verify(cfg: RunConfig, stream=sys.stdout) -> int:
    reports = run_verify(cfg)
    payload = report_payload(cfg, reports)
    text = json.dumps(payload, indent=2) + "\n"
    if cfg.out:
        write_atomic(cfg.out, text)
    if cfg.as_json and not cfg.out:
        stream.write(text)
    else:
        for r in reports:
            stream.write(r.summary_line() + "\n")
        stream.write(honesty_note(cfg.order) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# -- coeffs ----------------------------------------------------------------------

def series_names() -> list[str]:
    names = list(catalog.NAMED_SERIES)
    for i in catalog.identity_ids():
        names += [f"{i}:lhs", f"{i}:rhs"]
    return names


def build_series(name: str, order: HalfExp, k: int = 2) -> QSeries:
    if name in catalog.NAMED_SERIES:
        return catalog.NAMED_SERIES[name](order)
    ident, _, side = name.rpartition(":")
    if side in ("lhs", "rhs") and ident:
        try:
            case = catalog.identity(ident)
        except UnknownIdentity:
            pass
        else:
            return case.build(side, order, **({"k": k} if case.family else {}))
    raise UsageError(f"unknown series {name!r}; try one of: {', '.join(catalog.NAMED_SERIES)} or <identity>:lhs|rhs")


def format_coeffs(s: QSeries, z_slice: int | None = None) -> str:
    """One line per nonzero q-power, ``q^{a}: e1:c1 e2:c2`` with z-exponents ascending."""
    lines = []
    for e, poly in s.terms():
        items = sorted(poly.items())
        if z_slice is not None:
            items = [(z, c) for z, c in items if z == z_slice]
        if items:
            lines.append(f"q^{e}: " + " ".join(f"{z}:{c}" for z, c in items))
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_coeffs(name: str, order: HalfExp, z_slice: int | None = None, k: int = 2, stream=sys.stdout) -> int:
    s = build_series(name, order, k)
    stream.write(format_coeffs(s, z_slice))
    return EXIT_OK


# -- bench -----------------------------------------------------------------------

def _bench_cases(order: HalfExp):
    r = catalog.series_R(order)
    p = catalog.prefactor(order)
    e = catalog.euler(order)
    return [
        ("kernel mul (prefactor * R)", lambda: p * r, None),
        ("kernel invert ((q;q)_inf)", lambda: invert_unit(e), None),
        ("build R", lambda: catalog.series_R(order), None),
        ("verify thm1.1-compact", lambda: catalog.verify("thm1.1-compact", order), "thm1.1-compact"),
        ("verify eq1.5-H", lambda: catalog.verify("eq1.5-H", order), "eq1.5-H"),
    ]


def run_bench(order: HalfExp, repetitions: int) -> list[dict]:
    rows = []
    for label, fn, ident in _bench_cases(order):
        times, status = [], None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            res = fn()
            times.append((time.perf_counter() - t0) * 1e3)
            if ident is not None:
                status = res.status
        rows.append({"name": label, "repetitions": repetitions,
                     "best_ms": round(min(times), 3), "mean_ms": round(statistics.fmean(times), 3),
                     "status": status})
    return rows


def cmd_bench(order: HalfExp, repetitions: int = 3, as_json: bool = False, stream=sys.stdout) -> int:
    if repetitions < 1:
        raise UsageError("--repetitions must be >= 1")
    rows = run_bench(order, repetitions)
    if as_json:
        stream.write(json.dumps({"order": str(order), "rows": rows}, indent=2) + "\n")
    else:
        width = max(len(r["name"]) for r in rows)
        stream.write(f"{'case':<{width}}  {'best ms':>10}  {'mean ms':>10}  status\n")
        for r in rows:
            stream.write(f"{r['name']:<{width}}  {r['best_ms']:>10.3f}  {r['mean_ms']:>10.3f}  {r['status'] or '-'}\n")
    return EXIT_OK if all(r["status"] in (None, PASS) for r in rows) else EXIT_FAIL


# -- entry point -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="baileyforge", description="Verify two-variable Hecke-Rogers identities to a q-order.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list registered identities")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="verify identities to a truncation order")
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--identity", help="comma-separated identity ids")
    sel.add_argument("--all", action="store_true")
    p.add_argument("--order", required=True, help="q-order as a rational, e.g. 30 or 61/2")
    p.add_argument("--k", help="family parameters, e.g. 2,3 (default 2)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="write the JSON report here (atomically)")
    p.add_argument("--self-audit", action="store_true", help="audit every double-sum enumeration bound")

    p = sub.add_parser("coeffs", help="dump coefficients of a series")
    p.add_argument("series")
    p.add_argument("--order", required=True)
    p.add_argument("--z-slice", type=int)
    p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("bench", help="time kernel operations and two identities")
    p.add_argument("--order", default="30")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--json", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command == "list":
            return cmd_list(args.json, stream)
        if args.command == "verify":
            if args.all:
                ids = catalog.identity_ids()
            else:
                ids = [catalog.resolve(i.strip()) for i in args.identity.split(",") if i.strip()]
                if not ids:
                    raise UsageError("--identity needs at least one id")
            cfg = RunConfig(parse_order(args.order), ids, parse_ks(args.k), args.json, args.out, args.self_audit)
            worker_count()
            return cmd_verify(cfg, stream)
        if args.command == "coeffs":
            return cmd_coeffs(args.series, parse_order(args.order), args.z_slice, args.k, stream)
        if args.command == "bench":
            return cmd_bench(parse_order(args.order), args.repetitions, args.json, stream)
    except UnknownIdentity as exc:
        print(f"baileyforge: unknown identity {exc.args[0]!r} (see `baileyforge list`)", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"baileyforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
