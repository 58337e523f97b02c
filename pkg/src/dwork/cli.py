"""Command-line entry point: ``dwork spectrum``, ``dwork sector`` and ``dwork verify``.

Every command writes one JSON document (or a CSV flattening of it) carrying
``"schema": 1``.  Reports hold no timings, so repeated runs with the same
flags are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import reports
from .errors import DimensionError, DworkError
from .frobenius import frobenius_basis
from .monodromy import monodromy_rep
from .numeric import MIN_PRECISION, default_precision
from .pfode import base_change_to_b, pf_operator, reduce
from .sectors import parse_m, sector_grading

SCHEMA = 1
ACTIONS = ("operator", "solve", "monodromy", "signature")
MIN_N, MAX_N = 2, 6


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 256
    trunc: int = 200
    basepoint: object = Fraction(2, 5)
    step_safety: float = 0.5
    output: str | None = None
    format: str = "json"
    jobs: int = 1


# ---------------------------------------------------------------- argument types


def _precision(text: str) -> int:
    try:
        bits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"precision must be an integer, got {text!r}")
    if bits < MIN_PRECISION:
        raise argparse.ArgumentTypeError(f"precision must be at least {MIN_PRECISION} bits")
    return bits


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _basepoint(text: str):
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(" ", "").strip("()"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse basepoint {text!r}")


def _step_safety(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("step safety must lie strictly between 0 and 1")
    return v


def _degree(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"n must be an integer, got {text!r}")
    if not MIN_N <= n <= MAX_N:
        raise argparse.ArgumentTypeError(f"n must lie in {MIN_N}..{MAX_N}")
    return n


def _actions(text: str) -> tuple[str, ...]:
    items = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in items if a not in ACTIONS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"actions must be a comma list drawn from {', '.join(ACTIONS)}")
    return tuple(a for a in ACTIONS if a in items)


def _add_common(p: argparse.ArgumentParser, defaults: bool) -> None:
    # subcommands repeat the global flags without defaults so that a flag given
    # before the subcommand is not reset by the subparser
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--precision", type=_precision, default=d(None),
                   help="working precision in bits (default: $DWORK_PRECISION or 256)")
    p.add_argument("--trunc", type=_positive_int, default=d(200), help="series truncation order")
    p.add_argument("--basepoint", type=_basepoint, default=d(Fraction(2, 5)),
                   help="monodromy base point, e.g. 2/5 or -0.5+0.1j")
    p.add_argument("--step-safety", type=_step_safety, default=d(0.5))
    p.add_argument("--out", default=d(None), help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--jobs", type=_positive_int, default=d(min(4, os.cpu_count() or 1)),
                   help="worker processes for verify suites")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, defaults=False)

    parser = argparse.ArgumentParser(prog="dwork", description="Twisted-sector data of Fermat singularities.")
    _add_common(parser, defaults=True)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="spectrum of the degree n+1 Fermat polynomial")
    sp.add_argument("-n", type=_degree, required=True)

    se = sub.add_parser("sector", parents=[common], help="operator, solutions and monodromy of one sector")
    se.add_argument("-n", type=_degree, required=True)
    se.add_argument("-m", required=True, help="exponent vector, e.g. 1000 or 1,0,0,0")
    se.add_argument("--actions", type=_actions, default=ACTIONS)

    ve = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ve.add_argument("suite", choices=reports.SUITES + ("all",))
    return parser


def config_from(args) -> RunConfig:
    precision = args.precision if args.precision is not None else default_precision()
    return RunConfig(precision, args.trunc, args.basepoint, args.step_safety, args.out, args.format, args.jobs)


# ---------------------------------------------------------------- commands


def cmd_spectrum(n: int, cfg: RunConfig) -> tuple[dict, int]:
    rep = reports.spectrum_report(n)
    return {"schema": SCHEMA, "command": "spectrum", **rep}, 0 if rep["consistent"] else 1


def cmd_sector(n: int, m: tuple, actions, cfg: RunConfig) -> tuple[dict, int]:
    grading = sector_grading(m, n)
    raw = pf_operator(n, m)
    op, cert = reduce(base_change_to_b(raw))
    out = {"schema": SCHEMA, "command": "sector", "n": n, "m": list(m), "sector": grading.to_json(),
           "config": {"precision": cfg.precision_bits, "trunc": cfg.trunc, "basepoint": str(cfg.basepoint),
                      "step_safety": cfg.step_safety}}
    failed = 0
    if "operator" in actions:
        out["operator"] = {"unreduced": raw.to_json(), "reduced": op.to_json(), "certificate": cert.to_json()}
    if "solve" in actions:
        out["solve"] = frobenius_basis(op, 0, cfg.trunc).to_json()
    rep = None
    if "monodromy" in actions or "signature" in actions:
        rep = monodromy_rep(op, cfg.basepoint, cfg.precision_bits, cfg.step_safety)
    if "monodromy" in actions:
        out["monodromy"] = rep.to_json()
    if "signature" in actions:
        out["signature"] = [("inf" if o == float("inf") else int(o)) for o in rep.orders]
    if rep is not None:
        conc = []
        if n == 3:
            row = reports.monodromy_row(m)
            if row is not None:
                conc.append(reports.monodromy_concordance(row, cfg.precision_bits))
        if n == 2 and tuple(m) == (0, 0, 0):
            conc.append(reports.cubic_concordance(cfg.precision_bits))
        if conc:
            out["concordance"] = conc
            failed = reports.failures(conc)
    return out, failed


def cmd_verify(suite: str, cfg: RunConfig) -> tuple[dict, int]:
    names = reports.SUITES if suite == "all" else (suite,)
    results = reports.run_suites(names, cfg.precision_bits, cfg.jobs)
    failed = sum(reports.failures(r) for r in results.values())
    return {"schema": SCHEMA, "command": "verify", "suite": suite, "precision": cfg.precision_bits,
            "suites": results, "failures": failed}, failed


# ---------------------------------------------------------------- output


def _flatten(prefix: str, value, rows: list):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, "" if value is None else value))


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if doc["command"] == "spectrum":
        w.writerow(["beta", "count"])
        for r in doc["spectrum"]:
            w.writerow([r["beta"], r["count"]])
    elif doc["command"] == "verify":
        w.writerow(["suite", "name", "verdict", "residual_norm"])
        for suite, recs in doc["suites"].items():
            for r in recs:
                w.writerow([suite, r["name"], r["verdict"], r.get("residual_norm") or ""])
    else:
        w.writerow(["key", "value"])
        rows: list = []
        _flatten("", doc, rows)
        w.writerows(rows)
    return buf.getvalue()


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(doc)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from(args)
    except (DworkError, ValueError) as exc:
        parser.error(f"bad DWORK_PRECISION: {exc}")
    try:
        if args.command == "spectrum":
            doc, code = cmd_spectrum(args.n, cfg)
        elif args.command == "sector":
            try:
                m = parse_m(args.m, args.n)
            except DimensionError as exc:
                parser.error(f"malformed -m: {exc}")
            doc, code = cmd_sector(args.n, m, args.actions, cfg)
        else:
            doc, code = cmd_verify(args.suite, cfg)
    except DworkError as exc:
        print(f"dwork: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = render(doc, cfg.format)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return min(code, 255)


if __name__ == "__main__":
    sys.exit(main())
