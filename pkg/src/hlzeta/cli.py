"""Command-line front end: ``hlzeta {eval,batch,verify,table}``.

Complex inputs are written ``"1.5"``, ``"0.3+0.2i"`` or ``"-1e-2-4i"``;
complex outputs are JSON objects ``{"re": ..., "im": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from typing import Iterable, TextIO

from .core import (
    PARAMETER_NAMES,
    POINT_NAMES,
    DomainError,
    EvalPoint,
    HLZetaError,
    NoConvergence,
    ParameterSet,
    QuadratureFailure,
)
from .dispatch import METHODS, evaluate
from .verify import GRIDS, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DOMAIN = 2
EXIT_NO_CONVERGENCE = 3

RESULT_FIELDS = ("value", "abs_err", "method", "work", "converged", "reduction_tag")
BATCH_COLUMNS = PARAMETER_NAMES + POINT_NAMES + ("method", "tol")
CSV_OUT_FIELDS = ("row", "value_re", "value_im", "abs_err", "method", "work", "converged", "reduction_tag", "error")

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def parse_complex(text: str) -> complex:
    """Parse ``"a"``, ``"a+bi"``, ``"a-bi"``, ``"bi"`` (``j`` accepted for ``i``)."""
    text = text.strip()
    m = re.fullmatch(rf"({_NUMBER})", text)
    if m:
        return complex(float(m.group(1)), 0.0)
    m = re.fullmatch(rf"({_NUMBER}|[+-])?\s*[ij]", text)
    if m:
        im = m.group(1)
        im = 1.0 if im in (None, "+") else -1.0 if im == "-" else float(im)
        return complex(0.0, im)
    m = re.fullmatch(rf"({_NUMBER})\s*([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij]", text)
    if m:
        im = 1.0 if m.group(3) is None else float(m.group(3))
        return complex(float(m.group(1)), im if m.group(2) == "+" else -im)
    raise ValueError(f"not a complex literal: {text!r}")


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def jsonable(v):
    """Map complex numbers to ``{re, im}`` and non-finite floats to strings."""
    if isinstance(v, complex):
        return {"re": jsonable(v.real), "im": jsonable(v.imag)}
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def _dump(obj, out: TextIO) -> None:
    out.write(json.dumps(jsonable(obj)) + "\n")


def _error_obj(exc: BaseException) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def _result_obj(ev) -> dict:
    r = ev.result
    return {
        "value": complex(r.value),
        "abs_err": float(r.abs_err_estimate),
        "method": r.method.value,
        "work": int(r.work),
        "converged": bool(r.converged),
        "reduction_tag": ev.reduction.value,
    }


def _empty_result() -> dict:
    return dict.fromkeys(RESULT_FIELDS)


def _add_parameter_flags(ap: argparse.ArgumentParser, required_point: bool) -> None:
    for name in PARAMETER_NAMES:
        flag = "--" + name.replace("_", "-")
        ap.add_argument(flag, type=_complex_arg, default=1 + 0j, metavar="C",
                        help=f"parameter {name} (default 1)")
    for name in POINT_NAMES:
        ap.add_argument("--" + name, type=_complex_arg, required=required_point, metavar="C")


def _add_method_flags(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--method", choices=METHODS, default="auto")
    ap.add_argument("--tol", type=_positive_float, default=None,
                    help="tolerance (default 1e-10 for series methods and auto, 1e-8 for quadrature)")


def _params_from(ns) -> ParameterSet:
    return ParameterSet(*(getattr(ns, n) for n in PARAMETER_NAMES))


# --- eval ---------------------------------------------------------------------

def cmd_eval(ns, out: TextIO) -> int:
    try:
        p = _params_from(ns)
        pt = EvalPoint(ns.z, ns.t, ns.s, ns.a)
        ev = evaluate(p, pt, ns.method, ns.tol)
    except DomainError as exc:
        _dump({"error": _error_obj(exc)}, out)
        return EXIT_DOMAIN
    except (NoConvergence, QuadratureFailure) as exc:
        partial = None
        if exc.result is not None:
            partial = {"value": complex(exc.result.value), "abs_err": exc.result.abs_err_estimate,
                       "work": exc.result.work, "method": exc.result.method.value}
        _dump({"error": _error_obj(exc), "partial": partial}, out)
        return EXIT_NO_CONVERGENCE
    _dump(_result_obj(ev), out)
    return EXIT_OK


# --- batch --------------------------------------------------------------------

class BatchInputError(ValueError):
    pass


def read_batch(stream: TextIO) -> list[dict[str, str]]:
    """Rows of a header-led CSV; raises :class:`BatchInputError` if ill-formed."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise BatchInputError("input is empty; a header line is required") from None
    except csv.Error as exc:
        raise BatchInputError(f"unreadable CSV: {exc}") from exc
    header = [h.strip() for h in header]
    unknown = [h for h in header if h not in BATCH_COLUMNS]
    if unknown:
        raise BatchInputError(f"unknown columns: {', '.join(unknown)}")
    if len(set(header)) != len(header):
        raise BatchInputError("duplicate column names")
    missing = [n for n in POINT_NAMES if n not in header]
    if missing:
        raise BatchInputError(f"missing required columns: {', '.join(missing)}")
    rows = []
    try:
        for line in reader:
            if not line or all(not c.strip() for c in line):
                continue
            if len(line) != len(header):
                raise BatchInputError(f"line {reader.line_num}: expected {len(header)} fields, got {len(line)}")
            rows.append(dict(zip(header, (c.strip() for c in line))))
    except csv.Error as exc:
        raise BatchInputError(f"unreadable CSV: {exc}") from exc
    return rows


def _eval_row(row: dict[str, str], default_method: str, default_tol: float | None) -> dict:
    rec = _empty_result()
    rec["error"] = None
    try:
        vals = {}
        for n in PARAMETER_NAMES + POINT_NAMES:
            cell = row.get(n, "")
            if not cell and n in POINT_NAMES:
                raise DomainError(f"missing value for {n}")
            vals[n] = parse_complex(cell) if cell else 1 + 0j
        method = row.get("method") or default_method
        tol = float(row["tol"]) if row.get("tol") else default_tol
        if tol is not None and not tol > 0:
            raise DomainError("tol must be positive")
        if method not in METHODS:
            raise DomainError(f"unknown method {method!r}")
        p = ParameterSet(*(vals[n] for n in PARAMETER_NAMES))
        pt = EvalPoint(*(vals[n] for n in POINT_NAMES))
        ev = evaluate(p, pt, method, tol)
    except (HLZetaError, ValueError) as exc:
        rec["error"] = _error_obj(exc)
        return rec
    rec.update(_result_obj(ev))
    return rec


def _write_batch(records: Iterable[dict], fmt: str, out: TextIO) -> None:
    if fmt == "jsonl":
        for rec in records:
            _dump(rec, out)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_OUT_FIELDS)
    for rec in records:
        v = rec["value"]
        err = rec["error"]
        writer.writerow([
            rec["row"],
            "" if v is None else repr(v.real),
            "" if v is None else repr(v.imag),
            "" if rec["abs_err"] is None else repr(rec["abs_err"]),
            rec["method"] or "",
            "" if rec["work"] is None else rec["work"],
            "" if rec["converged"] is None else rec["converged"],
            rec["reduction_tag"] or "",
            "" if err is None else f"{err['type']}: {err['message']}",
        ])


def cmd_batch(ns, out: TextIO) -> int:
    try:
        if ns.input == "-":
            rows = read_batch(sys.stdin)
        else:
            with open(ns.input, newline="", encoding="utf-8") as fh:
                rows = read_batch(fh)
    except (OSError, UnicodeDecodeError, BatchInputError) as exc:
        _dump({"error": _error_obj(exc)}, sys.stderr)
        return EXIT_DOMAIN

    def work(item):
        i, row = item
        rec = {"row": i}
        rec.update(_eval_row(row, ns.method, ns.tol))
        return rec

    items = list(enumerate(rows))
    if ns.jobs > 1:
        with ThreadPoolExecutor(max_workers=ns.jobs) as pool:
            records = list(pool.map(work, items))
    else:
        records = [work(it) for it in items]
    _write_batch(records, ns.format, out)
    return EXIT_OK


# --- verify -------------------------------------------------------------------

def cmd_verify(ns, out: TextIO) -> int:
    reports = run_suite(ns.grid, ns.seed, ns.tol, ns.jobs)
    for rep in reports:
        d = asdict(rep)
        d["pass"] = d.pop("passed")
        _dump(d, out)
    failed = sum(not r.passed for r in reports)
    stalled = sum(not r.converged for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} identities passed", file=sys.stderr)
    if stalled:
        return EXIT_NO_CONVERGENCE
    return EXIT_FAIL if failed else EXIT_OK


# --- table --------------------------------------------------------------------

def _grid_values(text: str) -> list[complex]:
    try:
        return [parse_complex(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _fmt_cell(v: complex | None, part: str, digits: int) -> str:
    if v is None:
        return "-"
    if part == "re":
        return f"{v.real:.{digits}g}"
    if part == "im":
        return f"{v.imag:.{digits}g}"
    if part == "abs":
        return f"{abs(v):.{digits}g}"
    return f"{v.real:.{digits}g}{v.imag:+.{digits}g}i"


def cmd_table(ns, out: TextIO) -> int:
    try:
        p = _params_from(ns)
    except DomainError as exc:
        _dump({"error": _error_obj(exc)}, out)
        return EXIT_DOMAIN
    zs, ts = ns.z_values, ns.t_values
    cells = [(z, t) for z in zs for t in ts]

    def work(zt):
        try:
            return evaluate(p, EvalPoint(zt[0], zt[1], ns.s, ns.a), ns.method, ns.tol).result.value
        except HLZetaError:
            return None

    if ns.jobs > 1:
        with ThreadPoolExecutor(max_workers=ns.jobs) as pool:
            values = list(pool.map(work, cells))
    else:
        values = [work(c) for c in cells]
    label = lambda c: _fmt_cell(c, "complex" if c.imag else "re", 6)
    head = ["z \\ t"] + [label(t) for t in ts]
    body = [[label(z)] + [_fmt_cell(values[i * len(ts) + j], ns.part, ns.digits) for j in range(len(ts))]
            for i, z in enumerate(zs)]
    widths = [max(len(r[c]) for r in [head] + body) for c in range(len(head))]
    for r in [head] + body:
        out.write("  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() + "\n")
    return EXIT_OK if all(v is not None for v in values) else EXIT_DOMAIN


# --- entry point --------------------------------------------------------------

def _jobs(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hlzeta", description="Evaluate the two-variable extended Hurwitz-Lerch zeta function.")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate at one point, print one JSON object")
    _add_parameter_flags(ev, required_point=True)
    _add_method_flags(ev)
    ev.set_defaults(func=cmd_eval)

    ba = sub.add_parser("batch", help="evaluate every row of a CSV file")
    ba.add_argument("input", help="CSV path with a header line, or - for stdin")
    ba.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    _add_method_flags(ba)
    ba.add_argument("--jobs", type=_jobs, default=1)
    ba.set_defaults(func=cmd_batch)

    ve = sub.add_parser("verify", help="run the identity suite, print JSON lines")
    ve.add_argument("--grid", choices=GRIDS, default="small")
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--tol", type=_positive_float, default=None,
                    help="replace every identity's own tolerance")
    ve.add_argument("--jobs", type=_jobs, default=1)
    ve.set_defaults(func=cmd_verify)

    ta = sub.add_parser("table", help="print a value grid over z and t")
    for name in PARAMETER_NAMES:
        ta.add_argument("--" + name.replace("_", "-"), type=_complex_arg, default=1 + 0j, metavar="C")
    ta.add_argument("--s", type=_complex_arg, required=True, metavar="C")
    ta.add_argument("--a", type=_complex_arg, required=True, metavar="C")
    ta.add_argument("--z-values", type=_grid_values, default=_grid_values("0,0.25,0.5,0.75"), metavar="LIST")
    ta.add_argument("--t-values", type=_grid_values, default=_grid_values("0,0.25,0.5,0.75"), metavar="LIST")
    ta.add_argument("--part", choices=("re", "im", "abs", "complex"), default="re")
    ta.add_argument("--digits", type=int, default=10)
    _add_method_flags(ta)
    ta.add_argument("--jobs", type=_jobs, default=1)
    ta.set_defaults(func=cmd_table)
    return ap


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    ns = build_parser().parse_args(argv)
    return ns.func(ns, out or sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
