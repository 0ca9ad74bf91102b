"""Command-line front end.

Every subcommand builds one report (a titled table) and emits it in the
configured format.  Output is deterministic: floats are serialized at
twelve significant digits, rows come out in a fixed order, and repeated
invocations produce byte-identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace

from .bounds import theorem_bound
from .config import (
    CONFIG_ENV_VAR,
    FORMATS,
    RunConfig,
    _parse_tiers,
    load_config,
    read_config_file,
)
from .constants import (
    BASIC_SET,
    CLOSED_FORM_UPPER,
    EXACT_MAX,
    SYMMETRIC_SET,
    C_of_p,
    constants_table,
    g,
    g_sym,
)
from .densities import from_name, normalized_sum_density
from .distances import chi2_both, chi2_direct, chi2_series, profile_until_converged
from .errors import AccuracyError, CapacityError, DomainError
from .subgaussian import mgf_check, threshold
from .verify import run_suite, stein_check

__all__ = ["main", "run", "Report"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ACCURACY = 3

_SET_NAMES = {"basic": BASIC_SET, "sym": SYMMETRIC_SET}
_VARIANT_NAMES = {"first": "first", "basic": "basic", "sym": "symmetric"}


@dataclass(frozen=True)
class Report:
    """One table plus scalar footer entries."""

    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[object, ...], ...]
    footer: tuple[tuple[str, object], ...] = ()


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value == 0.0:
            value = 0.0
        return f"{value:.12g}"
    return str(value)


def _json_value(value: object) -> object:
    if isinstance(value, float):
        if not math.isfinite(value):
            return _fmt(value)
        return float(_fmt(value))
    return value


def _render_table(report: Report) -> str:
    cells = [[_fmt(c) for c in report.columns]]
    numeric = [True] * len(report.columns)
    for row in report.rows:
        cells.append([_fmt(c) for c in row])
        for i, c in enumerate(row):
            if c is not None and not isinstance(c, (int, float)):
                numeric[i] = False
    widths = [max(len(r[i]) for r in cells) for i in range(len(report.columns))]
    lines = [report.title]
    for k, row in enumerate(cells):
        parts = []
        for i, text in enumerate(row):
            if numeric[i] and k > 0:
                parts.append(text.rjust(widths[i]))
            else:
                parts.append(text.ljust(widths[i]))
        lines.append("  ".join(parts).rstrip())
    for key, value in report.footer:
        lines.append(f"{key}: {_fmt(value)}")
    return "\n".join(lines) + "\n"


def _render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(c) for c in row])
    return buf.getvalue()


def _render_json(report: Report) -> str:
    payload: dict[str, object] = {
        "title": report.title,
        "columns": list(report.columns),
        "rows": [[_json_value(c) for c in row] for row in report.rows],
    }
    for key, value in report.footer:
        payload[key] = _json_value(value)
    return json.dumps(payload, indent=2) + "\n"


_RENDERERS = {"table": _render_table, "csv": _render_csv,
              "json": _render_json}


def _emit(report: Report, fmt: str, output: str | None) -> None:
    text = _RENDERERS[fmt](report)
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _error_record(kind: str, exc: Exception) -> None:
    record = {"error": {"kind": kind, "type": type(exc).__name__,
                        "message": str(exc)}}
    sys.stderr.write(json.dumps(record) + "\n")


def _build_density(name: str, n: int | None):
    base = from_name(name)
    if n is None or n == 1:
        return base
    return normalized_sum_density(base, n)


def _cmd_chi2(args: argparse.Namespace,
              cfg: RunConfig) -> tuple[Report, int]:
    density = _build_density(args.dist, args.n)
    spec = cfg.quadrature_spec()
    rows: list[tuple[object, ...]] = []
    footer: list[tuple[str, object]] = []
    if args.method == "direct":
        r = chi2_direct(density, spec)
        rows.append(("direct", r.value, r.error_estimate, None, None))
    elif args.method == "series":
        profile = profile_until_converged(density, spec,
                                          cfg.series_start_order,
                                          cfg.series_max_order,
                                          cfg.series_tail_tol)
        r = chi2_series(profile)
        rows.append(("series", r.value, r.error_estimate,
                     r.truncation_order, None))
    else:
        direct, series = chi2_both(density, spec, cfg.series_start_order,
                                   cfg.series_max_order, cfg.series_tail_tol)
        agree = (abs(direct.value - series.value)
                 <= series.error_estimate + 1e-6)
        rows.append(("direct", direct.value, direct.error_estimate,
                     None, agree))
        rows.append(("series", series.value, series.error_estimate,
                     series.truncation_order, agree))
        footer.append(("agreement", agree))
    title = f"chi2 {args.dist}"
    if args.n is not None and args.n > 1:
        title += f" sum of {args.n}"
    return Report(title, ("method", "value", "error_estimate",
                          "truncation_order", "agree"),
                  tuple(rows), tuple(footer)), EXIT_OK


def _cmd_constants(args: argparse.Namespace,
                   cfg: RunConfig) -> tuple[Report, int]:
    index_set = _SET_NAMES[args.set]
    method = EXACT_MAX if args.method == "exact" else CLOSED_FORM_UPPER
    est = C_of_p(index_set, args.p, method=method)
    row = (args.set, args.p, args.method, est.value, est.argmax_s)
    return Report("correction constant",
                  ("set", "p", "method", "value", "argmax_s"),
                  (row,), ()), EXIT_OK


def _cmd_table1(args: argparse.Namespace,
                cfg: RunConfig) -> tuple[Report, int]:
    entries = constants_table(2, 10)
    basic = [e for e in entries if e.index_set is BASIC_SET]
    sym = [e for e in entries if e.index_set is SYMMETRIC_SET]
    columns = ("set",) + tuple(f"n={e.n}" for e in basic)
    rows: list[tuple[object, ...]] = [
        ("basic",) + tuple(e.value for e in basic),
        ("symmetric",) + tuple(e.value for e in sym),
    ]
    if cfg.format == "table":
        # human layout adds the rounded-up 4-decimal rows
        rows.insert(1, ("basic (4dp)",)
                    + tuple(f"{e.rounded_up:.4f}" for e in basic))
        rows.append(("symmetric (4dp)",)
                    + tuple(f"{e.rounded_up:.4f}" for e in sym))
    return Report("correction constants by sample count", columns,
                  tuple(rows), ()), EXIT_OK


def _cmd_bound(args: argparse.Namespace,
               cfg: RunConfig) -> tuple[Report, int]:
    if cfg.format == "csv":
        raise DomainError("bound supports table and json output")
    if args.per_var is not None:
        try:
            values = [float(tok) for tok in args.per_var.split(",") if tok]
        except ValueError:
            raise DomainError("--per-var must be comma-separated "
                              "numbers") from None
        if len(values) != args.n:
            raise DomainError(f"--per-var needs exactly {args.n} values")
    elif args.avg_chi2 is not None:
        values = [args.avg_chi2] * args.n
    else:
        raise DomainError("one of --avg-chi2 or --per-var is required")
    report = theorem_bound(args.n, values, symmetric=args.symmetric)
    rows: list[tuple[object, ...]] = [
        ("n", report.n),
        ("symmetric", report.symmetric),
        ("average_chi2", report.average),
        ("leading_term", report.leading_term),
        ("correction", report.correction),
        ("total", report.total),
    ]
    if report.n <= 10:
        rows.append(("constants",
                     ",".join(_fmt(c) for c in report.constants)))
    return Report("convergence bound", ("quantity", "value"),
                  tuple(rows), ()), EXIT_OK


def _cmd_threshold(args: argparse.Namespace,
                   cfg: RunConfig) -> tuple[Report, int]:
    result = threshold(_VARIANT_NAMES[args.set])
    row = (result.variant, result.threshold, result.argmin_x)
    return Report("subgaussian divergence threshold",
                  ("variant", "threshold", "argmin_x"), (row,), ()), EXIT_OK


def _cmd_check(args: argparse.Namespace,
               cfg: RunConfig) -> tuple[Report, int]:
    if args.t_max <= 0.0 or not math.isfinite(args.t_max):
        raise DomainError("--t-max must be positive and finite")
    if args.t_steps < 1:
        raise DomainError("--t-steps must be >= 1")
    density = _build_density(args.dist, None)
    spec = cfg.quadrature_spec()
    grid = [args.t_max * j / args.t_steps
            for j in range(-args.t_steps, args.t_steps + 1) if j != 0]
    margins = mgf_check(density, grid, spec)
    rows = tuple((t, m, m > 0.0) for t, m in zip(grid, margins))
    all_positive = all(m > 0.0 for m in margins)
    return Report(f"subgaussian margins {args.dist}",
                  ("t", "margin", "positive"), rows,
                  (("all_positive", all_positive),)), EXIT_OK


def _cmd_verify_suite(args: argparse.Namespace,
                      cfg: RunConfig) -> tuple[Report, int]:
    tiers = cfg.tiers if args.tiers is None else _parse_tiers(args.tiers)
    suite = run_suite(tiers)
    rows = tuple((c.tier, c.name, c.passed, c.detail) for c in suite.checks)
    footer = (("passed", suite.n_passed), ("failed", suite.n_failed))
    code = EXIT_OK if suite.ok else EXIT_ACCURACY
    return Report("verification suite", ("tier", "check", "passed", "detail"),
                  rows, footer), code


def _cmd_verify_stein(args: argparse.Namespace,
                      cfg: RunConfig) -> tuple[Report, int]:
    passed, detail = stein_check(args.dist, args.n, args.max_order)
    row = (args.dist, args.n, args.max_order, passed, detail)
    code = EXIT_OK if passed else EXIT_ACCURACY
    return Report("coefficient recurrence check",
                  ("dist", "n", "max_order", "passed", "detail"),
                  (row,), ()), code


def _cmd_plotdata(args: argparse.Namespace,
                  cfg: RunConfig) -> tuple[Report, int]:
    if args.x_max <= 0.0 or not math.isfinite(args.x_max):
        raise DomainError("--x-max must be positive and finite")
    if args.steps < 1:
        raise DomainError("--steps must be >= 1")
    rows = []
    for i in range(args.steps + 1):
        x = args.x_max * i / args.steps
        rows.append((x, g(x), g_sym(x)))
    return Report("weight functions", ("x", "g", "g_sym"),
                  tuple(rows), ()), EXIT_OK


def _common_options(parser: argparse.ArgumentParser,
                    prefix: str = "") -> None:
    # subparsers clobber same-name parent values with their own defaults,
    # so the top level stores under distinct dests and _opt merges
    parser.add_argument("--config", dest=prefix + "config", default=None,
                        help="path to a key=value config file")
    parser.add_argument("--format", dest=prefix + "format", choices=FORMATS,
                        default=None,
                        help="output format (default from config)")
    parser.add_argument("--output", dest=prefix + "output", default=None,
                        help="write the report to this path instead of stdout")


def _opt(args: argparse.Namespace, name: str) -> str | None:
    value = getattr(args, name, None)
    if value is None:
        value = getattr(args, "root_" + name, None)
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chi2norm",
        description="Divergence-from-normal computations: divergences, "
                    "certified constants, convergence bounds, diagnostics.")
    _common_options(parser, prefix="root_")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chi2", help="divergence of a catalog density")
    _common_options(p)
    p.add_argument("--dist", required=True,
                   help="density name: uniform, normal, beta:<shape>, "
                        "mixture:<w:h,...>")
    p.add_argument("--n", type=int, default=None,
                   help="compute for the normalized sum of n copies")
    p.add_argument("--method", choices=("direct", "series", "both"),
                   default="both")

    p = sub.add_parser("constants", help="correction constant at one p")
    _common_options(p)
    p.add_argument("--set", choices=("basic", "sym"), required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--method", choices=("exact", "upper"), default="exact")

    p = sub.add_parser("table1", help="certified constants for n = 2..10")
    _common_options(p)

    p = sub.add_parser("bound", help="convergence bound for a sum")
    _common_options(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--avg-chi2", type=float, default=None)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--per-var", default=None,
                   help="comma-separated per-variable divergences")

    p = sub.add_parser("subgaussian", help="thresholds and MGF diagnostics")
    gsub = p.add_subparsers(dest="subcommand", required=True)
    q = gsub.add_parser("threshold", help="divergence threshold of a variant")
    _common_options(q)
    q.add_argument("--set", choices=("first", "basic", "sym"), required=True)
    q = gsub.add_parser("check", help="MGF margins on a grid")
    _common_options(q)
    q.add_argument("--dist", required=True)
    q.add_argument("--t-max", type=float, required=True)
    q.add_argument("--t-steps", type=int, required=True)

    p = sub.add_parser("verify", help="run the tiered self-check suite")
    _common_options(p)
    p.add_argument("--tiers", default=None,
                   help="comma-separated tiers to run (default: all)")
    vsub = p.add_subparsers(dest="target", required=False)
    q = vsub.add_parser("stein", help="recurrence identity for one sum")
    _common_options(q)
    q.add_argument("--dist", default="uniform")
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--max-order", type=int, default=24)

    p = sub.add_parser("plotdata", help="x, g(x), g_sym(x) samples")
    _common_options(p)
    p.add_argument("--x-max", type=float, default=20.0)
    p.add_argument("--steps", type=int, default=200)

    return parser


_COMMANDS = {
    "chi2": _cmd_chi2,
    "constants": _cmd_constants,
    "table1": _cmd_table1,
    "bound": _cmd_bound,
    "plotdata": _cmd_plotdata,
}


def _resolve(args: argparse.Namespace):
    if args.command == "subgaussian":
        return (_cmd_threshold if args.subcommand == "threshold"
                else _cmd_check)
    if args.command == "verify":
        if getattr(args, "target", None) == "stein":
            return _cmd_verify_stein
        return _cmd_verify_suite
    return _COMMANDS[args.command]


def run(argv: list[str]) -> int:
    """Parse, execute, emit; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code is None:
            return EXIT_OK
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    fmt_flag = _opt(args, "format")
    out_flag = _opt(args, "output")
    overrides: dict[str, object] = {}
    if fmt_flag is not None:
        overrides["format"] = fmt_flag
    if out_flag is not None:
        overrides["output"] = out_flag
    try:
        path = _opt(args, "config") or os.environ.get(CONFIG_ENV_VAR) or None
        file_keys = set(read_config_file(path)) if path else set()
        cfg = load_config(path, overrides)
        if (args.command == "plotdata" and fmt_flag is None
                and "format" not in file_keys):
            # figure-data consumers want CSV unless told otherwise
            cfg = replace(cfg, format="csv")
        report, code = _resolve(args)(args, cfg)
        _emit(report, cfg.format, cfg.output)
    except DomainError as exc:
        _error_record("usage", exc)
        return EXIT_USAGE
    except (AccuracyError, CapacityError) as exc:
        _error_record("accuracy", exc)
        return EXIT_ACCURACY
    return code


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())
