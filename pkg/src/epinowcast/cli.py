"""Command-line front end.

Subcommands: fit, sweep, compare, revisions, predict, index, convert.
Exit codes: 0 success, 1 usage error, 2 data/domain error. Output is
bit-deterministic: payloads carry no timestamps unless --stamp is given,
and ANSI styling is applied only on a TTY (EPINOWCAST_NO_COLOR disables it).
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import os
import sys
from pathlib import Path

from . import __version__, lag_sweep, nowcast, revisions
from .errors import EpiNowcastError
from .ingest import emit_long_daily, load_fixture, parse_jhu_wide_cumulative, parse_long_daily
from .ols import stars
from .series import DateWindow, index_to_100

FIXTURE_WINDOW = DateWindow(dt.date(2020, 3, 3), dt.date(2020, 3, 28))

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def _styled(text: str, out) -> str:
    if os.environ.get("EPINOWCAST_NO_COLOR"):
        return text
    if not (hasattr(out, "isatty") and out.isatty()):
        return text
    return f"\x1b[1m{text}\x1b[0m"


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _json_text(payload: dict, stamp: bool) -> str:
    if stamp:
        payload = {"generated_at": dt.datetime.now().isoformat(), **payload}
    return json.dumps(payload, indent=2) + "\n"


def _csv_text(header: list[str], rows: list[list], stamp: bool) -> str:
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated {dt.datetime.now().isoformat()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _window_from_args(args) -> DateWindow:
    if args.from_date is None or args.to_date is None:
        if not args.fixture:
            raise SystemExit_usage("--from/--to are required without --fixture")
        start = args.from_date or FIXTURE_WINDOW.start
        end = args.to_date or FIXTURE_WINDOW.end
        return DateWindow(start, end)
    return DateWindow(args.from_date, args.to_date)


def SystemExit_usage(message: str) -> SystemExit:
    sys.stderr.write(f"epinowcast: error: {message}\n")
    return SystemExit(EXIT_USAGE)


def _load_pair(args) -> tuple:
    """Resolve (target, predictor) series from --fixture or file paths."""
    if args.fixture:
        fx = load_fixture()
        if args.predictor not in fx.series_names():
            raise SystemExit_usage(
                f"--predictor must be one of {fx.series_names()} with --fixture"
            )
        return fx.rki, fx.series(args.predictor)
    if args.target is None:
        raise SystemExit_usage("--target is required without --fixture")
    target = parse_long_daily(args.target)
    predictor = parse_long_daily(args.predictor)
    return target, predictor


# ---------------------------------------------------------------- fit

def _fit_text(report: dict, out) -> str:
    spec = report["spec"]
    head = (
        f"log-log nowcast: target {spec['target']}, predictor {spec['predictor']} "
        f"(lag {spec['lag_days']}), window {spec['window']['from']}..{spec['window']['to']}"
    )
    lines = [_styled(head, out), ""]
    width = max(len(n) for n in report["coefficients"])
    for name, c in report["coefficients"].items():
        lines.append(
            f"  {name:<{width}}  {c['estimate']:>9.3f}  ({c['se']:.3f})  {c['stars']}"
        )
    lines.append("")
    f = report["f"]
    rows = [
        ("n", str(report["n"])),
        ("R2", f"{report['r2']:.3f}"),
        ("adjusted R2", f"{report['adj_r2']:.3f}"),
        ("MAE (log scale)", f"{report['mae_log']:.3f}"),
        ("MAPE (original)", f"{report['mape_original']:.3f}"),
        ("residual SE", f"{report['residual_se']:.3f}  (df = {report['n'] - len(report['coefficients'])})")
        if "residual_se" in report
        else None,
        ("F statistic", f"{f['value']:.3f}  (df = {f['df1']}; {f['df2']})"),
    ]
    if report["weekend_effect"] is not None:
        rows.append(("weekend effect", f"{100 * report['weekend_effect']:+.1f}%"))
    for row in rows:
        if row is not None:
            lines.append(f"  {row[0]:<16} {row[1]}")
    return "\n".join(lines) + "\n"


def cmd_fit(args) -> int:
    target, predictor = _load_pair(args)
    window = _window_from_args(args)
    spec = nowcast.NowcastSpec(target, predictor, args.lag, window)
    model = nowcast.fit_nowcast(spec)
    report = nowcast.to_report(model)
    if args.format == "json":
        _write_output(_json_text(report, args.stamp), args.output)
    elif args.format == "text":
        _write_output(_fit_text(report, sys.stdout), args.output)
    else:
        raise SystemExit_usage("fit supports --format text or json")
    return EXIT_OK


# ---------------------------------------------------------------- sweep

def _sweep_payload(result: lag_sweep.LagSweepResult) -> dict:
    per_lag = []
    for e in result.entries:
        if e.feasible:
            per_lag.append(
                {
                    "lag": e.lag,
                    "r_squared": e.r_squared,
                    "adj_r_squared": e.adj_r_squared,
                    "mae_log": e.mae_log,
                    "mape_original": e.mape_original,
                }
            )
        else:
            per_lag.append({"lag": e.lag, "reason": e.reason})
    return {
        "predictor": result.predictor_name,
        "selection_rule": result.selection_rule,
        "selected_lag": result.selected_lag,
        "best_adj_r2_lag": result.best_adj_r2_lag,
        "best_mae_lag": result.best_mae_lag,
        "per_lag": per_lag,
    }


def _sweep_text(result: lag_sweep.LagSweepResult, out) -> str:
    lines = [_styled(f"lag sweep: predictor {result.predictor_name}", out), ""]
    lines.append("  lag   adj R2     MAE      MAPE     R2")
    for e in result.entries:
        if e.feasible:
            lines.append(
                f"  {e.lag:>3}   {e.adj_r_squared:.3f}    {e.mae_log:.3f}    "
                f"{e.mape_original:.3f}    {e.r_squared:.3f}"
            )
        else:
            lines.append(f"  {e.lag:>3}   infeasible: {e.reason}")
    lines.append("")
    lines.append(
        f"  selected lag {result.selected_lag} (rule {result.selection_rule}; "
        f"best adj R2 at {result.best_adj_r2_lag}, best MAE at {result.best_mae_lag})"
    )
    if result.selection_rule == "combined" and result.rules_disagree:
        lines.append(
            f"  note: selection rules disagree (adj R2 -> {result.best_adj_r2_lag}, "
            f"MAE -> {result.best_mae_lag})"
        )
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    target, predictor = _load_pair(args)
    window = _window_from_args(args)
    result = lag_sweep.sweep(target, predictor, window, max_lag=args.max_lag, rule=args.rule)
    if args.emit_plot:
        rows = lag_sweep.emit_sweep_table(result, metrics=("adj_r_squared", "mae_log"))
        Path(args.emit_plot).write_text(lag_sweep.sweep_table_to_csv(rows), encoding="utf-8")
    if args.format == "json":
        _write_output(_json_text(_sweep_payload(result), args.stamp), args.output)
    elif args.format == "csv":
        rows = lag_sweep.emit_sweep_table(result)
        text = lag_sweep.sweep_table_to_csv(rows)
        if args.stamp:
            text = f"# generated {dt.datetime.now().isoformat()}\n" + text
        _write_output(text, args.output)
    else:
        _write_output(_sweep_text(result, sys.stdout), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- compare

def cmd_compare(args) -> int:
    if args.fixture:
        fx = load_fixture()
        truth = fx.rki
        other = fx.series(args.other or "jhu")
    else:
        if args.truth is None or args.other is None:
            raise SystemExit_usage("--truth and --other are required without --fixture")
        truth = parse_long_daily(args.truth)
        other = parse_long_daily(args.other)
    window = _window_from_args(args)
    result = nowcast.compare_raw(truth, other, window)
    if args.format == "json":
        payload = {
            "truth": truth.source_name,
            "other": other.source_name,
            "mape": result.mape,
            "rows": [
                {
                    "date": r.date.isoformat(),
                    "truth": r.truth,
                    "other": r.other,
                    "signed_pct": r.signed_pct,
                }
                for r in result.rows
            ],
        }
        _write_output(_json_text(payload, args.stamp), args.output)
    elif args.format == "csv":
        rows = [
            [r.date.isoformat(), _cell(r.truth), _cell(r.other), _cell(r.signed_pct)]
            for r in result.rows
        ]
        _write_output(
            _csv_text(["date", "truth", "other", "signed_pct"], rows, args.stamp),
            args.output,
        )
    else:
        lines = [
            _styled(
                f"raw comparison: {other.source_name} vs {truth.source_name} "
                f"(denominator {truth.source_name})",
                sys.stdout,
            ),
            "",
            f"  MAPE over {len(result.rows)} days: {result.mape:.3f}",
            "",
            "  date        truth      other     diff",
        ]
        for r in result.rows:
            lines.append(
                f"  {r.date.isoformat()}  {r.truth:>8.0f}  {r.other:>8.0f}  {r.signed_pct:>+8.1%}"
            )
        _write_output("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------- revisions

def cmd_revisions(args) -> int:
    store = revisions.load_snapshot_store(args.store)
    profile = revisions.revision_profile(store, args.new, args.old)
    if args.format == "json":
        payload = {
            "older_retrieval": args.old.isoformat(),
            "newer_retrieval": args.new.isoformat(),
            "rows": [
                {"date": d.isoformat(), "share": share} for d, share in profile
            ],
        }
        _write_output(_json_text(payload, args.stamp), args.output)
    elif args.format == "csv":
        rows = [[d.isoformat(), _cell(share)] for d, share in profile]
        _write_output(_csv_text(["date", "share"], rows, args.stamp), args.output)
    else:
        lines = [
            _styled(
                f"late-reporting shares: {args.old.isoformat()} -> {args.new.isoformat()}",
                sys.stdout,
            ),
            "",
            "  date        share",
        ]
        for d, share in profile:
            text = "undefined" if share is None else f"{share:+.3f}"
            lines.append(f"  {d.isoformat()}  {text}")
        _write_output("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------- predict

def cmd_predict(args) -> int:
    report = json.loads(Path(args.model).read_text(encoding="utf-8"))
    lag_days = report["spec"]["lag_days"]
    if args.fixture:
        fx = load_fixture()
        predictor = fx.series(report["spec"]["predictor"])
        actual = fx.series(report["spec"]["target"])
    else:
        if args.predictor_file is None:
            raise SystemExit_usage("--predictor-file is required without --fixture")
        predictor = parse_long_daily(args.predictor_file)
        actual = parse_long_daily(args.actual_file) if args.actual_file else None

    rows = []
    delta = dt.timedelta(days=lag_days)
    for d, value in predictor.observations:
        if value <= 0:
            continue  # log-scale model cannot use this observation
        prediction_date = d + delta
        if args.from_date and prediction_date < args.from_date:
            continue
        if args.to_date and prediction_date > args.to_date:
            continue
        predicted = nowcast.predict_from_report(report, value, prediction_date)
        known = actual.get(prediction_date) if actual is not None else None
        rows.append((prediction_date, predicted, known))

    if args.format == "json":
        payload = {
            "model": report["spec"],
            "rows": [
                {"date": d.isoformat(), "predicted": p, "actual": a}
                for d, p, a in rows
            ],
        }
        _write_output(_json_text(payload, args.stamp), args.output)
    elif args.format == "csv":
        table = [[d.isoformat(), _cell(p), _cell(a)] for d, p, a in rows]
        _write_output(_csv_text(["date", "predicted", "actual"], table, args.stamp), args.output)
    else:
        spec = report["spec"]
        lines = [
            _styled(
                f"predictions: {spec['predictor']} (lag {lag_days}) -> {spec['target']}",
                sys.stdout,
            ),
            "",
            "  date        predicted    actual",
        ]
        for d, p, a in rows:
            actual_text = f"{a:>8.0f}" if a is not None else "       -"
            lines.append(f"  {d.isoformat()}  {p:>9.1f}  {actual_text}")
        _write_output("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------- index / convert

def cmd_index(args) -> int:
    series = parse_long_daily(args.input)
    indexed = index_to_100(series)
    text = emit_long_daily(indexed)
    if args.stamp:
        text = f"# generated {dt.datetime.now().isoformat()}\n" + text
    _write_output(text, args.output)
    return EXIT_OK


def cmd_convert(args) -> int:
    daily, warnings = parse_jhu_wide_cumulative(args.input, args.country)
    for w in warnings:
        sys.stderr.write(f"warning: {w}\n")
    text = emit_long_daily(daily)
    if args.stamp:
        text = f"# generated {dt.datetime.now().isoformat()}\n" + text
    _write_output(text, args.output)
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def _add_common(p: argparse.ArgumentParser, formats: tuple[str, ...], default: str) -> None:
    p.add_argument("--format", choices=formats, default=default, help="output format")
    p.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")
    p.add_argument("--stamp", action="store_true", help="include a generation timestamp")


def _add_window(p: argparse.ArgumentParser) -> None:
    p.add_argument("--from", dest="from_date", type=_date, metavar="DATE",
                   help="window start (default: bundled analysis window with --fixture)")
    p.add_argument("--to", dest="to_date", type=_date, metavar="DATE",
                   help="window end (inclusive)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epinowcast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("fit", help="fit one log-log nowcast model and report it")
    p.add_argument("--fixture", action="store_true", help="use the bundled dataset")
    p.add_argument("--target", metavar="PATH", help="target series (long-daily CSV)")
    p.add_argument("--predictor", required=True,
                   help="predictor: fixture series name with --fixture, else a CSV path")
    p.add_argument("--lag", type=int, default=0, help="predictor lag in days (default 0)")
    _add_window(p)
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="fit at every lag 0..N and select the best")
    p.add_argument("--fixture", action="store_true", help="use the bundled dataset")
    p.add_argument("--target", metavar="PATH")
    p.add_argument("--predictor", required=True)
    p.add_argument("--max-lag", type=int, default=10, help="largest lag to try (default 10)")
    p.add_argument("--rule", choices=lag_sweep.SELECTION_RULES, default="combined")
    p.add_argument("--emit-plot", metavar="PATH",
                   help="also write the tidy adj-R2/MAE table as CSV to PATH")
    _add_window(p)
    _add_common(p, ("text", "json", "csv"), "text")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="model-free comparison of two series")
    p.add_argument("--fixture", action="store_true",
                   help="compare bundled jhu against bundled rki")
    p.add_argument("--truth", metavar="PATH", help="denominator series (long-daily CSV)")
    p.add_argument("--other", metavar="PATH_OR_NAME",
                   help="series compared against truth (fixture name with --fixture)")
    _add_window(p)
    _add_common(p, ("text", "json", "csv"), "text")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("revisions", help="per-date late-reporting shares between vintages")
    p.add_argument("--store", required=True, metavar="DIR",
                   help="directory of YYYY-MM-DD.csv snapshots")
    p.add_argument("--old", required=True, type=_date, help="older retrieval date")
    p.add_argument("--new", required=True, type=_date, help="newer retrieval date")
    _add_common(p, ("text", "json", "csv"), "text")
    p.set_defaults(func=cmd_revisions)

    p = sub.add_parser("predict", help="apply a saved fit report to a predictor series")
    p.add_argument("--model", required=True, metavar="PATH", help="fit report JSON")
    p.add_argument("--fixture", action="store_true",
                   help="read predictor and actuals from the bundled dataset")
    p.add_argument("--predictor-file", metavar="PATH", help="predictor series CSV")
    p.add_argument("--actual-file", metavar="PATH", help="optional actuals CSV")
    _add_window(p)
    _add_common(p, ("text", "json", "csv"), "text")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("index", help="rescale a series so its maximum is 100")
    p.add_argument("--input", required=True, metavar="PATH", help="long-daily CSV")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--stamp", action="store_true")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("convert", help="wide cumulative CSV to long daily-new CSV")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--country", required=True)
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--stamp", action="store_true")
    p.set_defaults(func=cmd_convert)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except EpiNowcastError as err:
        sys.stderr.write(f"error: {type(err).__name__}: {err}\n")
        return EXIT_DATA
    except OSError as err:
        sys.stderr.write(f"error: {type(err).__name__}: {err}\n")
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
