"""Command-line entry point.

Subcommands: validate | run | analyze | stratify | replicate.
Exit codes: 0 success, 1 domain error (invalid scenario, bad inputs,
insufficient data), 2 I/O or configuration problems.  The seed resolution
order is: --seed flag, then the ECONSIM_SEED environment variable, then
the scenario file.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__, analytics, engine, plots
from .config import (SCHEMA_VERSION, WorldConfig, default_scenario_path,
                     load_scenario, parse_scenario, validate_catalog)
from .errors import (ConfigError, DanglingReference, EconsimError, ParseError,
                     ValidationError)
from .logs import final_snapshot, read_snapshots, read_transactions

REPORT_VERSION = 1
SEED_ENV_VAR = "ECONSIM_SEED"


def _resolve_scenario(value: str) -> Path:
    path = Path(value)
    if path.exists():
        return path
    try:
        return default_scenario_path(value)
    except ParseError:
        raise FileNotFoundError(f"scenario not found: {value}")


def _resolve_seed(args) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got '{env}'")
    return None


# --------------------------------------------------------------------------
# validate

def cmd_validate(args) -> int:
    path = _resolve_scenario(args.scenario)
    try:
        config, _ = parse_scenario(path)
    except ParseError as exc:
        if args.json:
            print(json.dumps({"report_version": REPORT_VERSION, "valid": False,
                              "diagnostics": [{"code": "PARSE_ERROR", "path": str(path),
                                               "message": str(exc)}]}))
        else:
            print(f"parse error: {exc}", file=sys.stderr)
        return 1
    diagnostics = validate_catalog(config)
    if args.json:
        print(json.dumps({
            "report_version": REPORT_VERSION,
            "valid": not diagnostics,
            "diagnostics": [{"code": d.code, "path": d.path, "message": d.message}
                            for d in diagnostics],
        }, indent=2))
    else:
        for d in diagnostics:
            print(f"{d.code} at {d.path}: {d.message}", file=sys.stderr)
        if not diagnostics:
            print(f"{path}: ok ({len(config.commodities)} commodities, "
                  f"{len(config.occupations)} occupations)")
    return 0 if not diagnostics else 1


# --------------------------------------------------------------------------
# run

def cmd_run(args) -> int:
    config = load_scenario(_resolve_scenario(args.scenario))
    seed = _resolve_seed(args)
    summary = engine.run_scenario(config, args.ticks, args.out, seed=seed)
    print(f"{summary.name}: {summary.ticks} ticks, {summary.agents} agents, "
          f"{summary.trades_total} trades -> {args.out}")
    return 0


# --------------------------------------------------------------------------
# analyze

def _facts_to_dict(report: analytics.StylizedFactsReport) -> dict:
    return {
        "commodity": report.commodity,
        "bar_count": report.bar_count,
        "return_count": report.return_count,
        "mean": report.mean,
        "std": report.std,
        "skewness": report.skewness,
        "excess_kurtosis": report.excess_kurtosis,
        "acf_abs": list(report.acf_abs),
        "acf_abs_lag1": report.acf_abs[0] if report.acf_abs else None,
        "ljung_box_statistic": report.ljung_box_statistic,
        "ljung_box_dof": report.ljung_box_dof,
        "ljung_box_p": report.ljung_box_p,
        "log_price_range": report.log_price_range,
        "max_drawdown": report.max_drawdown,
    }


def _write_facts_csv(path: Path, reports: list[analytics.StylizedFactsReport]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["commodity", "bars", "returns", "excess_kurtosis",
                         "skewness", "acf_abs_lag1", "ljung_box_statistic",
                         "ljung_box_p", "log_price_range", "max_drawdown"])
        for r in reports:
            writer.writerow([
                r.commodity, r.bar_count, r.return_count,
                repr(r.excess_kurtosis), repr(r.skewness),
                repr(r.acf_abs[0]) if r.acf_abs else "",
                repr(r.ljung_box_statistic), repr(r.ljung_box_p),
                repr(r.log_price_range), repr(r.max_drawdown),
            ])


def _write_ohlc_csv(path: Path, bars: list[analytics.OhlcBar]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["interval_start", "open", "high", "low", "close",
                         "volume", "trade_count"])
        for bar in bars:
            writer.writerow([bar.interval_start, repr(bar.open), repr(bar.high),
                             repr(bar.low), repr(bar.close), bar.volume,
                             bar.trade_count])


def cmd_analyze(args) -> int:
    rows = read_transactions(args.log)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bars = analytics.build_ohlc(rows, args.interval, args.commodity)
    report = analytics.compute_stylized_facts(bars, args.lags)
    slug = args.commodity.replace(" ", "_").lower()
    _write_ohlc_csv(out / f"{slug}_ohlc.csv", bars)
    doc = {"report_version": REPORT_VERSION, "interval": args.interval,
           "lags": args.lags, **_facts_to_dict(report)}
    (out / f"{slug}_stylized_facts.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _write_facts_csv(out / f"{slug}_stylized_facts.csv", [report])
    if args.plots:
        returns = analytics.log_returns(bars)
        plots.candlestick_volume(bars, out / f"{slug}_candlestick.png",
                                 title=args.commodity)
        plots.return_histogram(returns, out / f"{slug}_histogram.png",
                               title=args.commodity)
        plots.return_series(returns, out / f"{slug}_returns.png",
                            title=args.commodity)
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"{args.commodity}: {report.bar_count} bars, "
              f"excess kurtosis {report.excess_kurtosis:.3f}, "
              f"skewness {report.skewness:.3f}, "
              f"acf|r|(1) {report.acf_abs[0]:.3f}, "
              f"LB p {report.ljung_box_p:.3g}")
    return 0


# --------------------------------------------------------------------------
# stratify

def _write_stratification(out: Path, report: analytics.StratificationReport,
                          render: bool) -> dict:
    with open(out / "education_wealth.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bin_center", "median_net_worth", "count"])
        for center, median, count in report.bins:
            writer.writerow([repr(center), repr(median), count])
    with open(out / "occupation_ranking.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["occupation", "median_net_worth", "count"])
        for job, median, count in report.occupation_ranking:
            writer.writerow([job, repr(median), count])
    doc = {
        "report_version": REPORT_VERSION,
        "bin_width": report.bin_width,
        "bins": [{"center": c, "median_net_worth": m, "count": n}
                 for c, m, n in report.bins],
        "quadratic_coefficients": list(report.quadratic),
        "occupation_ranking": [{"occupation": j, "median_net_worth": m, "count": n}
                               for j, m, n in report.occupation_ranking],
    }
    (out / "stratification.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if render:
        plots.stratification_charts(report, out)
    return doc


def cmd_stratify(args) -> int:
    rows = final_snapshot(read_snapshots(args.snapshots))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = analytics.stratification_report(rows)
    doc = _write_stratification(out, report, args.plots)
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"{len(rows)} agents, {len(report.bins)} education bins, "
              f"{len(report.occupation_ranking)} occupations ranked")
    return 0


# --------------------------------------------------------------------------
# replicate

def cmd_replicate(args) -> int:
    scenario_path = _resolve_scenario(args.scenario)
    config = load_scenario(scenario_path)
    seed = _resolve_seed(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    existing = engine.read_manifest(out)
    if existing is not None and existing.get("scenario_hash") != config.scenario_hash:
        raise ConfigError(
            f"output dir {out} holds results for scenario hash "
            f"{existing.get('scenario_hash')[:12]}..., refusing to mix with "
            f"{config.scenario_hash[:12]}...")

    summary = engine.run_scenario(config, args.ticks, out, seed=seed)

    rows = read_transactions(out / "transactions.csv")
    analytics_dir = out / "analytics"
    analytics_dir.mkdir(exist_ok=True)
    reports = []
    for commodity in sorted(summary.trades_by_commodity):
        try:
            bars = analytics.build_ohlc(rows, args.interval, commodity)
            reports.append(analytics.compute_stylized_facts(bars, args.lags))
        except EconsimError:
            continue
    _write_facts_csv(analytics_dir / "stylized_facts.csv", reports)
    (analytics_dir / "stylized_facts.json").write_text(
        json.dumps({"report_version": REPORT_VERSION, "interval": args.interval,
                    "lags": args.lags,
                    "commodities": [_facts_to_dict(r) for r in reports]},
                   indent=2, sort_keys=True) + "\n", encoding="utf-8")

    snapshot_rows = final_snapshot(read_snapshots(out / "snapshots.csv"))
    strat = analytics.stratification_report(snapshot_rows)
    _write_stratification(analytics_dir, strat, args.plots)

    if args.plots and reports:
        most_traded = max(summary.trades_by_commodity,
                          key=lambda c: (summary.trades_by_commodity[c], c))
        bars = analytics.build_ohlc(rows, args.interval, most_traded)
        slug = most_traded.replace(" ", "_").lower()
        plots.candlestick_volume(bars, analytics_dir / f"{slug}_candlestick.png",
                                 title=most_traded)
        returns = analytics.log_returns(bars)
        plots.return_histogram(returns, analytics_dir / f"{slug}_histogram.png",
                               title=most_traded)
        plots.return_series(returns, analytics_dir / f"{slug}_returns.png",
                            title=most_traded)

    artifacts = summary.artifacts + [
        "analytics/stylized_facts.csv", "analytics/stylized_facts.json",
        "analytics/education_wealth.csv", "analytics/occupation_ranking.csv",
        "analytics/stratification.json"]
    engine.write_manifest(out, config, summary.seed, args.ticks, artifacts)
    print(f"replicated {config.name}: {summary.trades_total} trades, "
          f"{len(reports)} commodities analyzed -> {out}")
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="econsim",
        description="Deterministic closed-loop economy simulator and "
                    "stylized-facts analytics harness.")
    parser.add_argument("--version", action="version",
                        version=f"econsim {__version__} (scenario schema v{SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file against the schema")
    p.add_argument("--scenario", required=True,
                   help="scenario path or bundled name (market_life, stratification)")
    p.add_argument("--json", action="store_true", help="machine-readable diagnostics")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="execute a simulation run")
    p.add_argument("--scenario", required=True)
    p.add_argument("--ticks", type=int, required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed (or set ECONSIM_SEED)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="stylized-facts report from a transaction log")
    p.add_argument("--log", required=True, help="transactions.csv from a run")
    p.add_argument("--commodity", required=True)
    p.add_argument("--interval", type=int, default=300,
                   help="bar interval in in-game seconds (default 300)")
    p.add_argument("--lags", type=int, default=20,
                   help="Ljung-Box / ACF lag count (default 20)")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--plots", action="store_true", help="render figures")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stratify", help="education/occupation wealth report")
    p.add_argument("--snapshots", required=True, help="snapshots.csv from a run")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=cmd_stratify)

    p = sub.add_parser("replicate",
                       help="run + analyze + stratify into one report bundle")
    p.add_argument("--scenario", required=True)
    p.add_argument("--ticks", type=int, default=20000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--interval", type=int, default=300)
    p.add_argument("--lags", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=cmd_replicate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, PermissionError, IsADirectoryError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, DanglingReference, ParseError) as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 1
    except EconsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
