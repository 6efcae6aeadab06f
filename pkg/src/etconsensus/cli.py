"""Command line front-end.

    etconsensus run --config paper_fig3.cfg --out out/fig3
    etconsensus compare --config paper_fig2.cfg --out out/compare
    etconsensus check --config my.cfg

Exit codes: 0 success, 1 config error, 2 Zeno guard abort, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from . import report
from .errors import NumericalFailure, ParseError, ValidationError, ZenoGuard
from .experiment import dumps_config, load_config
from .simulator import SimConfig, run, validate_config
from .triggering import ALL_LAWS, LawKind

EXIT_OK, EXIT_CONFIG, EXIT_ZENO, EXIT_NUMERICAL = 0, 1, 2, 3


def _load(args) -> SimConfig:
    cfg = load_config(args.config)
    changes = {}
    if getattr(args, "law", None):
        changes["law"] = LawKind.parse(args.law)
    if args.t_final is not None:
        changes["t_final"] = args.t_final
    if args.seed is not None:
        changes["seed"] = args.seed
        changes["x0"] = None
    return dataclasses.replace(cfg, **changes) if changes else cfg


def run_command(cfg: SimConfig, out: Path) -> int:
    try:
        result = run(cfg)
    except ZenoGuard as exc:
        report.write_run(out, cfg, exc.partial)
        print(f"ZENO {cfg.law.value}: {exc}", file=sys.stderr)
        return EXIT_ZENO
    except NumericalFailure as exc:
        print(f"NUMERICAL FAILURE {cfg.law.value}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    summary = report.write_run(out, cfg, result)
    verdict = "consensus" if summary["consensus_reached"] else "NO consensus"
    gap = summary["min_gap"]
    print(f"{verdict} {cfg.law.value}: max|x_i - mean0| = {summary['final_error']:.3e} at "
          f"t={summary['t_end']:g}, {summary['total_events']} events, "
          f"min gap {'n/a' if gap is None else f'{gap:.3e}'}")
    return EXIT_OK


def compare_command(cfg: SimConfig, out: Path) -> int:
    """Run all four laws from one config, writing one CSV row per law."""
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "comparison.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(report.comparison_header(cfg.n))
        fh.flush()
        for law in ALL_LAWS:
            try:
                result = run(dataclasses.replace(cfg, law=law))
            except ZenoGuard as exc:
                print(f"ZENO {law.value}: {exc}", file=sys.stderr)
                return EXIT_ZENO
            except NumericalFailure as exc:
                print(f"NUMERICAL FAILURE {law.value}: {exc}", file=sys.stderr)
                return EXIT_NUMERICAL
            except ValidationError as exc:
                print(f"config error for {law.value}: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            writer.writerow(report.comparison_row(result))
            fh.flush()
            print(f"{law.value}: {result.summary.n_events} events, "
                  f"final error {result.summary.final_error:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="etconsensus", description="Event-triggered average consensus experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "simulate one law"), ("compare", "simulate all four laws"),
                            ("check", "validate a config and echo it")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment file or bundled config name")
        if name != "check":
            p.add_argument("--out", required=True, type=Path, help="output directory")
        if name == "run":
            p.add_argument("--law", choices=[k.value for k in LawKind], help="override the law")
        p.add_argument("--t-final", type=float, default=None)
        p.add_argument("--seed", type=int, default=None, help="draw x0 uniformly from the config range")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        # overrides bypass the loader's checks, so validate again
        cfg = validate_config(_load(args))
    except (ParseError, ValidationError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "check":
        print(f"config OK: n={cfg.n}, law={cfg.law.value}")
        print(dumps_config(cfg), end="")
        return EXIT_OK
    if args.command == "run":
        return run_command(cfg, args.out)
    return compare_command(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
