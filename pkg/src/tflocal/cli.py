"""Command line entry point: ``tflocal run | list | describe``."""
from __future__ import annotations

import argparse
import json
import sys

from . import harness


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tflocal", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one verification suite")
    run.add_argument("--suite", required=True)
    run.add_argument("--config", help="TOML config; suite defaults are used for missing keys")
    run.add_argument("--out", help="output directory (default: the config's output key)")
    run.add_argument("--quiet", action="store_true")
    sub.add_parser("list", help="list the available suites")
    desc = sub.add_parser("describe", help="print the resolved parameters of a case")
    desc.add_argument("case")
    desc.add_argument("--config")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        for name, text in harness.list_suites().items():
            print(f"{name:18s} {text}")
        return 0
    try:
        if args.command == "describe":
            cfg = harness.SuiteConfig.load(args.config) if args.config else None
            print(json.dumps(harness.describe(args.case, cfg), indent=2, sort_keys=True))
            return 0
        if args.suite not in harness.SUITES:
            raise harness.ConfigError(f"unknown suite {args.suite!r}")
        cfg = (harness.SuiteConfig.load(args.config, args.suite) if args.config
               else harness.SuiteConfig.default(args.suite))
    except (harness.ConfigError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def progress(row):
        if not args.quiet:
            flag = "ok  " if row.passed else "FAIL"
            extra = f"  [{row.error}]" if row.error else ""
            print(f"{flag} {row.case}  ratio={row.ratio:.4g} tol={row.tol:.3g}{extra}", flush=True)

    report = harness.run_suite(cfg, args.out or cfg.output, progress)
    s = report.summary()
    print(f"{cfg.suite}: {s['cases'] - len(s['failures'])}/{s['cases']} cases passed")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
