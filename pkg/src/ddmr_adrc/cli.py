"""Command line entry point: run scenarios, compare the two controllers
and validate configuration files.

Exit codes are a stable contract: 0 success, 1 configuration error,
2 simulation failure.
"""

import argparse
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, VARIANTS, load_run_config, resolved_table
from .metrics import format_comparison, report_from_log
from .numerics import IntegrationError
from .simulation import SimulationError, run_closed_loop

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

_VARIANT_TITLES = {"adrc": "ADRC", "iadrc": "IADRC"}


def _load(path: str | None) -> RunConfig:
    try:
        return load_run_config(path)
    except OSError as err:
        raise ConfigError("file", None, str(err)) from err


def _run_one(rc: RunConfig, variant: str):
    scenario = rc.scenario()
    cfg = rc.controller(variant)
    return run_closed_loop(scenario, cfg)


def cmd_run(args) -> int:
    rc = _load(args.config)
    rc.check_variant_consistency(args.controller)
    log = _run_one(rc, args.controller)
    log.to_csv(args.out)
    report = report_from_log(log)
    title = _VARIANT_TITLES[args.controller]
    print(f"# {title} run, {len(log.t)} samples, csv: {args.out}")
    for name, value in report.rows():
        print(f"{name}={value!r}")
    return EXIT_OK


def cmd_compare(args) -> int:
    rc = _load(args.config)
    try:
        variant_a, variant_b = [v.strip() for v in args.controllers.split(",")]
    except ValueError:
        raise ConfigError(
            "cli", "--controllers", "expected two comma-separated variants"
        )
    for v in (variant_a, variant_b):
        if v not in VARIANTS:
            raise ConfigError("cli", "--controllers", f"unknown variant {v!r}")

    log_a = _run_one(rc, variant_a)
    log_b = _run_one(rc, variant_b)

    out = Path(args.out)
    csv_a = out.with_name(out.stem + f"_{variant_a}.csv")
    csv_b = out.with_name(out.stem + f"_{variant_b}.csv")
    if csv_a == csv_b:
        csv_b = out.with_name(out.stem + f"_{variant_b}_2.csv")
    log_a.to_csv(csv_a)
    log_b.to_csv(csv_b)

    text = format_comparison(
        report_from_log(log_a),
        report_from_log(log_b),
        names=(_VARIANT_TITLES[variant_a], _VARIANT_TITLES[variant_b]),
    )
    out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    print(f"# csv: {csv_a} {csv_b}")
    return EXIT_OK


def cmd_validate(args) -> int:
    rc = _load(args.config)
    print(f"{'section':<16}{'key':<24}{'value':<26}{'provenance':<12}description")
    for section, key, value, provenance, help_text in resolved_table(rc):
        print(f"{section:<16}{key:<24}{value:<26}{provenance:<12}{help_text}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors (exit 1); argparse's default
    # exit code 2 is reserved for simulation failures
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"config error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ddmr-adrc",
        description="Closed-loop wheel-speed control benchmark for a "
        "differential drive robot (classical vs improved ADRC).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one controller, write a CSV log")
    p_run.add_argument("--config", default=None, help="config file (defaults used when omitted)")
    p_run.add_argument("--controller", choices=VARIANTS, default="iadrc")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.set_defaults(fn=cmd_run)

    p_cmp = sub.add_parser(
        "compare", help="run both controllers on the same scenario and report indices"
    )
    p_cmp.add_argument("--config", default=None)
    p_cmp.add_argument("--out", required=True, help="report text path; CSVs written alongside")
    p_cmp.add_argument(
        "--controllers", default="adrc,iadrc",
        help="comma-separated pair to compare (default adrc,iadrc)",
    )
    p_cmp.set_defaults(fn=cmd_compare)

    p_val = sub.add_parser("validate", help="check a config file, print resolved parameters")
    p_val.add_argument("--config", default=None)
    p_val.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, IntegrationError) as err:
        print(f"simulation error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
