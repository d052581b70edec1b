"""
CLI entry point for beamlink

Commands:
  run             Solve and/or analyze a scenario at every refinement level
  validate        Parse a scenario and print its canonical form
  example-config  Print the reference scenario
  rules           List the invariant checks

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid scenario,
3 runtime failure (I/O, numerical breakdown).
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

REFERENCE_SCENARIO = {
    "solid": {
        "dimensions": [1.0, 1.0, 1.0],
        "divisions": [2, 2, 2],
        "origin": [-0.5, -0.5, 0.0],
        "material": {"youngs_modulus": 1000.0, "poisson_ratio": 0.3},
    },
    "beam": {
        "length": 2.0,
        "elements": 4,
        "section": {"youngs_modulus": 1000.0, "poisson_ratio": 0.3, "width": 0.2, "height": 0.2},
    },
    "interface": {"face_set": "-z"},
    "loads": {"tractions": [{"face_set": "+z", "traction": [1.0, 0.0, 0.0]}]},
    "analysis": {"solve": True, "stability": True, "refinement_levels": 2},
}

console = Console()
err_console = Console(stderr=True)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="beamlink",
        description="beamlink - coupled solid/beam mixed finite elements",
    )
    parser.add_argument("--quiet", "-q", action="store_true",
                        help="Suppress the metrics banner after commands")
    parser.add_argument("--no-metrics", action="store_true",
                        help="Disable live metrics for this session")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # ---- run ----
    run_parser = subparsers.add_parser("run", help="Run a scenario")
    run_parser.add_argument("config", help="Scenario JSON file")
    run_parser.add_argument("--solve", action=argparse.BooleanOptionalAction, default=None,
                            help="Solve the coupled system (overrides analysis.solve)")
    run_parser.add_argument("--stability", action=argparse.BooleanOptionalAction, default=None,
                            help="Compute alpha, beta and rigid-mode counts")
    run_parser.add_argument("--export", action="store_true", default=None,
                            help="Write MatrixMarket dumps of every level")
    run_parser.add_argument("--levels", type=int, default=None, help="Refinement levels")
    run_parser.add_argument("--out", default=None, help="Output directory")
    run_parser.add_argument("--parallel", type=int, default=None, metavar="WORKERS",
                            help="Assemble elements with a thread pool")
    run_parser.add_argument("--json", action="store_true", dest="as_json",
                            help="Print the run summary as JSON")

    # ---- validate ----
    validate_parser = subparsers.add_parser("validate", help="Validate a scenario")
    validate_parser.add_argument("config", help="Scenario JSON file")

    # ---- example-config ----
    example_parser = subparsers.add_parser("example-config", help="Print the reference scenario")
    example_parser.add_argument("--output", "-o", default=None,
                                help="Output file (default: stdout)")

    # ---- rules ----
    subparsers.add_parser("rules", help="List the invariant checks")

    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    from beamlink.utils.live_metrics import is_enabled, live, set_enabled
    if args.no_metrics:
        set_enabled(False)

    if args.command == "run":
        code = _cmd_run(args)
    elif args.command == "validate":
        code = _cmd_validate(args)
    elif args.command == "example-config":
        code = _cmd_example_config(args)
    elif args.command == "rules":
        code = _cmd_rules(args)
    else:
        parser.print_help()
        return EXIT_CONFIG

    if not args.quiet and not args.no_metrics and is_enabled():
        banner = live.banner(color=False)
        if banner and args.command == "run":
            err_console.print(banner, style="dim", highlight=False)
    return code


def _configure_logging(verbose: bool) -> None:
    logger = logging.getLogger("beamlink")
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=err_console, show_path=False))
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logger.propagate = False


# ===================================================================
# Command implementations
# ===================================================================

def _load(path: str):
    from beamlink.config import parse_config
    from beamlink.errors import ConfigurationError
    try:
        return parse_config(path)
    except ConfigurationError as exc:
        err_console.print(f"[red]invalid scenario[/red] {path}: {escape(str(exc))}",
                          highlight=False)
        return None


def _cmd_run(args) -> int:
    from beamlink.config import with_overrides
    from beamlink.errors import BeamlinkError, ConfigurationError
    from beamlink.runner import run

    config = _load(args.config)
    if config is None:
        return EXIT_CONFIG
    try:
        config = with_overrides(
            config,
            solve=args.solve,
            stability=args.stability,
            export=args.export,
            refinement_levels=args.levels,
            parallel_workers=args.parallel,
            directory=args.out,
        )
        result = run(config)
    except ConfigurationError as exc:
        _write_failures(config.output, exc, "configuration")
        err_console.print(f"[red]configuration error[/red]: {escape(str(exc))}", highlight=False)
        return EXIT_CONFIG
    except BeamlinkError as exc:
        _write_failures(config.output, exc, "runtime")
        err_console.print(f"[red]error[/red]: {escape(str(exc))}", highlight=False)
        return EXIT_RUNTIME

    if args.as_json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        _print_run(result)
    return EXIT_OK if result.exit_code == 0 else EXIT_CHECKS_FAILED


def _write_failures(output, exc, kind: str) -> None:
    path = Path(output.directory) / output.failures
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(
            [{"rule": kind, "message": str(exc), "key": getattr(exc, "key", None)}], indent=2
        ) + "\n")
    except OSError:
        pass


def _cmd_validate(args) -> int:
    from beamlink.config import dump_config
    config = _load(args.config)
    if config is None:
        return EXIT_CONFIG
    print(dump_config(config), end="")
    return EXIT_OK


def _cmd_example_config(args) -> int:
    text = json.dumps(REFERENCE_SCENARIO, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        console.print(f"Scenario written to {args.output}")
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_rules(args) -> int:
    from beamlink.checks.rules import load_builtin_rules
    rs = load_builtin_rules()
    table = Table(title=f"Invariant checks ({len(rs.rules)} loaded)")
    for column in ("id", "severity", "requires", "tags"):
        table.add_column(column)
    for r in rs.rules:
        table.add_row(r.id, r.severity.value, ", ".join(r.requires), ", ".join(r.tags))
    console.print(table)
    return EXIT_OK


# ===================================================================
# Helpers
# ===================================================================

def _print_run(result) -> None:
    table = Table(title="beamlink run")
    for column in ("level", "N", "tip u", "energy gap", "alpha", "beta", "rigid", "checks"):
        table.add_column(column, justify="right")
    for lv in result.levels:
        s, st = lv.solve, lv.stability
        table.add_row(
            str(lv.level),
            str(lv.size),
            f"{max(abs(s.tip_displacement)):.4e}" if s else "-",
            f"{s.energy_gap:.1e}" if s else "-",
            f"{st.alpha_kernel:.4e}" if st else "-",
            f"{st.beta_infsup:.4e}" if st else "-",
            f"{st.rigid_modes_unconstrained}->{st.rigid_modes_constrained}" if st else "-",
            "PASS" if lv.checks.is_valid else "FAIL",
        )
    console.print(table)
    status = "[green]PASS[/green]" if result.checks.is_valid else "[red]FAIL[/red]"
    console.print(f"  {status}  {len(result.checks.errors)} errors, "
                  f"{len(result.checks.warnings)} warnings")
    for f in result.checks.findings:
        console.print(f"    [{f.severity.value}] level {f.level} {f.rule_id}: {f.message}",
                      highlight=False, markup=False)
    for p in result.artifacts:
        console.print(f"  wrote {p}", highlight=False)


if __name__ == "__main__":
    sys.exit(main())
