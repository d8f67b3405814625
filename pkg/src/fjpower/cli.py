"""Command-line entry point.

Subcommands:

    fjpower run <config>      load a scenario, run it, write artifacts
    fjpower batch <dir>       run every scenario file in a directory
    fjpower report <config>   produce only the report artifacts
    fjpower oracle <config>   direct linear solve for the power vector

Exit codes: 0 converged / report success, 2 diverged (an expected outcome
class, not an error), 1 anything else (parse/validation failures, hitting
the iteration budget, I/O problems).

The default output directory is the FJPOWER_OUT environment variable when
set, otherwise the working directory; ``--out`` overrides both.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import simkit
from .errors import FJPowerError
from .fj_core import compute_social_power
from .scenario import (
    ERROR,
    GAMMA_MODES,
    Scenario,
    ScenarioResult,
    load_scenario,
    run_reports,
    run_scenario,
)

SCENARIO_SUFFIXES = (".yaml", ".yml")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjpower",
        description="Simulate and analyze perceived social power in "
                    "stubborn-agent influence networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol", type=float, default=None,
                       help="override the scenario's convergence tolerance")
        p.add_argument("--max-iter", type=int, default=None,
                       help="override the scenario's iteration budget")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario's random seed")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: $FJPOWER_OUT or cwd)")

    run_p = sub.add_parser("run", help="run one scenario file")
    run_p.add_argument("config", type=Path)
    add_common(run_p)

    batch_p = sub.add_parser("batch", help="run every scenario in a directory")
    batch_p.add_argument("directory", type=Path)
    batch_p.add_argument("--parallelism", type=int, default=1,
                         help="scenarios to run concurrently")
    add_common(batch_p)

    report_p = sub.add_parser("report", help="emit only report artifacts")
    report_p.add_argument("config", type=Path)
    add_common(report_p)

    oracle_p = sub.add_parser(
        "oracle", help="print the power vector from the direct linear solve")
    oracle_p.add_argument("config", type=Path)
    add_common(oracle_p)

    return parser


def _load_with_overrides(config: Path, args: argparse.Namespace) -> Scenario:
    scn = load_scenario(config)
    return scn.with_overrides(tol=args.tol, max_iter=args.max_iter, seed=args.seed)


def _print_result(result: ScenarioResult) -> None:
    print(result.summary_line())
    if result.final is not None:
        print("final: " + " ".join(f"{v:.17e}" for v in result.final))
    for cid, margin in result.condition_margins.items():
        verdict = "holds" if margin is not None and margin >= 0.0 else "fails"
        print(f"condition {cid}: {verdict} (margin {margin:.6g})")
    for path in result.artifacts:
        print(f"wrote {path}")


def _cmd_run(args: argparse.Namespace) -> int:
    scn = _load_with_overrides(args.config, args)
    result = run_scenario(scn, out_dir=args.out)
    _print_result(result)
    return result.exit_code


def _cmd_batch(args: argparse.Namespace) -> int:
    directory: Path = args.directory
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return 1
    paths = sorted(p for p in directory.iterdir()
                   if p.suffix.lower() in SCENARIO_SUFFIXES)
    if not paths:
        print(f"error: no scenario files in {directory}", file=sys.stderr)
        return 1
    results: list[ScenarioResult] = []
    loaded: list[Scenario] = []
    for path in paths:
        try:
            loaded.append(_load_with_overrides(path, args))
        except FJPowerError as exc:
            results.append(ScenarioResult(
                name=path.stem, mode="?", status=ERROR, iterations=0,
                final=None, error=f"{type(exc).__name__}: {exc}"))
    results.extend(simkit.run_batch(loaded, parallelism=args.parallelism,
                                    out_dir=args.out))
    for result in results:
        print(result.summary_line())
    codes = [r.exit_code for r in results]
    if 1 in codes:
        return 1
    if 2 in codes:
        return 2
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    scn = _load_with_overrides(args.config, args)
    result = run_reports(scn, out_dir=args.out)
    for key, report in result.reports.items():
        print(f"== {key} ==")
        print(report)
    for path in result.artifacts:
        print(f"wrote {path}")
    return result.exit_code


def _cmd_oracle(args: argparse.Namespace) -> int:
    scn = _load_with_overrides(args.config, args)
    if scn.gamma is None:
        print(f"error: {scn.name}: the oracle is the direct power solve and "
              f"needs a gamma vector (modes {GAMMA_MODES})", file=sys.stderr)
        return 1
    x = compute_social_power(scn.net, scn.gamma)
    for i, v in enumerate(x, start=1):
        print(f"p_{i} = {v:.17e}")
    print(f"sum = {x.sum():.17e}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "batch": _cmd_batch,
    "report": _cmd_report,
    "oracle": _cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FJPowerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
