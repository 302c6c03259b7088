"""Command-line interface: verification, solving, feasibility, and statistics.

Subcommands:
  verify-paper   recheck the registered published solution pairs, no search
  solve          search for a state pair hitting target utility gaps
  feasibility    decide whether a joint preference pattern is classically realizable
  analyze        compute experiment statistics from choice cell counts

Exit codes: 0 success, 1 verification failure, 2 solver non-convergence,
64 usage error, 65 data error. Output is written once, at the end, to
stdout or to --out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, classical, hilbert, solver, stats
from .classical import PatternError
from .quantum import QuantumState
from .scenarios import (
    BUILTIN_NAMES,
    DEFAULT_UTILITY,
    ExperimentCounts,
    Scenario,
    ScenarioError,
    UtilityFunction,
    builtin,
    load_scenario_file,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_NOT_CONVERGED = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage problems exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cells(text: str) -> tuple[int, int, int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"expected 4 comma-separated integers (n_f1f4,n_f1f3,n_f2f3,n_f2f4), got {text!r}"
        )
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cells must be integers, got {text!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="bornchoice", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=("human", "json", "csv"), default="human",
                        help="output format (default human)")
    output.add_argument("--out", metavar="PATH", help="write the report to a file instead of stdout")
    output.add_argument("--full-precision", action="store_true",
                        help="emit full float precision (JSON); default rounds to 6 significant digits")

    p = sub.add_parser("verify-paper", parents=[output],
                       help="recheck the registered published solution pairs")
    p.add_argument("--scenario", metavar="NAME",
                   help="check one built-in scenario instead of all four")
    p.add_argument("--tol", type=float, default=5e-3,
                   help="residual tolerance (default 5e-3, the printed 3-decimal precision)")
    p.add_argument("--utility", default="sqrt", help="utility function: sqrt, linear, or power:ALPHA")

    p = sub.add_parser("solve", parents=[output], help="search for a state pair hitting target gaps")
    p.add_argument("--scenario", required=True, metavar="NAME|PATH",
                   help="built-in scenario name or scenario JSON file")
    p.add_argument("--d1", type=float, help="target gap for question pair 1 (default: registry value)")
    p.add_argument("--d2", type=float, help="target gap for question pair 2 (default: registry value)")
    p.add_argument("--utility", default="sqrt", help="utility function: sqrt, linear, or power:ALPHA")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--restarts", type=int, default=64, help="random restarts (default 64)")
    p.add_argument("--tol", type=float, default=1e-8, help="residual tolerance (default 1e-8)")

    p = sub.add_parser("feasibility", parents=[output],
                       help="decide whether a joint preference pattern is classically realizable")
    p.add_argument("pattern", help='preference pattern, e.g. "f1>f2,f4>f3"')
    p.add_argument("--scenario", required=True, metavar="NAME|PATH",
                   help="built-in scenario name or scenario JSON file")
    p.add_argument("--utility", default="sqrt", help="utility function: sqrt, linear, or power:ALPHA")

    p = sub.add_parser("analyze", parents=[output], help="experiment statistics from choice cell counts")
    p.add_argument("--counts", metavar="PATH",
                   help="counts CSV (default: the bundled experiment table)")
    p.add_argument("--cells", type=_cells, metavar="A,B,C,D",
                   help="inline cell counts n_f1f4,n_f1f3,n_f2f3,n_f2f4 instead of a file")
    p.add_argument("--scenario", metavar="NAME|PATH",
                   help="scenario providing question orientation and published values")
    return parser


def _utility(spec: str) -> UtilityFunction:
    try:
        return UtilityFunction.parse(spec)
    except ScenarioError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc


def _scenario(ref: str) -> Scenario:
    try:
        return builtin(ref)
    except ScenarioError:
        pass
    path = Path(ref)
    if not path.exists():
        raise _CliError(
            EXIT_USAGE,
            f"unknown scenario {ref!r}: not a built-in ({', '.join(BUILTIN_NAMES)}) and no such file",
        )
    try:
        return load_scenario_file(path)
    except ScenarioError as exc:
        raise _CliError(EXIT_DATA, str(exc)) from exc


def _round_floats(obj, digits: int = 6):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return obj
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def _emit(args, human: str, payload: dict, csv_rows: Optional[list[dict]] = None) -> None:
    if args.format == "json":
        data = payload if args.full_precision else _round_floats(payload)
        text = json.dumps(data, indent=2)
    elif args.format == "csv":
        if csv_rows is None or not csv_rows:
            raise _CliError(EXIT_USAGE, f"csv output is not available for {payload.get('command')}")
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(csv_rows[0].keys()))
        writer.writeheader()
        for row in csv_rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
        text = buffer.getvalue().rstrip("\n")
    else:
        text = human
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _state_lines(label: str, state: QuantumState) -> list[str]:
    lines = [f"  {label}:"]
    for event, modulus, phase, prob in zip(
        state.scenario.events, state.moduli, state.phases_deg, state.probabilities()
    ):
        lines.append(
            f"    {event}: modulus {modulus:.6g}, phase {phase:.6g} deg, probability {prob:.6g}"
        )
    return lines


def _cmd_verify_paper(args) -> int:
    u = _utility(args.utility)
    if args.scenario is not None:
        try:
            names = [builtin(args.scenario).name]
        except ScenarioError as exc:
            raise _CliError(EXIT_USAGE, str(exc)) from exc
    else:
        names = list(BUILTIN_NAMES)
    human_lines = [f"verify published solutions (tolerance {args.tol:g})"]
    entries = []
    csv_rows = []
    all_passed = True
    for name in names:
        scenario = builtin(name)
        solution = solver.paper_solutions(scenario)
        report = solution.verify(u=u, tol=args.tol)
        axis_report = hilbert.validate_spectral_family(hilbert.canonical_family(scenario.n_events))
        measure_report = hilbert.check_generalized_measure(
            solution.w1.ket(), hilbert.canonical_family(scenario.n_events)
        )
        passed = report.passed and axis_report.passed and measure_report.passed
        all_passed &= passed
        human_lines.append(f"scenario {name}: {'PASS' if passed else 'FAIL'}")
        for sub_report in (report, axis_report, measure_report):
            for line in sub_report.checks:
                human_lines.append(
                    f"  {line.name}: deviation {line.deviation:.6g} "
                    f"{'<=' if line.passed else '>'} {line.tolerance:g}"
                )
                csv_rows.append({
                    "scenario": name,
                    "check": line.name,
                    "deviation": line.deviation,
                    "tolerance": line.tolerance,
                    "passed": line.passed,
                })
        entries.append({
            "scenario": name,
            "solution": solution.to_dict(),
            "checks": [line.to_dict() for line in report.checks]
            + [line.to_dict() for line in axis_report.checks]
            + [line.to_dict() for line in measure_report.checks],
            "passed": passed,
        })
    human_lines.append(
        f"overall: {sum(1 for e in entries if e['passed'])}/{len(entries)} scenarios pass"
    )
    payload = {
        "command": "verify-paper",
        "tolerance": args.tol,
        "utility": u.label(),
        "scenarios": entries,
        "passed": all_passed,
    }
    _emit(args, "\n".join(human_lines), payload, csv_rows)
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def _cmd_solve(args) -> int:
    scenario = _scenario(args.scenario)
    u = _utility(args.utility)
    try:
        target = solver.SolveTarget.for_scenario(scenario, d1=args.d1, d2=args.d2)
        config = solver.SolverConfig(
            restarts=args.restarts, seed=args.seed, residual_tolerance=args.tol
        )
    except ScenarioError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc
    result = solver.solve(scenario, target, u, config)
    human_lines = [result.summary()]
    human_lines += _state_lines("w1", result.w1)
    human_lines += _state_lines("w2", result.w2)
    payload = {"command": "solve", **result.to_dict()}
    csv_row: dict[str, object] = {
        "scenario": result.scenario_name,
        "converged": result.converged,
        "cost": result.cost,
        "best_restart": result.best_restart,
        "restarts_used": result.restarts_used,
        "d1": target.d1,
        "d2": target.d2,
    }
    for key, value in result.residuals.items():
        csv_row[f"residual_{key}"] = value
    for tag, state in (("w1", result.w1), ("w2", result.w2)):
        for event, modulus, phase in zip(scenario.events, state.moduli, state.phases_deg):
            csv_row[f"{tag}_modulus_{event}"] = modulus
            csv_row[f"{tag}_phase_deg_{event}"] = phase
    _emit(args, "\n".join(human_lines), payload, [csv_row])
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _cmd_feasibility(args) -> int:
    scenario = _scenario(args.scenario)
    u = _utility(args.utility)
    try:
        pattern = classical.PreferencePattern.from_text(scenario, args.pattern)
    except (PatternError, ScenarioError) as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc
    result = classical.feasibility(scenario, pattern, u)
    payload = {"command": "feasibility", **result.to_dict()}
    csv_row: dict[str, object] = {
        "scenario": result.scenario_name,
        "pattern": pattern.describe(scenario),
        "feasible": result.feasible,
        "margin": result.margin,
        "u_independent": result.u_independent,
        "grid_agrees": result.grid_agrees,
    }
    for event in scenario.events:
        csv_row[f"witness_p_{event}"] = (
            None if result.witness is None else result.witness.to_dict()[event]
        )
    _emit(args, result.summary(), payload, [csv_row])
    return EXIT_OK


def _bundled_counts_path():
    return resources.files("bornchoice").joinpath("data/table5.csv")


def _cmd_analyze(args) -> int:
    if args.counts is not None and args.cells is not None:
        raise _CliError(EXIT_USAGE, "--counts and --cells are mutually exclusive")
    base_scenario = _scenario(args.scenario) if args.scenario else None
    rows: list[tuple[Optional[str], ExperimentCounts]]
    used_bundled = False
    if args.cells is not None:
        try:
            rows = [(None, ExperimentCounts(*args.cells))]
        except ScenarioError as exc:
            raise _CliError(EXIT_USAGE, str(exc)) from exc
    elif args.counts is not None:
        try:
            rows = stats.load_counts_csv(args.counts)
        except ScenarioError as exc:
            raise _CliError(EXIT_DATA, str(exc)) from exc
    else:
        used_bundled = True
        with resources.as_file(_bundled_counts_path()) as path:
            rows = stats.load_counts_csv(path)
    if not rows:
        raise _CliError(EXIT_DATA, "no rows in counts input")
    reports = []
    for index, (label, counts) in enumerate(rows):
        if label is not None:
            scenario: Optional[Scenario] = _scenario(label)
        elif base_scenario is not None:
            scenario = base_scenario
        elif used_bundled and len(rows) == len(BUILTIN_NAMES):
            scenario = builtin(BUILTIN_NAMES[index])
        else:
            scenario = None
        reports.append(stats.analyze(counts, scenario))
    human = "\n\n".join(report.summary() for report in reports)
    payload = {"command": "analyze", "reports": [report.to_dict() for report in reports]}
    _emit(args, human, payload, stats.report_csv_rows(reports))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "verify-paper": _cmd_verify_paper,
        "solve": _cmd_solve,
        "feasibility": _cmd_feasibility,
        "analyze": _cmd_analyze,
    }
    try:
        return handlers[args.command](args)
    except _CliError as exc:
        print(f"bornchoice {args.command}: error: {exc}", file=sys.stderr)
        return exc.code
    except PatternError as exc:
        print(f"bornchoice {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"bornchoice {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"bornchoice {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
