"""Command-line driver: parse, link, safety-check, ground, solve, print.

Answer sets are printed one per line as `{atom, atom, ...}` with atoms
in lexicographic order. Exit codes: 0 with at least one answer set, 1
with none, 2 on any pipeline error (the message names the stage).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import csvio
from .builtins import builtin_registry
from .errors import CliError, HexError
from .grounding import ground
from .learning import LearnToggles
from .parser import parse_program
from .safety import Mode, analyze
from .solver import SolveOptions, SolveStats, solve
from .sources import EvalCache, link
from .terms import Program, Rule, atom_key


@dataclass
class RunOptions:
    program_paths: "list[str]" = field(default_factory=list)
    csv_inputs: "list[tuple[str, str]]" = field(default_factory=list)
    csv_outputs: "list[tuple[str, str]]" = field(default_factory=list)
    safety_mode: Mode = Mode.LIBERAL
    io_learning: bool = True
    linearity_min: bool = True
    monotonicity_min: bool = True
    partial_min: bool = True
    answer_limit: Optional[int] = None
    plugin_paths: "list[str]" = field(default_factory=list)
    stats: bool = False

    def validate(self) -> None:
        if not self.program_paths and not self.csv_inputs:
            raise CliError("need at least one program file or --csvinput")

    def learn_toggles(self) -> LearnToggles:
        return LearnToggles(
            io_learning=self.io_learning,
            linearity=self.linearity_min,
            monotonicity=self.monotonicity_min,
            partial=self.partial_min,
        )


def _split_pred_file(value: str, flag: str) -> "tuple[str, str]":
    predicate, sep, path = value.partition(",")
    if not sep or not predicate or not path:
        raise CliError(f"{flag} expects PREDICATE,FILE (got {value!r})")
    return predicate, path


def parse_args(argv: Sequence[str]) -> RunOptions:
    parser = argparse.ArgumentParser(
        prog="hexsolve",
        description="Solve answer set programs with external oracle atoms.",
    )
    parser.add_argument("programs", nargs="*", help="program files (.hex)")
    parser.add_argument(
        "--csvinput", action="append", default=[], metavar="PRED,FILE",
        help="read facts PRED(line, fields...) from a CSV file",
    )
    parser.add_argument(
        "--csvoutput", action="append", default=[], metavar="PRED,FILE",
        help="write the extension of PRED in the first answer set as CSV",
    )
    safety = parser.add_mutually_exclusive_group()
    safety.add_argument(
        "--strongsafety", action="store_true",
        help="use the strong safety criterion instead of liberal safety",
    )
    safety.add_argument(
        "--nosafetycheck", action="store_true",
        help="skip the safety check; termination becomes your responsibility",
    )
    parser.add_argument(
        "--no-io-learning", action="store_true",
        help="disable learning of io-nogoods from external evaluations",
    )
    parser.add_argument(
        "--no-minimize", action="store_true",
        help="disable all nogood minimization stages",
    )
    parser.add_argument(
        "-n", dest="limit", type=int, default=None, metavar="N",
        help="stop after N answer sets (0 means all)",
    )
    parser.add_argument(
        "--plugin", action="append", default=[], metavar="FILE",
        help="load external sources from a plugin script",
    )
    parser.add_argument("--stats", action="store_true", help="print statistics")
    ns = parser.parse_args(list(argv))

    options = RunOptions(
        program_paths=ns.programs,
        csv_inputs=[_split_pred_file(v, "--csvinput") for v in ns.csvinput],
        csv_outputs=[_split_pred_file(v, "--csvoutput") for v in ns.csvoutput],
        answer_limit=ns.limit if ns.limit else None,
        plugin_paths=ns.plugin,
        stats=ns.stats,
    )
    if ns.strongsafety:
        options.safety_mode = Mode.STRONG
    if ns.nosafetycheck:
        options.safety_mode = Mode.DISABLED
    if ns.no_io_learning:
        options.io_learning = False
    if ns.no_minimize:
        options.linearity_min = False
        options.monotonicity_min = False
        options.partial_min = False
    options.validate()
    return options


def _load_plugins(options: RunOptions, registry) -> None:
    if not options.plugin_paths:
        return
    try:
        from hexplugins import load_plugin
    except ImportError as exc:
        raise CliError(
            "--plugin requires the hexplugins package to be installed"
        ) from exc
    for path in options.plugin_paths:
        load_plugin(path, registry)


def format_answer_set(answer_set) -> str:
    return "{" + ", ".join(str(a) for a in sorted(answer_set, key=atom_key)) + "}"


def run(options: RunOptions, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr

    def fail(stage: str, message: str) -> int:
        print(f"error [{stage}]: {message}", file=err)
        return 2

    registry = builtin_registry()
    try:
        _load_plugins(options, registry)
    except HexError as exc:
        return fail("plugin", str(exc))

    rules = []
    try:
        for path in options.program_paths:
            with open(path, "r", encoding="utf-8") as handle:
                rules.extend(parse_program(handle.read()).rules)
        for predicate, path in options.csv_inputs:
            for fact in csvio.csv_ingest(predicate, path):
                rules.append(Rule(head=(fact,)))
    except (HexError, OSError) as exc:
        return fail("parse", str(exc))
    program = Program(tuple(rules))

    try:
        link(program, registry)
    except HexError as exc:
        return fail("link", str(exc))

    report = analyze(program, registry, options.safety_mode)
    if not report.safe:
        for hint in report.hints:
            print(f"unsafe: {hint}", file=err)
        return fail("safety", f"program is not {report.mode.value}ly safe")

    cache = EvalCache(registry)
    try:
        ground_program = ground(
            program, registry, disabled=(options.safety_mode is Mode.DISABLED),
            cache=cache,
        )
    except HexError as exc:
        return fail("ground", str(exc))

    stats = SolveStats()
    solve_options = SolveOptions(
        learning=options.learn_toggles(), max_answer_sets=options.answer_limit
    )
    first_answer = None
    count = 0
    try:
        for answer_set in solve(ground_program, registry, solve_options, stats, cache):
            if first_answer is None:
                first_answer = answer_set
            count += 1
            print(format_answer_set(answer_set), file=out)
    except HexError as exc:
        return fail("solve", str(exc))

    try:
        for predicate, path in options.csv_outputs:
            csvio.csv_emit(predicate, first_answer or frozenset(), path)
    except (HexError, OSError) as exc:
        return fail("csvoutput", str(exc))

    if options.stats:
        for line in stats.as_lines():
            print(line, file=out)
    return 0 if count > 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        options = parse_args(sys.argv[1:] if argv is None else argv)
    except CliError as exc:
        print(f"error [usage]: {exc}", file=sys.stderr)
        return 2
    return run(options)


if __name__ == "__main__":
    sys.exit(main())
