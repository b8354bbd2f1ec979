"""Command-line front end.

``tp run PROGRAM -q QUERY`` evaluates a query against a program file with
the tabled engine (default) or one of the reference evaluators.  Ground
queries answer ``yes`` or ``no``; queries with variables print one binding
line per answer (``X = a, Y = b``) followed by ``no`` once exhausted.
Unknown predicates simply have empty relations.  Exit codes: 0 for a clean
run (including ``no``), 1 for usage, file, or parse problems, 2 when a
resource limit stopped the run before exhaustion.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .engine import DEFAULT_STEP_BUDGET, StepBudgetExceeded, TPEngine
from .oracle import UnsupportedProgramError, bottomup_solve, sld_solve
from .program import ParseError, Program, parse_program, parse_query
from .terms import CyclicTermError, canonicalize, format_term
from .trace import format_event

__all__ = ["RunConfig", "run", "main", "EXIT_OK", "EXIT_USAGE", "EXIT_RESOURCE"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RESOURCE = 2

DEFAULT_DEPTH_BOUND = 10_000


@dataclass(slots=True)
class RunConfig:
    program_path: str
    query: str | None = None
    engine: str = "tp"
    depth_bound: int = DEFAULT_DEPTH_BOUND
    step_budget: int = DEFAULT_STEP_BUDGET
    trace: bool = False
    dump_tables: bool = False
    strict_alg2: bool = False
    occurs_check: bool = False
    interactive: bool = False


def _print_answer(names: list[str], values, out) -> None:
    canon = canonicalize(tuple(values))
    out.write(", ".join(f"{n} = {format_term(v)}" for n, v in zip(names, canon)) + "\n")


def _run_tp(program: Program, cfg: RunConfig, query: str, out, err) -> int:
    atoms, qvars = parse_query(query)
    engine = TPEngine(
        program,
        step_budget=cfg.step_budget,
        strict_alg2=cfg.strict_alg2,
        occurs_check=cfg.occurs_check,
    )
    names = [v.name for v in qvars]
    code = EXIT_OK
    try:
        if not qvars:
            found = False
            for _ in engine.solve(atoms):
                found = True
                break
            out.write("yes\n" if found else "no\n")
        else:
            for tup in engine.solve(atoms):
                _print_answer(names, tup, out)
            out.write("no\n")
    except StepBudgetExceeded:
        out.write("resource-limit: step budget exceeded\n")
        code = EXIT_RESOURCE
    except CyclicTermError as e:
        err.write(f"error: {e}; rerun with --occurs-check\n")
        return EXIT_USAGE
    if cfg.trace:
        for ev in engine.events:
            err.write(format_event(ev) + "\n")
    if cfg.dump_tables:
        for line in engine.tables.dump():
            out.write(line + "\n")
    return code


def _run_sld(program: Program, cfg: RunConfig, query: str, out, err) -> int:
    atoms, qvars = parse_query(query)
    result = sld_solve(program, atoms, cfg.depth_bound, occurs_check=cfg.occurs_check)
    names = [v.name for v in qvars]
    if not qvars:
        if result.answers:
            out.write("yes\n")
            return EXIT_OK
        if result.status == "complete":
            out.write("no\n")
            return EXIT_OK
        out.write("resource-limit: depth bound exceeded\n")
        return EXIT_RESOURCE
    for tup in result.answers:
        _print_answer(names, tup, out)
    if result.status == "complete":
        out.write("no\n")
        return EXIT_OK
    out.write("resource-limit: depth bound exceeded\n")
    return EXIT_RESOURCE


def _run_bottomup(program: Program, cfg: RunConfig, query: str, out, err) -> int:
    atoms, qvars = parse_query(query)
    try:
        result = bottomup_solve(program, atoms)
    except UnsupportedProgramError as e:
        err.write(f"error: the bottomup engine cannot evaluate this program: {e}\n")
        return EXIT_USAGE
    names = [v.name for v in qvars]
    if not qvars:
        out.write("yes\n" if result.answers else "no\n")
        return EXIT_OK
    for tup in result.answers:
        _print_answer(names, tup, out)
    out.write("no\n")
    return EXIT_OK


_RUNNERS = {"tp": _run_tp, "sld": _run_sld, "bottomup": _run_bottomup}


def _repl(program: Program, cfg: RunConfig, stdin, out, err) -> int:
    """Read queries from stdin; after each answer a lone ``;`` asks for the
    next one, anything else abandons the query."""
    while True:
        out.write("?- ")
        out.flush()
        line = stdin.readline()
        if not line:
            out.write("\n")
            return EXIT_OK
        text = line.strip()
        if not text:
            continue
        if text.rstrip(".") in ("halt", "quit"):
            return EXIT_OK
        try:
            atoms, qvars = parse_query(text)
        except ParseError as e:
            err.write(f"error: {e}\n")
            continue
        if cfg.engine != "tp":
            _RUNNERS[cfg.engine](program, cfg, text, out, err)
            continue
        engine = TPEngine(
            program,
            step_budget=cfg.step_budget,
            strict_alg2=cfg.strict_alg2,
            occurs_check=cfg.occurs_check,
        )
        names = [v.name for v in qvars]
        try:
            if not qvars:
                found = False
                for _ in engine.solve(atoms):
                    found = True
                    break
                out.write("yes\n" if found else "no\n")
            else:
                exhausted = True
                for tup in engine.solve(atoms):
                    _print_answer(names, tup, out)
                    out.flush()
                    nxt = stdin.readline()
                    if nxt.strip() != ";":
                        exhausted = False
                        break
                if exhausted:
                    out.write("no\n")
        except StepBudgetExceeded:
            out.write("resource-limit: step budget exceeded\n")
        except CyclicTermError as e:
            err.write(f"error: {e}; rerun with --occurs-check\n")


def run(cfg: RunConfig, stdin=None, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    inp = stdin if stdin is not None else sys.stdin
    try:
        text = Path(cfg.program_path).read_text(encoding="utf-8")
    except OSError as e:
        err.write(f"error: cannot read {cfg.program_path}: {e}\n")
        return EXIT_USAGE
    try:
        program = parse_program(text)
    except ParseError as e:
        err.write(f"error: {cfg.program_path}: {e}\n")
        return EXIT_USAGE
    if cfg.interactive:
        return _repl(program, cfg, inp, out, err)
    assert cfg.query is not None
    try:
        return _RUNNERS[cfg.engine](program, cfg, cfg.query, out, err)
    except ParseError as e:
        err.write(f"error: query: {e}\n")
        return EXIT_USAGE


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tp",
        description="Tabled logic-programming engine with reference evaluators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="evaluate a query against a program file")
    run_p.add_argument("program", help="path to the program source")
    mode = run_p.add_mutually_exclusive_group(required=True)
    mode.add_argument("-q", "--query", help="query to evaluate")
    mode.add_argument("--interactive", action="store_true",
                      help="read queries from stdin instead")
    run_p.add_argument("--engine", choices=("tp", "sld", "bottomup"), default="tp",
                       help="evaluator to use (default: tp)")
    run_p.add_argument("--depth-bound", type=int, default=DEFAULT_DEPTH_BOUND,
                       help="branch depth limit for the sld engine")
    run_p.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET,
                       help="resolution step limit for the tp engine")
    run_p.add_argument("--trace", action="store_true",
                       help="write trace events to stderr (tp engine)")
    run_p.add_argument("--dump-tables", action="store_true",
                       help="print final answer tables (tp engine)")
    run_p.add_argument("--strict-alg2", action="store_true",
                       help="disable the early-completion shortcut for calls "
                            "that never entered a loop")
    run_p.add_argument("--occurs-check", action="store_true",
                       help="unify with the occurs check")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    cfg = RunConfig(
        program_path=args.program,
        query=args.query,
        engine=args.engine,
        depth_bound=args.depth_bound,
        step_budget=args.step_budget,
        trace=args.trace,
        dump_tables=args.dump_tables,
        strict_alg2=args.strict_alg2,
        occurs_check=args.occurs_check,
        interactive=args.interactive,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
