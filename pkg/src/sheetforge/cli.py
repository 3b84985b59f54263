"""Command line entry point: ``sheetforge <area> <command> [options]``.

Exit codes: 0 on success, 1 on domain errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from sheetforge.engines import ca1d, mapgraph, minesweeper, truck, truck_dsl, truck_tasks
from sheetforge.utils.constants import (
    DEFAULT_MAX_STEPS,
    DEFAULT_MINE_PROBABILITY,
    DEFAULT_SOLUTION_CAP,
    DEFAULT_TAPE_LENGTH,
    EUROPE_DATASET,
    JSON_SCHEMA_VERSION,
    PROGRAMS_DIR,
    OutputFormat,
)
from sheetforge.utils.errors import (
    ConfigurationError,
    NoSolutionError,
    ParsingError,
    SheetforgeError,
)
from sheetforge.utils.logger import get_logger, set_console_level
from sheetforge.utils.models import WorksheetDoc
from sheetforge.utils.render import to_svg, to_text

logger = get_logger(__name__)


class Envelope(BaseModel):
    """JSON output of every command."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=JSON_SCHEMA_VERSION, alias="schema")
    command: str = Field(..., description="Area and command, e.g. 'ca evolve'")
    result: Any = Field(default=None, description="Command specific payload")


@dataclass(frozen=True)
class Output:
    """Text and JSON payload produced by a command, plus its exit code."""

    text: str = ""
    data: Any = None
    code: int = 0


Handler = Callable[[argparse.Namespace], Output]


def _doc_output(args: argparse.Namespace, doc: WorksheetDoc) -> Output:
    if args.format == OutputFormat.SVG.value:
        return Output(to_svg(doc), doc.to_dict())
    return Output(to_text(doc), doc.to_dict())


def _lines(items: Sequence[str]) -> str:
    return "".join(f"{item}\n" for item in items)


# ca


def _ca_step(args: argparse.Namespace) -> Output:
    nxt = ca1d.step(ca1d.parse_config(args.config))
    return Output(_lines([str(nxt)]), nxt.to_dict())


def _ca_evolve(args: argparse.Namespace) -> Output:
    start = ca1d.parse_config(args.config)
    history = ca1d.evolve(start, args.steps)
    data = [c.to_dict() for c in history]
    if args.diagram:
        return Output(_lines(ca1d.spacetime_rows(start, args.steps)), data)
    return Output(_lines([str(c) for c in history]), data)


def _ca_pred(args: argparse.Namespace) -> Output:
    target = ca1d.parse_config(args.config)
    found = sorted(ca1d.predecessors(target), key=lambda c: c.bits)
    if args.check and frozenset(found) != ca1d.brute_force_predecessors(target):
        raise SheetforgeError(f"predecessor search disagrees with enumeration for {target}")
    if not found:
        raise NoSolutionError(f"{target} has no predecessor")
    return Output(_lines([str(c) for c in found]), [c.to_dict() for c in found])


def _ca_fixed(args: argparse.Namespace) -> Output:
    boundary = ca1d.BoundaryMode(ca1d.BoundaryKind(args.boundary), args.size)
    points = sorted(ca1d.fixed_points(boundary), key=lambda c: c.bits)
    return Output(_lines([str(c) for c in points]), [c.to_dict() for c in points])


def _ca_period(args: argparse.Namespace) -> Output:
    preperiod, period = ca1d.period_of(ca1d.parse_config(args.config), args.max_steps)
    return Output(
        f"preperiod {preperiod} period {period}\n", {"preperiod": preperiod, "period": period}
    )


def _ca_worksheet(args: argparse.Namespace) -> Output:
    return _doc_output(args, ca1d.ca_worksheet(args.seed, args.kind, args.size))


# tm


def _load_program(ref: str) -> truck.Program:
    path = Path(ref)
    if not path.exists():
        candidates = [PROGRAMS_DIR / ref, PROGRAMS_DIR / f"{ref}.tm"]
        path = next((p for p in candidates if p.exists()), path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read program {ref!r}: {exc}") from exc
    return truck_dsl.parse_program(text, name=path.stem)


def _tm_execute(args: argparse.Namespace) -> tuple[truck.Program, truck.RunResult]:
    program = _load_program(args.program)
    length = args.length or program.tape_length or DEFAULT_TAPE_LENGTH
    tape = truck.parse_tape(args.tape, length)
    return program, truck.run(tape, program.start, program, args.max_steps)


def _tm_run(args: argparse.Namespace) -> Output:
    _, result = _tm_execute(args)
    final = result.final
    summary = f"{result.outcome.value} after {result.steps} steps"
    if result.detail:
        summary += f": {result.detail}"
    cargo = "-" if final.truck.cargo is None else str(final.truck.cargo)
    text = (
        f"{summary}\n"
        f"truck at {final.truck.position} heading {final.truck.heading.value} cargo {cargo}\n"
        f"tape {truck.format_tape(final.tape)}\n"
    )
    code = 0 if result.outcome is truck.Outcome.HALTED else 1
    return Output(text, result.to_dict(), code)


def _tm_trace(args: argparse.Namespace) -> Output:
    _, result = _tm_execute(args)
    code = 0 if result.outcome is truck.Outcome.HALTED else 1
    data = {**result.to_dict(), "trace": json.loads(truck.trace_to_json(result))}
    return Output(truck.trace_to_text(result), data, code)


def _tm_verify(args: argparse.Namespace) -> Output:
    task = truck_tasks.get_task(args.task)
    program = (
        _load_program(args.program)
        if args.program
        else truck_tasks.reference_program(args.task)
    )
    report = truck_tasks.verify_task(program, task, max_steps=args.max_steps)
    return Output(report.to_text(), report.to_dict(), 0 if report.passed else 1)


def _tm_tasks(args: argparse.Namespace) -> Output:
    tasks = truck_tasks.builtin_tasks()
    text = _lines([f"{t.name:<16} {t.description}" for t in tasks])
    data = [
        {
            "name": t.name,
            "description": t.description,
            "program": t.program_file,
            "parameters": {k: [r.start, r.stop - 1] for k, r in t.parameters.items()},
        }
        for t in tasks
    ]
    return Output(text, data)


def _tm_show(args: argparse.Namespace) -> Output:
    program = _load_program(args.program)
    return Output(truck_dsl.format_program(program), {"name": program.name})


def _tm_worksheet(args: argparse.Namespace) -> Output:
    return _doc_output(args, truck_tasks.tm_worksheet(args.task))


# mines


def _read_input(ref: str) -> str:
    if ref == "-":
        return sys.stdin.read()
    try:
        return Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {ref!r}: {exc}") from exc


def _gen_spec(args: argparse.Namespace) -> minesweeper.GenSpec:
    return minesweeper.GenSpec(minesweeper.BoardDims(args.rows, args.cols), args.prob, args.seed)


def _mines_gen(args: argparse.Namespace) -> Output:
    spec = _gen_spec(args)
    if args.worksheet:
        return _doc_output(args, minesweeper.mines_worksheet(spec))
    layout, clues = minesweeper.generate(spec)
    text = minesweeper.format_puzzle(clues)
    if args.solution:
        text += "\n" + minesweeper.format_solution(layout)
    return Output(text, {"puzzle": clues.to_dict(), "solution": layout.to_dict()})


def _mines_worksheet(args: argparse.Namespace) -> Output:
    return _doc_output(args, minesweeper.mines_worksheet(_gen_spec(args)))


def _mines_solve(args: argparse.Namespace) -> Output:
    clues = minesweeper.parse_puzzle(_read_input(args.puzzle))
    solutions = minesweeper.solve(clues, cap=args.cap)
    if not solutions:
        raise NoSolutionError("no mine layout matches these clues")
    text = "\n".join(minesweeper.format_solution(s) for s in solutions)
    return Output(text, [s.to_dict() for s in solutions])


def _mines_unique(args: argparse.Namespace) -> Output:
    clues = minesweeper.parse_puzzle(_read_input(args.puzzle))
    unique, witness = minesweeper.is_unique(clues)
    if unique:
        return Output("unique\n", {"unique": True, "witness": None})
    assert witness is not None
    text = "ambiguous, another solution:\n" + minesweeper.format_solution(witness)
    return Output(text, {"unique": False, "witness": witness.to_dict()})


def _mines_rank(args: argparse.Namespace) -> Output:
    dims = minesweeper.BoardDims(args.rows, args.cols)
    rank, black = minesweeper.clue_map_rank(dims)
    coprime = minesweeper.coprime_dims(dims)
    text = f"rank {rank} of {black} black cells, coprime {str(coprime).lower()}\n"
    return Output(text, {"rank": rank, "black": black, "coprime": coprime})


def _mines_sweep(args: argparse.Namespace) -> Output:
    dims = minesweeper.BoardDims(args.rows, args.cols)
    report = minesweeper.ambiguity_sweep(dims, args.layouts, args.seed)
    text = (
        f"{dims.m}x{dims.n} coprime {str(report.coprime).lower()}: "
        f"{report.ambiguous}/{report.tested} ambiguous\n"
    )
    if report.witness is not None:
        text += "".join(f"\n{minesweeper.format_solution(w)}" for w in report.witness)
    return Output(text, report.to_dict())


# map


def _dataset(args: argparse.Namespace) -> mapgraph.MapDataset:
    return mapgraph.load_dataset(args.data)


def _map_query(args: argparse.Namespace) -> Output:
    ds = _dataset(args)
    predicate = args.predicate
    data: Any
    if predicate in ("degree", "nearest") and not args.country:
        raise ConfigurationError(f"'{predicate}' needs --country")
    if predicate == "degree":
        data = mapgraph.degree(ds, args.country)
        text = f"{data}\n"
    elif predicate == "monogamous":
        data = sorted(mapgraph.monogamous(ds))
        text = _lines(data)
    elif predicate == "happy":
        data = sorted(sorted(pair) for pair in mapgraph.happy_monogamous(ds))
        text = _lines(["-".join(pair) for pair in data])
    elif predicate == "attractive":
        points = mapgraph.attractive_points(ds)
        data = [j.to_dict() for j in points]
        text = _lines([f"{j.label} {j.point[0]:.2f} {j.point[1]:.2f}" for j in points])
    elif predicate == "theorem1":
        violations = mapgraph.check_theorem1(ds)
        data = [{"country": c, "junction": j.to_dict()} for c, j in violations]
        text = _lines([f"{c} on {j.label}" for c, j in violations]) or "no violations\n"
    elif predicate == "friendly":
        ranks = mapgraph.friendly(ds)
        if args.rank is not None:
            ranks = {c: r for c, r in ranks.items() if r == args.rank}
        data = dict(sorted(ranks.items()))
        text = _lines([f"{c} {r}" for c, r in data.items()])
    elif predicate == "max-rank":
        data = mapgraph.max_friendly_rank(ds)
        text = f"{data}\n"
    elif predicate == "tailed":
        tailed, tailless = mapgraph.tailed_partition(ds)
        data = {"tailed": sorted(tailed), "tailless": sorted(tailless)}
        text = f"tailed: {' '.join(data['tailed'])}\ntailless: {' '.join(data['tailless'])}\n"
    elif predicate == "nearest":
        ranked = mapgraph.nearest_attractive_points(ds, args.country, args.k)
        data = [{**j.to_dict(), "km": round(km, 2)} for j, km in ranked]
        text = _lines([f"{j.label} {km:.2f} km" for j, km in ranked])
    else:
        data = sorted(mapgraph.countries_without_attractive_points(ds))
        text = _lines(data)
    return Output(text, data)


def _map_color(args: argparse.Namespace) -> Output:
    coloring = mapgraph.four_color(_dataset(args))
    return Output(_lines([f"{c} {k}" for c, k in coloring.items()]), coloring)


def _map_validate(args: argparse.Namespace) -> Output:
    problems = mapgraph.validate(mapgraph.read_dataset(args.data))
    text = _lines(problems) or "ok\n"
    return Output(text, problems, 1 if problems else 0)


def _map_worksheet(args: argparse.Namespace) -> Output:
    return _doc_output(args, mapgraph.map_worksheet(_dataset(args), args.country))


# render


def _render(args: argparse.Namespace) -> Output:
    try:
        raw = json.loads(_read_input(args.doc))
    except json.JSONDecodeError as exc:
        raise ParsingError(f"worksheet JSON: {exc}") from exc
    if isinstance(raw, dict) and "result" in raw and "title" not in raw:
        raw = raw["result"]
    return _doc_output(args, WorksheetDoc.from_dict(raw))


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.TEXT.value,
        help="Output encoding",
    )
    common.add_argument("--out", type=Path, default=None, help="Write to this file")
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    return common


def _seed(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, required=True, help="Seed for every random choice")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-parser per area and command."""
    common = _common()
    parser = argparse.ArgumentParser(
        prog="sheetforge", description="Worksheets and checkers for discrete models."
    )
    areas = parser.add_subparsers(dest="area", required=True)

    def command(group: Any, name: str, handler: Handler, help: str) -> argparse.ArgumentParser:
        sub: argparse.ArgumentParser = group.add_parser(name, parents=[common], help=help)
        sub.set_defaults(handler=handler)
        return sub

    ca = areas.add_parser("ca", help="One-dimensional cellular automaton").add_subparsers(
        dest="command", required=True
    )
    sub = command(ca, "step", _ca_step, "One step of the automaton")
    sub.add_argument("--config", required=True, help="e.g. cyc:1000, per:110, fin:101")
    sub = command(ca, "evolve", _ca_evolve, "Descendants of a configuration")
    sub.add_argument("--config", required=True)
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--diagram", action="store_true", help="Print rows one below another")
    sub = command(ca, "pred", _ca_pred, "All predecessors on a cyclic or periodic lattice")
    sub.add_argument("--config", required=True)
    sub.add_argument("--check", action="store_true", help="Compare with full enumeration")
    sub = command(ca, "fixed", _ca_fixed, "Stationary configurations")
    sub.add_argument("--boundary", choices=["cyc", "per"], required=True)
    sub.add_argument("--size", type=int, required=True)
    sub = command(ca, "period", _ca_period, "Preperiod and period of an orbit")
    sub.add_argument("--config", required=True)
    sub.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    sub = command(ca, "worksheet", _ca_worksheet, "Exercise sheet")
    _seed(sub)
    sub.add_argument("--kind", choices=[k.value for k in ca1d.WorksheetKind], required=True)
    sub.add_argument("--size", type=int, required=True)

    tm = areas.add_parser("tm", help="Truck machine").add_subparsers(
        dest="command", required=True
    )
    for name, handler, help in (
        ("run", _tm_run, "Run a program and print the final state"),
        ("trace", _tm_trace, "Run a program and print every step"),
    ):
        sub = command(tm, name, handler, help)
        sub.add_argument("--program", required=True, help="File or bundled program name")
        sub.add_argument("--tape", default="", help="e.g. '0:3 4:[a,b]'")
        sub.add_argument("--length", type=int, default=None, help="Tape length")
        sub.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    sub = command(tm, "verify", _tm_verify, "Check a program against a task")
    sub.add_argument("--task", required=True)
    sub.add_argument("--program", default=None, help="Defaults to the bundled solution")
    sub.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    command(tm, "tasks", _tm_tasks, "List the built-in tasks")
    sub = command(tm, "show", _tm_show, "Print a program in canonical form")
    sub.add_argument("--program", required=True)
    sub = command(tm, "worksheet", _tm_worksheet, "Exercise sheet for a task")
    sub.add_argument("--task", required=True)

    mines = areas.add_parser("mines", help="Paper minesweeper").add_subparsers(
        dest="command", required=True
    )
    for name, handler, help in (
        ("gen", _mines_gen, "Random puzzle"),
        ("worksheet", _mines_worksheet, "Printable puzzle with solution"),
    ):
        sub = command(mines, name, handler, help)
        sub.add_argument("--rows", type=int, required=True)
        sub.add_argument("--cols", type=int, required=True)
        sub.add_argument("--prob", type=float, default=DEFAULT_MINE_PROBABILITY)
        _seed(sub)
        if name == "gen":
            sub.add_argument("--worksheet", action="store_true")
            sub.add_argument("--solution", action="store_true", help="Also print the layout")
    sub = command(mines, "solve", _mines_solve, "Solutions of a puzzle")
    sub.add_argument("--puzzle", required=True, help="Board file, '-' for stdin")
    sub.add_argument("--cap", type=int, default=DEFAULT_SOLUTION_CAP)
    sub = command(mines, "unique", _mines_unique, "Whether a puzzle has one solution")
    sub.add_argument("--puzzle", required=True)
    sub = command(mines, "rank", _mines_rank, "Rank of the clue map")
    sub.add_argument("--rows", type=int, required=True)
    sub.add_argument("--cols", type=int, required=True)
    sub = command(mines, "sweep", _mines_sweep, "Look for ambiguous random boards")
    sub.add_argument("--rows", type=int, required=True)
    sub.add_argument("--cols", type=int, required=True)
    _seed(sub)
    sub.add_argument("--layouts", type=int, default=100)

    maps = areas.add_parser("map", help="Border graph of a map").add_subparsers(
        dest="command", required=True
    )
    sub = command(maps, "query", _map_query, "Ask a question about the map")
    sub.add_argument(
        "predicate",
        choices=[
            "degree",
            "monogamous",
            "happy",
            "attractive",
            "theorem1",
            "friendly",
            "max-rank",
            "tailed",
            "nearest",
            "no-attractive",
        ],
    )
    sub.add_argument("--country", default=None)
    sub.add_argument("--k", type=int, default=1)
    sub.add_argument("--rank", type=int, default=None, help="Filter friendly countries")
    sub.add_argument("--data", type=Path, default=EUROPE_DATASET)
    for name, handler, help in (
        ("color", _map_color, "Color the map with at most four colors"),
        ("validate", _map_validate, "List consistency problems"),
        ("worksheet", _map_worksheet, "Question sheet"),
    ):
        sub = command(maps, name, handler, help)
        sub.add_argument("--data", type=Path, default=EUROPE_DATASET)
        if name == "worksheet":
            sub.add_argument("--country", default=None)

    sub = command(areas, "render", _render, "Render a worksheet JSON document")
    sub.add_argument("--doc", required=True, help="Worksheet JSON file, '-' for stdin")
    return parser


def _emit(args: argparse.Namespace, output: Output) -> None:
    if args.format == OutputFormat.JSON.value:
        name = " ".join(p for p in (args.area, getattr(args, "command", None)) if p)
        envelope = Envelope(command=name, result=output.data)
        text = json.dumps(envelope.model_dump(by_alias=True), ensure_ascii=False, indent=2) + "\n"
    else:
        text = output.text
    if args.out is not None:
        try:
            args.out.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot write {args.out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.verbose:
        set_console_level(logging.INFO)
    handler: Handler = args.handler
    try:
        output = handler(args)
        _emit(args, output)
    except (ParsingError, ConfigurationError) as exc:
        print(f"sheetforge: {exc}", file=sys.stderr)
        return 2
    except SheetforgeError as exc:
        logger.debug(f"{type(exc).__name__}: {exc}")
        print(f"sheetforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return output.code


if __name__ == "__main__":
    sys.exit(main())
