"""The nine truck tasks, their reference programs and a verification harness."""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from sheetforge.engines.truck import (
    Box,
    Outcome,
    Program,
    RunResult,
    Tape,
    TruckState,
    box_census,
    format_tape,
    run,
    trace_to_text,
)
from sheetforge.engines.truck_dsl import format_rule, parse_program
from sheetforge.utils.constants import DEFAULT_MAX_STEPS, DEFAULT_TAPE_LENGTH, PROGRAMS_DIR
from sheetforge.utils.errors import ValidationError
from sheetforge.utils.logger import get_logger
from sheetforge.utils.models import AnswerKey, Caption, Table, WorksheetDoc

logger = get_logger(__name__)

Params = Mapping[str, int]


@dataclass(frozen=True)
class TaskSpec:
    """A task: how the tape starts and which final states are accepted."""

    name: str
    description: str
    program_file: str
    initial: Callable[[Params], Tape]
    accept: Callable[[Tape, TruckState, Params], bool]
    parameters: Mapping[str, range] = field(default_factory=dict)
    conserves_boxes: bool = True

    def check(self, params: Params) -> None:
        """Raise ValidationError if ``params`` is outside the task's domain."""
        if set(params) != set(self.parameters):
            raise ValidationError(
                f"{self.name} expects parameters {sorted(self.parameters)}, got {sorted(params)}"
            )
        for key, domain in self.parameters.items():
            if params[key] not in domain:
                raise ValidationError(
                    f"{self.name}: {key}={params[key]} is outside {domain.start}..{domain.stop - 1}"
                )

    def assignments(self) -> list[dict[str, int]]:
        """Every assignment of the parameter domains."""
        keys = list(self.parameters)
        grid = itertools.product(*(self.parameters[k] for k in keys))
        return [dict(zip(keys, values)) for values in grid]


@dataclass(frozen=True)
class AssignmentResult:
    """Verification of one parameter assignment."""

    params: dict[str, int]
    passed: bool
    run: RunResult
    detail: str = ""

    def to_dict(self, with_trace: bool = False) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        data: dict[str, Any] = {
            "params": self.params,
            "passed": self.passed,
            "detail": self.detail,
            **self.run.to_dict(),
        }
        if with_trace:
            data["trace"] = [s.to_dict() for s in self.run.trace]
        return data


@dataclass(frozen=True)
class TaskReport:
    """Results of running one program over many assignments of a task."""

    task: str
    program: str
    results: tuple[AssignmentResult, ...]

    @property
    def passed(self) -> bool:
        """True if every assignment passed."""
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[AssignmentResult]:
        """Assignments that failed, with their traces."""
        return [r for r in self.results if not r.passed]

    def to_text(self) -> str:
        """Summary line per assignment plus the trace of every failure."""
        lines = [f"{self.task}: program {self.program!r}"]
        for r in self.results:
            params = " ".join(f"{k}={v}" for k, v in r.params.items()) or "-"
            status = "pass" if r.passed else "FAIL"
            lines.append(f"  {status}  {params}  ({r.run.outcome.value}, {r.run.steps} steps)")
            if not r.passed:
                lines.append(f"    {r.detail}")
                lines.extend("    " + line for line in trace_to_text(r.run).splitlines())
        total = len(self.results)
        lines.append(f"{total - len(self.failures)}/{total} assignments passed")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict; failures carry their traces."""
        return {
            "task": self.task,
            "program": self.program,
            "passed": self.passed,
            "results": [r.to_dict(with_trace=not r.passed) for r in self.results],
        }


def _only(counts: Mapping[int, int], length: int = DEFAULT_TAPE_LENGTH) -> tuple[int, ...]:
    return tuple(counts.get(i, 0) for i in range(length))


def _labels(n: int) -> tuple[Box, ...]:
    return tuple(Box(ch) for ch in string.ascii_lowercase[:n])


def _comparison_accept(tape: Tape, truck: TruckState, p: Params) -> bool:
    expected = 4 if p["station4"] > p["warehouse"] else 0
    return truck.position == expected and truck.cargo is None


def _bisection_accept(tape: Tape, truck: TruckState, p: Params) -> bool:
    k = p["warehouse"]
    return tape.counts == _only({0: k - k // 2, 4: k // 2}) and truck.cargo is None


def _invert_initial(p: Params) -> Tape:
    return Tape.empty().with_stack(0, _labels(p["boxes"]))


def _invert_accept(tape: Tape, truck: TruckState, p: Params) -> bool:
    expected = tuple(reversed(_labels(p["boxes"])))
    return tape.stations[0] == expected and tape.total == p["boxes"] and truck.cargo is None


_TASKS: tuple[TaskSpec, ...] = (
    TaskSpec(
        name="transfer",
        description="The box is at the warehouse. Transfer it to station 4.",
        program_file="transfer.tm",
        initial=lambda p: Tape.from_counts({0: 1}),
        accept=lambda t, s, p: t.counts == _only({4: 1}) and s.cargo is None,
    ),
    TaskSpec(
        name="transfer-return",
        description="The same, but finally the truck returns to the warehouse.",
        program_file="transfer_return.tm",
        initial=lambda p: Tape.from_counts({0: 1}),
        accept=lambda t, s, p: t.counts == _only({4: 1}) and s.position == 0,
    ),
    TaskSpec(
        name="adding",
        description=(
            "Boxes are at the warehouse and at station 5. "
            "Transfer all boxes to the warehouse."
        ),
        program_file="adding.tm",
        initial=lambda p: Tape.from_counts({0: p["warehouse"], 5: p["station5"]}),
        accept=lambda t, s, p: t.counts == _only({0: p["warehouse"] + p["station5"]}),
        parameters={"warehouse": range(11), "station5": range(11)},
    ),
    TaskSpec(
        name="distribute",
        description=(
            "One box is at station 2 and one at station 3. "
            "Put one box at station 4 and one at station 5."
        ),
        program_file="distribute.tm",
        initial=lambda p: Tape.from_counts({2: 1, 3: 1}),
        accept=lambda t, s, p: t.counts == _only({4: 1, 5: 1}) and s.cargo is None,
    ),
    TaskSpec(
        name="bisection",
        description="Transfer half of the warehouse boxes to station 4.",
        program_file="bisection.tm",
        initial=lambda p: Tape.from_counts({0: p["warehouse"]}),
        accept=_bisection_accept,
        parameters={"warehouse": range(11)},
    ),
    TaskSpec(
        name="subtraction",
        description=(
            "Take boxes away from the warehouse until it holds as many "
            "boxes as station 4. Surplus boxes are dumped at station 8."
        ),
        program_file="subtraction.tm",
        initial=lambda p: Tape.from_counts({0: p["warehouse"], 4: p["station4"]}),
        accept=lambda t, s, p: t.height(0) == min(p["warehouse"], p["station4"]),
        parameters={"warehouse": range(11), "station4": range(11)},
        conserves_boxes=False,
    ),
    TaskSpec(
        name="comparison",
        description=(
            "Boxes are at the warehouse and at station 4. Stop at the station "
            "holding more boxes, or at the warehouse if they are equal."
        ),
        program_file="comparison.tm",
        initial=lambda p: Tape.from_counts({0: p["warehouse"], 4: p["station4"]}),
        accept=_comparison_accept,
        parameters={"warehouse": range(11), "station4": range(11)},
    ),
    TaskSpec(
        name="unary",
        description="Transfer the warehouse boxes one by one to the next stations.",
        program_file="unary.tm",
        initial=lambda p: Tape.from_counts({0: p["warehouse"]}),
        accept=lambda t, s, p: t.counts == _only({i: 1 for i in range(1, p["warehouse"] + 1)}),
        parameters={"warehouse": range(DEFAULT_TAPE_LENGTH)},
    ),
    TaskSpec(
        name="invert",
        description=(
            "Unload the warehouse and reload it in reverse order, "
            "so the first box loaded comes out first."
        ),
        program_file="invert.tm",
        initial=_invert_initial,
        accept=_invert_accept,
        parameters={"boxes": range(DEFAULT_TAPE_LENGTH)},
    ),
)


def builtin_tasks() -> list[TaskSpec]:
    """The nine tasks in their usual order."""
    return list(_TASKS)


def get_task(name: str) -> TaskSpec:
    """Look a task up by name.

    Raises:
        ValidationError: If no task has that name.

    """
    for task in _TASKS:
        if task.name == name:
            return task
    names = ", ".join(t.name for t in _TASKS)
    raise ValidationError(f"unknown task {name!r}; choose one of {names}")


def reference_program(task_name: str) -> Program:
    """Load the bundled program solving ``task_name``."""
    task = get_task(task_name)
    path = PROGRAMS_DIR / task.program_file
    return parse_program(path.read_text(encoding="utf-8"), name=path.stem)


def _conservation_problem(task: TaskSpec, result: RunResult) -> str:
    first = box_census(result.trace[0])
    for i, snapshot in enumerate(result.trace):
        census = box_census(snapshot)
        if task.conserves_boxes and census != first:
            return f"boxes not conserved at step {i}"
        if sum(census.values()) > sum(first.values()):
            return f"box count grew at step {i}"
    return ""


def verify_task(
    program: Program,
    task: TaskSpec,
    parameter_assignments: list[dict[str, int]] | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> TaskReport:
    """Run ``program`` on each assignment and check the task's acceptance.

    Assignments default to the full parameter domain of the task.

    Raises:
        ValidationError: If an assignment is outside the task's domain.

    """
    assignments = task.assignments() if parameter_assignments is None else parameter_assignments
    for params in assignments:
        task.check(params)

    results = []
    for params in assignments:
        tape = task.initial(params)
        result = run(tape, program.start, program, max_steps)
        final = result.final
        detail = ""
        if result.outcome is not Outcome.HALTED:
            detail = result.detail or result.outcome.value
        elif not task.accept(final.tape, final.truck, params):
            where = f"at {final.truck.position}, tape {format_tape(final.tape)!r}"
            detail = f"final state rejected: {where}"
        else:
            detail = _conservation_problem(task, result)
        results.append(AssignmentResult(dict(params), not detail, result, detail))

    report = TaskReport(task=task.name, program=program.name, results=tuple(results))
    logger.info(
        f"Verified {program.name!r} on {task.name}: "
        f"{len(results) - len(report.failures)}/{len(results)} passed"
    )
    return report


def tm_worksheet(task_name: str) -> WorksheetDoc:
    """Exercise sheet: the task, its starting tape and the reference rule table."""
    task = get_task(task_name)
    program = reference_program(task_name)
    params = {k: min(3, domain.stop - 1) for k, domain in task.parameters.items()}
    tape = task.initial(params)

    stations = tuple(str(i) for i in range(len(tape)))
    boxes = tuple(
        ",".join(str(b) for b in stack) if any(b.label for b in stack) else str(len(stack))
        for stack in tape.stations
    )
    rules = tuple(
        (str(i), *format_rule(rule).split(" -> ")) for i, rule in enumerate(program.rules, start=1)
    )
    start = program.start
    where = "there" if start.position == 0 else f"at station {start.position}"
    intro = f"Station 0 is the warehouse. The truck starts {where} heading {start.heading.value}."
    blocks = (
        Caption(task.description),
        Caption(intro),
        Table((("station", *stations), ("boxes", *boxes)), header=True),
        Caption("Write the instructions for the truck."),
        Table((("#", "situation", "action"), *rules), header=True, name="solution"),
        AnswerKey("solution"),
    )
    logger.info(f"Generated truck worksheet for {task.name}")
    return WorksheetDoc(title=f"Truck: {task.name}", blocks=blocks)
