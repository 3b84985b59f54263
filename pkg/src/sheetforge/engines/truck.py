"""Truck machine: a truck drives along numbered stations moving boxes.

Station 0 is the warehouse. Each station holds a stack of boxes and the truck
carries at most one. A program is an ordered list of rules; the first rule
whose guard matches the current situation fires.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
import sys
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

from sheetforge.utils.constants import DEFAULT_MAX_STEPS, DEFAULT_TAPE_LENGTH, MAX_LABEL_LENGTH
from sheetforge.utils.errors import ParsingError, ValidationError
from sheetforge.utils.logger import get_logger

logger = get_logger(__name__)

_LABEL_RE = re.compile(r"^[A-Za-z0-9]+$")


class Heading(str, Enum):
    """Direction of the last move."""

    LEFT = "left"
    RIGHT = "right"


class Transfer(str, Enum):
    """What the truck does with boxes at the current station."""

    PICKUP = "pickup"
    DROP = "drop"
    KEEP = "keep"


class Move(str, Enum):
    """Where the truck goes after the transfer."""

    LEFT = "left"
    RIGHT = "right"
    HALT = "halt"


@dataclass(frozen=True)
class Box:
    """A box, optionally labeled so stacks can be told apart."""

    label: str | None = None

    def __post_init__(self) -> None:
        """Check the label."""
        if self.label is None:
            return
        if not 1 <= len(self.label) <= MAX_LABEL_LENGTH:
            raise ValidationError(
                f"box label must have 1..{MAX_LABEL_LENGTH} characters: {self.label!r}"
            )
        if not _LABEL_RE.match(self.label):
            raise ValidationError(f"box label must be alphanumeric: {self.label!r}")

    def __str__(self) -> str:
        """Label, or '_' for an unlabeled box."""
        return self.label or "_"


Stack = tuple[Box, ...]


@dataclass(frozen=True)
class Tape:
    """Station stacks, bottom box first. Index 0 is the warehouse."""

    stations: tuple[Stack, ...]

    def __post_init__(self) -> None:
        """Check the tape length."""
        if len(self.stations) < 2:
            raise ValidationError("a tape needs at least 2 stations")

    @classmethod
    def empty(cls, length: int = DEFAULT_TAPE_LENGTH) -> Self:
        """Tape of ``length`` empty stations."""
        if length < 2:
            raise ValidationError("a tape needs at least 2 stations")
        return cls(((),) * length)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], length: int = DEFAULT_TAPE_LENGTH) -> Self:
        """Tape with ``counts[i]`` unlabeled boxes at station i."""
        tape = cls.empty(length)
        for index, count in counts.items():
            if count < 0:
                raise ValidationError(f"negative box count at station {index}")
            tape = tape.with_stack(index, (Box(),) * count)
        return tape

    def __len__(self) -> int:
        """Number of stations."""
        return len(self.stations)

    def height(self, index: int) -> int:
        """Number of boxes at station ``index``."""
        return len(self.stations[index])

    @property
    def counts(self) -> tuple[int, ...]:
        """Stack heights of all stations."""
        return tuple(len(s) for s in self.stations)

    @property
    def total(self) -> int:
        """Number of boxes on the tape."""
        return sum(self.counts)

    def with_stack(self, index: int, stack: Stack) -> Tape:
        """Copy of the tape with station ``index`` replaced."""
        if not 0 <= index < len(self.stations):
            raise ValidationError(f"station {index} is outside 0..{len(self.stations) - 1}")
        stations = list(self.stations)
        stations[index] = tuple(stack)
        return Tape(tuple(stations))

    def push(self, index: int, box: Box) -> Tape:
        """Put ``box`` on top of station ``index``."""
        return self.with_stack(index, self.stations[index] + (box,))

    def pop(self, index: int) -> tuple[Tape, Box]:
        """Take the top box from station ``index``."""
        stack = self.stations[index]
        return self.with_stack(index, stack[:-1]), stack[-1]

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {
            "length": len(self.stations),
            "stations": [[box.label for box in stack] for stack in self.stations],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Create from a mapping produced by ``to_dict``."""
        return cls(tuple(tuple(Box(label) for label in stack) for stack in data["stations"]))


@dataclass(frozen=True)
class TruckState:
    """Position, heading and cargo of the truck."""

    position: int = 0
    heading: Heading = Heading.RIGHT
    cargo: Box | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {
            "position": self.position,
            "heading": self.heading.value,
            "cargo": None if self.cargo is None else str(self.cargo),
        }


@dataclass(frozen=True)
class Guard:
    """Conditions under which a rule fires. None means any."""

    station: int | None = None
    heading_in: Heading | None = None
    cargo: bool | None = None
    station_nonempty: bool | None = None

    def matches(self, tape: Tape, truck: TruckState) -> bool:
        """True if the guard accepts the current situation."""
        if self.station is not None and self.station != truck.position:
            return False
        if self.heading_in is not None and self.heading_in is not truck.heading:
            return False
        if self.cargo is not None and self.cargo != (truck.cargo is not None):
            return False
        nonempty = tape.height(truck.position) > 0
        return self.station_nonempty is None or self.station_nonempty == nonempty


@dataclass(frozen=True)
class Rule:
    """Guard plus action."""

    guard: Guard = field(default_factory=Guard)
    transfer: Transfer = Transfer.KEEP
    move: Move = Move.HALT


@dataclass(frozen=True)
class Program:
    """Ordered rule list. An empty program is stuck immediately."""

    rules: tuple[Rule, ...] = ()
    name: str = ""
    tape_length: int | None = None
    start: TruckState = field(default_factory=TruckState)


class StepKind(str, Enum):
    """Result of a single step."""

    MOVED = "moved"
    HALTED = "halted"
    STUCK = "stuck"
    ILLEGAL_ACTION = "illegal-action"


@dataclass(frozen=True)
class StepResult:
    """State after a step, with the rule that fired if any."""

    kind: StepKind
    tape: Tape
    truck: TruckState
    rule_index: int | None = None
    detail: str = ""


def _illegal(tape: Tape, truck: TruckState, index: int, step_index: int, why: str) -> StepResult:
    detail = f"step {step_index}: rule {index + 1} {why}"
    return StepResult(StepKind.ILLEGAL_ACTION, tape, truck, index, detail)


def step(tape: Tape, truck: TruckState, program: Program, step_index: int = 0) -> StepResult:
    """Fire the first matching rule of ``program``.

    On Stuck or IllegalAction the returned state is the unchanged input state.
    """
    if not 0 <= truck.position < len(tape):
        raise ValidationError(f"truck position {truck.position} is off the tape")
    for index, rule in enumerate(program.rules):
        if rule.guard.matches(tape, truck):
            break
    else:
        return StepResult(
            StepKind.STUCK, tape, truck, None, f"step {step_index}: no rule matches"
        )

    new_tape, cargo = tape, truck.cargo
    if rule.transfer is Transfer.PICKUP:
        if tape.height(truck.position) == 0:
            return _illegal(tape, truck, index, step_index, "picks up at an empty station")
        if cargo is not None:
            return _illegal(tape, truck, index, step_index, "picks up with cargo present")
        new_tape, cargo = tape.pop(truck.position)
    elif rule.transfer is Transfer.DROP:
        if cargo is None:
            return _illegal(tape, truck, index, step_index, "drops without cargo")
        new_tape, cargo = tape.push(truck.position, cargo), None

    if rule.move is Move.HALT:
        return StepResult(StepKind.HALTED, new_tape, replace(truck, cargo=cargo), index)

    delta = -1 if rule.move is Move.LEFT else 1
    position = truck.position + delta
    if not 0 <= position < len(tape):
        return _illegal(tape, truck, index, step_index, f"drives off the tape to {position}")
    heading = Heading.LEFT if rule.move is Move.LEFT else Heading.RIGHT
    return StepResult(StepKind.MOVED, new_tape, TruckState(position, heading, cargo), index)


class Outcome(str, Enum):
    """How a run ended."""

    HALTED = "halted"
    STUCK = "stuck"
    ILLEGAL_ACTION = "illegal-action"
    STEP_LIMIT = "step-limit"


@dataclass(frozen=True)
class Snapshot:
    """One (tape, truck) pair of a trace."""

    tape: Tape
    truck: TruckState

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {"truck": self.truck.to_dict(), "tape": format_tape(self.tape)}


@dataclass(frozen=True)
class RunResult:
    """Outcome of a run plus every intermediate state, the initial one first."""

    outcome: Outcome
    steps: int
    trace: tuple[Snapshot, ...]
    detail: str = ""
    rule_index: int | None = None

    @property
    def final(self) -> Snapshot:
        """Last state of the trace."""
        return self.trace[-1]

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {
            "outcome": self.outcome.value,
            "steps": self.steps,
            "detail": self.detail,
            "final": self.final.to_dict(),
        }


def run(
    tape: Tape,
    truck: TruckState,
    program: Program,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> RunResult:
    """Run ``program`` until it halts, gets stuck, errs or hits ``max_steps``."""
    if max_steps < 1:
        raise ValidationError("max_steps must be >= 1")
    trace = [Snapshot(tape, truck)]
    for index in range(max_steps):
        result = step(tape, truck, program, index)
        if result.kind is StepKind.STUCK:
            return RunResult(Outcome.STUCK, index, tuple(trace), result.detail)
        if result.kind is StepKind.ILLEGAL_ACTION:
            return RunResult(
                Outcome.ILLEGAL_ACTION, index, tuple(trace), result.detail, result.rule_index
            )
        tape, truck = result.tape, result.truck
        trace.append(Snapshot(tape, truck))
        if result.kind is StepKind.HALTED:
            logger.debug(f"Program {program.name!r} halted after {index + 1} steps")
            return RunResult(Outcome.HALTED, index + 1, tuple(trace), rule_index=result.rule_index)
    logger.debug(f"Program {program.name!r} hit the step limit {max_steps}")
    detail = f"no halt within {max_steps} steps"
    return RunResult(Outcome.STEP_LIMIT, max_steps, tuple(trace), detail)


def box_census(snapshot: Snapshot) -> Counter[str | None]:
    """Multiset of box labels on the tape and in the cargo."""
    census: Counter[str | None] = Counter(
        box.label for stack in snapshot.tape.stations for box in stack
    )
    if snapshot.truck.cargo is not None:
        census[snapshot.truck.cargo.label] += 1
    return census


_PAIR_RE = re.compile(r"\s*(\d+)\s*:\s*(\[[^\]]*\]|\d+)\s*(?:,|\s|$)")


def parse_tape(text: str, length: int = DEFAULT_TAPE_LENGTH) -> Tape:
    """Parse ``station:count`` and ``station:[a,b,c]`` pairs (bottom box first).

    Raises:
        ParsingError: On malformed pairs, repeated stations or bad indices.

    """
    tape = Tape.empty(length)
    seen: set[int] = set()
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _PAIR_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise ParsingError(f"malformed tape near {text[pos:]!r}")
        index, value = int(match.group(1)), match.group(2)
        if index in seen:
            raise ParsingError(f"station {index} is listed twice")
        if index >= length:
            raise ParsingError(f"station {index} is outside 0..{length - 1}")
        seen.add(index)
        try:
            if value.startswith("["):
                names = [v.strip() for v in value[1:-1].split(",") if v.strip()]
                stack = tuple(Box(None if n == "_" else n) for n in names)
            else:
                stack = (Box(),) * int(value)
        except ValidationError as exc:
            raise ParsingError(str(exc)) from exc
        tape = tape.with_stack(index, stack)
        pos = match.end()
    return tape


def format_tape(tape: Tape) -> str:
    """Inverse of ``parse_tape``; empty stations are omitted."""
    parts = []
    for index, stack in enumerate(tape.stations):
        if not stack:
            continue
        if all(box.label is None for box in stack):
            parts.append(f"{index}:{len(stack)}")
        else:
            parts.append(f"{index}:[{','.join(str(box) for box in stack)}]")
    return " ".join(parts)


def _snapshot_line(i: int, snapshot: Snapshot) -> str:
    truck = snapshot.truck
    cargo = "-" if truck.cargo is None else str(truck.cargo)
    arrow = "<" if truck.heading is Heading.LEFT else ">"
    heights = " ".join(str(h) for h in snapshot.tape.counts)
    line = f"{i:>5}  at {truck.position} {arrow} cargo {cargo}  | {heights} |  "
    return (line + format_tape(snapshot.tape)).rstrip()


def trace_to_text(result: RunResult) -> str:
    """One line per trace step followed by the outcome line."""
    lines = [_snapshot_line(i, s) for i, s in enumerate(result.trace)]
    tail = f"{result.outcome.value} after {result.steps} steps"
    if result.detail:
        tail += f": {result.detail}"
    lines.append(tail)
    return "\n".join(lines) + "\n"


def trace_to_json(result: RunResult) -> str:
    """Trace as a JSON array of step objects."""
    steps = [{"step": i, **s.to_dict()} for i, s in enumerate(result.trace)]
    return json.dumps(steps, ensure_ascii=False, indent=2)
