"""Line-oriented text format for truck programs.

    # comment
    tape 9
    start at 0 heading right
    at 0 in:any cargo:no station:nonempty -> pickup go:right

Guard keys may be omitted (they default to ``any``) and appear in any order.
"""

from __future__ import annotations

import re

from sheetforge.engines.truck import Guard, Heading, Move, Program, Rule, Transfer, TruckState
from sheetforge.utils.errors import ProgramSyntaxError
from sheetforge.utils.logger import get_logger

logger = get_logger(__name__)

_TOKEN_RE = re.compile(r"\S+")
_YES_NO = {"yes": True, "no": False, "any": None}
_EMPTY = {"nonempty": True, "empty": False, "any": None}
_HEADINGS = {"left": Heading.LEFT, "right": Heading.RIGHT, "any": None}


def _tokens(line: str) -> list[tuple[str, int]]:
    """Split a line into (token, 1-based column) pairs."""
    return [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(line)]


def _int(token: str, lineno: int, column: int, what: str) -> int:
    if not (token.isascii() and token.isdigit()):
        raise ProgramSyntaxError(f"expected {what}, got {token!r}", lineno, column)
    return int(token)


def _check_station(index: int, length: int | None, lineno: int, column: int) -> None:
    if length is not None and index >= length:
        raise ProgramSyntaxError(
            f"station {index} is outside a tape of length {length}", lineno, column
        )


def _parse_rule(tokens: list[tuple[str, int]], lineno: int, length: int | None) -> Rule:
    if len(tokens) < 2:
        raise ProgramSyntaxError("expected a station after 'at'", lineno, tokens[0][1])
    station_tok, col = tokens[1]
    station = None if station_tok == "*" else _int(station_tok, lineno, col, "station or '*'")
    if station is not None:
        _check_station(station, length, lineno, col)

    arrow = next((i for i, (tok, _) in enumerate(tokens) if tok == "->"), None)
    if arrow is None:
        raise ProgramSyntaxError("missing '->'", lineno, tokens[-1][1])

    fields: dict[str, bool | Heading | None] = {}
    tables: dict[str, dict[str, bool | Heading | None]] = {
        "in": dict(_HEADINGS),
        "cargo": dict(_YES_NO),
        "station": dict(_EMPTY),
    }
    for tok, col in tokens[2:arrow]:
        key, sep, value = tok.partition(":")
        if not sep or key not in tables:
            raise ProgramSyntaxError(f"unknown keyword {tok!r}", lineno, col)
        if key in fields:
            raise ProgramSyntaxError(f"repeated condition {key!r}", lineno, col)
        if value not in tables[key]:
            raise ProgramSyntaxError(f"bad value {value!r} for {key!r}", lineno, col)
        fields[key] = tables[key][value]

    action = tokens[arrow + 1 :]
    if len(action) != 2:
        col = action[0][1] if action else tokens[arrow][1]
        raise ProgramSyntaxError("expected '<pickup|drop|keep> go:<left|right|halt>'", lineno, col)
    (transfer_tok, transfer_col), (move_tok, move_col) = action
    try:
        transfer = Transfer(transfer_tok)
    except ValueError:
        raise ProgramSyntaxError(f"unknown action {transfer_tok!r}", lineno, transfer_col) from None
    key, sep, value = move_tok.partition(":")
    if key != "go" or not sep:
        raise ProgramSyntaxError(f"unknown keyword {move_tok!r}", lineno, move_col)
    try:
        move = Move(value)
    except ValueError:
        raise ProgramSyntaxError(f"bad move {value!r}", lineno, move_col) from None

    heading = fields.get("in")
    cargo = fields.get("cargo")
    nonempty = fields.get("station")
    guard = Guard(
        station=station,
        heading_in=heading if isinstance(heading, Heading) else None,
        cargo=cargo if isinstance(cargo, bool) else None,
        station_nonempty=nonempty if isinstance(nonempty, bool) else None,
    )
    return Rule(guard=guard, transfer=transfer, move=move)


def parse_program(text: str, name: str = "", tape_length: int | None = None) -> Program:
    """Parse program text, preserving rule order.

    Station indices are checked against the ``tape`` header, or against
    ``tape_length`` when the program declares none.

    Raises:
        ProgramSyntaxError: With the line and column of the first problem.

    """
    rules: list[Rule] = []
    declared: int | None = None
    start = TruckState()
    seen_rule = seen_start = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = _tokens(line)
        if not tokens:
            continue
        head, col = tokens[0]
        words = [tok for tok, _ in tokens]
        if head == "tape":
            if seen_rule or seen_start or declared is not None:
                raise ProgramSyntaxError("'tape' must come first and only once", lineno, col)
            if len(tokens) != 2:
                raise ProgramSyntaxError("expected 'tape <N>'", lineno, col)
            declared = _int(words[1], lineno, tokens[1][1], "tape length")
            if declared < 2:
                raise ProgramSyntaxError("tape length must be >= 2", lineno, tokens[1][1])
            if tape_length is not None and tape_length != declared:
                raise ProgramSyntaxError(
                    f"program declares tape {declared}, expected {tape_length}", lineno, col
                )
        elif head == "start":
            if seen_rule:
                raise ProgramSyntaxError("'start' must precede the rules", lineno, col)
            if len(words) != 5 or words[1] != "at" or words[3] != "heading":
                raise ProgramSyntaxError(
                    "expected 'start at <i> heading <left|right>'", lineno, col
                )
            position = _int(words[2], lineno, tokens[2][1], "station")
            _check_station(position, declared or tape_length, lineno, tokens[2][1])
            if words[4] not in ("left", "right"):
                raise ProgramSyntaxError(f"bad heading {words[4]!r}", lineno, tokens[4][1])
            start = TruckState(position, Heading(words[4]))
            seen_start = True
        elif head == "at":
            rules.append(_parse_rule(tokens, lineno, declared or tape_length))
            seen_rule = True
        else:
            raise ProgramSyntaxError(f"unknown keyword {head!r}", lineno, col)

    logger.debug(f"Parsed program {name!r} with {len(rules)} rules")
    return Program(rules=tuple(rules), name=name, tape_length=declared, start=start)


def _value(table: dict[str, bool | Heading | None], value: bool | Heading | None) -> str:
    return next(k for k, v in table.items() if v is value)


def format_rule(rule: Rule) -> str:
    """Canonical text of one rule, every guard key spelled out."""
    g = rule.guard
    station = "*" if g.station is None else str(g.station)
    return (
        f"at {station} in:{_value(_HEADINGS, g.heading_in)} "
        f"cargo:{_value(_YES_NO, g.cargo)} station:{_value(_EMPTY, g.station_nonempty)} "
        f"-> {rule.transfer.value} go:{rule.move.value}"
    )


def format_program(program: Program) -> str:
    """Inverse of ``parse_program``."""
    lines = []
    if program.tape_length is not None:
        lines.append(f"tape {program.tape_length}")
    if program.start != TruckState():
        lines.append(f"start at {program.start.position} heading {program.start.heading.value}")
    lines.extend(format_rule(rule) for rule in program.rules)
    return "\n".join(lines) + "\n"
