"""One-dimensional "Game of Life": a cell lives iff exactly one neighbour lives.

The next state of cell i is x(i-1) XOR x(i+1), so one step is a linear map over
GF(2). Predecessors and stationary configurations on cyclic or periodic
lattices are computed by solving that linear system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
import sys
from typing import Any, Iterable, Mapping

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import numpy as np

from sheetforge.utils import gf2
from sheetforge.utils.constants import (
    CA_WORKSHEET_MAX_SIZE,
    CA_WORKSHEET_STEPS,
    MAX_ORACLE_CELLS,
)
from sheetforge.utils.errors import ParsingError, ValidationError
from sheetforge.utils.logger import get_logger
from sheetforge.utils.models import AnswerKey, Caption, Table, WorksheetDoc, grid_from_glyphs
from sheetforge.utils.render import ALIVE_GLYPH, DEAD_GLYPH

logger = get_logger(__name__)


class BoundaryKind(str, Enum):
    """How cells outside the stored window are defined."""

    ZERO_PADDED = "fin"
    CYCLIC = "cyc"
    PERIODIC = "per"


@dataclass(frozen=True)
class BoundaryMode:
    """Boundary kind plus the lattice size for cyclic and periodic modes."""

    kind: BoundaryKind
    size: int = 0

    def __post_init__(self) -> None:
        """Check the size invariant."""
        if self.kind is BoundaryKind.ZERO_PADDED:
            object.__setattr__(self, "size", 0)
        elif self.size < 1:
            raise ValidationError(f"{self.kind.name.lower()} size must be >= 1")

    @classmethod
    def zero_padded(cls) -> Self:
        """Finite support on an infinite zero background."""
        return cls(BoundaryKind.ZERO_PADDED)

    @classmethod
    def cyclic(cls, length: int) -> Self:
        """Cells indexed modulo ``length``."""
        return cls(BoundaryKind.CYCLIC, length)

    @classmethod
    def periodic(cls, period: int) -> Self:
        """Bi-infinite repetition of a ``period``-cell pattern."""
        return cls(BoundaryKind.PERIODIC, period)

    @property
    def is_finite_lattice(self) -> bool:
        """True for cyclic and periodic modes."""
        return self.kind is not BoundaryKind.ZERO_PADDED


@dataclass(frozen=True)
class BitConfiguration:
    """A CA state. ZeroPadded windows are kept trimmed to their support."""

    cells: tuple[int, ...]
    boundary: BoundaryMode = field(default_factory=BoundaryMode.zero_padded)
    origin: int = 0

    def __post_init__(self) -> None:
        """Normalize cells and enforce lattice length."""
        cells = tuple(int(b) & 1 for b in self.cells)
        if any(int(b) not in (0, 1) for b in self.cells):
            raise ValidationError("cells must be 0 or 1")
        if self.boundary.is_finite_lattice:
            if len(cells) != self.boundary.size:
                raise ValidationError(
                    f"expected {self.boundary.size} cells, got {len(cells)}"
                )
            object.__setattr__(self, "origin", 0)
        else:
            ones = [i for i, b in enumerate(cells) if b]
            if ones:
                object.__setattr__(self, "origin", self.origin + ones[0])
                cells = cells[ones[0] : ones[-1] + 1]
            else:
                object.__setattr__(self, "origin", 0)
                cells = ()
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_bits(cls, bits: str, boundary: BoundaryMode | None = None) -> Self:
        """Build from a '0'/'1' string; the boundary defaults to ZeroPadded."""
        mode = boundary or BoundaryMode.zero_padded()
        return cls(tuple(int(ch) for ch in bits), mode)

    @classmethod
    def zeros(cls, boundary: BoundaryMode) -> Self:
        """All-zero configuration on ``boundary``."""
        return cls((0,) * boundary.size, boundary)

    @property
    def support(self) -> frozenset[int]:
        """Indices of alive cells."""
        return frozenset(self.origin + i for i, b in enumerate(self.cells) if b)

    @property
    def bits(self) -> str:
        """Cells as a '0'/'1' string."""
        return "".join(str(b) for b in self.cells)

    def as_array(self) -> gf2.BitArray:
        """Cells as a uint8 vector."""
        return np.array(self.cells, dtype=np.uint8)

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {
            "boundary": self.boundary.kind.value,
            "size": self.boundary.size,
            "origin": self.origin,
            "cells": self.bits,
            "text": format_config(self),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Create from a mapping produced by ``to_dict``."""
        return cls.from_text(str(data["text"]))

    @classmethod
    def from_text(cls, text: str) -> Self:
        """Parse the tagged text form, see ``parse_config``."""
        parsed = parse_config(text)
        return cls(parsed.cells, parsed.boundary, parsed.origin)

    def __str__(self) -> str:
        """Tagged text form."""
        return format_config(self)


def parse_config(text: str) -> BitConfiguration:
    """Parse ``cyc:0101``, ``per:110``, ``fin:00100`` or ``fin@-1:101``.

    Bits are read left to right with increasing index; for ``fin`` the optional
    ``@k`` gives the index of the first bit.
    """
    tag, sep, bits = text.strip().partition(":")
    if not sep:
        raise ParsingError(f"missing boundary tag in {text!r} (expected cyc:|per:|fin:)")
    origin = 0
    if "@" in tag:
        tag, _, raw_origin = tag.partition("@")
        try:
            origin = int(raw_origin)
        except ValueError as e:
            raise ParsingError(f"bad origin {raw_origin!r} in {text!r}") from e
    if bits and set(bits) - {"0", "1"}:
        raise ParsingError(f"cells must be '0'/'1' in {text!r}")
    try:
        kind = BoundaryKind(tag)
    except ValueError as e:
        raise ParsingError(f"unknown boundary tag {tag!r} in {text!r}") from e
    cells = tuple(int(ch) for ch in bits)
    if kind is BoundaryKind.ZERO_PADDED:
        return BitConfiguration(cells, BoundaryMode.zero_padded(), origin)
    if not cells:
        raise ParsingError(f"{kind.value}: configuration needs at least one cell")
    if origin:
        raise ParsingError("an origin is only allowed for fin: configurations")
    return BitConfiguration(cells, BoundaryMode(kind, len(cells)))


def format_config(c: BitConfiguration) -> str:
    """Inverse of ``parse_config``."""
    if c.boundary.is_finite_lattice:
        return f"{c.boundary.kind.value}:{c.bits}"
    if not c.cells:
        return "fin:0"
    prefix = "fin" if c.origin == 0 else f"fin@{c.origin}"
    return f"{prefix}:{c.bits}"


def _require_lattice(boundary: BoundaryMode) -> None:
    if not boundary.is_finite_lattice:
        raise ValidationError(
            "predecessor and fixed-point search need a cyclic or periodic lattice"
        )


def _same_lattice(a: BitConfiguration, b: BitConfiguration) -> None:
    if a.boundary != b.boundary:
        raise ValidationError(f"lattices differ: {a.boundary} vs {b.boundary}")


def step_matrix(n: int) -> gf2.BitArray:
    """Matrix of one step on a cyclic lattice of ``n`` cells."""
    matrix = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        matrix[i, (i - 1) % n] += 1
        matrix[i, (i + 1) % n] += 1
    return gf2.to_gf2(matrix)


def step(c: BitConfiguration) -> BitConfiguration:
    """Apply the rule once: next(i) = x(i-1) XOR x(i+1)."""
    if c.boundary.is_finite_lattice:
        x = c.as_array()
        nxt = np.roll(x, 1) ^ np.roll(x, -1)
        return BitConfiguration(tuple(int(b) for b in nxt), c.boundary)
    if not c.cells:
        return c
    padded = np.concatenate(
        [np.zeros(2, dtype=np.uint8), c.as_array(), np.zeros(2, dtype=np.uint8)]
    )
    nxt = np.zeros_like(padded)
    nxt[1:-1] = padded[:-2] ^ padded[2:]
    return BitConfiguration(tuple(int(b) for b in nxt), c.boundary, c.origin - 2)


def evolve(c: BitConfiguration, t: int) -> list[BitConfiguration]:
    """Return the first ``t`` descendants of ``c``."""
    if t < 0:
        raise ValidationError("number of steps must be non-negative")
    history: list[BitConfiguration] = []
    current = c
    for _ in range(t):
        current = step(current)
        history.append(current)
    return history


def xor(a: BitConfiguration, b: BitConfiguration) -> BitConfiguration:
    """Cellwise XOR of two configurations on the same lattice."""
    _same_lattice(a, b)
    if a.boundary.is_finite_lattice:
        cells = a.as_array() ^ b.as_array()
        return BitConfiguration(tuple(int(v) for v in cells), a.boundary)
    support = a.support ^ b.support
    if not support:
        return BitConfiguration((), a.boundary)
    lo, hi = min(support), max(support)
    cells = tuple(int(i in support) for i in range(lo, hi + 1))
    return BitConfiguration(cells, a.boundary, lo)


def rotate(c: BitConfiguration, k: int) -> BitConfiguration:
    """Shift right by ``k``: rotate(x, k)[i] = x[i - k]."""
    if c.boundary.is_finite_lattice:
        cells = np.roll(c.as_array(), k)
        return BitConfiguration(tuple(int(v) for v in cells), c.boundary)
    return BitConfiguration(c.cells, c.boundary, c.origin + k)


def _from_vector(vector: Iterable[int], boundary: BoundaryMode) -> BitConfiguration:
    return BitConfiguration(tuple(int(v) for v in vector), boundary)


def _affine_set(
    matrix: gf2.BitArray, target: gf2.BitArray, boundary: BoundaryMode
) -> frozenset[BitConfiguration]:
    particular = gf2.solve(matrix, target)
    if particular is None:
        return frozenset()
    kernel = gf2.nullspace_basis(matrix)
    return frozenset(_from_vector(particular ^ v, boundary) for v in gf2.span(kernel))


def predecessors(c: BitConfiguration) -> frozenset[BitConfiguration]:
    """Every x on the same lattice with step(x) = c (empty if none exists)."""
    _require_lattice(c.boundary)
    n = c.boundary.size
    result = _affine_set(step_matrix(n), c.as_array(), c.boundary)
    logger.debug(f"{format_config(c)} has {len(result)} predecessors")
    return result


def ancestors_of_empty(boundary: BoundaryMode) -> frozenset[BitConfiguration]:
    """Kernel of the step map: configurations that die out in one step."""
    _require_lattice(boundary)
    return predecessors(BitConfiguration.zeros(boundary))


def fixed_points(boundary: BoundaryMode) -> frozenset[BitConfiguration]:
    """Stationary configurations: step(x) = x."""
    _require_lattice(boundary)
    n = boundary.size
    matrix = step_matrix(n) ^ np.eye(n, dtype=np.uint8)
    return _affine_set(matrix, np.zeros(n, dtype=np.uint8), boundary)


def _all_rows(boundary: BoundaryMode) -> tuple[gf2.BitArray, gf2.BitArray]:
    """Every configuration of the lattice, one per row, and the row of its image."""
    _require_lattice(boundary)
    if boundary.size > MAX_ORACLE_CELLS:
        raise ValidationError(
            f"exhaustive enumeration is limited to {MAX_ORACLE_CELLS} cells"
        )
    n = boundary.size
    codes = np.arange(1 << n)[:, None] >> np.arange(n - 1, -1, -1)
    rows = (codes & 1).astype(np.uint8)
    return rows, np.roll(rows, 1, axis=1) ^ np.roll(rows, -1, axis=1)


def brute_force_predecessors(c: BitConfiguration) -> frozenset[BitConfiguration]:
    """Exhaustive counterpart of ``predecessors`` for small lattices."""
    rows, images = _all_rows(c.boundary)
    hits = rows[(images == c.as_array()).all(axis=1)]
    return frozenset(_from_vector(row, c.boundary) for row in hits)


def brute_force_fixed_points(boundary: BoundaryMode) -> frozenset[BitConfiguration]:
    """Exhaustive counterpart of ``fixed_points`` for small lattices."""
    rows, images = _all_rows(boundary)
    hits = rows[(images == rows).all(axis=1)]
    return frozenset(_from_vector(row, boundary) for row in hits)


def period_of(c: BitConfiguration, max_steps: int = 10_000) -> tuple[int, int]:
    """Return (preperiod, period) of the orbit of ``c`` on a finite lattice.

    Raises:
        ValidationError: If the orbit does not close within ``max_steps``.

    """
    _require_lattice(c.boundary)
    seen: dict[BitConfiguration, int] = {c: 0}
    current = c
    for t in range(1, max_steps + 1):
        current = step(current)
        if current in seen:
            return seen[current], t - seen[current]
        seen[current] = t
    raise ValidationError(f"orbit did not close within {max_steps} steps")


def _row(c: BitConfiguration, lo: int, hi: int) -> str:
    support = c.support
    return "".join(ALIVE_GLYPH if i in support else DEAD_GLYPH for i in range(lo, hi))


def _lattice_row(c: BitConfiguration) -> str:
    return "".join(ALIVE_GLYPH if b else DEAD_GLYPH for b in c.cells)


def spacetime_rows(c: BitConfiguration, t: int) -> list[str]:
    """Glyph rows of ``c`` and its first ``t`` descendants, one below another."""
    history = [c, *evolve(c, t)]
    if c.boundary.is_finite_lattice:
        return [_lattice_row(x) for x in history]
    lo = c.origin - t
    hi = c.origin + max(len(c.cells), 1) + t
    return [_row(x, lo, hi) for x in history]


class WorksheetKind(str, Enum):
    """Cellular automaton exercise types."""

    DESCENDANTS = "descendants"
    ANCESTOR = "ancestor"
    FIXED_POINT = "fixed-point"
    EMPTY_ANCESTORS = "empty-ancestors"


_RULE_CAPTION = (
    "A cell is alive on the next line iff exactly one of its two neighbours "
    "is alive now."
)


def _random_cells(rng: np.random.Generator, size: int) -> tuple[int, ...]:
    cells = tuple(int(b) for b in rng.integers(0, 2, size=size))
    if not any(cells):
        cells = tuple(int(i == size // 2) for i in range(size))
    return cells


def ca_worksheet(seed: int, kind: WorksheetKind | str, size: int) -> WorksheetDoc:
    """Build a deterministic exercise sheet for the cellular automaton.

    Raises:
        ValidationError: If ``size`` is outside 1..CA_WORKSHEET_MAX_SIZE.

    """
    kind = WorksheetKind(kind)
    if not 1 <= size <= CA_WORKSHEET_MAX_SIZE:
        raise ValidationError(f"size must be in 1..{CA_WORKSHEET_MAX_SIZE}, got {size}")
    rng = np.random.default_rng(seed)
    blank = " "

    if kind is WorksheetKind.DESCENDANTS:
        start = BitConfiguration(_random_cells(rng, size))
        rows = spacetime_rows(start, CA_WORKSHEET_STEPS)
        width = len(rows[0])
        puzzle = [rows[0]] + [blank * width] * CA_WORKSHEET_STEPS
        blocks = [
            Caption(_RULE_CAPTION),
            Caption(f"Continue the configuration until the {CA_WORKSHEET_STEPS}th descendant."),
            grid_from_glyphs(puzzle),
            grid_from_glyphs(rows, name="solution"),
            AnswerKey("solution"),
        ]
        title = f"Descendants (seed {seed})"
    elif kind is WorksheetKind.ANCESTOR:
        boundary = BoundaryMode.cyclic(size)
        ancestor = BitConfiguration(_random_cells(rng, size), boundary)
        target = step(ancestor)
        blocks = [
            Caption(_RULE_CAPTION),
            Caption("The row wraps around: its last cell neighbours its first cell."),
            Caption("Find a line whose descendant is the bottom line."),
            grid_from_glyphs([blank * size, _lattice_row(target)]),
            grid_from_glyphs([_lattice_row(ancestor), _lattice_row(target)], name="solution"),
            AnswerKey("solution"),
        ]
        title = f"Find the ancestor (seed {seed})"
    elif kind is WorksheetKind.FIXED_POINT:
        boundary = BoundaryMode.periodic(size)
        points = sorted(fixed_points(boundary), key=lambda x: x.bits)
        blocks = [
            Caption(_RULE_CAPTION),
            Caption(f"The pattern repeats every {size} cells in both directions (...)."),
            Caption("Find every stationary configuration: its descendant is itself."),
            grid_from_glyphs([blank * size]),
            Table(
                tuple(("..." + _lattice_row(p) + "...",) for p in points),
                name="solution",
            ),
            AnswerKey("solution"),
        ]
        title = f"Stationary configurations of period {size}"
    else:
        boundary = BoundaryMode.cyclic(size)
        ancestors = sorted(ancestors_of_empty(boundary), key=lambda x: x.bits)
        blocks = [
            Caption(_RULE_CAPTION),
            Caption("The row wraps around: its last cell neighbours its first cell."),
            Caption("Find all ancestors of the empty configuration."),
            grid_from_glyphs([blank * size, DEAD_GLYPH * size]),
            Table(tuple((_lattice_row(a),) for a in ancestors), name="solution"),
            AnswerKey("solution"),
        ]
        title = f"Ancestors of the empty configuration ({size} cells)"

    logger.info(f"Generated {kind.value} worksheet (seed={seed}, size={size})")
    return WorksheetDoc(title=title, blocks=tuple(blocks))
