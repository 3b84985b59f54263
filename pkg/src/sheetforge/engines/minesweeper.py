"""Paper minesweeper on a chessboard coloring.

Mines may only sit on black cells, i.e. (i, j) with i + j even. Every white
cell shows how many of its orthogonal neighbours (all black) hold a mine. A
board has a unique solution whenever gcd(m + 1, n + 1) = 1.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from functools import cached_property
import sys
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import numpy as np
import sympy

from sheetforge.utils.constants import (
    DEFAULT_MINE_PROBABILITY,
    DEFAULT_SOLUTION_CAP,
    MAX_ORACLE_CELLS,
    WORKSHEET_MAX_DIM,
)
from sheetforge.utils.errors import (
    NonCoprimeDimsError,
    NoSolutionError,
    ParsingError,
    ValidationError,
)
from sheetforge.utils.logger import get_logger
from sheetforge.utils.models import AnswerKey, Caption, WorksheetDoc, grid_from_glyphs
from sheetforge.utils.render import HIDDEN_GLYPH

logger = get_logger(__name__)

Cell = tuple[int, int]

MINE_GLYPH = "*"
SAFE_GLYPH = "."


@dataclass(frozen=True)
class BoardDims:
    """Board of ``m`` rows and ``n`` columns."""

    m: int
    n: int

    def __post_init__(self) -> None:
        """Check that the board is not empty."""
        if self.m < 1 or self.n < 1:
            raise ValidationError(f"board must be at least 1x1, got {self.m}x{self.n}")

    @staticmethod
    def is_black(i: int, j: int) -> bool:
        """True for cells that may hold a mine."""
        return (i + j) % 2 == 0

    @cached_property
    def black_cells(self) -> tuple[Cell, ...]:
        """Black cells in row-major order."""
        return tuple(
            (i, j) for i in range(self.m) for j in range(self.n) if self.is_black(i, j)
        )

    @cached_property
    def white_cells(self) -> tuple[Cell, ...]:
        """White cells in row-major order."""
        return tuple(
            (i, j) for i in range(self.m) for j in range(self.n) if not self.is_black(i, j)
        )

    def neighbors(self, i: int, j: int) -> list[Cell]:
        """Orthogonal in-board neighbours of (i, j)."""
        candidates = ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))
        return [(a, b) for a, b in candidates if 0 <= a < self.m and 0 <= b < self.n]

    def transposed(self) -> BoardDims:
        """Dimensions with rows and columns swapped."""
        return BoardDims(self.n, self.m)


@dataclass(frozen=True)
class MineLayout:
    """Mined black cells of a board."""

    dims: BoardDims
    mines: frozenset[Cell] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        """Check that mines sit on black in-board cells."""
        object.__setattr__(self, "mines", frozenset(self.mines))
        for i, j in self.mines:
            if not (0 <= i < self.dims.m and 0 <= j < self.dims.n):
                raise ValidationError(f"mine ({i}, {j}) is off the board")
            if not BoardDims.is_black(i, j):
                raise ValidationError(f"mine ({i}, {j}) is on a white cell")

    @classmethod
    def from_bits(cls, dims: BoardDims, bits: Any) -> Self:
        """Layout from one bit per black cell, in ``dims.black_cells`` order."""
        return cls(dims, frozenset(c for c, b in zip(dims.black_cells, bits) if b))

    @property
    def bits(self) -> tuple[int, ...]:
        """One bit per black cell, in ``dims.black_cells`` order."""
        return tuple(int(c in self.mines) for c in self.dims.black_cells)

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {
            "rows": self.dims.m,
            "cols": self.dims.n,
            "mines": [list(c) for c in sorted(self.mines)],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Create from a mapping produced by ``to_dict``."""
        dims = BoardDims(int(data["rows"]), int(data["cols"]))
        return cls(dims, frozenset((int(i), int(j)) for i, j in data.get("mines", [])))


@dataclass(frozen=True)
class ClueBoard:
    """Clue numbers on the white cells of a board."""

    dims: BoardDims
    clues: tuple[int, ...]

    def __post_init__(self) -> None:
        """Check clue count and ranges."""
        if len(self.clues) != len(self.dims.white_cells):
            raise ValidationError(
                f"expected {len(self.dims.white_cells)} clues, got {len(self.clues)}"
            )
        for (i, j), clue in zip(self.dims.white_cells, self.clues):
            limit = len(self.dims.neighbors(i, j))
            if not 0 <= clue <= limit:
                raise ValidationError(f"clue {clue} at ({i}, {j}) is outside 0..{limit}")

    def clue(self, i: int, j: int) -> int:
        """Clue shown at white cell (i, j)."""
        return self.clues[self.dims.white_cells.index((i, j))]

    def as_dict(self) -> dict[Cell, int]:
        """Clues keyed by cell."""
        return dict(zip(self.dims.white_cells, self.clues))

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {"rows": self.dims.m, "cols": self.dims.n, "puzzle": format_puzzle(self)}


@dataclass(frozen=True)
class GenSpec:
    """Parameters of a random board."""

    dims: BoardDims
    p: float = DEFAULT_MINE_PROBABILITY
    seed: int = 0

    def __post_init__(self) -> None:
        """Check the probability."""
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"mine probability must be in [0, 1], got {self.p}")


def clues_of(layout: MineLayout) -> ClueBoard:
    """Count the mines around every white cell."""
    dims = layout.dims
    clues = tuple(
        sum((a, b) in layout.mines for a, b in dims.neighbors(i, j)) for i, j in dims.white_cells
    )
    return ClueBoard(dims, clues)


def generate(spec: GenSpec) -> tuple[MineLayout, ClueBoard]:
    """Put a mine on each black cell with probability ``spec.p``."""
    rng = np.random.default_rng(spec.seed)
    draws = rng.random(len(spec.dims.black_cells))
    layout = MineLayout.from_bits(spec.dims, draws < spec.p)
    logger.debug(f"Generated {spec.dims.m}x{spec.dims.n} layout with {len(layout.mines)} mines")
    return layout, clues_of(layout)


def clue_matrix(dims: BoardDims) -> np.ndarray:
    """0/1 matrix mapping black-cell mine bits to white-cell clues."""
    column = {cell: k for k, cell in enumerate(dims.black_cells)}
    matrix = np.zeros((len(dims.white_cells), len(dims.black_cells)), dtype=np.int64)
    for row, (i, j) in enumerate(dims.white_cells):
        for cell in dims.neighbors(i, j):
            matrix[row, column[cell]] = 1
    return matrix


@functools.lru_cache(maxsize=256)
def clue_map_rank(dims: BoardDims) -> tuple[int, int]:
    """Exact rank of the clue map over the rationals, and the number of black cells."""
    matrix = clue_matrix(dims)
    rows, cols = matrix.shape
    rank = 0 if rows == 0 else int(sympy.Matrix(matrix.tolist()).rank())
    return rank, cols


def coprime_dims(dims: BoardDims) -> bool:
    """True iff gcd(m + 1, n + 1) = 1."""
    return math.gcd(dims.m + 1, dims.n + 1) == 1


class _Search:
    """Constraint propagation plus depth-first search over the black cells."""

    def __init__(self, clues: ClueBoard, cap: int) -> None:
        dims = clues.dims
        index = {cell: k for k, cell in enumerate(dims.black_cells)}
        self.dims = dims
        self.cap = cap
        self.constraints = [
            ([index[c] for c in dims.neighbors(i, j)], clue)
            for (i, j), clue in zip(dims.white_cells, clues.clues)
        ]
        self.watch: list[list[int]] = [[] for _ in dims.black_cells]
        for k, (cells, _) in enumerate(self.constraints):
            for v in cells:
                self.watch[v].append(k)
        self.solutions: list[MineLayout] = []
        self.nodes = 0

    def propagate(self, values: list[int | None]) -> bool:
        """Force cells implied by the clues; False on contradiction."""
        pending = list(range(len(self.constraints)))
        while pending:
            k = pending.pop()
            cells, clue = self.constraints[k]
            unknown = [v for v in cells if values[v] is None]
            needed = clue - sum(1 for v in cells if values[v] == 1)
            if needed < 0 or needed > len(unknown):
                return False
            if not unknown or 0 < needed < len(unknown):
                continue
            forced = 1 if needed == len(unknown) else 0
            for v in unknown:
                values[v] = forced
                pending.extend(self.watch[v])
        return True

    def search(self, values: list[int | None]) -> None:
        self.nodes += 1
        if len(self.solutions) >= self.cap or not self.propagate(values):
            return
        free = next((v for v, bit in enumerate(values) if bit is None), None)
        if free is None:
            self.solutions.append(MineLayout.from_bits(self.dims, values))
            return
        for bit in (0, 1):
            branch = list(values)
            branch[free] = bit
            self.search(branch)


def solve(clues: ClueBoard, cap: int = DEFAULT_SOLUTION_CAP) -> list[MineLayout]:
    """Layouts matching ``clues``, at most ``cap`` of them.

    The list is exhaustive when shorter than ``cap``.
    """
    if cap < 1:
        raise ValidationError("cap must be >= 1")
    rank, black = clue_map_rank(clues.dims)
    # A full-rank clue map has at most one preimage
    effective = 1 if rank == black else cap
    search = _Search(clues, effective)
    search.search([None] * black)
    logger.debug(
        f"Solved {clues.dims.m}x{clues.dims.n} board: "
        f"{len(search.solutions)} solution(s), {search.nodes} nodes"
    )
    return search.solutions


def enumerate_solutions(clues: ClueBoard) -> list[MineLayout]:
    """Every matching layout by checking all 2^black candidates.

    Raises:
        ValidationError: If the board has more than MAX_ORACLE_CELLS black cells.

    """
    dims = clues.dims
    black = len(dims.black_cells)
    if black > MAX_ORACLE_CELLS:
        raise ValidationError(
            f"exhaustive enumeration is limited to {MAX_ORACLE_CELLS} black cells"
        )
    matrix = clue_matrix(dims)
    target = np.array(clues.clues, dtype=np.int64)
    found: list[MineLayout] = []
    chunk = 1 << min(black, 16)
    for start in range(0, 1 << black, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        bits = (codes[:, None] >> np.arange(black, dtype=np.int64)) & 1
        hits = np.all(bits @ matrix.T == target, axis=1)
        found.extend(MineLayout.from_bits(dims, row) for row in bits[hits])
    return found


def is_unique(clues: ClueBoard) -> tuple[bool, MineLayout | None]:
    """Whether ``clues`` has exactly one solution, with a second one as witness if not.

    Raises:
        NoSolutionError: If no layout matches the clues.

    """
    solutions = solve(clues, cap=2)
    if not solutions:
        raise NoSolutionError("no mine layout matches these clues")
    if len(solutions) == 1:
        return True, None
    return False, solutions[1]


def transpose(layout: MineLayout) -> MineLayout:
    """Mirror a layout along the main diagonal; black cells stay black."""
    return MineLayout(layout.dims.transposed(), frozenset((j, i) for i, j in layout.mines))


def format_puzzle(clues: ClueBoard) -> str:
    """Puzzle text: digits on white cells, '#' on black cells."""
    shown = clues.as_dict()
    rows = [
        "".join(
            HIDDEN_GLYPH if BoardDims.is_black(i, j) else str(shown[(i, j)])
            for j in range(clues.dims.n)
        )
        for i in range(clues.dims.m)
    ]
    return "\n".join(rows) + "\n"


def format_solution(layout: MineLayout) -> str:
    """Solution text: '*' for mines, '.' for safe black cells, clues on white cells."""
    shown = clues_of(layout).as_dict()
    rows = []
    for i in range(layout.dims.m):
        row = []
        for j in range(layout.dims.n):
            if BoardDims.is_black(i, j):
                row.append(MINE_GLYPH if (i, j) in layout.mines else SAFE_GLYPH)
            else:
                row.append(str(shown[(i, j)]))
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def _board_rows(text: str) -> list[str]:
    rows = [line.replace(" ", "") for line in text.splitlines() if line.strip()]
    if not rows:
        raise ParsingError("empty board")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ParsingError("board rows must have equal length")
    return rows


def parse_puzzle(text: str) -> ClueBoard:
    """Inverse of ``format_puzzle``; '*' and '.' are also accepted on black cells.

    Raises:
        ParsingError: On malformed text or symbols on the wrong color.

    """
    rows = _board_rows(text)
    dims = BoardDims(len(rows), len(rows[0]))
    clues = []
    for i, row in enumerate(rows):
        for j, ch in enumerate(row):
            if BoardDims.is_black(i, j):
                if ch not in (HIDDEN_GLYPH, MINE_GLYPH, SAFE_GLYPH):
                    raise ParsingError(f"black cell ({i}, {j}) must be '#', got {ch!r}")
            elif not ch.isdigit():
                raise ParsingError(f"white cell ({i}, {j}) must be a digit, got {ch!r}")
            else:
                clues.append(int(ch))
    try:
        return ClueBoard(dims, tuple(clues))
    except ValidationError as exc:
        raise ParsingError(str(exc)) from exc


def parse_solution(text: str) -> MineLayout:
    """Read a layout written by ``format_solution``; white cells are ignored.

    Raises:
        ParsingError: On malformed text.

    """
    rows = _board_rows(text)
    dims = BoardDims(len(rows), len(rows[0]))
    mines = set()
    for i, row in enumerate(rows):
        for j, ch in enumerate(row):
            if not BoardDims.is_black(i, j):
                continue
            if ch not in (MINE_GLYPH, SAFE_GLYPH):
                raise ParsingError(f"black cell ({i}, {j}) must be '*' or '.', got {ch!r}")
            if ch == MINE_GLYPH:
                mines.add((i, j))
    return MineLayout(dims, frozenset(mines))


@dataclass(frozen=True)
class SweepReport:
    """Uniqueness of many random layouts of one board size."""

    dims: BoardDims
    coprime: bool
    tested: int
    ambiguous: int
    witness: tuple[MineLayout, MineLayout] | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return {
            "rows": self.dims.m,
            "cols": self.dims.n,
            "coprime": self.coprime,
            "tested": self.tested,
            "ambiguous": self.ambiguous,
            "witness": None
            if self.witness is None
            else [format_solution(layout) for layout in self.witness],
        }


def ambiguity_sweep(dims: BoardDims, layouts: int, seed: int) -> SweepReport:
    """Check ``layouts`` random boards of ``dims`` and record the first ambiguous one."""
    rng = np.random.default_rng(seed)
    ambiguous = 0
    witness = None
    for sub_seed in rng.integers(0, 2**31, size=layouts):
        layout, clues = generate(GenSpec(dims, DEFAULT_MINE_PROBABILITY, int(sub_seed)))
        unique, other = is_unique(clues)
        if not unique:
            ambiguous += 1
            if witness is None and other is not None:
                first = layout if layout != other else solve(clues, cap=2)[0]
                witness = (first, other)
    report = SweepReport(dims, coprime_dims(dims), layouts, ambiguous, witness)
    logger.info(
        f"Sweep {dims.m}x{dims.n}: {ambiguous}/{layouts} ambiguous (coprime={report.coprime})"
    )
    return report


def mines_worksheet(spec: GenSpec) -> WorksheetDoc:
    """Printable puzzle with its solution below the cut line.

    Raises:
        NonCoprimeDimsError: If the board could have several solutions.
        ValidationError: If the board is larger than WORKSHEET_MAX_DIM.

    """
    dims = spec.dims
    if not coprime_dims(dims):
        raise NonCoprimeDimsError(
            f"gcd({dims.m + 1}, {dims.n + 1}) != 1: a {dims.m}x{dims.n} sheet may be ambiguous"
        )
    if max(dims.m, dims.n) > WORKSHEET_MAX_DIM:
        raise ValidationError(f"worksheet boards are limited to {WORKSHEET_MAX_DIM} per side")
    layout, clues = generate(spec)
    puzzle = format_puzzle(clues).splitlines()
    solution = format_solution(layout).splitlines()
    blocks = (
        Caption("Each number tells how many mines touch its cell by a side."),
        Caption("Mines hide only in the shaded cells. Find all of them."),
        grid_from_glyphs(puzzle),
        grid_from_glyphs(solution, name="solution"),
        AnswerKey("solution"),
    )
    logger.info(f"Generated {dims.m}x{dims.n} minesweeper worksheet (seed={spec.seed})")
    title = f"Paper minesweeper {dims.m}x{dims.n} (seed {spec.seed})"
    return WorksheetDoc(title=title, blocks=blocks)

