"""Renderer-neutral worksheet document model."""

from dataclasses import asdict, dataclass, field
from enum import Enum
import sys
from typing import Any, Mapping, Union

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

from sheetforge.utils.errors import ValidationError


class BlockKind(str, Enum):
    """Kinds of blocks a worksheet is made of."""

    GRID = "grid"
    TABLE = "table"
    CAPTION = "caption"
    ANSWER_KEY = "answer_key"


@dataclass(frozen=True)
class Cell:
    """A single grid cell: a glyph and whether the square is shaded."""

    glyph: str = " "
    filled: bool = False


@dataclass(frozen=True)
class Grid:
    """Rectangular grid of cells, e.g. a CA row history or a minesweeper board."""

    cells: tuple[tuple[Cell, ...], ...]
    name: str = ""
    kind: BlockKind = BlockKind.GRID

    @property
    def rows(self) -> int:
        """Number of grid rows."""
        return len(self.cells)

    @property
    def cols(self) -> int:
        """Number of grid columns."""
        return len(self.cells[0]) if self.cells else 0


@dataclass(frozen=True)
class Table:
    """Rows of strings, the first row optionally being a header."""

    rows: tuple[tuple[str, ...], ...]
    header: bool = False
    name: str = ""
    kind: BlockKind = BlockKind.TABLE


@dataclass(frozen=True)
class Caption:
    """Free text line."""

    text: str
    name: str = ""
    kind: BlockKind = BlockKind.CAPTION


@dataclass(frozen=True)
class AnswerKey:
    """Reference to a named block that belongs below the cut line."""

    ref: str
    name: str = ""
    kind: BlockKind = BlockKind.ANSWER_KEY


Block = Union[Grid, Table, Caption, AnswerKey]


@dataclass(frozen=True)
class WorksheetDoc:
    """Title plus ordered blocks; answer keys point at blocks by name."""

    title: str
    blocks: tuple[Block, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        """Check grid dims and answer-key references."""
        names = {b.name for b in self.blocks if b.name}
        for block in self.blocks:
            if isinstance(block, Grid):
                if block.rows < 1 or block.cols < 1:
                    raise ValidationError("grid dimensions must be at least 1x1")
                if any(len(row) != block.cols for row in block.cells):
                    raise ValidationError("grid rows must have equal length")
            if isinstance(block, AnswerKey) and block.ref not in names:
                raise ValidationError(f"answer key references unknown block {block.ref!r}")

    @property
    def answer_refs(self) -> set[str]:
        """Names of the blocks shown only in the answer section."""
        return {b.ref for b in self.blocks if isinstance(b, AnswerKey)}

    def body(self) -> list[Block]:
        """Blocks printed above the cut line."""
        refs = self.answer_refs
        return [
            b for b in self.blocks if not isinstance(b, AnswerKey) and b.name not in refs
        ]

    def answers(self) -> list[Block]:
        """Referenced blocks, in the order of their answer keys."""
        by_name = {b.name: b for b in self.blocks if b.name}
        return [by_name[b.ref] for b in self.blocks if isinstance(b, AnswerKey)]

    def to_dict(self) -> dict[str, Any]:
        """Convert to JSON-serializable dict."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Self:
        """Create from a mapping produced by ``to_dict``."""
        blocks: list[Block] = []
        for raw in data.get("blocks", []) or []:
            kind = BlockKind(raw.get("kind", "caption"))
            name = raw.get("name", "")
            if kind is BlockKind.GRID:
                cells = tuple(
                    tuple(Cell(c.get("glyph", " "), bool(c.get("filled"))) for c in row)
                    for row in raw.get("cells", [])
                )
                blocks.append(Grid(cells=cells, name=name))
            elif kind is BlockKind.TABLE:
                rows = tuple(tuple(str(v) for v in row) for row in raw.get("rows", []))
                blocks.append(Table(rows=rows, header=bool(raw.get("header")), name=name))
            elif kind is BlockKind.ANSWER_KEY:
                blocks.append(AnswerKey(ref=raw.get("ref", ""), name=name))
            else:
                blocks.append(Caption(text=raw.get("text", ""), name=name))
        return cls(title=data.get("title", ""), blocks=tuple(blocks))


def grid_from_glyphs(
    rows: list[str], filled_glyphs: frozenset[str] = frozenset(), name: str = ""
) -> Grid:
    """Build a grid from equal-length strings, shading the listed glyphs."""
    return Grid(
        cells=tuple(tuple(Cell(g, g in filled_glyphs) for g in row) for row in rows),
        name=name,
    )
