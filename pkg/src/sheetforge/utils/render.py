"""Text and SVG emission of worksheet documents.

Both renderers are byte-deterministic: element order follows block order and
every coordinate is printed with exactly two decimals.
"""

from xml.sax.saxutils import escape, quoteattr

from sheetforge.utils.constants import (
    CUT_LINE,
    SVG_CELL_SIZE,
    SVG_LINE_HEIGHT,
    SVG_MARGIN,
    SVG_MAX_GRID,
    SVG_PAGE_HEIGHT,
    SVG_PAGE_WIDTH,
)
from sheetforge.utils.errors import OversizeGridError
from sheetforge.utils.logger import get_logger
from sheetforge.utils.models import Block, Caption, Grid, Table, WorksheetDoc

logger = get_logger(__name__)

ALIVE_GLYPH = "■"
DEAD_GLYPH = "·"
HIDDEN_GLYPH = "#"

# Glyphs drawn as shading only, never as text
_SILENT_GLYPHS = {" ", ALIVE_GLYPH, DEAD_GLYPH, HIDDEN_GLYPH}
_FILL_DARK = "#333333"
_FILL_LIGHT = "#d9d9d9"
_FILL_NONE = "#ffffff"


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _table_lines(table: Table) -> list[str]:
    if not table.rows:
        return []
    ncols = max(len(r) for r in table.rows)
    rows = [list(r) + [""] * (ncols - len(r)) for r in table.rows]
    widths = [max(len(r[c]) for r in rows) for c in range(ncols)]
    lines = [" | ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    if table.header:
        lines.insert(1, "-+-".join("-" * w for w in widths))
    return lines


def _block_lines(block: Block) -> list[str]:
    if isinstance(block, Grid):
        return [" ".join(cell.glyph for cell in row) for row in block.cells]
    if isinstance(block, Table):
        return _table_lines(block)
    if isinstance(block, Caption):
        return block.text.splitlines() or [""]
    return []


def to_text(doc: WorksheetDoc) -> str:
    """Render ``doc`` as monospace UTF-8 text.

    Answer blocks are printed after a cut line.
    """
    lines = [doc.title]
    for block in doc.body():
        lines.append("")
        lines.extend(_block_lines(block))
    answers = doc.answers()
    if answers:
        lines.append("")
        lines.append(CUT_LINE)
        for block in answers:
            lines.append("")
            lines.extend(_block_lines(block))
    return "\n".join(lines) + "\n"


def _cut_line(y: float, right: float) -> str:
    return (
        f'<line x1="{_fmt(SVG_MARGIN)}" y1="{_fmt(y)}" x2="{_fmt(right)}" '
        f'y2="{_fmt(y)}" stroke="#000000" stroke-dasharray="6.00 4.00"/>'
    )


class _SvgWriter:
    """Accumulates SVG elements top to bottom."""

    def __init__(self) -> None:
        self.elements: list[str] = []
        # element index -> y of a cut line, drawn once the page width is known
        self.cuts: dict[int, float] = {}
        self.y = SVG_MARGIN
        self.width = 0.0

    def text(self, content: str, x: float, size: float = 12.0, bold: bool = False) -> None:
        weight = ' font-weight="bold"' if bold else ""
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(self.y + size)}" font-size="{_fmt(size)}"'
            f'{weight}>{escape(content)}</text>'
        )
        self.width = max(self.width, x + 0.6 * size * len(content))
        self.y += max(SVG_LINE_HEIGHT, size + 4.0)

    def grid(self, grid: Grid) -> None:
        size = float(SVG_CELL_SIZE)
        for r, row in enumerate(grid.cells):
            for c, cell in enumerate(row):
                x = SVG_MARGIN + c * size
                y = self.y + r * size
                if cell.filled or cell.glyph == ALIVE_GLYPH:
                    fill = _FILL_DARK
                elif cell.glyph == HIDDEN_GLYPH:
                    fill = _FILL_LIGHT
                else:
                    fill = _FILL_NONE
                self.elements.append(
                    f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(size)}" '
                    f'height="{_fmt(size)}" fill="{fill}" stroke="#000000" '
                    'stroke-width="1.00"/>'
                )
                if cell.glyph not in _SILENT_GLYPHS:
                    self.elements.append(
                        f'<text x="{_fmt(x + size / 2)}" y="{_fmt(y + size * 0.7)}" '
                        f'font-size="{_fmt(size * 0.6)}" text-anchor="middle">'
                        f"{escape(cell.glyph)}</text>"
                    )
        self.width = max(self.width, SVG_MARGIN + grid.cols * size)
        self.y += grid.rows * size + SVG_LINE_HEIGHT

    def cut(self) -> None:
        self.cuts[len(self.elements)] = self.y + SVG_LINE_HEIGHT / 2
        self.elements.append("")
        self.y += SVG_LINE_HEIGHT

    def finish(self, right: float) -> list[str]:
        """Elements in order, with cut lines reaching ``right``."""
        return [
            _cut_line(self.cuts[i], right) if i in self.cuts else element
            for i, element in enumerate(self.elements)
        ]

    def block(self, block: Block) -> None:
        if isinstance(block, Grid):
            self.grid(block)
        else:
            for line in _block_lines(block):
                self.text(line, SVG_MARGIN)
            self.y += SVG_LINE_HEIGHT / 2


def to_svg(doc: WorksheetDoc) -> str:
    """Render ``doc`` as a standalone SVG 1.1 document.

    Raises:
        OversizeGridError: If a grid exceeds the supported dimensions.

    """
    for block in doc.blocks:
        if isinstance(block, Grid) and (
            block.rows > SVG_MAX_GRID or block.cols > SVG_MAX_GRID
        ):
            raise OversizeGridError(
                f"grid {block.rows}x{block.cols} exceeds {SVG_MAX_GRID}x{SVG_MAX_GRID}"
            )

    writer = _SvgWriter()
    writer.text(doc.title, SVG_MARGIN, size=18.0, bold=True)
    for block in doc.body():
        writer.block(block)
    answers = doc.answers()
    if answers:
        writer.cut()
        for block in answers:
            writer.block(block)

    # Smallest A4-proportioned box containing the content
    ratio = SVG_PAGE_HEIGHT / SVG_PAGE_WIDTH
    width = max(SVG_PAGE_WIDTH, writer.width + SVG_MARGIN, (writer.y + SVG_MARGIN) / ratio)
    height = width * ratio
    right = width - SVG_MARGIN

    logger.debug(f"Rendered SVG with {len(writer.elements)} elements")
    head = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0.00 0.00 {_fmt(width)} {_fmt(height)}" '
        'font-family="monospace">\n'
        f"<title>{escape(doc.title)}</title>\n"
        f'<rect x="0.00" y="0.00" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'fill={quoteattr(_FILL_NONE)}/>\n'
    )
    body = "\n".join(writer.finish(right))
    return head + body + "\n</svg>\n"
