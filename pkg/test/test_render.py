"""Unit tests for text and SVG rendering."""

import xml.etree.ElementTree as ET

import pytest

from sheetforge.utils.constants import CUT_LINE
from sheetforge.utils.errors import OversizeGridError
from sheetforge.utils.models import (
    AnswerKey,
    Caption,
    Cell,
    Grid,
    Table,
    WorksheetDoc,
    grid_from_glyphs,
)
from sheetforge.utils.render import ALIVE_GLYPH, DEAD_GLYPH, to_svg, to_text

SVG_NS = "{http://www.w3.org/2000/svg}"


def puzzle_doc() -> WorksheetDoc:
    """Document with every block kind."""
    return WorksheetDoc(
        title="Puzzle & friends",
        blocks=(
            Caption("Shade the cells."),
            grid_from_glyphs([ALIVE_GLYPH + DEAD_GLYPH, "#1"]),
            Table((("a", "bb"), ("ccc", "d")), header=True, name="key"),
            AnswerKey("key"),
        ),
    )


class TestText:
    """Tests for to_text."""

    def test_title_only(self) -> None:
        """An empty document is its title line."""
        assert to_text(WorksheetDoc(title="Nothing")) == "Nothing\n"

    def test_grid_glyphs_space_separated(self) -> None:
        """A 2x2 grid prints one row per line."""
        doc = WorksheetDoc(title="G", blocks=(grid_from_glyphs(["ab", "cd"]),))

        assert to_text(doc) == "G\n\na b\nc d\n"

    def test_answers_after_cut_line(self) -> None:
        """The table is printed once, after the cut line."""
        lines = to_text(puzzle_doc()).splitlines()
        cut = lines.index(CUT_LINE)

        assert lines[:3] == ["Puzzle & friends", "", "Shade the cells."]
        assert lines[cut + 2 :] == ["a   | bb", "----+---", "ccc | d"]
        assert "ccc | d" not in lines[:cut]

    def test_deterministic(self) -> None:
        """Rendering twice gives identical text."""
        assert to_text(puzzle_doc()) == to_text(puzzle_doc())


class TestSvg:
    """Tests for to_svg."""

    def test_well_formed(self) -> None:
        """The output parses as XML with an svg root."""
        root = ET.fromstring(to_svg(puzzle_doc()).encode("utf-8"))

        assert root.tag == f"{SVG_NS}svg"
        title = root.find(f"{SVG_NS}title")
        assert title is not None
        assert title.text == "Puzzle & friends"

    def test_one_rect_per_cell(self) -> None:
        """Each grid cell is a rectangle next to the page background."""
        root = ET.fromstring(to_svg(puzzle_doc()).encode("utf-8"))

        assert len(root.findall(f"{SVG_NS}rect")) == 1 + 4

    def test_cut_line_drawn(self) -> None:
        """Documents with answers get a dashed line."""
        root = ET.fromstring(to_svg(puzzle_doc()).encode("utf-8"))

        assert len(root.findall(f"{SVG_NS}line")) == 1

    def test_deterministic(self) -> None:
        """Rendering twice gives identical bytes."""
        assert to_svg(puzzle_doc()) == to_svg(puzzle_doc())

    def test_oversize_grid(self) -> None:
        """Grids over 64 cells a side are refused."""
        grid = Grid(tuple((Cell("x"),) for _ in range(65)))

        with pytest.raises(OversizeGridError):
            to_svg(WorksheetDoc(title="tall", blocks=(grid,)))

    def test_caption_text_kept_literal(self) -> None:
        """Placeholder-like text in a caption is not rewritten."""
        doc = WorksheetDoc(title="x", blocks=(Caption("width is {right}"),))
        root = ET.fromstring(to_svg(doc).encode("utf-8"))

        assert [t.text for t in root.findall(f"{SVG_NS}text")] == ["x", "width is {right}"]

    def test_cut_line_spans_page(self) -> None:
        """The cut line ends one margin before the right edge."""
        root = ET.fromstring(to_svg(puzzle_doc()).encode("utf-8"))
        line = root.find(f"{SVG_NS}line")

        assert line is not None
        assert float(line.get("x2", "0")) == pytest.approx(
            float(root.get("width", "0")) - float(line.get("x1", "0")), abs=0.011
        )
