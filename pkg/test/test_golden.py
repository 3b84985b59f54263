"""Byte-for-byte comparison of rendered worksheets against files in test/golden.

Seeded sheets are recorded the first time the test meets a missing file.
Set SHEETFORGE_UPDATE_GOLDEN=1 to rewrite every file after an intended
rendering change.
"""

import os
from pathlib import Path

import pytest

from sheetforge.engines.ca1d import ca_worksheet
from sheetforge.engines.minesweeper import BoardDims, GenSpec, mines_worksheet
from sheetforge.utils.models import AnswerKey, Caption, Table, WorksheetDoc, grid_from_glyphs
from sheetforge.utils.render import ALIVE_GLYPH, DEAD_GLYPH, to_svg, to_text

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"
UPDATE = os.getenv("SHEETFORGE_UPDATE_GOLDEN") == "1"


def assert_golden(name: str, actual: str) -> None:
    """Compare ``actual`` with the golden file ``name``, recording it if missing."""
    golden = GOLDEN_DIR / name
    if UPDATE or not golden.exists():
        golden.write_bytes(actual.encode("utf-8"))
    assert golden.read_bytes().decode("utf-8") == actual


def puzzle_doc() -> WorksheetDoc:
    """Hand-built document with every block kind."""
    return WorksheetDoc(
        title="Puzzle & friends",
        blocks=(
            Caption("Shade the cells."),
            grid_from_glyphs([ALIVE_GLYPH + DEAD_GLYPH, "#1"]),
            Table((("a", "bb"), ("ccc", "d")), header=True, name="key"),
            AnswerKey("key"),
        ),
    )


class TestFixedDocument:
    """The hand-built document against hand-checked files."""

    def test_text(self) -> None:
        """Text layout, cut line and table padding."""
        assert (GOLDEN_DIR / "puzzle.txt").exists()
        assert_golden("puzzle.txt", to_text(puzzle_doc()))

    def test_svg(self) -> None:
        """Coordinates, fills, escaping and the cut line."""
        assert (GOLDEN_DIR / "puzzle.svg").exists()
        assert_golden("puzzle.svg", to_svg(puzzle_doc()))


class TestSeededSheets:
    """Generated sheets for fixed seeds stay stable."""

    def test_ca_descendants_text(self) -> None:
        """Descendants sheet on eight cells, seed 3."""
        assert_golden("ca_descendants_8_seed3.txt", to_text(ca_worksheet(3, "descendants", 8)))

    def test_ca_ancestor_svg(self) -> None:
        """Ancestor sheet on eight cells, seed 3."""
        assert_golden("ca_ancestor_8_seed3.svg", to_svg(ca_worksheet(3, "ancestor", 8)))

    @pytest.mark.parametrize("seed", [7, 11])
    def test_mines_svg(self, seed: int) -> None:
        """4x5 minesweeper sheet."""
        doc = mines_worksheet(GenSpec(BoardDims(4, 5), 0.5, seed))

        assert_golden(f"mines_4x5_seed{seed}.svg", to_svg(doc))
