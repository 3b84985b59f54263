"""Pytest configuration and fixtures for sheetforge tests.

Test Markers:
    @pytest.mark.slow - Exhaustive sweeps that take a long time to run
    @pytest.mark.integration - Command line end-to-end tests

Usage:
    Run all tests:
        pytest

    Skip slow tests (used in pre-commit):
        pytest -m "not slow"

    Run only integration tests:
        pytest -m integration
"""

import os
from pathlib import Path
from typing import Callable

import pytest

# No log files from test runs; must be set before sheetforge is imported
os.environ["SHEETFORGE_LOG_DIR"] = ""

from sheetforge.engines.mapgraph import MapDataset, bundled_europe  # noqa: E402
from sheetforge.engines.truck import Program  # noqa: E402
from sheetforge.engines.truck_dsl import parse_program  # noqa: E402


@pytest.fixture
def triangle_map() -> MapDataset:
    """Island of three countries that all border each other."""
    return MapDataset.build(
        ["A", "B", "C"],
        [("A", "B"), ("B", "C"), ("A", "C")],
        [((0.0, 0.0), ["A", "B", "C"])],
        name="triangle",
    )


@pytest.fixture
def path_map() -> MapDataset:
    """Three countries in a row: A-B-C."""
    return MapDataset.build(["A", "B", "C"], [("A", "B"), ("B", "C")], name="path")


@pytest.fixture
def clique4_map() -> MapDataset:
    """Four mutually adjacent countries."""
    ids = ["A", "B", "C", "D"]
    borders = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]
    return MapDataset.build(ids, borders, name="clique4")


@pytest.fixture(scope="session")
def europe() -> MapDataset:
    """The bundled Europe map."""
    return bundled_europe()


@pytest.fixture
def transfer_program() -> Program:
    """Carry the warehouse box to station 4."""
    return parse_program(
        """
        tape 9
        at 0 cargo:no station:nonempty -> pickup go:right
        at 4 cargo:yes -> drop go:halt
        at * cargo:yes -> keep go:right
        """,
        name="transfer",
    )


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    """Return a helper writing text into a file under ``tmp_path``."""

    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
