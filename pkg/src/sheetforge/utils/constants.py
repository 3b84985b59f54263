"""Constants for the sheetforge project."""

import os
from enum import Enum
from pathlib import Path

from dotenv import load_dotenv

load_dotenv(".env")

# Logging configuration (never affects command output)
LOG_DIR: str = os.getenv("SHEETFORGE_LOG_DIR", "logs")
LOG_LEVEL: str = os.getenv("SHEETFORGE_LOG_LEVEL", "WARNING").upper()

# Output envelopes
JSON_SCHEMA_VERSION = 1

# Cellular automaton
MAX_ORACLE_CELLS = 20  # Exhaustive enumeration refuses larger lattices
CA_WORKSHEET_MAX_SIZE = 44  # ten extra cells per side must fit an SVG row
CA_WORKSHEET_STEPS = 10  # "until the 10th descendant"

# Truck machine
DEFAULT_TAPE_LENGTH = 9  # warehouse + 8 stations
DEFAULT_MAX_STEPS = 10_000
MAX_LABEL_LENGTH = 8

# Minesweeper
DEFAULT_MINE_PROBABILITY = 0.5
DEFAULT_SOLUTION_CAP = 2
WORKSHEET_MAX_DIM = 12

# Rendering
SVG_CELL_SIZE = 24
SVG_MAX_GRID = 64
SVG_PAGE_WIDTH = 595.0  # A4 proportions in points
SVG_PAGE_HEIGHT = 842.0
SVG_MARGIN = 36.0
SVG_LINE_HEIGHT = 16.0
CUT_LINE = "-- cut here --"

# Bundled resources
PACKAGE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = PACKAGE_DIR / "data"
PROGRAMS_DIR = PACKAGE_DIR / "programs"
EUROPE_DATASET = DATA_DIR / "europe.json"


class OutputFormat(str, Enum):
    """Output encodings supported by the command line."""

    TEXT = "text"
    SVG = "svg"
    JSON = "json"
