"""End-to-end tests for the command line."""

import json
from pathlib import Path
from typing import Callable

import pytest

from sheetforge.cli import main
from sheetforge.engines.ca1d import BitConfiguration, ca_worksheet, parse_config, predecessors
from sheetforge.engines.minesweeper import BoardDims, GenSpec, mines_worksheet
from sheetforge.utils.models import WorksheetDoc
from sheetforge.utils.render import to_svg

WriteFile = Callable[[str, str], Path]

pytestmark = pytest.mark.integration


class TestCa:
    """Tests for the ca commands."""

    def test_evolve(self, capsys: pytest.CaptureFixture[str]) -> None:
        """One step of cyc:1000."""
        code = main(["ca", "evolve", "--config", "cyc:1000", "--steps", "1"])

        assert code == 0
        assert capsys.readouterr().out == "cyc:0101\n"

    def test_pred_with_check(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Predecessors of the empty cyclic row."""
        code = main(["ca", "pred", "--config", "cyc:000", "--check"])

        assert code == 0
        assert capsys.readouterr().out.split() == ["cyc:000", "cyc:111"]

    def test_json_envelope(self, capsys: pytest.CaptureFixture[str]) -> None:
        """JSON output is wrapped with the schema version and command name."""
        code = main(["ca", "step", "--config", "cyc:1000", "--format", "json"])
        data = json.loads(capsys.readouterr().out)

        assert code == 0
        assert data["schema"] == 1
        assert data["command"] == "ca step"
        assert data["result"] is not None

    def test_bad_config_is_usage_error(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Malformed configurations exit with 2."""
        assert main(["ca", "step", "--config", "1000"]) == 2
        assert "sheetforge:" in capsys.readouterr().err

    def test_missing_command(self) -> None:
        """argparse errors exit with 2."""
        assert main(["ca"]) == 2


class TestTm:
    """Tests for the tm commands."""

    def test_run_transfer(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The bundled transfer program moves the box to station 4."""
        code = main(
            ["tm", "run", "--program", "transfer.tm", "--tape", "0:1", "--max-steps", "1000"]
        )
        out = capsys.readouterr().out

        assert code == 0
        assert out.startswith("halted after")
        assert "tape 4:1\n" in out

    def test_stuck_run_exits_one(self, write_file: WriteFile) -> None:
        """A run that does not halt is a failure."""
        path = write_file("stuck.tm", "at 0 -> keep go:right\n")

        assert main(["tm", "run", "--program", str(path)]) == 1

    def test_syntax_error_exits_two(
        self, write_file: WriteFile, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Program syntax errors are usage errors."""
        path = write_file("bad.tm", "at 0 -> lift go:halt\n")

        assert main(["tm", "run", "--program", str(path)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_verify_reference(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The bundled adding solution passes."""
        assert main(["tm", "verify", "--task", "adding"]) == 0
        capsys.readouterr()

    def test_missing_program(self) -> None:
        """Unknown program files are usage errors."""
        assert main(["tm", "run", "--program", "no-such-program"]) == 2


class TestMines:
    """Tests for the mines commands."""

    def test_non_coprime_worksheet(self, capsys: pytest.CaptureFixture[str]) -> None:
        """A 2x2 sheet is refused."""
        args = ["--rows", "2", "--cols", "2", "--prob", "0.5", "--seed", "1", "--worksheet"]
        code = main(["mines", "gen", *args])

        assert code == 1
        assert "NonCoprimeDimsError" in capsys.readouterr().err

    def test_gen_prints_board(self, capsys: pytest.CaptureFixture[str]) -> None:
        """One line per row."""
        assert main(["mines", "gen", "--rows", "4", "--cols", "5", "--seed", "3"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 4

    def test_rank(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The 2x3 clue map has full rank."""
        assert main(["mines", "rank", "--rows", "2", "--cols", "3"]) == 0
        assert capsys.readouterr().out == "rank 3 of 3 black cells, coprime true\n"

    def test_solve_and_unique(
        self, write_file: WriteFile, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """An ambiguous 2x2 puzzle has two solutions."""
        path = write_file("square.txt", "#1\n1#\n")

        assert main(["mines", "solve", "--puzzle", str(path)]) == 0
        assert capsys.readouterr().out.count("*") == 2
        assert main(["mines", "unique", "--puzzle", str(path)]) == 0
        assert capsys.readouterr().out.startswith("ambiguous")


class TestMap:
    """Tests for the map commands."""

    def test_degree_of_moldova(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Moldova has two neighbours."""
        assert main(["map", "query", "degree", "--country", "MD"]) == 0
        assert capsys.readouterr().out == "2\n"

    def test_degree_needs_country(self) -> None:
        """Missing --country is a usage error."""
        assert main(["map", "query", "degree"]) == 2

    def test_unknown_country(self) -> None:
        """Unknown ids are domain errors."""
        assert main(["map", "query", "degree", "--country", "XX"]) == 1

    def test_validate_reports_problems(
        self, write_file: WriteFile, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Problems are listed and the exit code is 1."""
        data = {"countries": [{"id": "A", "lat": 0, "lon": 0}], "borders": [["A", "B"]]}
        path = write_file("bad.json", json.dumps(data))

        assert main(["map", "validate", "--data", str(path)]) == 1
        assert "'B'" in capsys.readouterr().out

    def test_color_json(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The coloring covers every country."""
        assert main(["map", "color", "--format", "json"]) == 0
        coloring = json.loads(capsys.readouterr().out)["result"]

        assert coloring["PT"] != coloring["ES"]


class TestRender:
    """Tests for rendering saved worksheets."""

    def test_render_saved_envelope(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """A JSON worksheet renders to the same text as the direct command."""
        saved = tmp_path / "sheet.json"
        args = ["mines", "worksheet", "--rows", "1", "--cols", "2", "--seed", "0"]

        assert main([*args, "--format", "json", "--out", str(saved)]) == 0
        assert main([*args]) == 0
        direct = capsys.readouterr().out
        assert main(["render", "--doc", str(saved)]) == 0
        assert capsys.readouterr().out == direct
        assert direct.startswith("Paper minesweeper 1x2 (seed 0)\n")

    def test_svg(self, capsys: pytest.CaptureFixture[str]) -> None:
        """SVG output is an XML document."""
        args = ["--kind", "descendants", "--size", "8", "--seed", "2", "--format", "svg"]

        assert main(["ca", "worksheet", *args]) == 0
        assert capsys.readouterr().out.startswith("<?xml")

    def test_bad_json(self, write_file: WriteFile) -> None:
        """Unparseable documents are usage errors."""
        assert main(["render", "--doc", str(write_file("doc.json", "{"))]) == 2


class TestSeed:
    """Tests for the --seed option."""

    @pytest.mark.parametrize(
        "argv",
        [
            ["ca", "worksheet", "--kind", "descendants", "--size", "8"],
            ["mines", "gen", "--rows", "3", "--cols", "4"],
            ["mines", "worksheet", "--rows", "3", "--cols", "4"],
            ["mines", "sweep", "--rows", "2", "--cols", "2"],
        ],
    )
    def test_generators_require_seed(
        self, argv: list[str], capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Every randomised command refuses to run without --seed."""
        assert main(argv) == 2
        assert "--seed" in capsys.readouterr().err


class TestOut:
    """Tests for the --out option."""

    def test_unwritable_target_is_usage_error(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """A path under a missing directory exits with 2 and a message."""
        target = tmp_path / "missing" / "x.txt"

        assert main(["ca", "step", "--config", "cyc:1000", "--out", str(target)]) == 2
        assert "cannot write" in capsys.readouterr().err
        assert not target.exists()

    def test_directory_target_is_usage_error(self, tmp_path: Path) -> None:
        """A directory is not a valid output file."""
        assert main(["ca", "step", "--config", "cyc:1000", "--out", str(tmp_path)]) == 2

    def test_writes_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Output goes to the file instead of stdout."""
        target = tmp_path / "step.txt"

        assert main(["ca", "step", "--config", "cyc:1000", "--out", str(target)]) == 0
        assert target.read_text(encoding="utf-8") == "cyc:0101\n"
        assert capsys.readouterr().out == ""


class TestRoundTrip:
    """Command output read back into library results."""

    def test_pred_json(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The JSON predecessors are exactly the library's."""
        assert main(["ca", "pred", "--config", "cyc:0101", "--format", "json"]) == 0
        result = json.loads(capsys.readouterr().out)["result"]

        found = {BitConfiguration.from_dict(item) for item in result}
        assert found == predecessors(parse_config("cyc:0101"))

    def test_worksheet_json(self, capsys: pytest.CaptureFixture[str]) -> None:
        """A worksheet envelope rebuilds the generated document."""
        args = ["--kind", "ancestor", "--size", "8", "--seed", "3", "--format", "json"]

        assert main(["ca", "worksheet", *args]) == 0
        result = json.loads(capsys.readouterr().out)["result"]
        assert WorksheetDoc.from_dict(result) == ca_worksheet(3, "ancestor", 8)

    def test_mines_svg_matches_renderer(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The command prints the renderer's bytes unchanged."""
        args = ["--rows", "4", "--cols", "5", "--prob", "0.5", "--seed", "7", "--format", "svg"]

        assert main(["mines", "worksheet", *args]) == 0
        expected = to_svg(mines_worksheet(GenSpec(BoardDims(4, 5), 0.5, 7)))
        assert capsys.readouterr().out == expected
