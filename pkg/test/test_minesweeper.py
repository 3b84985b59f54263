"""Unit tests for paper minesweeper."""

import math

import pytest

from sheetforge.engines.minesweeper import (
    BoardDims,
    ClueBoard,
    GenSpec,
    MineLayout,
    ambiguity_sweep,
    clue_map_rank,
    clues_of,
    coprime_dims,
    enumerate_solutions,
    format_puzzle,
    format_solution,
    generate,
    is_unique,
    mines_worksheet,
    parse_puzzle,
    parse_solution,
    solve,
    transpose,
)
from sheetforge.utils.errors import (
    NonCoprimeDimsError,
    NoSolutionError,
    ParsingError,
    ValidationError,
)
from sheetforge.utils.models import Grid
from sheetforge.utils.render import HIDDEN_GLYPH

SQUARE = BoardDims(2, 2)


class TestBoard:
    """Tests for BoardDims, MineLayout and ClueBoard."""

    def test_chessboard_coloring(self) -> None:
        """(0, 0) is black and colors alternate."""
        dims = BoardDims(2, 3)

        assert dims.black_cells == ((0, 0), (0, 2), (1, 1))
        assert dims.white_cells == ((0, 1), (1, 0), (1, 2))

    def test_empty_board_rejected(self) -> None:
        """Boards are at least 1x1."""
        with pytest.raises(ValidationError):
            BoardDims(0, 3)

    def test_mine_on_white_cell(self) -> None:
        """Mines only go on black cells."""
        with pytest.raises(ValidationError):
            MineLayout(SQUARE, frozenset({(0, 1)}))

    def test_mine_off_board(self) -> None:
        """Mines stay inside the board."""
        with pytest.raises(ValidationError):
            MineLayout(SQUARE, frozenset({(2, 2)}))

    def test_clue_above_neighbour_count(self) -> None:
        """A corner white cell has two neighbours."""
        with pytest.raises(ValidationError):
            ClueBoard(SQUARE, (3, 0))

    def test_wrong_clue_count(self) -> None:
        """One clue per white cell."""
        with pytest.raises(ValidationError):
            ClueBoard(SQUARE, (1,))

    def test_layout_dict_round_trip(self) -> None:
        """to_dict and from_dict agree."""
        layout = MineLayout(BoardDims(3, 4), frozenset({(0, 0), (2, 2)}))

        assert MineLayout.from_dict(layout.to_dict()) == layout


class TestClues:
    """Tests for clues_of and generate."""

    def test_single_mine(self) -> None:
        """1x2 with a mine at (0, 0) shows 1."""
        layout = MineLayout(BoardDims(1, 2), frozenset({(0, 0)}))

        assert clues_of(layout).clues == (1,)

    def test_diagonal_mines(self) -> None:
        """Both white cells of a 2x2 board see both mines."""
        layout = MineLayout(SQUARE, frozenset({(0, 0), (1, 1)}))

        assert clues_of(layout).clues == (2, 2)

    def test_probability_bounds(self) -> None:
        """p = 0 places nothing, p = 1 fills every black cell."""
        dims = BoardDims(3, 4)
        empty, _ = generate(GenSpec(dims, 0.0, 5))
        full, _ = generate(GenSpec(dims, 1.0, 5))

        assert empty.mines == frozenset()
        assert full.mines == frozenset(dims.black_cells)

    def test_generate_is_deterministic(self) -> None:
        """The same seed gives the same board."""
        spec = GenSpec(BoardDims(4, 5), 0.5, 11)

        assert generate(spec) == generate(spec)

    def test_clues_match_layout(self) -> None:
        """The returned clues belong to the returned layout."""
        layout, clues = generate(GenSpec(BoardDims(4, 5), 0.5, 3))

        assert clues == clues_of(layout)

    def test_bad_probability(self) -> None:
        """p must be a probability."""
        with pytest.raises(ValidationError):
            GenSpec(SQUARE, 1.5)


class TestSolve:
    """Tests for solve, enumerate_solutions and is_unique."""

    def test_one_by_two(self) -> None:
        """The single black cell is forced."""
        clues = ClueBoard(BoardDims(1, 2), (1,))

        assert solve(clues) == [MineLayout(BoardDims(1, 2), frozenset({(0, 0)}))]

    def test_square_is_ambiguous(self) -> None:
        """Clues (1, 1) fit a mine on either diagonal cell."""
        solutions = solve(ClueBoard(SQUARE, (1, 1)))

        assert {s.mines for s in solutions} == {frozenset({(0, 0)}), frozenset({(1, 1)})}

    def test_two_by_three_is_unique(self) -> None:
        """Every layout of a 2x3 board can be read back from its clues."""
        dims = BoardDims(2, 3)
        for code in range(8):
            layout = MineLayout.from_bits(dims, [(code >> k) & 1 for k in range(3)])
            assert solve(clues_of(layout)) == [layout]

    def test_cap(self) -> None:
        """At most cap solutions are returned."""
        clues = ClueBoard(SQUARE, (1, 1))

        assert len(solve(clues, cap=1)) == 1
        with pytest.raises(ValidationError):
            solve(clues, cap=0)

    def test_no_solution(self) -> None:
        """Contradictory clues give an empty list."""
        clues = ClueBoard(SQUARE, (0, 2))

        assert solve(clues) == []
        with pytest.raises(NoSolutionError):
            is_unique(clues)

    def test_is_unique_witness(self) -> None:
        """An ambiguous board comes with a second layout."""
        unique, other = is_unique(ClueBoard(SQUARE, (1, 1)))

        assert not unique
        assert other is not None
        assert clues_of(other).clues == (1, 1)

    def test_is_unique_single_cell(self) -> None:
        """A 1x1 board has no clues, so both layouts fit."""
        unique, other = is_unique(ClueBoard(BoardDims(1, 1), ()))

        assert not unique
        assert other is not None

    def test_is_unique_true(self) -> None:
        """A coprime board is unique."""
        _, clues = generate(GenSpec(BoardDims(4, 5), 0.5, 2))

        assert is_unique(clues) == (True, None)

    def test_search_agrees_with_enumeration(self) -> None:
        """The solver finds exactly the layouts the brute force finds."""
        for seed in range(10):
            _, clues = generate(GenSpec(BoardDims(3, 3), 0.5, seed))
            found = {s.mines for s in solve(clues, cap=100)}
            assert found == {s.mines for s in enumerate_solutions(clues)}

    def test_enumeration_limit(self) -> None:
        """The brute force refuses large boards."""
        _, clues = generate(GenSpec(BoardDims(7, 7), 0.5, 0))

        with pytest.raises(ValidationError):
            enumerate_solutions(clues)


class TestRank:
    """Tests for clue_map_rank and coprime_dims."""

    @pytest.mark.parametrize(
        "m, n, expected",
        [(1, 2, (1, 1)), (2, 2, (1, 2)), (2, 3, (3, 3)), (1, 1, (0, 1))],
    )
    def test_known_ranks(self, m: int, n: int, expected: tuple[int, int]) -> None:
        """Small boards with hand-computed ranks."""
        assert clue_map_rank(BoardDims(m, n)) == expected

    def test_coprime_examples(self) -> None:
        """gcd(m + 1, n + 1) decides."""
        assert coprime_dims(BoardDims(1, 2))
        assert not coprime_dims(SQUARE)
        assert coprime_dims(BoardDims(4, 5))

    def test_full_rank_iff_coprime(self) -> None:
        """The clue map is injective exactly on coprime boards."""
        for m in range(1, 7):
            for n in range(1, 7):
                dims = BoardDims(m, n)
                rank, black = clue_map_rank(dims)
                assert (rank == black) == coprime_dims(dims), (m, n)

    @pytest.mark.slow
    def test_coprime_boards_have_full_rank_up_to_12(self) -> None:
        """Full rank on every coprime board up to 12x12."""
        for m in range(1, 13):
            for n in range(m, 13):
                dims = BoardDims(m, n)
                if coprime_dims(dims):
                    rank, black = clue_map_rank(dims)
                    assert rank == black, (m, n)


class TestAmbiguousBoards:
    """Second solutions on boards with gcd(m + 1, n + 1) > 1."""

    @pytest.mark.parametrize(
        "m, plus, minus",
        [
            (3, {(0, 0), (2, 2)}, {(0, 2), (2, 0)}),
            (
                5,
                {(0, 0), (0, 4), (2, 2), (4, 0), (4, 4)},
                {(0, 2), (2, 0), (2, 4), (4, 2)},
            ),
        ],
    )
    def test_sign_pattern_swaps(
        self, m: int, plus: set[tuple[int, int]], minus: set[tuple[int, int]]
    ) -> None:
        """Two layouts differing by a kernel pattern share their clues."""
        dims = BoardDims(m, m)
        first = MineLayout(dims, frozenset(plus))
        second = MineLayout(dims, frozenset(minus))

        assert clues_of(first) == clues_of(second)
        assert not is_unique(clues_of(first))[0]
        found = {s.mines for s in enumerate_solutions(clues_of(first))}
        assert {first.mines, second.mines} <= found


class TestTranspose:
    """Tests for transpose."""

    def test_black_cells_stay_black(self) -> None:
        """i + j is unchanged by swapping coordinates."""
        layout, _ = generate(GenSpec(BoardDims(3, 5), 0.5, 4))
        flipped = transpose(layout)

        assert flipped.dims == BoardDims(5, 3)
        assert transpose(flipped) == layout

    def test_uniqueness_is_symmetric(self) -> None:
        """A board and its transpose are unique together."""
        for seed in range(5):
            layout, clues = generate(GenSpec(BoardDims(2, 5), 0.5, seed))
            unique, _ = is_unique(clues)
            flipped, _ = is_unique(clues_of(transpose(layout)))
            assert unique == flipped


class TestText:
    """Tests for the puzzle and solution text forms."""

    def test_format_puzzle(self) -> None:
        """Black cells are hidden, white cells show digits."""
        clues = clues_of(MineLayout(SQUARE, frozenset({(0, 0)})))

        assert format_puzzle(clues) == "#1\n1#\n"

    def test_format_solution(self) -> None:
        """Mines are '*' and safe black cells '.'."""
        layout = MineLayout(SQUARE, frozenset({(0, 0)}))

        assert format_solution(layout) == "*1\n1.\n"

    def test_parse_back(self) -> None:
        """Parsing reverses formatting."""
        layout, clues = generate(GenSpec(BoardDims(3, 4), 0.5, 8))

        assert parse_puzzle(format_puzzle(clues)) == clues
        assert parse_solution(format_solution(layout)) == layout

    def test_parse_errors(self) -> None:
        """Digits on black cells, ragged rows and bad clues are rejected."""
        for text in ("11\n1#\n", "#1\n1\n", "#3\n1#\n", "", "#x\n1#\n"):
            with pytest.raises(ParsingError):
                parse_puzzle(text)
        with pytest.raises(ParsingError):
            parse_solution("#1\n1.\n")


class TestSweep:
    """Tests for ambiguity_sweep."""

    def test_single_cell_always_ambiguous(self) -> None:
        """Every 1x1 board is ambiguous and yields a witness pair."""
        report = ambiguity_sweep(BoardDims(1, 1), 6, 0)

        assert not report.coprime
        assert report.ambiguous == 6
        assert report.witness is not None
        assert report.witness[0] != report.witness[1]

    def test_coprime_sweep_is_clean(self) -> None:
        """No ambiguous layout on a coprime board."""
        report = ambiguity_sweep(BoardDims(2, 3), 20, 1)

        assert report.coprime
        assert report.ambiguous == 0
        assert report.to_dict()["witness"] is None

    @pytest.mark.slow
    def test_coprime_boards_are_unique(self) -> None:
        """Brute force finds one solution for 50 layouts of every coprime size up to 6x6."""
        for m in range(1, 7):
            for n in range(1, 7):
                if math.gcd(m + 1, n + 1) != 1:
                    continue
                for seed in range(50):
                    prob = (1.0, 0.2, 0.5, 0.8, 0.0)[seed % 5]
                    layout, clues = generate(GenSpec(BoardDims(m, n), prob, seed))
                    assert enumerate_solutions(clues) == [layout], (m, n, seed)


class TestWorksheet:
    """Tests for mines_worksheet."""

    def test_stable_for_a_seed(self) -> None:
        """The same seed gives the same sheet."""
        spec = GenSpec(BoardDims(4, 5), 0.5, 7)

        assert mines_worksheet(spec) == mines_worksheet(spec)
        assert mines_worksheet(spec).title == "Paper minesweeper 4x5 (seed 7)"

    def test_solution_below_cut(self) -> None:
        """The puzzle is in the body and the solution in the answers."""
        doc = mines_worksheet(GenSpec(BoardDims(1, 2), 1.0, 0))
        puzzle = [b for b in doc.body() if isinstance(b, Grid)][0]
        solution = doc.answers()[0]

        assert puzzle.cells[0][0].glyph == HIDDEN_GLYPH
        assert isinstance(solution, Grid)
        assert solution.cells[0][0].glyph == "*"

    def test_non_coprime_rejected(self) -> None:
        """A 2x2 sheet could be ambiguous."""
        with pytest.raises(NonCoprimeDimsError):
            mines_worksheet(GenSpec(SQUARE))

    def test_too_large(self) -> None:
        """Sheets are limited in size."""
        with pytest.raises(ValidationError):
            mines_worksheet(GenSpec(BoardDims(13, 14)))
