"""Custom exceptions for the sheetforge project."""


class SheetforgeError(Exception):
    """Base exception for all sheetforge errors."""

    pass


class ConfigurationError(SheetforgeError):
    """Raised when configuration is invalid or missing."""

    pass


class ValidationError(SheetforgeError):
    """Raised when a value violates its domain invariants."""

    pass


class ParsingError(SheetforgeError):
    """Raised when a textual representation cannot be parsed."""

    pass


class ProgramSyntaxError(ParsingError):
    """Raised when a truck program does not follow the rule grammar."""

    def __init__(self, message: str, line: int, column: int = 1) -> None:
        """Store the position of the offending token.

        Args:
            message: Human readable description.
            line: 1-based line number in the program text.
            column: 1-based column of the offending token.

        """
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DatasetError(SheetforgeError):
    """Raised when a map dataset fails load-time validation."""

    def __init__(self, problems: list[str]) -> None:
        """Keep the full list of problems found by the validator."""
        super().__init__("; ".join(problems) if problems else "invalid dataset")
        self.problems = problems


class UnknownCountryError(SheetforgeError):
    """Raised when a country id is not part of the dataset."""

    pass


class NotEnoughPointsError(SheetforgeError):
    """Raised when fewer attractive points exist than were requested."""

    pass


class ColoringNotFoundError(SheetforgeError):
    """Raised when no coloring with the allowed colors exists."""

    pass


class NoSolutionError(SheetforgeError):
    """Raised when a clue board admits no mine layout."""

    pass


class NonCoprimeDimsError(SheetforgeError):
    """Raised when printing a sheet whose dims may allow several solutions."""

    pass


class OversizeGridError(SheetforgeError):
    """Raised when a grid exceeds the renderer limits."""

    pass
