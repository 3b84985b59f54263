"""Init file for sheetforge main package."""
