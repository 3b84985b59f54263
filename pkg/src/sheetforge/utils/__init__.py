"""Sheetforge utilities package."""

__all__ = [
    "constants",
    "errors",
    "gf2",
    "logger",
    "models",
    "render",
]
