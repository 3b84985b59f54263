"""Model engines: cellular automaton, truck machine, minesweeper and map graphs."""

__all__ = [
    "ca1d",
    "mapgraph",
    "minesweeper",
    "truck",
    "truck_dsl",
    "truck_tasks",
]
