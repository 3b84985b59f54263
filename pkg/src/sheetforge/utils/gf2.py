"""Linear algebra over the two-element field on numpy uint8 arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

BitArray = npt.NDArray[np.uint8]


def to_gf2(matrix: npt.ArrayLike) -> BitArray:
    """Return a copy of ``matrix`` reduced modulo 2 as uint8."""
    return np.array(matrix, dtype=np.int64).astype(np.uint8) % 2


@dataclass(frozen=True)
class RowReduceResult:
    """Reduced row echelon form together with its pivot columns."""

    matrix: BitArray
    rank: int
    pivots: tuple[int, ...]


def row_reduce(matrix: npt.ArrayLike) -> RowReduceResult:
    """Bring ``matrix`` to reduced row echelon form over GF(2)."""
    mat = to_gf2(matrix)
    m, n = mat.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        candidates = np.nonzero(mat[row:, col])[0]
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        hits = np.nonzero(mat[:, col])[0]
        for r in hits:
            if r != row:
                mat[r, :] ^= mat[row, :]
        pivots.append(col)
        row += 1
    return RowReduceResult(matrix=mat, rank=len(pivots), pivots=tuple(pivots))


def rank(matrix: npt.ArrayLike) -> int:
    """Compute rank over GF(2)."""
    return row_reduce(matrix).rank


def nullspace_basis(matrix: npt.ArrayLike) -> BitArray:
    """Return a basis of the kernel of ``matrix``, one vector per row."""
    reduced = row_reduce(matrix)
    mat = reduced.matrix
    n = mat.shape[1]
    pivot_set = set(reduced.pivots)
    basis = []
    for free in (c for c in range(n) if c not in pivot_set):
        vec = np.zeros(n, dtype=np.uint8)
        vec[free] = 1
        for row, col in enumerate(reduced.pivots):
            if mat[row, free]:
                vec[col] = 1
        basis.append(vec)
    if not basis:
        return np.zeros((0, n), dtype=np.uint8)
    return np.vstack(basis)


def solve(matrix: npt.ArrayLike, vector: npt.ArrayLike) -> BitArray | None:
    """Return one solution of ``matrix @ x = vector`` or None if inconsistent."""
    mat = to_gf2(matrix)
    vec = to_gf2(vector).reshape(-1, 1)
    n = mat.shape[1]
    reduced = row_reduce(np.concatenate([mat, vec], axis=1))
    if n in reduced.pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for row, col in enumerate(reduced.pivots):
        x[col] = reduced.matrix[row, n]
    return x


def span(basis: BitArray) -> list[BitArray]:
    """Enumerate every vector of the subspace spanned by the rows of ``basis``."""
    n = basis.shape[1]
    vectors = [np.zeros(n, dtype=np.uint8)]
    for generator in basis:
        vectors += [v ^ generator for v in vectors]
    return vectors
