"""Small exact linear-algebra helpers over Q built on flint's fmpq_mat."""
from __future__ import annotations

from typing import List, Optional, Sequence

from flint import fmpq, fmpq_mat


def matrix(rows: Sequence[Sequence], ncols: Optional[int] = None) -> fmpq_mat:
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    flat = [x for r in rows for x in r]
    return fmpq_mat(len(rows), ncols, flat)


def rows_of(M: fmpq_mat) -> List[List[fmpq]]:
    return [[M[i, j] for j in range(M.ncols())] for i in range(M.nrows())]


def rank(M: fmpq_mat) -> int:
    if M.nrows() == 0 or M.ncols() == 0:
        return 0
    return M.rank()


def rref(M: fmpq_mat):
    """(R, pivots): reduced row echelon form and its pivot columns."""
    if M.nrows() == 0 or M.ncols() == 0:
        return M, []
    R, r = M.rref()
    pivots = []
    for i in range(r):
        for j in range(R.ncols()):
            if R[i, j] != 0:
                pivots.append(j)
                break
    return R, pivots


def nullspace(M: fmpq_mat) -> List[List[fmpq]]:
    """Basis of {v : M v = 0}, one vector per free column."""
    n = M.ncols()
    R, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        v = [fmpq(0)] * n
        v[free] = fmpq(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i, free]
        basis.append(v)
    return basis


def left_nullspace(M: fmpq_mat) -> List[List[fmpq]]:
    """Basis of {w : w M = 0}."""
    return nullspace(M.transpose())


def solve(M: fmpq_mat, b: Sequence) -> Optional[List[fmpq]]:
    """Some x with M x = b, or None when the system is inconsistent."""
    m, n = M.nrows(), M.ncols()
    if n == 0:
        return [] if all(v == 0 for v in b) else None
    aug = fmpq_mat(m, n + 1, [x for i in range(m) for x in
                             [M[i, j] for j in range(n)] + [b[i]]])
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [fmpq(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n]
    return x


def column_space_basis(M: fmpq_mat) -> List[int]:
    """Indices of a maximal independent set of columns."""
    return rref(M)[1]


def row_space_basis(M: fmpq_mat) -> List[int]:
    """Indices of a maximal independent set of rows."""
    return rref(M.transpose())[1]
