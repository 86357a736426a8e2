"""Symbolic Cholesky analysis: elimination tree, fill pattern and level schedule."""

import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse import csc_matrix, spmatrix

from gridflow.exceptions import AsymmetricPatternError, EliminationTreeError, SparseKernelError
from gridflow.sparse.matrix import SparseMatrix
from gridflow.sparse.ordering import inverse_permutation

logger = logging.getLogger(__name__)

ROOT = -1

IntArray = NDArray[np.int64]


@dataclass(frozen=True, eq=False)
class SymbolicFactorization:
    """Structure of L for P·A·Pᵀ, shared by every numeric factorization of that pattern.

    Column j of L holds the diagonal followed by `col_rows[col_ptr[j]:col_ptr[j+1]]`
    (strictly lower rows, ascending). `row_cols[j]` lists the strictly lower
    columns k < j with L[j, k] != 0, ascending. `etree[j]` is the parent of column j
    or ROOT.
    """

    n: int
    perm: IntArray
    perm_inv: IntArray
    etree: IntArray
    col_ptr: IntArray
    col_rows: IntArray
    row_cols: tuple[IntArray, ...]
    levels: tuple[IntArray, ...]
    source_lower_nnz: int

    @property
    def factor_nnz(self) -> int:
        """Nonzeros of L including the diagonal."""
        return self.n + int(self.col_rows.size)

    def fill_pattern(self) -> csc_matrix:
        """Boolean pattern of L (lower triangle, diagonal included)."""
        indptr = self.col_ptr + np.arange(self.n + 1)
        indices = np.empty(self.factor_nnz, dtype=np.int64)
        for j in range(self.n):
            start = indptr[j]
            lower = self.col_rows[self.col_ptr[j] : self.col_ptr[j + 1]]
            indices[start] = j
            indices[start + 1 : start + 1 + lower.size] = lower
        return csc_matrix(
            (np.ones(self.factor_nnz, dtype=bool), indices, indptr), shape=(self.n, self.n)
        )

    @property
    def fill_count(self) -> int:
        """Entries of L absent from the strictly lower triangle of P·A·Pᵀ."""
        return int(self.col_rows.size) - self.source_lower_nnz

    def level_of(self) -> IntArray:
        level = np.empty(self.n, dtype=np.int64)
        for k, columns in enumerate(self.levels):
            level[columns] = k
        return level

    def dump(self) -> str:
        """Plain-text listing of perm, etree and levels for debugging."""
        lines = [f"n {self.n}", f"factor_nnz {self.factor_nnz}", "# column original parent level"]
        level = self.level_of()
        for j in range(self.n):
            lines.append(f"{j} {self.perm[j]} {self.etree[j]} {level[j]}")
        lines.append(f"# {len(self.levels)} levels")
        for k, columns in enumerate(self.levels):
            lines.append(f"level {k}: " + " ".join(str(c) for c in columns))
        return "\n".join(lines) + "\n"

    def write_dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dump(), encoding="utf-8")


def _strictly_lower_count(matrix: SparseMatrix) -> int:
    coo = matrix.csc.tocoo()
    return int(np.count_nonzero(coo.row > coo.col))


def _as_pattern(pattern: SparseMatrix | spmatrix | ArrayLike) -> SparseMatrix:
    if isinstance(pattern, SparseMatrix):
        return pattern
    return SparseMatrix.from_scipy(pattern)


def elimination_tree(permuted: SparseMatrix) -> IntArray:
    """Elimination tree of a symmetric matrix by ancestor path compression.

    Only the strictly upper entries A[i, k], i < k, of each column are read.
    """
    n = permuted.n
    indptr, indices = permuted.indptr, permuted.indices
    parent = np.full(n, ROOT, dtype=np.int64)
    ancestor = np.full(n, ROOT, dtype=np.int64)
    for k in range(n):
        for i in indices[indptr[k] : indptr[k + 1]]:
            i = int(i)
            while i != ROOT and i < k:
                nxt = int(ancestor[i])
                ancestor[i] = k
                if nxt == ROOT:
                    parent[i] = k
                i = nxt
    return parent


def _row_patterns(permuted: SparseMatrix, parent: IntArray) -> list[list[int]]:
    """Strictly lower pattern of each row of L via row-subtree traversal."""
    n = permuted.n
    indptr, indices = permuted.indptr, permuted.indices
    mark = np.full(n, -1, dtype=np.int64)
    rows: list[list[int]] = []
    for k in range(n):
        mark[k] = k
        reach: list[int] = []
        for i in indices[indptr[k] : indptr[k + 1]]:
            i = int(i)
            if i >= k:
                continue
            while mark[i] != k:
                reach.append(i)
                mark[i] = k
                i = int(parent[i])
        reach.sort()
        rows.append(reach)
    return rows


def level_schedule(etree: ArrayLike) -> tuple[IntArray, ...]:
    """Group columns by longest path to a leaf of the elimination tree.

    Leaves are level 0 and every other column sits one level above its deepest
    child, so all descendants of a level-k column lie in levels below k.

    Args:
        etree: Parent index per column, ROOT for roots.

    Returns:
        Column arrays per level, ascending level, columns ascending within a level.

    Raises:
        EliminationTreeError: If the parent array has out-of-range entries or cycles.
    """
    parent = np.asarray(etree, dtype=np.int64)
    n = parent.size
    if n == 0:
        return ()
    if np.any((parent < ROOT) | (parent >= n)) or np.any(parent == np.arange(n)):
        raise EliminationTreeError("Parent array has out-of-range or self-referencing entries")

    pending = np.zeros(n, dtype=np.int64)
    for p in parent:
        if p != ROOT:
            pending[p] += 1
    level = np.zeros(n, dtype=np.int64)
    ready = deque(int(j) for j in np.flatnonzero(pending == 0))
    processed = 0
    while ready:
        j = ready.popleft()
        processed += 1
        p = int(parent[j])
        if p == ROOT:
            continue
        level[p] = max(level[p], level[j] + 1)
        pending[p] -= 1
        if pending[p] == 0:
            ready.append(p)
    if processed != n:
        raise EliminationTreeError("Parent array contains a cycle")

    order = np.argsort(level, kind="stable")
    bounds = np.searchsorted(level[order], np.arange(int(level.max()) + 2))
    return tuple(order[bounds[k] : bounds[k + 1]] for k in range(bounds.size - 1))


def symbolic_factorize(
    pattern: SparseMatrix | spmatrix | ArrayLike, perm: ArrayLike | None = None
) -> SymbolicFactorization:
    """Fill pattern, elimination tree and level schedule of L for P·A·Pᵀ.

    Args:
        pattern: Structurally symmetric matrix (values ignored).
        perm: perm[k] = original index placed at position k; identity if omitted.

    Returns:
        SymbolicFactorization with parent(j) = min{i > j : L[i, j] != 0}.

    Raises:
        AsymmetricPatternError: If the pattern is not symmetric.
        SparseKernelError: If perm is not a permutation of 0..n-1.
    """
    matrix = _as_pattern(pattern)
    if not matrix.is_pattern_symmetric():
        raise AsymmetricPatternError()
    n = matrix.n
    perm_arr = np.arange(n, dtype=np.int64) if perm is None else np.asarray(perm, dtype=np.int64)
    if perm_arr.shape != (n,) or not np.array_equal(np.sort(perm_arr), np.arange(n)):
        raise SparseKernelError(f"perm is not a permutation of 0..{n - 1}")

    permuted = matrix.permuted(perm_arr)
    parent = elimination_tree(permuted)
    rows = _row_patterns(permuted, parent)

    columns: list[list[int]] = [[] for _ in range(n)]
    for k, row in enumerate(rows):
        for j in row:
            columns[j].append(k)
    col_ptr = np.zeros(n + 1, dtype=np.int64)
    col_ptr[1:] = np.cumsum([len(c) for c in columns])
    col_rows = np.fromiter((i for c in columns for i in c), dtype=np.int64, count=int(col_ptr[-1]))

    levels = level_schedule(parent)
    sym = SymbolicFactorization(
        n=n,
        perm=perm_arr,
        perm_inv=inverse_permutation(perm_arr),
        etree=parent,
        col_ptr=col_ptr,
        col_rows=col_rows,
        row_cols=tuple(np.asarray(r, dtype=np.int64) for r in rows),
        levels=levels,
        source_lower_nnz=_strictly_lower_count(permuted),
    )
    logger.debug(
        "Symbolic factorization: n=%d nnz(L)=%d levels=%d", n, sym.factor_nnz, len(levels)
    )
    return sym
