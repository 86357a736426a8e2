"""Level-scheduled numeric Cholesky factorization and triangular solves."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse import csc_matrix, csr_matrix

from gridflow.exceptions import DimensionMismatchError, FactorizationError, SparseKernelError
from gridflow.sparse.matrix import SparseMatrix
from gridflow.sparse.ordering import min_degree_order
from gridflow.sparse.pool import SERIAL, WorkerPool, chunked
from gridflow.sparse.symbolic import SymbolicFactorization, symbolic_factorize

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 64

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class _SweepBlock:
    """Rows of one level chunk with their strictly triangular couplings."""

    columns: NDArray[np.int64]
    coupling: csr_matrix
    diag: FloatArray


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    """L with L·Lᵀ = P·A·Pᵀ, plus the per-level sweep plan used by `solve`."""

    L: SparseMatrix
    symbolic: SymbolicFactorization
    forward: tuple[tuple[_SweepBlock, ...], ...]
    backward: tuple[tuple[_SweepBlock, ...], ...]

    @property
    def n(self) -> int:
        return self.symbolic.n

    @property
    def diagonal(self) -> FloatArray:
        return np.asarray(self.L.csc.diagonal())


def _factor_column(
    j: int,
    permuted: csc_matrix,
    sym: SymbolicFactorization,
    col_start: NDArray[np.int64],
    rows_of: NDArray[np.int64],
    values: FloatArray,
) -> None:
    """Left-looking update of column j; writes only the slice owned by column j."""
    start, end = col_start[j], col_start[j + 1]
    rows = rows_of[start:end]
    x = np.zeros(end - start)

    a_start, a_end = permuted.indptr[j], permuted.indptr[j + 1]
    a_rows = permuted.indices[a_start:a_end]
    lower = a_rows >= j
    x[np.searchsorted(rows, a_rows[lower])] = permuted.data[a_start:a_end][lower]

    for k in sym.row_cols[j]:
        k_start, k_end = col_start[k], col_start[k + 1]
        k_rows = rows_of[k_start:k_end]
        p = k_start + int(np.searchsorted(k_rows, j))
        tail = rows_of[p:k_end]
        x[np.searchsorted(rows, tail)] -= values[p] * values[p:k_end]

    pivot = x[0]
    if not pivot > 0:
        raise FactorizationError(j, int(sym.perm[j]), float(pivot))
    d = np.sqrt(pivot)
    values[start] = d
    values[start + 1 : end] = x[1:] / d


def _sweep_blocks(
    levels: Sequence[NDArray[np.int64]],
    strict: csr_matrix,
    diag: FloatArray,
    chunk_size: int,
) -> tuple[tuple[_SweepBlock, ...], ...]:
    plan = []
    for level in levels:
        blocks = []
        for chunk in chunked(level, chunk_size):
            columns = np.asarray(chunk, dtype=np.int64)
            blocks.append(
                _SweepBlock(columns=columns, coupling=strict[columns, :], diag=diag[columns])
            )
        plan.append(tuple(blocks))
    return tuple(plan)


def numeric_factorize(
    matrix: SparseMatrix,
    sym: SymbolicFactorization,
    pool: WorkerPool = SERIAL,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> CholeskyFactor:
    """Cholesky factor of P·A·Pᵀ computed level by level over the elimination tree.

    Columns of one level only read columns of lower levels, so each level is cut
    into fixed-size chunks that run concurrently; levels are separated by a barrier.
    Chunking does not depend on the worker count, so results are bitwise identical
    for any pool size.

    Args:
        matrix: Symmetric positive definite matrix in original ordering.
        sym: Symbolic analysis of a pattern containing pattern(matrix).
        pool: Worker pool for the per-level chunks.
        chunk_size: Columns per work item.

    Returns:
        CholeskyFactor with a strictly positive diagonal.

    Raises:
        DimensionMismatchError: If matrix and sym sizes differ.
        FactorizationError: On a non-positive pivot (matrix not positive definite).
    """
    n = sym.n
    if matrix.n != n:
        raise DimensionMismatchError(n, matrix.n)
    if matrix.is_complex:
        raise SparseKernelError("Cholesky factorization requires a real matrix")
    permuted = matrix.permuted(sym.perm).csc

    counts = np.diff(sym.col_ptr) + 1
    col_start = np.zeros(n + 1, dtype=np.int64)
    col_start[1:] = np.cumsum(counts)
    rows_of = np.empty(int(col_start[-1]), dtype=np.int64)
    for j in range(n):
        rows_of[col_start[j]] = j
        lower = sym.col_rows[sym.col_ptr[j] : sym.col_ptr[j + 1]]
        rows_of[col_start[j] + 1 : col_start[j + 1]] = lower
    values = np.zeros(rows_of.size)

    def factor_chunk(columns: Sequence[int]) -> None:
        for j in columns:
            _factor_column(int(j), permuted, sym, col_start, rows_of, values)

    for level in sym.levels:
        pool.map(factor_chunk, chunked(level, chunk_size))

    L = csc_matrix((values, rows_of, col_start), shape=(n, n))
    diag = values[col_start[:-1]]
    strict_lower = csc_matrix((values, rows_of, col_start), shape=(n, n)).tocsr()
    strict_lower.setdiag(0.0)
    strict_lower.eliminate_zeros()
    strict_upper = strict_lower.T.tocsr()

    factor = CholeskyFactor(
        L=SparseMatrix(L),
        symbolic=sym,
        forward=_sweep_blocks(sym.levels, strict_lower, diag, chunk_size),
        backward=_sweep_blocks(sym.levels[::-1], strict_upper, diag, chunk_size),
    )
    logger.debug("Numeric factorization: n=%d nnz(L)=%d", n, L.nnz)
    return factor


def _sweep(plan: tuple[tuple[_SweepBlock, ...], ...], x: FloatArray, pool: WorkerPool) -> None:
    def run(block: _SweepBlock) -> None:
        x[block.columns] = (x[block.columns] - block.coupling @ x) / block.diag

    for blocks in plan:
        pool.map(run, blocks)


def solve(factor: CholeskyFactor, rhs: ArrayLike, pool: WorkerPool = SERIAL) -> FloatArray:
    """Solve A·x = rhs with a factor of P·A·Pᵀ.

    The forward sweep visits levels ascending and the backward sweep descending.
    Each row pulls from rows finished in earlier levels only, so chunks of one level
    run concurrently and every entry is reduced in a fixed order.

    Args:
        factor: Cholesky factor of A.
        rhs: Right-hand side in original ordering.
        pool: Worker pool for the per-level chunks.

    Returns:
        Solution in original ordering.

    Raises:
        DimensionMismatchError: If rhs does not have length n.
    """
    b = np.asarray(rhs, dtype=float)
    if b.shape != (factor.n,):
        raise DimensionMismatchError(factor.n, b.shape[0] if b.ndim else 0)
    perm = factor.symbolic.perm
    y = b[perm].copy()
    _sweep(factor.forward, y, pool)
    _sweep(factor.backward, y, pool)
    x = np.empty_like(y)
    x[perm] = y
    return x


def factorize(
    matrix: SparseMatrix, pool: WorkerPool = SERIAL, chunk_size: int = DEFAULT_CHUNK_SIZE
) -> CholeskyFactor:
    """Order, analyse and factorize a symmetric positive definite matrix."""
    sym = symbolic_factorize(matrix, min_degree_order(matrix))
    return numeric_factorize(matrix, sym, pool=pool, chunk_size=chunk_size)
