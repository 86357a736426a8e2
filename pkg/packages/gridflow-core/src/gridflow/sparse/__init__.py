"""Sparse Cholesky kernel: ordering, symbolic analysis, level-parallel factor and solve."""

from gridflow.sparse.cholesky import CholeskyFactor, factorize, numeric_factorize, solve
from gridflow.sparse.matrix import SparseMatrix, read_matrix_market, write_matrix_market
from gridflow.sparse.ordering import inverse_permutation, min_degree_order
from gridflow.sparse.pool import WorkerPool
from gridflow.sparse.symbolic import (
    ROOT,
    SymbolicFactorization,
    elimination_tree,
    level_schedule,
    symbolic_factorize,
)

__all__ = [
    "ROOT",
    "CholeskyFactor",
    "SparseMatrix",
    "SymbolicFactorization",
    "WorkerPool",
    "elimination_tree",
    "factorize",
    "inverse_permutation",
    "level_schedule",
    "min_degree_order",
    "numeric_factorize",
    "read_matrix_market",
    "solve",
    "symbolic_factorize",
    "write_matrix_market",
]
