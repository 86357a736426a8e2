"""Compressed sparse column matrix carrier for Ybus, B' and B''."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
from numpy.typing import ArrayLike, NDArray
from scipy.sparse import coo_matrix, csc_matrix, issparse

from gridflow.exceptions import DimensionMismatchError

SYMMETRY_RTOL = 1e-12


def _canonical(matrix: csc_matrix) -> csc_matrix:
    matrix = csc_matrix(matrix, copy=True)
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Square CSC matrix in canonical form.

    Row indices are strictly increasing within each column and no explicit zeros
    are stored. Real and complex values share this type.
    """

    csc: csc_matrix

    def __post_init__(self) -> None:
        rows, cols = self.csc.shape
        if rows != cols:
            raise DimensionMismatchError(rows, cols)

    @classmethod
    def from_scipy(cls, matrix: ArrayLike | csc_matrix) -> "SparseMatrix":
        source = matrix if issparse(matrix) else np.atleast_2d(np.asarray(matrix))
        return cls(_canonical(csc_matrix(source)))

    @classmethod
    def from_triplets(
        cls, n: int, rows: ArrayLike, cols: ArrayLike, values: ArrayLike
    ) -> "SparseMatrix":
        """Assemble from coordinate triplets; duplicates are summed."""
        triplets = (np.asarray(values), (np.asarray(rows), np.asarray(cols)))
        coo = coo_matrix(triplets, shape=(n, n))
        return cls(_canonical(coo.tocsc()))

    @property
    def n(self) -> int:
        return int(self.csc.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.csc.nnz)

    @property
    def indptr(self) -> NDArray[np.int32]:
        return self.csc.indptr

    @property
    def indices(self) -> NDArray[np.int32]:
        return self.csc.indices

    @property
    def data(self) -> NDArray[np.generic]:
        return self.csc.data

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.csc.data))

    def is_symmetric(self, rtol: float = SYMMETRY_RTOL) -> bool:
        """Pattern and values symmetric to a relative tolerance."""
        diff = abs(self.csc - self.csc.T)
        if diff.nnz == 0:
            return True
        scale = max(float(abs(self.csc).max()), 1.0)
        return bool(diff.max() <= rtol * scale)

    def is_pattern_symmetric(self) -> bool:
        pattern = self.pattern()
        return bool((pattern != pattern.T).nnz == 0)

    def pattern(self) -> csc_matrix:
        """Boolean sparsity pattern."""
        return csc_matrix(
            (np.ones(self.nnz, dtype=bool), self.csc.indices.copy(), self.csc.indptr.copy()),
            shape=self.csc.shape,
        )

    def column(self, j: int) -> tuple[NDArray[np.int32], NDArray[np.generic]]:
        """Row indices and values of column j."""
        start, end = self.csc.indptr[j], self.csc.indptr[j + 1]
        return self.csc.indices[start:end], self.csc.data[start:end]

    def row(self, i: int) -> tuple[NDArray[np.int32], NDArray[np.generic]]:
        """Column indices and values of row i, columns ascending."""
        csr_row = self.csc[i : i + 1, :].tocsr()
        csr_row.sort_indices()
        return csr_row.indices, csr_row.data

    def submatrix(self, index: ArrayLike) -> "SparseMatrix":
        """Principal submatrix over the given row/column indices, in that order."""
        idx = np.asarray(index, dtype=np.int64)
        return SparseMatrix(_canonical(self.csc[idx, :][:, idx].tocsc()))

    def permuted(self, perm: ArrayLike) -> "SparseMatrix":
        """P·A·Pᵀ where row k of the result is row perm[k] of A."""
        return self.submatrix(perm)

    def matvec(self, x: ArrayLike) -> NDArray[np.generic]:
        vector = np.asarray(x)
        if vector.shape[0] != self.n:
            raise DimensionMismatchError(self.n, vector.shape[0])
        return np.asarray(self.csc @ vector)

    def to_dense(self) -> NDArray[np.generic]:
        return np.asarray(self.csc.toarray())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.csc.shape == other.csc.shape
            and np.array_equal(self.csc.indptr, other.csc.indptr)
            and np.array_equal(self.csc.indices, other.csc.indices)
            and np.array_equal(self.csc.data, other.csc.data)
        )


def write_matrix_market(path: str | Path, matrix: SparseMatrix, comment: str = "") -> None:
    """Export a matrix in MatrixMarket coordinate format."""
    scipy.io.mmwrite(str(path), matrix.csc, comment=comment)


def read_matrix_market(path: str | Path) -> SparseMatrix:
    """Import a square matrix from a MatrixMarket file."""
    return SparseMatrix.from_scipy(csc_matrix(scipy.io.mmread(str(path))))
