"""Fill-reducing ordering by multiple minimum degree."""

import heapq
import logging

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import csc_matrix, spmatrix

from gridflow.exceptions import AsymmetricPatternError
from gridflow.sparse.matrix import SparseMatrix

logger = logging.getLogger(__name__)


def _adjacency(pattern: SparseMatrix | spmatrix) -> list[set[int]]:
    matrix = pattern if isinstance(pattern, SparseMatrix) else SparseMatrix.from_scipy(pattern)
    if not matrix.is_pattern_symmetric():
        raise AsymmetricPatternError()
    csc: csc_matrix = matrix.csc
    return [
        {int(i) for i in csc.indices[csc.indptr[j] : csc.indptr[j + 1]] if i != j}
        for j in range(matrix.n)
    ]


def min_degree_order(pattern: SparseMatrix | spmatrix) -> NDArray[np.int64]:
    """Minimum degree ordering of a symmetric sparsity pattern.

    Works on the explicit elimination graph. Each round takes the current minimum
    degree and eliminates every not-yet-adjacent node of that degree in ascending
    index order, then re-buckets the touched neighbours. Ties always go to the
    smallest original index, so the result is a pure function of the pattern.

    Args:
        pattern: Structurally symmetric matrix; values are ignored.

    Returns:
        perm with perm[k] = original index eliminated k-th.

    Raises:
        AsymmetricPatternError: If the pattern is not symmetric.
    """
    adj = _adjacency(pattern)
    n = len(adj)
    degree = [len(neighbours) for neighbours in adj]
    eliminated = [False] * n
    heap = [(degree[v], v) for v in range(n)]
    heapq.heapify(heap)
    order: list[int] = []
    rounds = 0

    while heap:
        d, v = heap[0]
        if eliminated[v] or degree[v] != d:
            heapq.heappop(heap)
            continue

        selected: list[int] = []
        blocked: set[int] = set()
        deferred: list[int] = []
        seen: set[int] = set()
        while heap and heap[0][0] == d:
            _, v = heapq.heappop(heap)
            if eliminated[v] or degree[v] != d or v in seen:
                continue
            seen.add(v)
            if v in blocked:
                deferred.append(v)
                continue
            selected.append(v)
            blocked.add(v)
            blocked |= adj[v]

        touched: set[int] = set()
        for v in selected:
            neighbours = adj[v]
            for u in neighbours:
                adj[u].discard(v)
                adj[u] |= neighbours - {u}
            touched |= neighbours
            adj[v] = set()
            eliminated[v] = True
            order.append(v)
        touched.update(deferred)
        for u in sorted(touched):
            if not eliminated[u]:
                degree[u] = len(adj[u])
                heapq.heappush(heap, (degree[u], u))
        rounds += 1

    logger.debug("Minimum degree ordering: n=%d in %d rounds", n, rounds)
    return np.asarray(order, dtype=np.int64)


def inverse_permutation(perm: NDArray[np.int64]) -> NDArray[np.int64]:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=perm.dtype)
    return inv
