"""Self-tuning Gaussian kNN weight graphs over point clouds."""
import logging
from typing import Literal

import numpy as np
from scipy import sparse, spatial

from app.models.domain import FloatArray, IntArray, NeighborLists, PointCloud, SparseWeightGraph
from app.services.errors import (
    DegenerateBandwidthError,
    InputError,
    NonFiniteInputError,
    NotEnoughNeighborsError,
)

logger = logging.getLogger(__name__)

# Upper bound on float64 elements materialized per chunk of the brute-force search.
_CHUNK_ELEMENTS = 1 << 22
_GRAM_SLACK = 1e-9  # relative rounding allowance of the Gram-matrix distances
_TREE_SLACK = 1e-9  # relative allowance when collecting ties at the k-th tree distance


def knn_search(
    cloud: PointCloud,
    k: int,
    method: Literal["brute", "tree"] = "brute",
) -> NeighborLists:
    """
    Exact k nearest neighbors of every point, self excluded.

    Lists are ordered by ascending Euclidean distance, ties broken by the
    smaller point index.

    Args:
        cloud: Point cloud to search
        k: Number of neighbors per point (1 <= k <= n-1)
        method: "brute" (reference) or "tree" (cKDTree)

    Returns:
        NeighborLists with (n, k) index and distance arrays
    """
    n = cloud.n
    if k < 1:
        raise InputError(f"k must be positive, got {k}")
    if k >= n:
        raise NotEnoughNeighborsError(k, n)
    if not np.all(np.isfinite(cloud.points)):
        raise NonFiniteInputError("point cloud contains non-finite coordinates")

    if method == "tree":
        indices, distances = _knn_tree(cloud.points, k)
    elif method == "brute":
        indices, distances = _knn_brute(cloud.points, k)
    else:
        raise InputError(f"unknown neighbor search method '{method}'")
    return NeighborLists(indices=indices, distances=distances)


def _knn_brute(points: FloatArray, k: int) -> tuple[IntArray, FloatArray]:
    """Gram-matrix preselection of candidates, then exact re-ranking by direct differences."""
    n, d = points.shape
    num_candidates = min(n - 1, 2 * k + 8)
    squared_norms = np.einsum("ij,ij->i", points, points)
    chunk = max(1, min(_CHUNK_ELEMENTS // n, _CHUNK_ELEMENTS // (num_candidates * d)))

    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        approx = squared_norms[rows, None] + squared_norms[None, :] - 2.0 * (points[rows] @ points.T)
        approx[np.arange(rows.size), rows] = np.inf
        candidates = np.argpartition(approx, num_candidates - 1, axis=1)[:, :num_candidates]
        indices[rows], distances[rows] = _rerank(points, rows, candidates, k)

        # rows with near-ties at the window edge are re-ranked over every tied column
        edge = np.take_along_axis(approx, candidates, axis=1).max(axis=1)
        slack = _GRAM_SLACK * (squared_norms[rows] + squared_norms.max())
        within = approx <= (edge + slack)[:, None]
        for local in np.flatnonzero(within.sum(axis=1) > num_candidates):
            row = rows[local : local + 1]
            widened = np.flatnonzero(within[local])[None, :]
            indices[row], distances[row] = _rerank(points, row, widened, k)
    return indices, distances


def _rerank(points: FloatArray, rows: IntArray, candidates: IntArray, k: int) -> tuple[IntArray, FloatArray]:
    """Exact distances to each row's candidates; k smallest, ties by index."""
    diff = points[candidates] - points[rows][:, None, :]
    exact = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    order = np.lexsort((candidates, exact), axis=-1)[:, :k]
    return np.take_along_axis(candidates, order, axis=1), np.take_along_axis(exact, order, axis=1)


def _knn_tree(points: FloatArray, k: int) -> tuple[IntArray, FloatArray]:
    n = points.shape[0]
    tree = spatial.cKDTree(points)
    dist, idx = tree.query(points, k=k + 1)
    idx = idx.astype(np.int64)

    # Drop the query point itself; with duplicates it may be missing, then drop the farthest.
    keep = idx != np.arange(n)[:, None]
    keep[keep.all(axis=1), -1] = False
    idx = idx[keep].reshape(n, k)
    dist = dist[keep].reshape(n, k)

    order = np.lexsort((idx, dist), axis=-1)
    indices = np.take_along_axis(idx, order, axis=1)
    distances = np.take_along_axis(dist, order, axis=1)

    # the tree returns an arbitrary subset of points tied at the last distance
    radius = distances[:, -1] * (1.0 + _TREE_SLACK)
    counts = tree.query_ball_point(points, radius, return_length=True)
    for row in np.flatnonzero(counts > k + 1):
        ball = np.asarray(tree.query_ball_point(points[row], radius[row]), dtype=np.int64)
        ball = ball[ball != row][None, :]
        rows = np.array([row])
        indices[rows], distances[rows] = _rerank(points, rows, ball, k)
    return indices, distances


def build_weight_graph(
    cloud: PointCloud,
    k_sparsify: int,
    r_sigma: int,
    method: Literal["brute", "tree"] = "brute",
) -> SparseWeightGraph:
    """
    Build the sparse self-tuning Gaussian weight graph.

    sigma(x) is the distance to the r_sigma-th nearest neighbor; edges exist
    for the k_sparsify nearest neighbors of each point with weight
    exp(-|x-y|^2 / sigma(x)^2). One neighbor search serves both.

    Raises:
        DegenerateBandwidthError: sigma(x) = 0 for some point
    """
    if r_sigma < 1 or r_sigma > k_sparsify:
        raise InputError(f"need 1 <= r_sigma <= k_sparsify, got r_sigma={r_sigma}, k_sparsify={k_sparsify}")

    neighbors = knn_search(cloud, k_sparsify, method=method)
    sigma = neighbors.distances[:, r_sigma - 1].copy()
    degenerate = np.flatnonzero(sigma == 0)
    if degenerate.size:
        raise DegenerateBandwidthError(int(degenerate[0]), r_sigma)

    n = cloud.n
    ratio = neighbors.distances / sigma[:, None]
    values = np.exp(-(ratio * ratio)).ravel()
    rows = np.repeat(np.arange(n), k_sparsify)
    cols = neighbors.indices.ravel()

    stored = values > 0
    dropped = int(values.size - stored.sum())
    if dropped:
        logger.warning(f"Dropped {dropped} edges whose Gaussian weight underflowed to zero")

    weights = sparse.csr_matrix((values[stored], (rows[stored], cols[stored])), shape=(n, n))
    weights.sort_indices()
    pattern = weights.astype(bool)
    union = (pattern + pattern.T).astype(bool).tocsr()
    union.sort_indices()

    logger.info(
        f"Built weight graph: n={n}, d={cloud.d}, edges={weights.nnz}, "
        f"union_edges={union.nnz}, k_sparsify={k_sparsify}, r_sigma={r_sigma}, method={method}"
    )
    return SparseWeightGraph(weights=weights, sigma=sigma, union_pattern=union)


def union_neighbors(graph: SparseWeightGraph, x: int) -> list[tuple[int, float, float]]:
    """
    Neighbors of x in the symmetrized pattern with both directed weights.

    Returns:
        List of (y, omega(x, y), omega(y, x)); an absent direction contributes 0.0
    """
    if not 0 <= x < graph.n:
        raise InputError(f"point index {x} out of range [0, {graph.n - 1}]")
    union = graph.union_pattern
    cols = union.indices[union.indptr[x]:union.indptr[x + 1]]
    return list(
        zip(
            cols.tolist(),
            _row_lookup(graph.weights, x, cols).tolist(),
            _row_lookup(graph.transposed, x, cols).tolist(),
        )
    )


def _row_lookup(matrix: sparse.csr_matrix, x: int, cols: IntArray) -> FloatArray:
    start, end = matrix.indptr[x], matrix.indptr[x + 1]
    out = np.zeros(cols.size)
    positions = np.searchsorted(cols, matrix.indices[start:end])
    out[positions] = matrix.data[start:end]
    return out
