"""Dense oracles and synthetic data shared by the test suite."""
import struct
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from app.constants import IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC
from app.models.domain import LabelConstraint, SparseWeightGraph


def graph_from_dense(weights: np.ndarray) -> SparseWeightGraph:
    """Build a SparseWeightGraph from a dense matrix of directed weights (zeros = no edge)."""
    matrix = sparse.csr_matrix(np.asarray(weights, dtype=np.float64))
    matrix.eliminate_zeros()
    matrix.sort_indices()
    pattern = matrix.astype(bool)
    union = (pattern + pattern.T).astype(bool).tocsr()
    union.sort_indices()
    return SparseWeightGraph(weights=matrix, sigma=np.ones(matrix.shape[0]), union_pattern=union)


def dense_gradient(graph: SparseWeightGraph, scale: np.ndarray) -> np.ndarray:
    """Dense (edges x n) gradient matrix built edge by edge from the CSR weights."""
    weights = graph.weights
    G = np.zeros((graph.num_edges, graph.n))
    e = 0
    for x in range(graph.n):
        for pos in range(weights.indptr[x], weights.indptr[x + 1]):
            y = weights.indices[pos]
            w = np.sqrt(weights.data[pos])
            G[e, x] += scale[x] * w
            G[e, y] -= scale[x] * w
            e += 1
    return G


def dense_pinned_lstsq(G: np.ndarray, b: np.ndarray, labels: LabelConstraint) -> np.ndarray:
    """Oracle: minimize ||b - G u||^2 over unlabeled u with u = g on S, by dense least squares."""
    n = G.shape[1]
    free = np.setdiff1d(np.arange(n), labels.indices)
    u = np.zeros(n)
    u[labels.indices] = labels.values
    rhs = b - G[:, labels.indices] @ labels.values
    if free.size:
        u[free] = np.linalg.lstsq(G[:, free], rhs, rcond=None)[0]
    return u


def covering_labels(graph: SparseWeightGraph, rng: np.random.Generator, extra: int = 2) -> LabelConstraint:
    """Random labels with at least one labeled point in every connected component."""
    _, component = csgraph.connected_components(graph.union_pattern, directed=False)
    first = [int(np.flatnonzero(component == c)[0]) for c in np.unique(component)]
    others = rng.choice(graph.n, size=min(extra, graph.n), replace=False)
    indices = np.unique(np.concatenate((first, others)))
    return LabelConstraint(indices, rng.uniform(-1.0, 1.0, size=indices.size))


def piecewise_constant_image(size: int = 16, channels: int = 1) -> np.ndarray:
    """Two-level image with a bright square and a dim background."""
    values = np.full((size, size, channels), 40.0)
    quarter = size // 4
    values[quarter:3 * quarter, quarter:3 * quarter, :] = 200.0
    if channels == 3:
        values[:, : size // 2, 1] = 120.0
    return values


def ramp_image(size: int = 16, channels: int = 1) -> np.ndarray:
    """Smooth diagonal ramp; every channel is offset so channels differ."""
    i, j = np.mgrid[0:size, 0:size]
    base = 10.0 + 7.0 * i * 16 / size + 5.0 * j * 16 / size
    return np.stack([base + 20.0 * c for c in range(channels)], axis=2)


def idx_images(
    count: int,
    rows: int = 28,
    cols: int = 28,
    magic: int = IDX_IMAGES_MAGIC,
    seed: Optional[int] = None,
) -> bytes:
    """IDX image file; pixels count up modulo 256, or are uniform noise when a seed is given."""
    if seed is None:
        pixels = (np.arange(count * rows * cols) % 256).astype(np.uint8)
    else:
        pixels = np.random.default_rng(seed).integers(0, 256, count * rows * cols, dtype=np.uint8)
    return struct.pack(">4I", magic, count, rows, cols) + pixels.tobytes()


def idx_labels(labels: list[int], magic: int = IDX_LABELS_MAGIC) -> bytes:
    return struct.pack(">2I", magic, len(labels)) + bytes(labels)
