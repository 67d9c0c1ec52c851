"""Numeric containers shared by the graph, solver, patch and pipeline services.

These are plain frozen dataclasses around numpy/scipy arrays. They validate
their invariants on construction and are never mutated afterwards, so a built
graph or dataset can be shared by concurrent solver threads.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np
import numpy.typing as npt
from scipy import sparse

from app.services.errors import InputError, NonFiniteInputError

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]

# One value per stored directed edge, in the CSR order of SparseWeightGraph.weights.
EdgeField = FloatArray


@dataclass(frozen=True)
class PointCloud:
    """n points in d-dimensional feature space, one row per point."""

    points: FloatArray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise InputError(f"point cloud must be a non-empty n x d array, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            bad = int(np.flatnonzero(~np.isfinite(points).all(axis=1))[0])
            raise NonFiniteInputError(f"point {bad} has non-finite coordinates")
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class NeighborLists:
    """k nearest neighbors per point, ascending by (distance, index), self excluded."""

    indices: IntArray
    distances: FloatArray

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    def row(self, x: int) -> list[tuple[int, float]]:
        return [(int(j), float(d)) for j, d in zip(self.indices[x], self.distances[x])]


@dataclass(frozen=True)
class SparseWeightGraph:
    """Directed kNN graph with self-tuning Gaussian weights.

    ``weights[x, y]`` holds omega(x, y) in CSR form with sorted column indices;
    the CSR data order is the canonical edge order for every EdgeField.
    """

    weights: sparse.csr_matrix
    sigma: FloatArray
    union_pattern: sparse.csr_matrix

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def num_edges(self) -> int:
        return self.weights.nnz

    @cached_property
    def edge_rows(self) -> IntArray:
        return np.repeat(np.arange(self.n), np.diff(self.weights.indptr))

    @cached_property
    def edge_cols(self) -> IntArray:
        return self.weights.indices.astype(np.int64)

    @cached_property
    def sqrt_weights(self) -> FloatArray:
        return np.sqrt(self.weights.data)

    @cached_property
    def transposed(self) -> sparse.csr_matrix:
        """omega(y, x) addressed by row x."""
        t = self.weights.T.tocsr()
        t.sort_indices()
        return t

    def out_degree(self) -> IntArray:
        return np.diff(self.weights.indptr)

    def row_norms(self, values: EdgeField) -> FloatArray:
        """Euclidean norm of each point's row of an edge field."""
        squares = np.bincount(self.edge_rows, weights=values * values, minlength=self.n)
        return np.sqrt(squares)

    def zero_field(self) -> EdgeField:
        return np.zeros(self.num_edges)


@dataclass(frozen=True)
class LabelConstraint:
    """Labeled subset S (sorted, unique) and target values g on it."""

    indices: IntArray
    values: FloatArray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if indices.size < 1:
            raise InputError("label constraint needs at least one labeled point")
        if indices.shape != values.shape:
            raise InputError(f"{indices.size} labeled indices but {values.size} values")
        if not np.all(np.isfinite(values)):
            raise InputError("label values must be finite")
        order = np.argsort(indices, kind="stable")
        indices = indices[order]
        values = values[order]
        if np.any(np.diff(indices) == 0):
            raise InputError("labeled indices must be unique")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.indices.size

    def validate_for(self, n: int) -> None:
        if self.indices[0] < 0 or self.indices[-1] >= n:
            raise InputError(f"labeled indices must lie in [0, {n - 1}]")

    def mask(self, n: int) -> BoolArray:
        labeled = np.zeros(n, dtype=bool)
        labeled[self.indices] = True
        return labeled

    def shifted(self, offset: float) -> "LabelConstraint":
        return LabelConstraint(self.indices, self.values + offset)


@dataclass(frozen=True)
class ImageBuffer:
    """Raster with values in [0, 255], shape (height, width, channels), plus observed mask."""

    values: FloatArray
    mask: BoolArray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 2:
            values = values[:, :, None]
        if values.ndim != 3 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InputError(f"image must be height x width (x channels), got shape {values.shape}")
        if values.shape[2] not in (1, 3):
            raise InputError(f"image must have 1 or 3 channels, got {values.shape[2]}")
        if not np.all(np.isfinite(values)):
            raise InputError("image values must be finite")
        mask = self.mask
        if mask is None:
            mask = np.ones(values.shape[:2], dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != values.shape[:2]:
            raise InputError(f"mask shape {mask.shape} does not match image {values.shape[:2]}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]

    @property
    def observed_count(self) -> int:
        return int(self.mask.sum())

    def with_values(self, values: FloatArray) -> "ImageBuffer":
        return ImageBuffer(values, self.mask.copy())

    def with_mask(self, mask: BoolArray) -> "ImageBuffer":
        return ImageBuffer(self.values.copy(), mask)


@dataclass(frozen=True)
class PatchSet:
    """One patch vector per pixel; patch index = i * width + j."""

    cloud: PointCloud
    height: int
    width: int

    def __len__(self) -> int:
        return self.cloud.n

    def pixel_of(self, index: int) -> Tuple[int, int]:
        return divmod(int(index), self.width)

    def index_of(self, i: int, j: int) -> int:
        return i * self.width + j


@dataclass(frozen=True)
class LabeledDataset:
    """Point cloud with a ground-truth class id per point."""

    cloud: PointCloud
    truth: IntArray
    num_classes: int

    def __post_init__(self):
        truth = np.asarray(self.truth, dtype=np.int64).ravel()
        if truth.size != self.cloud.n:
            raise InputError(f"{truth.size} labels for {self.cloud.n} points")
        if truth.size and (truth.min() < 0 or truth.max() >= self.num_classes):
            raise InputError(f"class ids must lie in [0, {self.num_classes - 1}]")
        object.__setattr__(self, "truth", truth)

    @property
    def n(self) -> int:
        return self.cloud.n

    def subset(self, indices: IntArray) -> "LabeledDataset":
        return LabeledDataset(PointCloud(self.cloud.points[indices]), self.truth[indices], self.num_classes)

