"""Semi-supervised classification on point clouds by per-class indicator interpolation."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.constants import DEFAULT_MAX_WORKERS, SLOW_SOLVE_THRESHOLD_MS
from app.models.domain import FloatArray, IntArray, LabelConstraint, LabeledDataset, PointCloud, SparseWeightGraph
from app.models.requests import GraphOptions, SolverKind, SolverOptions
from app.services.errors import EvaluationError, InputError
from app.services.point_graph import build_weight_graph
from app.services.variational_solvers import solve
from app.utils.logging_helpers import log_ssl_summary
from app.utils.performance_tracker import track_performance

logger = logging.getLogger(__name__)


@dataclass
class SslResult:
    """Predicted class per point, the indicator scores behind them and both accuracies."""

    predictions: IntArray
    scores: FloatArray
    labeled: IntArray
    accuracy_all: float
    accuracy_unlabeled: Optional[float]
    residuals: list[Optional[float]]


def sample_label_set(
    dataset: LabeledDataset,
    count: int,
    rng_seed: int,
    stratified: bool = True,
) -> IntArray:
    """
    Choose ``count`` points to label, uniformly without replacement.

    With ``stratified`` every class present in the dataset first receives one
    randomly chosen label; the remaining budget is drawn uniformly from the rest.

    Returns:
        Sorted indices of the labeled points

    Raises:
        InputError: count outside [1, n], or fewer labels than classes when stratified
    """
    n = dataset.n
    if not 1 <= count <= n:
        raise InputError(f"label count must lie in [1, {n}], got {count}")
    if count == n:
        return np.arange(n, dtype=np.int64)

    rng = np.random.default_rng(rng_seed)
    if not stratified:
        return np.sort(rng.choice(n, size=count, replace=False)).astype(np.int64)

    classes = np.unique(dataset.truth)
    if count < classes.size:
        raise InputError(f"{count} labels cannot cover {classes.size} classes; use unstratified sampling")
    seeds = np.array([rng.choice(np.flatnonzero(dataset.truth == c)) for c in classes], dtype=np.int64)
    remaining = np.setdiff1d(np.arange(n), seeds, assume_unique=True)
    extra = rng.choice(remaining, size=count - seeds.size, replace=False)
    return np.sort(np.concatenate((seeds, extra))).astype(np.int64)


def class_indicators(dataset: LabeledDataset, labeled: IntArray, class_id: int) -> LabelConstraint:
    """g = 1 on labeled points of ``class_id`` and 0 on the other labeled points."""
    return LabelConstraint(labeled, (dataset.truth[labeled] == class_id).astype(np.float64))


def assign_classes(scores: FloatArray, labeled: IntArray, given: IntArray) -> IntArray:
    """Argmax class per point, smallest index on ties; labeled points keep ``given``."""
    predictions = np.argmax(scores, axis=1).astype(np.int64)
    predictions[labeled] = given
    return predictions


def accuracy(
    pred: Sequence[int],
    truth: Sequence[int],
    exclude_labeled: Optional[Sequence[int]] = None,
) -> float:
    """
    Percentage of correctly classified points.

    Args:
        pred: Predicted class per point
        truth: True class per point
        exclude_labeled: Indices left out of the evaluation

    Raises:
        InputError: length mismatch
        EvaluationError: nothing left to evaluate
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise InputError(f"{pred.size} predictions for {truth.size} ground-truth labels")
    keep = np.ones(truth.size, dtype=bool)
    if exclude_labeled is not None:
        keep[np.asarray(exclude_labeled, dtype=np.int64)] = False
    if not keep.any():
        raise EvaluationError("no points left to evaluate")
    return 100.0 * float(np.mean(pred[keep] == truth[keep]))


def run_ssl(
    dataset: LabeledDataset,
    labeled: IntArray,
    solver: SolverKind,
    options: SolverOptions,
    graph_options: Optional[GraphOptions] = None,
    graph: Optional[SparseWeightGraph] = None,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> SslResult:
    """
    Label every point by the argmax of one interpolated indicator per class.

    Classes are solved concurrently on one shared graph. Ties go to the
    smallest class index and labeled points keep their true class.

    Args:
        dataset: Points with ground truth
        labeled: Indices whose class is revealed
        solver: Interpolation model
        options: Solver parameters
        graph_options: kNN/bandwidth recipe, used when ``graph`` is not given
        graph: Prebuilt weight graph on ``dataset.cloud``
        max_workers: Concurrent class solves
    """
    labeled = np.unique(np.asarray(labeled, dtype=np.int64))
    if labeled.size == 0:
        raise InputError("semi-supervised run needs at least one labeled point")

    with track_performance(f"ssl {solver.value}") as tracker:
        if graph is None:
            graph_options = graph_options or GraphOptions()
            graph = build_weight_graph(
                dataset.cloud, graph_options.k_sparsify, graph_options.r_sigma, method=graph_options.method
            )
        if graph.n != dataset.n:
            raise InputError(f"graph has {graph.n} vertices but the dataset has {dataset.n} points")

        present = set(np.unique(dataset.truth[labeled]).tolist())
        scores = np.zeros((dataset.n, dataset.num_classes))
        residuals: list[Optional[float]] = [None] * dataset.num_classes

        def solve_class(class_id: int) -> None:
            with track_performance(f"class {class_id}", SLOW_SOLVE_THRESHOLD_MS):
                result = solve(graph, class_indicators(dataset, labeled, class_id), solver, options)
            scores[:, class_id] = result.u
            residuals[class_id] = result.residual

        # classes without labels keep an all-zero indicator
        classes = sorted(present)
        workers = min(len(classes), max_workers)
        if workers <= 1:
            for class_id in classes:
                solve_class(class_id)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(solve_class, classes))

        predictions = assign_classes(scores, labeled, dataset.truth[labeled])

    accuracy_all = accuracy(predictions, dataset.truth)
    accuracy_unlabeled = accuracy(predictions, dataset.truth, labeled) if labeled.size < dataset.n else None
    log_ssl_summary(solver.value, labeled.size, dataset.n, accuracy_all, accuracy_unlabeled, tracker.elapsed_ms())
    return SslResult(
        predictions=predictions,
        scores=scores,
        labeled=labeled,
        accuracy_all=accuracy_all,
        accuracy_unlabeled=accuracy_unlabeled,
        residuals=residuals,
    )


def make_blobs(
    n_per_class: int,
    centers: Sequence[Sequence[float]],
    spread: float,
    seed: int,
) -> LabeledDataset:
    """Isotropic Gaussian clusters, one class per center, points grouped by class."""
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] < 1:
        raise InputError("centers must be a non-empty list of coordinates")
    if n_per_class < 1 or spread < 0:
        raise InputError("blobs need n_per_class >= 1 and a non-negative spread")
    rng = np.random.default_rng(seed)
    points = np.concatenate([c + spread * rng.standard_normal((n_per_class, centers.shape[1])) for c in centers])
    truth = np.repeat(np.arange(centers.shape[0]), n_per_class)
    return LabeledDataset(PointCloud(points), truth, centers.shape[0])


def stratified_subset(dataset: LabeledDataset, size: int, seed: int) -> LabeledDataset:
    """
    Random subset whose class proportions follow the full dataset.

    Per-class quotas are floor(size * share); leftover slots go to the classes
    with the largest fractional remainders, smallest class id first on ties.
    """
    if not 1 <= size <= dataset.n:
        raise InputError(f"subset size must lie in [1, {dataset.n}], got {size}")
    rng = np.random.default_rng(seed)
    counts = np.bincount(dataset.truth, minlength=dataset.num_classes)
    exact = size * counts / dataset.n
    quotas = np.floor(exact).astype(np.int64)
    leftover = size - int(quotas.sum())
    order = np.lexsort((np.arange(dataset.num_classes), -(exact - quotas)))
    quotas[order[:leftover]] += 1

    chosen = [
        rng.choice(np.flatnonzero(dataset.truth == c), size=int(q), replace=False)
        for c, q in enumerate(quotas)
        if q > 0
    ]
    indices = np.sort(np.concatenate(chosen))
    logger.info(f"Stratified subset: {indices.size}/{dataset.n} points, seed={seed}")
    return dataset.subset(indices)
