"""Patch-graph image inpainting and colorization from sparse color samples."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from app.constants import DEFAULT_MAX_WORKERS, SLOW_CYCLE_THRESHOLD_MS
from app.models.domain import BoolArray, ImageBuffer, PatchSet, SparseWeightGraph
from app.models.requests import InpaintOptions
from app.models.responses import MetricRecord
from app.services.errors import DegenerateBandwidthError, InputError
from app.services.metrics import psnr, psnr_values
from app.services.patch_space import (
    extract_patches,
    function_from_image,
    image_from_function,
    semi_local_scales,
)
from app.services.point_graph import build_weight_graph
from app.services.variational_solvers import SolveResult, solve
from app.utils.logging_helpers import log_cycle_summary
from app.utils.performance_tracker import track_performance

logger = logging.getLogger(__name__)

RecordSink = Callable[[MetricRecord], None]


@dataclass
class PipelineResult:
    """Reconstructed image plus the metric records of every cycle."""

    image: ImageBuffer
    records: list[MetricRecord] = field(default_factory=list)
    solves: int = 0

    @property
    def final_residuals(self) -> list[Optional[float]]:
        last = max((r.cycle for r in self.records), default=0)
        return [r.residual for r in self.records if r.cycle == last and r.channel is not None]


def subsample_mask(width: int, height: int, rate: float, rng_seed: int) -> BoolArray:
    """
    Observe exactly round(rate * width * height) pixels chosen uniformly without replacement.

    Returns:
        (height, width) boolean mask, True = observed
    """
    if not 0 < rate <= 1:
        raise InputError(f"sample rate must lie in (0, 1], got {rate}")
    total = width * height
    count = int(np.floor(rate * total + 0.5))
    if count == 0:
        raise InputError(f"rate {rate} observes no pixel of a {width}x{height} image")
    rng = np.random.default_rng(rng_seed)
    mask = np.zeros(total, dtype=bool)
    mask[rng.choice(total, size=count, replace=False)] = True
    return mask.reshape(height, width)


def sample_colors(image: ImageBuffer, rate: float, rng_seed: int) -> ImageBuffer:
    """Sparse color-sample buffer: the image under a fresh random mask."""
    return image.with_mask(subsample_mask(image.width, image.height, rate, rng_seed))


def random_fill_init(image: ImageBuffer, rng_seed: int) -> ImageBuffer:
    """Replace unobserved pixels by seeded uniform noise in [0, 255]; observed pixels stay."""
    rng = np.random.default_rng(rng_seed)
    noise = rng.uniform(0.0, 255.0, size=image.values.shape)
    values = np.where(image.mask[:, :, None], image.values, noise)
    return ImageBuffer(values, image.mask.copy())


def _build_graph(patches: PatchSet, options: InpaintOptions) -> SparseWeightGraph:
    graph_options = options.graph
    try:
        return build_weight_graph(
            patches.cloud,
            graph_options.k_sparsify,
            graph_options.r_sigma,
            method=graph_options.method,
        )
    except DegenerateBandwidthError as exc:
        raise DegenerateBandwidthError(exc.index, exc.r_sigma, pixel=patches.pixel_of(exc.index)) from exc


def _solve_channels(
    graph: SparseWeightGraph,
    patches: PatchSet,
    labels_source: ImageBuffer,
    options: InpaintOptions,
    max_workers: int,
) -> list[SolveResult]:
    """Interpolate every channel on the shared graph; channel solves run concurrently."""

    def solve_channel(channel: int) -> SolveResult:
        _, labels = function_from_image(labels_source, patches, channel)
        return solve(graph, labels, options.solver, options.solver_options)

    channels = range(labels_source.channels)
    workers = min(labels_source.channels, max_workers)
    if workers <= 1:
        return [solve_channel(c) for c in channels]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve_channel, channels))


def _record_cycle(
    cycle: int,
    run_id: str,
    current: ImageBuffer,
    results: list[SolveResult],
    truth: Optional[ImageBuffer],
    elapsed_ms: float,
    sink: Optional[RecordSink],
) -> list[MetricRecord]:
    records = []
    for channel, result in enumerate(results):
        channel_psnr = None
        if truth is not None:
            channel_psnr = psnr_values(current.values[:, :, channel], truth.values[:, :, channel])
        records.append(
            MetricRecord(
                run_id=run_id,
                cycle=cycle,
                channel=channel,
                psnr=channel_psnr,
                residual=result.residual,
                wall_ms=elapsed_ms,
            )
        )
    if truth is not None and current.channels > 1:
        records.append(MetricRecord(run_id=run_id, cycle=cycle, psnr=psnr(current, truth), wall_ms=elapsed_ms))
    if sink is not None:
        for record in records:
            sink(record)
    return records


def _check_truth(image: ImageBuffer, truth: Optional[ImageBuffer]) -> None:
    if truth is not None and truth.values.shape != image.values.shape:
        raise InputError(f"ground truth shape {truth.values.shape} does not match image {image.values.shape}")


def inpaint(
    image: ImageBuffer,
    options: InpaintOptions,
    truth: Optional[ImageBuffer] = None,
    run_id: str = "",
    sink: Optional[RecordSink] = None,
    max_workers: int = DEFAULT_MAX_WORKERS,
    slow_cycle_ms: float = SLOW_CYCLE_THRESHOLD_MS,
) -> PipelineResult:
    """
    Iterative patch-graph inpainting.

    Each outer cycle rebuilds the patch set and weight graph from the current
    image, solves every channel on that graph with fresh Bregman variables and
    writes the result back. Observed pixels are never modified.

    Args:
        image: Observed image with its mask
        options: Outer-loop, graph, patch and solver parameters
        truth: Optional ground truth for per-cycle PSNR
        run_id: Id stamped on metric records
        sink: Receives each metric record as it is produced
        max_workers: Concurrent channel solves
        slow_cycle_ms: Outer cycles slower than this are logged as warnings
    """
    _check_truth(image, truth)
    if image.observed_count == 0:
        raise InputError("inpainting needs at least one observed pixel")
    if image.observed_count == image.height * image.width:
        logger.info("Mask is full; nothing to inpaint")
        return PipelineResult(image=image.with_values(image.values.copy()))

    scales = semi_local_scales(image)
    current = random_fill_init(image, options.rng_seed)
    result = PipelineResult(image=current)

    for cycle in range(1, options.outer_iters + 1):
        with track_performance(f"inpaint cycle {cycle}", slow_cycle_ms) as tracker:
            patches = extract_patches(current, options.patch_config, scales=scales)
            graph = _build_graph(patches, options)
            results = _solve_channels(graph, patches, current, options, max_workers)
            for channel, solved in enumerate(results):
                current = image_from_function(solved.u, patches, channel, current)
        result.solves += len(results)
        records = _record_cycle(cycle, run_id, current, results, truth, tracker.elapsed_ms(), sink)
        result.records.extend(records)
        log_cycle_summary(
            cycle,
            options.outer_iters,
            options.solver.value,
            tracker.elapsed_ms(),
            psnr=psnr(current, truth) if truth is not None else None,
            residuals=[r.residual for r in results],
        )

    result.image = current
    return result


def colorize(
    gray: ImageBuffer,
    color_samples: ImageBuffer,
    options: InpaintOptions,
    truth: Optional[ImageBuffer] = None,
    run_id: str = "",
    sink: Optional[RecordSink] = None,
    max_workers: int = DEFAULT_MAX_WORKERS,
    slow_cycle_ms: float = SLOW_CYCLE_THRESHOLD_MS,
) -> PipelineResult:
    """
    Colorize a gray image from sparse color samples.

    The patch graph is built once from the fully known gray image; R, G and B
    are interpolated as three scalar functions on it. Sampled pixels keep
    their given colors.
    """
    if gray.channels != 1:
        raise InputError(f"gray image must have 1 channel, got {gray.channels}")
    if gray.observed_count != gray.height * gray.width:
        raise InputError("gray image must be fully observed")
    if color_samples.channels != 3:
        raise InputError(f"color samples must have 3 channels, got {color_samples.channels}")
    if (color_samples.height, color_samples.width) != (gray.height, gray.width):
        raise InputError("color samples and gray image differ in size")
    if color_samples.observed_count == 0:
        raise InputError("color sample mask is empty")
    _check_truth(color_samples, truth)

    with track_performance("colorize", slow_cycle_ms) as tracker:
        patches = extract_patches(gray, options.patch_config)
        graph = _build_graph(patches, options)
        results = _solve_channels(graph, patches, color_samples, options, max_workers)
        current = color_samples
        for channel, solved in enumerate(results):
            current = image_from_function(solved.u, patches, channel, current)

    result = PipelineResult(image=current, solves=len(results))
    result.records = _record_cycle(1, run_id, current, results, truth, tracker.elapsed_ms(), sink)
    log_cycle_summary(
        1,
        1,
        options.solver.value,
        tracker.elapsed_ms(),
        psnr=psnr(current, truth) if truth is not None else None,
        residuals=[r.residual for r in results],
    )
    return result
