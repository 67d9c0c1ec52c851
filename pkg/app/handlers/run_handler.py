"""Handler that executes one configured run and writes its artifacts."""
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from app.config import RuntimeSection
from app.constants import (
    BLOBS_CENTERS,
    BLOBS_LABELS_PER_CLASS,
    BLOBS_PER_CLASS,
    BLOBS_SPREAD,
    EXIT_OK,
    RUN_ID_LENGTH,
)
from app.models.domain import ImageBuffer, LabeledDataset
from app.models.requests import RunConfig
from app.models.responses import MetricRecord, RunSummary
from app.services.errors import ConfigValidationError, InputError
from app.services.metrics import MetricsLog, psnr
from app.services.mnist_loader import load_mnist_idx
from app.services.netpbm import read_image, read_mask, write_image
from app.services.pipelines import colorize, inpaint, subsample_mask
from app.services.ssl_cluster import make_blobs, run_ssl, sample_label_set, stratified_subset
from app.utils.error_handler import handle_run_error
from app.utils.logging_helpers import format_psnr
from app.utils.performance_tracker import PerformanceTracker

logger = logging.getLogger(__name__)

OUTPUT_FIELDS = {"output", "metrics", "summary"}


def build_run_id(config: RunConfig) -> str:
    """Digest of the validated config without output paths; equal configs share an id."""
    canonical = config.model_dump_json(exclude=OUTPUT_FIELDS, by_alias=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:RUN_ID_LENGTH]


@dataclass
class RunOutcome:
    """Results held in memory until the run is complete."""

    summary: RunSummary
    writers: list[tuple[Path, Callable[[Path], None]]] = field(default_factory=list)


class RunHandler:
    """Business logic for the ssl, inpaint and colorize commands."""

    def __init__(self, runtime: Optional[RuntimeSection] = None):
        runtime = runtime or RuntimeSection()
        self.max_workers = runtime.max_workers
        self.slow_cycle_ms = runtime.slow_cycle_ms

    def run(self, config: RunConfig) -> int:
        """
        Execute the configured pipeline and write its artifacts.

        Nothing is written unless the whole pipeline succeeds.

        Returns:
            Process exit code
        """
        run_id = build_run_id(config)
        tracker = PerformanceTracker(f"run {run_id}")
        tracker.start()
        logger.info(f"▶️ Run {run_id}: command={config.command}, solver={config.solver.value}")
        try:
            self.validate(config)
            metrics_log = MetricsLog(run_id)
            if config.command == "ssl":
                outcome = self._run_ssl(config, run_id, metrics_log)
            elif config.command == "inpaint":
                outcome = self._run_inpaint(config, run_id, metrics_log)
            else:
                outcome = self._run_colorize(config, run_id, metrics_log)
            outcome.summary.wall_ms = tracker.stop()
            self._write_artifacts(config, outcome, metrics_log)
        except Exception as e:
            tracker.stop()
            return handle_run_error(e, run_id, tracker.elapsed_ms())

        logger.info(f"✅ Run {run_id} finished in {tracker.elapsed_ms():.0f}ms")
        return EXIT_OK

    def validate(self, config: RunConfig) -> None:
        """
        Check that every referenced path is usable before any compute starts.

        Raises:
            ConfigValidationError: listing every problem found
        """
        problems: list[str] = []

        def require(value: Optional[Path], flag: str) -> None:
            if value is None:
                problems.append(f"{flag} is required for '{config.command}'")
            elif not value.is_file():
                problems.append(f"{flag} {value} does not exist")

        def optional(value: Optional[Path], flag: str) -> None:
            if value is not None and not value.is_file():
                problems.append(f"{flag} {value} does not exist")

        if config.command == "ssl":
            if config.dataset == "mnist":
                require(config.input, "--input")
                require(config.labels_path, "--labels-path")
        elif config.command == "inpaint":
            require(config.input, "--input")
            optional(config.truth, "--truth")
            self._check_mask_source(config, problems)
        else:
            require(config.input, "--input")
            optional(config.truth, "--truth")
            optional(config.samples, "--samples")
            if config.samples is None and config.truth is None:
                problems.append("colorize needs color samples from --samples or --truth")
            self._check_mask_source(config, problems)

        if config.command != "ssl" and config.output is None:
            problems.append(f"--output is required for '{config.command}'")
        for flag, path in (("--output", config.output), ("--metrics", config.metrics), ("--summary", config.summary)):
            if path is not None and not path.parent.is_dir():
                problems.append(f"{flag} directory {path.parent} does not exist")

        if problems:
            raise ConfigValidationError(problems)

    @staticmethod
    def _check_mask_source(config: RunConfig, problems: list[str]) -> None:
        if config.mask is not None and config.rate is not None:
            problems.append("give either --mask or --rate, not both")
        elif config.mask is None and config.rate is None:
            problems.append("an observation mask is required: --mask or --rate")
        elif config.mask is not None and not config.mask.is_file():
            problems.append(f"--mask {config.mask} does not exist")

    @staticmethod
    def _observation_mask(config: RunConfig, image: ImageBuffer) -> np.ndarray:
        if config.mask is not None:
            mask = read_mask(config.mask)
            if mask.shape != (image.height, image.width):
                raise InputError(
                    f"mask is {mask.shape[1]}x{mask.shape[0]} but the image is {image.width}x{image.height}"
                )
            return mask
        return subsample_mask(image.width, image.height, config.rate, config.seed)

    def _load_dataset(self, config: RunConfig) -> LabeledDataset:
        if config.dataset == "blobs":
            dataset = make_blobs(BLOBS_PER_CLASS, BLOBS_CENTERS, BLOBS_SPREAD, config.seed)
        else:
            dataset = load_mnist_idx(config.input, config.labels_path)
        if config.subset is not None and config.subset < dataset.n:
            dataset = stratified_subset(dataset, config.subset, config.seed)
        return dataset

    def _run_ssl(self, config: RunConfig, run_id: str, metrics_log: MetricsLog) -> RunOutcome:
        dataset = self._load_dataset(config)
        count = config.label_count
        if count is None:
            count = BLOBS_LABELS_PER_CLASS * dataset.num_classes
        labeled = sample_label_set(dataset, count, config.seed, stratified=config.stratified)
        result = run_ssl(
            dataset,
            labeled,
            config.solver,
            config.solver_options,
            graph_options=config.graph,
            max_workers=self.max_workers,
        )
        for class_id, residual in enumerate(result.residuals):
            metrics_log.record(MetricRecord(run_id=run_id, cycle=1, channel=class_id, residual=residual))

        outcome = RunOutcome(
            summary=RunSummary(
                run_id=run_id,
                command=config.command,
                solver=config.solver.value,
                accuracy_all=result.accuracy_all,
                accuracy_unlabeled=result.accuracy_unlabeled,
                cycles=1,
            )
        )
        if config.output is not None:
            text = "".join(f"{p}\n" for p in result.predictions.tolist())
            outcome.writers.append((config.output, lambda path: path.write_text(text, encoding="utf-8")))
        return outcome

    def _run_inpaint(self, config: RunConfig, run_id: str, metrics_log: MetricsLog) -> RunOutcome:
        source = read_image(config.input)
        mask = self._observation_mask(config, source)
        truth = read_image(config.truth) if config.truth is not None else None
        if truth is None and config.mask is None:
            # a synthesized mask hides pixels of a complete image, which is its own ground truth
            truth = source

        options = config.inpaint_options()
        result = inpaint(
            source.with_mask(mask),
            options,
            truth=truth,
            run_id=run_id,
            sink=metrics_log.record,
            max_workers=self.max_workers,
            slow_cycle_ms=self.slow_cycle_ms,
        )
        return self._image_outcome(config, run_id, result.image, truth, cycles=len({r.cycle for r in result.records}))

    def _run_colorize(self, config: RunConfig, run_id: str, metrics_log: MetricsLog) -> RunOutcome:
        gray = read_image(config.input)
        truth = read_image(config.truth) if config.truth is not None else None
        colors = read_image(config.samples) if config.samples is not None else truth
        mask = self._observation_mask(config, colors)

        result = colorize(
            gray,
            colors.with_mask(mask),
            config.inpaint_options(),
            truth=truth,
            run_id=run_id,
            sink=metrics_log.record,
            max_workers=self.max_workers,
            slow_cycle_ms=self.slow_cycle_ms,
        )
        return self._image_outcome(config, run_id, result.image, truth, cycles=1)

    @staticmethod
    def _image_outcome(
        config: RunConfig,
        run_id: str,
        image: ImageBuffer,
        truth: Optional[ImageBuffer],
        cycles: int,
    ) -> RunOutcome:
        summary = RunSummary(
            run_id=run_id,
            command=config.command,
            solver=config.solver.value,
            psnr=format_psnr(psnr(image, truth)) if truth is not None else None,
            cycles=cycles,
        )
        return RunOutcome(summary=summary, writers=[(config.output, lambda path: write_image(image, path))])

    @staticmethod
    def _write_artifacts(config: RunConfig, outcome: RunOutcome, metrics_log: MetricsLog) -> None:
        for path, writer in outcome.writers:
            writer(path)
            outcome.summary.outputs.append(str(path))
        if config.metrics is not None:
            metrics_log.write(config.metrics)
            outcome.summary.outputs.append(str(config.metrics))
        if config.summary is not None:
            config.summary.write_text(outcome.summary.model_dump_json(indent=2), encoding="utf-8")
            logger.info(f"Wrote run summary to {config.summary}")
