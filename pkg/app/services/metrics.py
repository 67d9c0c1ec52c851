"""Image quality metric and the line-delimited metrics log."""
import logging
import math
from pathlib import Path
from typing import Union

import numpy as np

from app.constants import PSNR_PEAK
from app.models.domain import ImageBuffer
from app.models.responses import MetricRecord
from app.services.errors import InputError

logger = logging.getLogger(__name__)
metrics_logger = logging.getLogger(f"{__name__}.records")


def psnr_values(u: np.ndarray, u_gt: np.ndarray) -> float:
    """-20 log10(RMS(u - u_gt) / 255); +inf when the arrays are identical."""
    u = np.asarray(u, dtype=np.float64)
    u_gt = np.asarray(u_gt, dtype=np.float64)
    if u.shape != u_gt.shape:
        raise InputError(f"PSNR needs identical shapes, got {u.shape} and {u_gt.shape}")
    diff = u - u_gt
    rms = math.sqrt(float(np.mean(diff * diff)))
    if rms == 0.0:
        return math.inf
    return -20.0 * math.log10(rms / PSNR_PEAK)


def psnr(u: ImageBuffer, u_gt: ImageBuffer) -> float:
    """PSNR in dB over all pixels and channels, RMS error against a 255 peak."""
    return psnr_values(u.values, u_gt.values)


class MetricsLog:
    """Collects metric records in memory; written to disk only when a run completes."""

    def __init__(self, run_id: str):
        self.run_id = run_id
        self.records: list[MetricRecord] = []

    def record(self, record: MetricRecord) -> None:
        self.records.append(record)
        metrics_logger.info(record.to_line())

    def to_text(self) -> str:
        return "".join(f"{record.to_line()}\n" for record in self.records)

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")
        logger.info(f"Wrote {len(self.records)} metric records to {path}")
