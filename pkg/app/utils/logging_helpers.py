"""Logging helper utilities."""
import logging
import math
from typing import Optional

from app.constants import PSNR_INF_SENTINEL

logger = logging.getLogger(__name__)


def format_psnr(value: Optional[float]) -> Optional[str]:
    """PSNR as text for logs and summaries; infinity becomes the 'inf' sentinel."""
    if value is None:
        return None
    if math.isinf(value):
        return PSNR_INF_SENTINEL
    return f"{value:.4f}"


def log_cycle_summary(
    cycle: int,
    total_cycles: int,
    solver: str,
    elapsed_ms: float,
    psnr: Optional[float] = None,
    residuals: Optional[list[Optional[float]]] = None,
) -> None:
    """
    Log the outcome of one outer cycle.
    
    Args:
        cycle: 1-based cycle number
        total_cycles: Number of planned cycles
        solver: Solver name
        elapsed_ms: Cycle wall time in milliseconds
        psnr: PSNR against ground truth, when known
        residuals: Final Bregman residual per channel (None for quadratic solvers)
    """
    parts = [f"cycle {cycle}/{total_cycles}", f"solver={solver}", f"time={elapsed_ms:.0f}ms"]
    if psnr is not None:
        parts.append(f"psnr={format_psnr(psnr)}dB")
    if residuals and any(r is not None for r in residuals):
        parts.append("residual=" + ",".join("-" if r is None else f"{r:.2e}" for r in residuals))
    logger.info("🔁 " + ", ".join(parts))


def log_ssl_summary(
    solver: str,
    labeled: int,
    total: int,
    accuracy_all: float,
    accuracy_unlabeled: Optional[float],
    elapsed_ms: float,
) -> None:
    """Log classification accuracy over all points and over unlabeled points."""
    unlabeled = "n/a" if accuracy_unlabeled is None else f"{accuracy_unlabeled:.2f}%"
    logger.info(
        f"🎯 SSL {solver}: labels={labeled}/{total}, accuracy_all={accuracy_all:.2f}%, "
        f"accuracy_unlabeled={unlabeled}, time={elapsed_ms:.0f}ms"
    )
