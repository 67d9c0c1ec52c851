"""Records and summaries emitted by pipeline runs."""
import math
from typing import Optional

from pydantic import BaseModel, Field


class MetricRecord(BaseModel):
    """One line of the metrics log: a channel solve within an outer cycle."""

    run_id: str
    cycle: int
    channel: Optional[int] = None
    psnr: Optional[float] = None
    residual: Optional[float] = None
    wall_ms: float = 0.0

    def to_line(self) -> str:
        """Render as ``key=value`` pairs; missing values are ``-``, infinite PSNR is ``inf``."""
        channel = "-" if self.channel is None else str(self.channel)
        if self.psnr is None:
            psnr = "-"
        elif math.isinf(self.psnr):
            psnr = "inf"
        else:
            psnr = f"{self.psnr:.6f}"
        residual = "-" if self.residual is None else f"{self.residual:.6e}"
        return (
            f"run_id={self.run_id} cycle={self.cycle} channel={channel} "
            f"psnr={psnr} residual={residual} wall_ms={self.wall_ms:.1f}"
        )


class RunSummary(BaseModel):
    """Machine-readable result of one CLI run."""

    run_id: str
    command: str
    solver: str
    status: str = "ok"
    psnr: Optional[str] = Field(default=None, description="Final PSNR in dB, or 'inf'")
    accuracy_all: Optional[float] = None
    accuracy_unlabeled: Optional[float] = None
    cycles: int = 0
    outputs: list[str] = Field(default_factory=list)
    wall_ms: float = 0.0
