"""Performance tracking utilities."""
import time
from typing import Optional, Iterator
from contextlib import contextmanager
import logging

logger = logging.getLogger(__name__)


class PerformanceTracker:
    """Track wall time of a cycle, a solve or a whole run."""
    
    def __init__(self, operation_name: str):
        """Initialize performance tracker."""
        self.operation_name = operation_name
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None
    
    def start(self) -> None:
        """Start tracking."""
        self.start_time = time.perf_counter()
    
    def stop(self) -> float:
        """
        Stop tracking and return elapsed time in milliseconds.
        
        Returns:
            Elapsed time in milliseconds
        """
        if self.start_time is None:
            raise ValueError("Tracker not started")
        self.end_time = time.perf_counter()
        return (self.end_time - self.start_time) * 1000
    
    def elapsed_ms(self) -> float:
        """
        Get elapsed time in milliseconds; frozen once the tracker is stopped.
        
        Returns:
            Elapsed time in milliseconds
        """
        if self.start_time is None:
            return 0.0
        end = self.end_time if self.end_time is not None else time.perf_counter()
        return (end - self.start_time) * 1000


@contextmanager
def track_performance(operation_name: str, slow_threshold_ms: Optional[float] = None) -> Iterator[PerformanceTracker]:
    """
    Context manager for tracking performance.
    
    Usage:
        with track_performance("cycle 3") as tracker:
            run_cycle()
        # tracker.elapsed_ms() available after context
    """
    tracker = PerformanceTracker(operation_name)
    tracker.start()
    try:
        yield tracker
    finally:
        elapsed = tracker.stop()
        if slow_threshold_ms is not None and elapsed > slow_threshold_ms:
            logger.warning(f"Slow operation {operation_name}: {elapsed:.0f}ms (threshold {slow_threshold_ms:.0f}ms)")
        else:
            logger.debug(f"{operation_name} took {elapsed:.2f}ms")
