"""Centralized error handling utilities."""
import logging

from app.constants import EXIT_INPUT_ERROR, EXIT_NUMERICAL_ERROR, EXIT_UNEXPECTED
from app.services.errors import (
    ConfigValidationError,
    EvaluationError,
    GraphError,
    InputError,
    SolverError,
)

logger = logging.getLogger(__name__)


def handle_run_error(
    error: Exception,
    run_id: str,
    elapsed_time_ms: float
) -> int:
    """
    Log a failed run and convert the error to a process exit code.
    
    Caller mistakes (bad config, unreadable inputs) are logged as warnings,
    numerical failures and unexpected exceptions as errors.
    
    Args:
        error: Exception raised by the run
        run_id: Run id for logging
        elapsed_time_ms: Elapsed time in milliseconds
        
    Returns:
        Exit code (2 input/config, 3 graph/solver, 1 unexpected)
    """
    if isinstance(error, ConfigValidationError):
        for problem in error.problems:
            logger.warning(f"Invalid configuration for run {run_id}: {problem}")
        return EXIT_INPUT_ERROR
    
    if isinstance(error, (InputError, EvaluationError)):
        logger.warning(
            f"Input error in run {run_id}: {error} (elapsed: {elapsed_time_ms:.0f}ms)"
        )
        return EXIT_INPUT_ERROR
    
    if isinstance(error, (GraphError, SolverError)):
        logger.error(
            f"Numerical failure in run {run_id}: {type(error).__name__}: {error} "
            f"(elapsed: {elapsed_time_ms:.0f}ms)"
        )
        return EXIT_NUMERICAL_ERROR
    
    logger.error(
        f"Unexpected error in run {run_id} after {elapsed_time_ms:.0f}ms: {error}",
        exc_info=True
    )
    return EXIT_UNEXPECTED
