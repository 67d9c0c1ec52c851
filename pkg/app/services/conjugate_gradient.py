"""Preconditioned conjugate gradient for the pinned SPD systems."""
import logging
from typing import Callable, Optional

import numpy as np

from app.models.domain import FloatArray
from app.services.errors import ConvergenceError, SolverError

logger = logging.getLogger(__name__)

LinearOperator = Callable[[FloatArray], FloatArray]


def cg_solve(
    apply: LinearOperator,
    rhs: FloatArray,
    tol: float = 1e-6,
    max_iters: int = 1000,
    inverse_diagonal: Optional[FloatArray] = None,
    x0: Optional[FloatArray] = None,
) -> FloatArray:
    """
    Solve A x = rhs for symmetric positive definite A given as a callback.

    Args:
        apply: Callback computing A @ v
        rhs: Right-hand side
        tol: Relative residual target ||A x - rhs|| / ||rhs||
        max_iters: Iteration cap
        inverse_diagonal: Jacobi preconditioner 1 / diag(A), or None
        x0: Initial guess (zeros by default)

    Returns:
        Solution vector

    Raises:
        ConvergenceError: tol not reached within max_iters (carries the achieved residual)
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)

    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=np.float64)
    r = rhs - apply(x) if x0 is not None else rhs.copy()
    residual = float(np.linalg.norm(r)) / rhs_norm
    if residual <= tol:
        return x

    z = r * inverse_diagonal if inverse_diagonal is not None else r
    p = z.copy()
    rz = float(r @ z)

    for iteration in range(1, max_iters + 1):
        Ap = apply(p)
        curvature = float(p @ Ap)
        if curvature <= 0.0:
            raise SolverError(f"operator is not positive definite (p'Ap = {curvature:.3e})")
        alpha = rz / curvature
        x += alpha * p
        r -= alpha * Ap

        residual = float(np.linalg.norm(r)) / rhs_norm
        if residual <= tol:
            logger.debug(f"CG converged in {iteration} iterations (relres={residual:.2e})")
            return x

        z = r * inverse_diagonal if inverse_diagonal is not None else r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    raise ConvergenceError(residual, max_iters, tol)
