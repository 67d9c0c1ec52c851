"""
Graph interpolation solvers: GL, WNLL, NTV and WNTV.

The quadratic models and the split Bregman u-subproblem all reduce to the same
pinned least-squares problem ``min ||b - G u||^2`` with ``u`` fixed to ``g`` on
the labeled set, where ``G`` is a row-scaled nonlocal gradient. The row scale
selects the model:

    GL         scale 1 everywhere, b = 0
    WNLL       scale sqrt(mu) on labeled rows, b = 0
    u-step     scale mu on labeled rows, b = D - Q

Normal equations restricted to unlabeled unknowns are symmetric positive
definite whenever every unlabeled component touches a labeled point, and are
solved with Jacobi-preconditioned conjugate gradient.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from app.models.domain import EdgeField, FloatArray, LabelConstraint, SparseWeightGraph
from app.models.requests import SolverKind, SolverOptions
from app.services.conjugate_gradient import cg_solve
from app.services.errors import DivergenceError, SingularSystemError
from app.services.nonlocal_operators import (
    d_subproblem,
    gradient_matrix,
    nonlocal_gradient,
    q_update,
    row_scale,
    wntv_energy,
)

logger = logging.getLogger(__name__)

RESIDUAL_EPS = 1e-12


@dataclass
class SplitBregmanState:
    """Iterates of the split Bregman loop."""

    u: FloatArray
    D: EdgeField
    Q: EdgeField
    iteration: int = 0
    residual_history: list[float] = field(default_factory=list)

    @property
    def final_residual(self) -> Optional[float]:
        return self.residual_history[-1] if self.residual_history else None


@dataclass
class SolveResult:
    """Output of the solver dispatcher."""

    u: FloatArray
    state: Optional[SplitBregmanState] = None

    @property
    def residual(self) -> Optional[float]:
        return None if self.state is None else self.state.final_residual


def initial_guess(n: int, labels: LabelConstraint) -> FloatArray:
    """g on the labeled set, 0 elsewhere."""
    u = np.zeros(n)
    u[labels.indices] = labels.values
    return u


def check_solvable(graph: SparseWeightGraph, labels: LabelConstraint) -> None:
    """Every connected component holding unlabeled points must hold a labeled point."""
    _, component = csgraph.connected_components(graph.union_pattern, directed=False)
    labeled = labels.mask(graph.n)
    anchored = np.zeros(component.max() + 1, dtype=bool)
    anchored[component[labeled]] = True
    floating = ~anchored[component] & ~labeled
    if floating.any():
        first = component[np.flatnonzero(floating)[0]]
        raise SingularSystemError(int(np.sum(floating & (component == first))))


class PinnedSystem:
    """
    Normal equations of ``min ||b - G u||^2`` over unlabeled entries with u = g on S.

    The operator depends only on the graph, labels and row scale, so one
    instance is assembled per solve and reused across Bregman iterations.
    """

    def __init__(self, graph: SparseWeightGraph, labels: LabelConstraint, scale: FloatArray):
        labels.validate_for(graph.n)
        self.graph = graph
        self.labels = labels
        labeled = labels.mask(graph.n)
        self.free = np.flatnonzero(~labeled)
        if self.free.size:
            check_solvable(graph, labels)

        G = gradient_matrix(graph, scale).tocsc()
        self.G_free = G[:, self.free].tocsr()
        self.fixed_contribution = G[:, labels.indices] @ labels.values
        self.A: sparse.csr_matrix = (self.G_free.T @ self.G_free).tocsr()
        self.inverse_diagonal = 1.0 / self.A.diagonal()

    def apply(self, v: FloatArray) -> FloatArray:
        return self.A @ v

    def rhs(self, source: Optional[EdgeField] = None) -> FloatArray:
        b = -self.fixed_contribution if source is None else source - self.fixed_contribution
        return self.G_free.T @ b

    def solve(
        self,
        source: Optional[EdgeField],
        options: SolverOptions,
        warm_start: Optional[FloatArray] = None,
    ) -> FloatArray:
        """Full-length u with labeled entries pinned exactly to g."""
        u = initial_guess(self.graph.n, self.labels)
        if self.free.size == 0:
            return u
        x0 = None if warm_start is None else warm_start[self.free]
        u[self.free] = cg_solve(
            self.apply,
            self.rhs(source),
            tol=options.cg_tol,
            max_iters=options.cg_max_iters,
            inverse_diagonal=self.inverse_diagonal,
            x0=x0,
        )
        return u


def solve_gl(graph: SparseWeightGraph, labels: LabelConstraint, options: SolverOptions) -> FloatArray:
    """Graph Laplacian interpolation: minimize sum omega(x, y)(u(x) - u(y))^2 with u = g on S."""
    system = PinnedSystem(graph, labels, np.ones(graph.n))
    return system.solve(None, options)


def solve_wnll(
    graph: SparseWeightGraph,
    labels: LabelConstraint,
    mu: float,
    options: SolverOptions,
) -> FloatArray:
    """Weighted nonlocal Laplacian: labeled rows of the quadratic energy weighted by mu."""
    system = PinnedSystem(graph, labels, row_scale(graph, labels, math.sqrt(mu)))
    return system.solve(None, options)


def u_subproblem(
    graph: SparseWeightGraph,
    labels: LabelConstraint,
    D: EdgeField,
    Q: EdgeField,
    mu: float,
    options: SolverOptions,
) -> FloatArray:
    """Least-squares u-step: minimize ||D - D_NG u - Q||^2 with u = g on S."""
    system = PinnedSystem(graph, labels, row_scale(graph, labels, mu))
    return system.solve(D - Q, options)


def solve_wntv(
    graph: SparseWeightGraph,
    labels: LabelConstraint,
    options: SolverOptions,
) -> tuple[FloatArray, SplitBregmanState]:
    """
    Weighted nonlocal TV by split Bregman iteration.

    Loop: u-subproblem, rowwise shrinkage with threshold 1/lambda, Bregman
    update; stops when ||D - D_NG u|| / max(||D_NG u||, eps) < bregman_tol or
    after max_bregman_iters.

    Returns:
        Tuple of (u, state with residual history)

    Raises:
        SingularSystemError: unlabeled component without labels
        ConvergenceError: an inner CG solve missed its tolerance
        DivergenceError: iterates or energy became non-finite
    """
    labels.validate_for(graph.n)
    mu = options.resolve_mu(graph.n, labels.size)
    state = SplitBregmanState(
        u=initial_guess(graph.n, labels),
        D=graph.zero_field(),
        Q=graph.zero_field(),
    )
    if labels.size == graph.n:
        return state.u, state

    system = PinnedSystem(graph, labels, row_scale(graph, labels, mu))
    for iteration in range(1, options.max_bregman_iters + 1):
        state.u = system.solve(state.D - state.Q, options, warm_start=state.u)
        grad = nonlocal_gradient(graph, state.u, labels, mu)
        state.D = d_subproblem(graph, state.u, state.Q, labels, mu, options.lam, grad=grad)
        state.Q = q_update(state.Q, grad, state.D)
        state.iteration = iteration

        residual = float(np.linalg.norm(state.D - grad)) / max(float(np.linalg.norm(grad)), RESIDUAL_EPS)
        state.residual_history.append(residual)
        if not math.isfinite(residual) or not np.all(np.isfinite(state.u)):
            raise DivergenceError(f"split Bregman diverged at iteration {iteration}; try a larger lambda")
        if residual < options.bregman_tol:
            break
    else:
        logger.warning(
            f"Split Bregman reached {options.max_bregman_iters} iterations with residual "
            f"{state.final_residual:.3e} (tol {options.bregman_tol:.1e})"
        )

    energy = wntv_energy(graph, state.u, labels, mu)
    if not math.isfinite(energy):
        raise DivergenceError(f"energy is not finite after {state.iteration} iterations")
    logger.debug(
        f"WNTV solve: n={graph.n}, |S|={labels.size}, mu={mu:.3g}, iterations={state.iteration}, "
        f"residual={state.final_residual:.3e}, energy={energy:.6g}"
    )
    return state.u, state


def solve_ntv(graph: SparseWeightGraph, labels: LabelConstraint, options: SolverOptions) -> FloatArray:
    """Unweighted nonlocal TV: WNTV with mu = 1."""
    u, _ = solve_wntv(graph, labels, options.model_copy(update={"mu": 1.0}))
    return u


def solve(
    graph: SparseWeightGraph,
    labels: LabelConstraint,
    kind: SolverKind,
    options: SolverOptions,
) -> SolveResult:
    """Run the selected interpolation model."""
    if kind is SolverKind.GL:
        return SolveResult(solve_gl(graph, labels, options))
    if kind is SolverKind.WNLL:
        mu = options.resolve_mu(graph.n, labels.size)
        return SolveResult(solve_wnll(graph, labels, mu, options))
    if kind is SolverKind.NTV:
        options = options.model_copy(update={"mu": 1.0})
    u, state = solve_wntv(graph, labels, options)
    return SolveResult(u, state)
