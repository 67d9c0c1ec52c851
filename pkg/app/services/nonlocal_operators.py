"""Edge-wise nonlocal operators: weighted gradient, row shrinkage, Bregman update, energies."""
from typing import Optional

import numpy as np
from scipy import sparse

from app.models.domain import EdgeField, FloatArray, LabelConstraint, SparseWeightGraph


def row_scale(graph: SparseWeightGraph, labels: LabelConstraint, factor: float) -> FloatArray:
    """Per-point multiplier: ``factor`` on labeled points, 1 elsewhere."""
    scale = np.ones(graph.n)
    scale[labels.indices] = factor
    return scale


def gradient_matrix(graph: SparseWeightGraph, scale: FloatArray) -> sparse.csr_matrix:
    """Sparse (edges x n) matrix G with (G u)(x, y) = scale[x] * sqrt(omega(x, y)) * (u(x) - u(y))."""
    m = graph.num_edges
    coeff = scale[graph.edge_rows] * graph.sqrt_weights
    edges = np.arange(m)
    return sparse.csr_matrix(
        (
            np.concatenate((coeff, -coeff)),
            (np.concatenate((edges, edges)), np.concatenate((graph.edge_rows, graph.edge_cols))),
        ),
        shape=(m, graph.n),
    )


def nonlocal_gradient(
    graph: SparseWeightGraph,
    u: FloatArray,
    labels: LabelConstraint,
    mu: float,
) -> EdgeField:
    """
    D_NG u: sqrt(omega(x, y)) (u(x) - u(y)) per stored edge, rows of labeled x scaled by mu.

    With mu = 1 this is the plain nonlocal gradient.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (graph.n,):
        raise ValueError(f"u has shape {u.shape}, expected ({graph.n},)")
    scale = row_scale(graph, labels, mu)
    rows, cols = graph.edge_rows, graph.edge_cols
    return scale[rows] * graph.sqrt_weights * (u[rows] - u[cols])


def shrink(z: FloatArray, gamma: float) -> FloatArray:
    """
    Soft shrinkage z / ||z|| * max(||z|| - gamma, 0).

    The exact minimizer of gamma ||d|| + 1/2 ||d - z||^2; a zero vector maps to zero.
    """
    z = np.asarray(z, dtype=np.float64)
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return np.zeros_like(z)
    return z * (max(norm - gamma, 0.0) / norm)


def shrink_rows(graph: SparseWeightGraph, z: EdgeField, gamma: float) -> EdgeField:
    """Apply ``shrink`` independently to every point's row of an edge field."""
    norms = graph.row_norms(z)
    factor = np.divide(
        np.maximum(norms - gamma, 0.0),
        norms,
        out=np.zeros_like(norms),
        where=norms > 0,
    )
    return z * factor[graph.edge_rows]


def d_subproblem(
    graph: SparseWeightGraph,
    u: FloatArray,
    Q: EdgeField,
    labels: LabelConstraint,
    mu: float,
    lam: float,
    grad: Optional[EdgeField] = None,
) -> EdgeField:
    """Rowwise D(x, .) = shrink(D_NG u(x, .) + Q(x, .), 1 / lambda); ``grad`` reuses a computed D_NG u."""
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if grad is None:
        grad = nonlocal_gradient(graph, u, labels, mu)
    return shrink_rows(graph, grad + Q, 1.0 / lam)


def q_update(Q: EdgeField, dng_u: EdgeField, D: EdgeField) -> EdgeField:
    """Bregman variable update Q + (D_NG u - D)."""
    return Q + (dng_u - D)


def wntv_energy(graph: SparseWeightGraph, u: FloatArray, labels: LabelConstraint, mu: float) -> float:
    """Sum over points of the row norm of D_NG u (labeled rows weighted by mu)."""
    return float(graph.row_norms(nonlocal_gradient(graph, u, labels, mu)).sum())


def ntv_energy(graph: SparseWeightGraph, u: FloatArray) -> float:
    """Unweighted nonlocal total variation: sum_x (sum_y omega(x, y) (u(x) - u(y))^2)^(1/2)."""
    rows, cols = graph.edge_rows, graph.edge_cols
    grad = graph.sqrt_weights * (u[rows] - u[cols])
    return float(graph.row_norms(grad).sum())


def dirichlet_energy(graph: SparseWeightGraph, u: FloatArray, labels: LabelConstraint, mu: float) -> float:
    """Quadratic energy sum_x c_x sum_y omega(x, y) (u(x) - u(y))^2, c_x = mu on labeled rows."""
    scale = row_scale(graph, labels, mu)
    rows, cols = graph.edge_rows, graph.edge_cols
    diff = u[rows] - u[cols]
    return float(np.sum(scale[rows] * graph.weights.data * diff * diff))
