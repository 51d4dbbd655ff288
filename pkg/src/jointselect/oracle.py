"""Independent minimum-loss solver used to certify the constructions.

Minimizing the loss over conflict-free matrices is a convex QP: the
feasible set is the probability simplex over the N^2 - N off-diagonal
entries (diagonal coordinates are excluded from the variable vector
entirely, so conflict-freedom holds exactly), and the objective is a
convex quadratic. Projected gradient descent with the fixed step
1/(4(N-1)) — a bound on the Hessian spectral norm, since the row and
column couplings each contribute eigenvalues at most 2(N-1) — therefore
descends monotonically and its fixed points are global minima.

This solver deliberately shares no code path with the closed-form
constructions it is used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SUM_RTOL, JointSelectionMatrix, ProblemInstance, Vec, loss
from .errors import DimensionTooLargeError, TotalNotOneError

MAX_ORACLE_ARMS = 12


@dataclass(frozen=True)
class OracleResult:
    matrix: JointSelectionMatrix
    loss: float
    iterations: int
    gradient_mapping_norm: float
    converged: bool


def project_simplex(y: Vec) -> Vec:
    """Euclidean projection onto {x >= 0, sum x = 1} by sort and threshold."""
    u = np.sort(y)[::-1]
    thresholds = (np.cumsum(u) - 1.0) / np.arange(1, y.size + 1)
    k = np.nonzero(u > thresholds)[0][-1]
    return np.maximum(y - thresholds[k], 0.0)


def solve_min_loss(
    inst: ProblemInstance, tol: float = 1e-10, max_iter: int = 200_000
) -> OracleResult:
    """Projected gradient descent from the uniform point.

    Stops when the gradient-mapping displacement ||p - Proj(p - step grad)||_inf
    drops to ``tol``; if ``max_iter`` runs out first the best (latest) iterate
    is returned with ``converged=False``. By convexity a converged result is
    globally optimal to within the tolerance.
    """
    if abs(inst.total - 1.0) > SUM_RTOL:
        raise TotalNotOneError(f"oracle needs total = 1, got {inst.total:.17g}")
    n = inst.n
    if n > MAX_ORACLE_ARMS:
        raise DimensionTooLargeError(
            f"oracle is desk-scale (N <= {MAX_ORACLE_ARMS}), got {n}"
        )
    rows, cols = np.nonzero(~np.eye(n, dtype=bool))
    d = rows.size
    a, b = inst.a, inst.b
    step = 1.0 / (4.0 * (n - 1))

    p = np.full(d, 1.0 / d)
    gap = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        pi_a = np.bincount(rows, weights=p, minlength=n)
        pi_b = np.bincount(cols, weights=p, minlength=n)
        grad = 2.0 * (pi_a - a)[rows] + 2.0 * (pi_b - b)[cols]
        q = project_simplex(p - step * grad)
        gap = float(np.abs(q - p).max())
        p = q
        if gap <= tol:
            break

    entries = np.zeros((n, n))
    entries[rows, cols] = p
    matrix = JointSelectionMatrix(entries, 1.0)
    return OracleResult(matrix, loss(matrix, inst), iterations, gap, gap <= tol)


__all__ = ["MAX_ORACLE_ARMS", "OracleResult", "project_simplex", "solve_min_loss"]
