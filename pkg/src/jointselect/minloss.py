"""Minimum-loss construction when one arm is too popular, plus certificates.

With unit total, at most one arm can have popularity S_i > 1 (popularities
sum to 2). When that happens zero loss is impossible, and the minimum

    L_min = N/(2(N-1)) * (S_max - 1)^2

is attained by a matrix that routes everything through the hot arm: with
eps = (S_max - 1)/(2(N-1)), its column holds A_i + eps, its row B_j + eps,
and every entry avoiding the hot arm is 0. Optimality is certified two
independent ways: explicit KKT multipliers (mu = 2(N-2) eps on the sum
constraint, lambda_{i,j} = 2N eps on the inactive-region nonnegativity
constraints) whose four residuals a verifier can check numerically, and
the fact that the loss is a convex quadratic, whose Hessian over the
off-diagonal coordinates is H[(i,j),(k,l)] = 2(delta_ik + delta_jl).

`optimal_satisfaction_matrix` is the top-level dispatch: exact zero-loss
construction when max S <= 1 (+1e-9), the hot-arm matrix with its KKT
certificate otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    SUM_RTOL,
    JointSelectionMatrix,
    Mat,
    ProblemInstance,
    loss,
    loss_gradient,
)
from .errors import (
    DimensionTooLargeError,
    InternalInvariantError,
    NotApplicableError,
    TotalNotOneError,
    ValidationError,
)
from .zeroloss import construct_zero_loss

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class KktResiduals:
    stationarity: float
    slackness: float
    dual: float
    primal: float

    def max(self) -> float:
        return max(self.stationarity, self.slackness, self.dual, self.primal)


@dataclass(frozen=True)
class KktCertificate:
    """Closed-form multipliers for the hot-arm matrix and their residuals.

    epsilon = (S_max - 1)/(2(N-1)); mu = 2(N-2) epsilon multiplies the
    total-sum constraint; lam[i, j] = 2N epsilon on entries whose row and
    column both avoid the hot arm (the entries pinned at zero), 0 elsewhere.
    """

    epsilon: float
    mu: float
    lam: Mat
    residuals: KktResiduals

    @property
    def valid(self) -> bool:
        return self.residuals.max() <= RESIDUAL_TOL


@dataclass(frozen=True)
class ConvexityReport:
    n: int
    dimension: int
    trials: int
    min_quadratic_form: float
    min_eigenvalue: float | None
    passed: bool


@dataclass(frozen=True)
class OptimalResult:
    """Output of the top-level dispatch: matrix, its loss, branch taken.

    ``certificate`` is present exactly when the min-loss branch ran
    (zero loss needs no multipliers; the construction is its own witness).
    """

    matrix: JointSelectionMatrix
    loss: float
    certificate: KktCertificate | None
    branch: str  # "zero-loss" | "min-loss"


def _require_unit_total(inst: ProblemInstance) -> None:
    if abs(inst.total - 1.0) > SUM_RTOL:
        raise TotalNotOneError(f"operation requires total = 1, got {inst.total:.17g}")


def min_loss_value(inst: ProblemInstance) -> float:
    """Closed-form minimum loss: 0 if max S <= 1, else N/(2(N-1)) (S_max-1)^2."""
    _require_unit_total(inst)
    s_max = float(inst.popularity.max())
    if s_max <= 1.0 + SUM_RTOL:
        return 0.0
    n = inst.n
    return n / (2.0 * (n - 1)) * (s_max - 1.0) ** 2


def min_loss_matrix(inst: ProblemInstance, hot: int) -> JointSelectionMatrix:
    """Hot-arm matrix: column ``hot`` holds A_i + eps, row ``hot`` holds B_j + eps.

    Requires S_hot > 1 (+1e-9), which with unit total also makes ``hot``
    the unique most popular arm.
    """
    _require_unit_total(inst)
    n = inst.n
    s = inst.popularity
    if not 0 <= hot < n:
        raise ValidationError(f"hot arm index {hot} out of range for N={n}")
    if s[hot] <= 1.0 + SUM_RTOL:
        raise NotApplicableError(
            f"arm {hot} has popularity {s[hot]:.17g} <= 1; use the zero-loss construction"
        )
    if int(np.sum(s > 1.0 + SUM_RTOL)) > 1:
        raise InternalInvariantError(
            "more than one arm with popularity > 1 despite unit total"
        )
    eps = (float(s[hot]) - 1.0) / (2.0 * (n - 1))
    entries = np.zeros((n, n))
    entries[:, hot] = inst.a + eps
    entries[hot, :] = inst.b + eps
    entries[hot, hot] = 0.0
    return JointSelectionMatrix(entries, 1.0)


def kkt_verify(inst: ProblemInstance, m: JointSelectionMatrix) -> KktCertificate:
    """Build the closed-form multipliers and measure all four KKT residuals on m.

    Stationarity: dL/dP[i,j] - lam[i,j] + mu = 0 on every off-diagonal entry.
    Slackness: lam[i,j] * P[i,j] = 0. Dual: lam >= 0. Primal: P on the
    conflict-free simplex. Residuals are max-norm; all <= 1e-9 on the
    genuine hot-arm matrix, order-1 on anything else.
    """
    _require_unit_total(inst)
    n = inst.n
    s = inst.popularity
    s_max = float(s.max())
    if s_max <= 1.0 + SUM_RTOL:
        raise NotApplicableError("KKT certificate only applies when max S > 1")
    hot = int(np.argmax(s))
    eps = (s_max - 1.0) / (2.0 * (n - 1))
    mu = 2.0 * (n - 2) * eps

    off = ~np.eye(n, dtype=bool)
    cold = np.ones(n, dtype=bool)
    cold[hot] = False
    lam = np.zeros((n, n))
    lam[np.ix_(cold, cold)] = 2.0 * n * eps
    np.fill_diagonal(lam, 0.0)

    grad = loss_gradient(m, inst)
    stationarity = float(np.abs((grad - lam + mu)[off]).max())
    slackness = float(np.abs(lam * m.entries).max())
    dual = max(0.0, -float(lam.min()))
    primal = max(
        max(0.0, -float(m.entries.min())),
        abs(float(m.entries.sum()) - 1.0),
        float(np.abs(np.diagonal(m.entries)).max()),
    )
    lam.setflags(write=False)
    return KktCertificate(eps, mu, lam, KktResiduals(stationarity, slackness, dual, primal))


def loss_hessian(n: int) -> Mat:
    """Exact Hessian of the loss over the N^2 - N off-diagonal coordinates."""
    idx = [(i, j) for i in range(n) for j in range(n) if i != j]
    rows = np.array([i for i, _ in idx])
    cols = np.array([j for _, j in idx])
    same_row = (rows[:, None] == rows[None, :]).astype(np.float64)
    same_col = (cols[:, None] == cols[None, :]).astype(np.float64)
    return 2.0 * (same_row + same_col)


def convexity_check(n: int, trials: int = 1000, seed: int = 0) -> ConvexityReport:
    """Numerical PSD check of the loss Hessian: random quadratic forms, and
    an exact eigenvalue floor for N <= 6 where the dense solve is instant."""
    if n < 2:
        raise ValidationError(f"need at least 2 arms, got {n}")
    if n > 8:
        raise DimensionTooLargeError(f"convexity check is desk-scale (N <= 8), got {n}")
    h = loss_hessian(n)
    d = h.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((trials, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    forms = np.einsum("td,de,te->t", x, h, x)
    min_form = float(forms.min())
    min_eig = float(np.linalg.eigvalsh(h).min()) if n <= 6 else None
    passed = min_form >= -RESIDUAL_TOL and (min_eig is None or min_eig >= -RESIDUAL_TOL)
    return ConvexityReport(n, d, trials, min_form, min_eig, passed)


def optimal_satisfaction_matrix(inst: ProblemInstance) -> OptimalResult:
    """Best conflict-free matrix for a unit-total instance.

    max S <= 1 (+1e-9): zero-loss construction, no certificate.
    max S  > 1: hot-arm matrix with its KKT certificate; achieved loss
    equals N/(2(N-1)) (S_max-1)^2 to float accuracy.
    """
    _require_unit_total(inst)
    s_max = float(inst.popularity.max())
    if s_max <= 1.0 + SUM_RTOL:
        m = construct_zero_loss(inst)
        return OptimalResult(m, loss(m, inst), None, "zero-loss")
    hot = int(np.argmax(inst.popularity))
    m = min_loss_matrix(inst, hot)
    cert = kkt_verify(inst, m)
    return OptimalResult(m, loss(m, inst), cert, "min-loss")


__all__ = [
    "ConvexityReport",
    "KktCertificate",
    "KktResiduals",
    "OptimalResult",
    "RESIDUAL_TOL",
    "convexity_check",
    "kkt_verify",
    "loss_hessian",
    "min_loss_matrix",
    "min_loss_value",
    "optimal_satisfaction_matrix",
]
