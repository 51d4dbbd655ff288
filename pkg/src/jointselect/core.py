"""Core types and operations for two-player conflict-free joint selection.

Two players share N arms. Player A wants to play arm i with probability
A_i, player B with probability B_j; a coordinator draws the pair (i, j)
from a joint selection matrix P with zero diagonal, so the players never
collide. The row sums of P are the preferences actually granted to A,
the column sums those granted to B:

    pi_A(i) = sum_j P[i, j],      pi_B(j) = sum_i P[i, j]

and the quality of a matrix is the squared mismatch

    L(P) = sum_i (pi_A(i) - A_i)^2 + sum_j (pi_B(j) - B_j)^2.

The popularity of arm i is S_i = A_i + B_i; since both preference vectors
sum to the total T, popularities always sum to 2T. Whether zero loss is
achievable depends only on whether any arm has S_i > T.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DimensionMismatchError,
    LengthMismatchError,
    NegativeWeightError,
    TotalMismatchError,
    TotalNotOneError,
    ValidationError,
)

Vec = NDArray[np.float64]
Mat = NDArray[np.float64]

# Entries this far below zero are treated as floating-point noise and
# clamped; anything more negative is a hard validation error.
ENTRY_CLAMP = 1e-12

# Sums (of weights, of matrix entries) must match their declared totals to
# this relative tolerance, floored at the same absolute value so that
# reduced sub-instances with tiny totals do not reject honest float noise.
SUM_RTOL = 1e-9


def _tol(total: float) -> float:
    return SUM_RTOL * max(1.0, abs(total))


def _clean_weights(raw, what: str) -> Vec:
    w = np.asarray(raw, dtype=np.float64)
    if w.ndim != 1:
        raise ValidationError(f"{what} must be a 1-D vector, got shape {w.shape}")
    if w.size < 2:
        raise ValidationError(f"{what} needs at least 2 arms, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise ValidationError(f"{what} contains non-finite values")
    if np.any(w < -ENTRY_CLAMP):
        raise NegativeWeightError(
            f"{what} has negative entries beyond the {-ENTRY_CLAMP:g} clamp: "
            f"min = {w.min():.3e}"
        )
    w = np.where(w < 0.0, 0.0, w)
    w.setflags(write=False)
    return w


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PreferenceProfile:
    """One player's desired selection probabilities over N >= 2 arms.

    Weights are nonnegative (tiny negatives within -1e-12 are clamped to 0)
    and sum to ``total`` within 1e-9 relative tolerance. ``total`` is 1 for
    user-facing instances; reduced sub-instances carry smaller totals.
    """

    weights: Vec
    total: float = 1.0

    def __post_init__(self) -> None:
        w = _clean_weights(self.weights, "preference weights")
        if self.total < -ENTRY_CLAMP:
            raise ValidationError(f"total must be nonnegative, got {self.total}")
        if abs(float(w.sum()) - self.total) > _tol(self.total):
            raise TotalMismatchError(
                f"weights sum to {w.sum():.17g}, declared total is {self.total:.17g}"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total", float(self.total))

    @property
    def n(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class ProblemInstance:
    """A pair of preference profiles over the same arms, plus popularity S = A + B."""

    pref_a: PreferenceProfile
    pref_b: PreferenceProfile
    popularity: Vec

    def __post_init__(self) -> None:
        if self.pref_a.n != self.pref_b.n:
            raise LengthMismatchError(
                f"preference lengths differ: {self.pref_a.n} vs {self.pref_b.n}"
            )
        if abs(self.pref_a.total - self.pref_b.total) > _tol(self.pref_a.total):
            raise TotalMismatchError(
                f"players carry different totals: {self.pref_a.total} vs {self.pref_b.total}"
            )
        s = self.pref_a.weights + self.pref_b.weights
        s.setflags(write=False)
        object.__setattr__(self, "popularity", s)

    @property
    def n(self) -> int:
        return self.pref_a.n

    @property
    def total(self) -> float:
        return self.pref_a.total

    @property
    def a(self) -> Vec:
        return self.pref_a.weights

    @property
    def b(self) -> Vec:
        return self.pref_b.weights


def validate_instance(a, b, total: float = 1.0) -> ProblemInstance:
    """Build a validated instance from raw weight vectors.

    Raises LengthMismatchError / NegativeWeightError / TotalMismatchError
    on bad input. Popularity S = A + B is computed here; its entries sum
    to 2 * total by construction.
    """
    a_arr = np.asarray(a, dtype=np.float64)
    b_arr = np.asarray(b, dtype=np.float64)
    if a_arr.shape != b_arr.shape:
        raise LengthMismatchError(
            f"preference lengths differ: {a_arr.shape} vs {b_arr.shape}"
        )
    prof_a = PreferenceProfile(a_arr, total)
    prof_b = PreferenceProfile(b_arr, total)
    return ProblemInstance(prof_a, prof_b, prof_a.weights + prof_b.weights)


@dataclass(frozen=True)
class JointSelectionMatrix:
    """An N x N joint selection probability matrix with zero diagonal.

    Entries are nonnegative (clamped within -1e-12) and sum to ``total``
    within 1e-9 relative tolerance. Entry (i, j) is the probability that
    player A is assigned arm i while player B is assigned arm j; the zero
    diagonal is what makes the assignment conflict-free.
    """

    entries: Mat
    total: float = 1.0

    def __post_init__(self) -> None:
        e = np.asarray(self.entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {e.shape}")
        if e.shape[0] < 2:
            raise ValidationError("matrix needs at least 2 arms")
        if not np.all(np.isfinite(e)):
            raise ValidationError("matrix contains non-finite entries")
        if np.any(e < -ENTRY_CLAMP):
            raise ValidationError(
                f"matrix entries below the {-ENTRY_CLAMP:g} clamp: min = {e.min():.3e}"
            )
        e = np.where(e < 0.0, 0.0, e)
        if np.any(np.diagonal(e) != 0.0):
            raise ValidationError("diagonal entries must be exactly 0 (conflict-freedom)")
        if abs(float(e.sum()) - self.total) > _tol(self.total):
            raise TotalMismatchError(
                f"entries sum to {e.sum():.17g}, declared total is {self.total:.17g}"
            )
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "total", float(self.total))

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class SatisfiedPreferences:
    """Marginals of a joint selection matrix: pi_a = row sums, pi_b = column sums."""

    pi_a: Vec
    pi_b: Vec


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def satisfied_preferences(m: JointSelectionMatrix) -> SatisfiedPreferences:
    """Row and column sums of the matrix: the preferences each player actually gets."""
    return SatisfiedPreferences(m.entries.sum(axis=1), m.entries.sum(axis=0))


def _check_dims(m: JointSelectionMatrix, inst: ProblemInstance) -> None:
    if m.n != inst.n:
        raise DimensionMismatchError(f"matrix has {m.n} arms, instance has {inst.n}")


def loss(m: JointSelectionMatrix, inst: ProblemInstance) -> float:
    """Squared mismatch between satisfied and desired preferences.

    L = sum_i (pi_A(i) - A_i)^2 + sum_j (pi_B(j) - B_j)^2 >= 0, and L = 0
    exactly when the matrix reproduces both preference vectors.
    """
    _check_dims(m, inst)
    sp = satisfied_preferences(m)
    ga = sp.pi_a - inst.a
    gb = sp.pi_b - inst.b
    return float(ga @ ga + gb @ gb)


def loss_gradient(m: JointSelectionMatrix, inst: ProblemInstance) -> Mat:
    """Gradient of the loss in the off-diagonal entries.

    dL/dP[i, j] = 2 (pi_A(i) - A_i) + 2 (pi_B(j) - B_j) for i != j; the
    diagonal is not a decision variable and is reported as 0.
    """
    _check_dims(m, inst)
    sp = satisfied_preferences(m)
    ga = 2.0 * (sp.pi_a - inst.a)
    gb = 2.0 * (sp.pi_b - inst.b)
    g = ga[:, None] + gb[None, :]
    np.fill_diagonal(g, 0.0)
    return g


def sample_joint(m: JointSelectionMatrix, seed: int, draws: int) -> NDArray[np.int64]:
    """Draw arm pairs from the matrix; returns an N x N count matrix.

    Sampling is inverse-CDF over the off-diagonal entries flattened in
    row-major order, driven by numpy's PCG64 generator, so identical
    (matrix, seed, draws) triples reproduce identical counts. Requires a
    unit total; the diagonal of the result is always 0.
    """
    if draws < 1:
        raise ValidationError(f"draws must be >= 1, got {draws}")
    if abs(m.total - 1.0) > SUM_RTOL:
        raise TotalNotOneError(f"sampling needs total = 1, got {m.total:.17g}")
    n = m.n
    off = ~np.eye(n, dtype=bool)
    weights = m.entries[off]
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(draws)
    picks = np.searchsorted(cdf, u, side="right")
    counts = np.zeros((n, n), dtype=np.int64)
    counts[off] = np.bincount(picks, minlength=weights.size)
    return counts


# --------------------------------------------------------------------------
# external formats
# --------------------------------------------------------------------------

def instance_from_json(obj: dict) -> ProblemInstance:
    """Parse the preference input format {"a": [...], "b": [...], "total": 1.0}."""
    if not isinstance(obj, dict):
        raise ValidationError("preference input must be a JSON object")
    for key in ("a", "b"):
        if key not in obj:
            raise ValidationError(f'preference input is missing key "{key}"')
    total = obj.get("total", 1.0)
    if not isinstance(total, (int, float)) or isinstance(total, bool):
        raise ValidationError('"total" must be a number')
    return validate_instance(obj["a"], obj["b"], float(total))


def instance_to_json(inst: ProblemInstance) -> dict:
    return {"a": inst.a.tolist(), "b": inst.b.tolist(), "total": inst.total}


def matrix_to_json(m: JointSelectionMatrix) -> dict:
    """Matrix output format: {"n": N, "total": t, "entries": row-major N*N reals}."""
    return {"n": m.n, "total": m.total, "entries": m.entries.ravel().tolist()}


def matrix_from_json(obj: dict) -> JointSelectionMatrix:
    """Inverse of matrix_to_json; extra keys are ignored so enriched outputs round-trip."""
    if not isinstance(obj, dict):
        raise ValidationError("matrix input must be a JSON object")
    for key in ("n", "entries"):
        if key not in obj:
            raise ValidationError(f'matrix input is missing key "{key}"')
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValidationError(f'"n" must be an integer >= 2, got {n!r}')
    entries = np.asarray(obj["entries"], dtype=np.float64)
    if entries.size != n * n:
        raise ValidationError(
            f'"entries" must hold n*n = {n * n} reals, got {entries.size}'
        )
    total = obj.get("total", 1.0)
    return JointSelectionMatrix(entries.reshape(n, n), float(total))


def matrix_to_csv(m: JointSelectionMatrix) -> str:
    """N rows of N comma-separated entries; diagonal prints as 0."""
    return "\n".join(",".join(repr(x) for x in row) for row in m.entries.tolist()) + "\n"


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2)
