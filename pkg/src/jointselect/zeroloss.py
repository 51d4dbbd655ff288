"""Zero-loss construction: exact marginals whenever no arm is too popular.

If every popularity satisfies S_i <= T, a conflict-free matrix reproducing
both preference vectors exactly can be built by induction on the number of
arms: peel off the least popular arm K by filling its row and column, which
reduces the problem to N-1 arms with total T - S_K, and bottom out at an
explicit three-arm solution. Two arms are handled as a direct input case
only (the recursion never descends below three).

The three-arm solution is a one-parameter family in p = P[0, 1]:

    [ 0              p          A_0 - p      ]
    [ T - p - A_2 - B_2   0     p - A_0 + B_2 ]
    [ p + A_2 - B_1    B_1 - p       0        ]

nonnegative exactly when p lies in
[max{0, A_0 - B_2, B_1 - A_2}, min{A_0, B_1, T - A_2 - B_2}], an interval
that is nonempty whenever all S_i <= T. We always pick the lower end.

For N >= 4 the row/column fill of arm K splits into three exhaustive cases
driven by the least popular arm K and the most popular arm V: either both
of K's preferences fit opposite V (case 1), or A_K overflows B_V and spills
across the other arms' B-weights in ascending index order (case 2), or
symmetrically B_K overflows A_V (case 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    JointSelectionMatrix,
    ProblemInstance,
    Vec,
    _tol,
    validate_instance,
)
from .errors import (
    CaseDispatchError,
    InfeasibleTwoArmError,
    InternalInvariantError,
    PopularityExceedsTotalError,
    ValidationError,
)


@dataclass(frozen=True)
class RowColFill:
    """Row and column of the peeled arm K, plus which case produced them.

    ``row_k[j]`` is the entry at (K, j) and ``col_k[i]`` the entry at (i, K);
    both are zero at position K itself. ``cut`` is the arm that received the
    partial remainder in case 2/3 fills (None for case 1).
    """

    arm_k: int
    row_k: Vec
    col_k: Vec
    case: int
    cut: int | None = None


def _check_feasible(inst: ProblemInstance) -> None:
    s_max = float(inst.popularity.max())
    if s_max > inst.total + _tol(inst.total):
        raise PopularityExceedsTotalError(
            f"max popularity {s_max:.17g} exceeds total {inst.total:.17g}; "
            "zero loss is unattainable (use the minimum-loss construction)"
        )


def base_case_interval(inst: ProblemInstance) -> tuple[float, float]:
    """Feasible range of the free entry P[0, 1] in the three-arm solution."""
    if inst.n != 3:
        raise ValidationError(f"three-arm interval needs N=3, got {inst.n}")
    a, b, t = inst.a, inst.b, inst.total
    lo = max(0.0, a[0] - b[2], b[1] - a[2])
    hi = min(a[0], b[1], t - a[2] - b[2])
    return lo, hi


def base_case_three(inst: ProblemInstance) -> JointSelectionMatrix:
    """Explicit zero-loss matrix for three arms, free entry at its lower bound."""
    if inst.n != 3:
        raise ValidationError(f"base case needs N=3, got {inst.n}")
    _check_feasible(inst)
    a, b, t = inst.a, inst.b, inst.total
    p, _ = base_case_interval(inst)
    entries = np.array(
        [
            [0.0, p, a[0] - p],
            [t - p - a[2] - b[2], 0.0, p - a[0] + b[2]],
            [p + a[2] - b[1], b[1] - p, 0.0],
        ]
    )
    # cancellation can leave -1e-17-ish dust on entries that are exactly 0
    entries[entries < 0.0] = 0.0
    np.fill_diagonal(entries, 0.0)
    return JointSelectionMatrix(entries, t)


def _pick_k_v(s: Vec) -> tuple[int, int]:
    """Least and most popular arms, lowest index on ties, guaranteed distinct."""
    k = int(np.argmin(s))
    masked = s.copy()
    masked[k] = -np.inf
    v = int(np.argmax(masked))
    return k, v


def fill_row_col(inst: ProblemInstance, k: int, v: int) -> RowColFill:
    """Fill row and column of the least popular arm K against the most popular V.

    Case 1 (A_K <= B_V and B_K <= A_V): all of K's weight sits opposite V.
    Case 2 (A_K > B_V): row K takes B_V at V, then consumes B_j over the
    remaining arms in ascending index order until A_K is exhausted, with a
    partial remainder on the cut arm; column K is B_K at V.
    Case 3 (B_K > A_V): the mirror image with players swapped.
    """
    n, t = inst.n, inst.total
    a, b, s = inst.a, inst.b, inst.popularity
    if n < 4:
        raise ValidationError(f"row/column fill is an induction step for N >= 4, got {n}")
    if k == v:
        raise ValidationError("K and V must be distinct arms")
    tol = _tol(t)
    if s[k] > s.min() + tol or s[v] < np.delete(s, k).max() - tol:
        raise ValidationError("K must be the least popular arm and V the most popular")
    _check_feasible(inst)

    # At most one arm can violate S_i <= T - S_K, and only the most popular
    # one (a second violator would push the popularity sum past 2T).
    headroom = t - s[k]
    violators = [i for i in range(n) if i != k and s[i] > headroom + tol]
    if violators and violators != [v]:
        raise InternalInvariantError(
            f"popularity violators {violators} are not limited to the argmax arm {v}"
        )

    case_one = a[k] <= b[v] and b[k] <= a[v]
    case_two = a[k] > b[v]
    case_three = b[k] > a[v]
    if case_two and case_three:
        raise InternalInvariantError("cases 2 and 3 cannot hold together (S_K > S_V)")
    if not (case_one or case_two or case_three):
        raise CaseDispatchError(f"no fill case applies at K={k}, V={v}")

    row = np.zeros(n)
    col = np.zeros(n)
    cut: int | None = None

    if case_one:
        case = 1
        row[v] = a[k]
        col[v] = b[k]
    elif case_two:
        case = 2
        row[v] = b[v]
        col[v] = b[k]
        rem = a[k] - b[v]
        for j in range(n):
            if j == k or j == v:
                continue
            if rem <= b[j]:
                row[j] = rem
                rem = 0.0
                cut = j
                break
            row[j] = b[j]
            rem -= b[j]
        else:
            # feasibility guarantees the budget is consumed; anything left is
            # float dust, parked opposite V to keep the row sum exact
            if rem > tol:
                raise InternalInvariantError(f"case-2 fill left budget {rem:.3e}")
            row[v] += rem
    else:
        case = 3
        col[v] = a[v]
        row[v] = a[k]
        rem = b[k] - a[v]
        for i in range(n):
            if i == k or i == v:
                continue
            if rem <= a[i]:
                col[i] = rem
                rem = 0.0
                cut = i
                break
            col[i] = a[i]
            rem -= a[i]
        else:
            if rem > tol:
                raise InternalInvariantError(f"case-3 fill left budget {rem:.3e}")
            col[v] += rem

    row.setflags(write=False)
    col.setflags(write=False)
    return RowColFill(k, row, col, case, cut)


def reduce_instance(inst: ProblemInstance, fill: RowColFill) -> ProblemInstance:
    """Subtract the fill from both players and drop arm K; total shrinks by S_K."""
    k = fill.arm_k
    a_rest = np.delete(inst.a - fill.col_k, k)
    b_rest = np.delete(inst.b - fill.row_k, k)
    new_total = inst.total - float(inst.popularity[k])
    reduced = validate_instance(a_rest, b_rest, new_total)
    if reduced.popularity.max() > new_total + _tol(inst.total):
        raise InternalInvariantError(
            "reduction produced an arm more popular than the reduced total"
        )
    return reduced


def construct_zero_loss(inst: ProblemInstance) -> JointSelectionMatrix:
    """Matrix with row sums A and column sums B; requires all S_i <= T.

    Raises PopularityExceedsTotalError when some arm is too popular, and
    InfeasibleTwoArmError for two-arm instances whose popularities are not
    both equal to the total (the only two-arm case with a zero-loss matrix).
    """
    n, t = inst.n, inst.total
    if n == 2:
        if abs(float(inst.popularity[0]) - t) > _tol(t):
            raise InfeasibleTwoArmError(
                f"two arms admit zero loss only when S = ({t:.17g}, {t:.17g}); "
                f"got S = ({inst.popularity[0]:.17g}, {inst.popularity[1]:.17g})"
            )
        return JointSelectionMatrix(np.array([[0.0, inst.a[0]], [inst.a[1], 0.0]]), t)
    _check_feasible(inst)
    if n == 3:
        return base_case_three(inst)

    k, v = _pick_k_v(inst.popularity)
    fill = fill_row_col(inst, k, v)
    reduced = reduce_instance(inst, fill)
    sub = construct_zero_loss(reduced)

    entries = np.zeros((n, n))
    keep = np.delete(np.arange(n), k)
    entries[k, :] = fill.row_k
    entries[:, k] = fill.col_k
    entries[np.ix_(keep, keep)] = sub.entries

    # guard from the numerical contract: per-row renormalization only if the
    # assembled total drifted past tolerance (never expected to fire)
    drift = abs(float(entries.sum()) - t)
    if drift > _tol(t):
        row_sums = entries.sum(axis=1)
        scale = np.divide(inst.a, row_sums, out=np.ones(n), where=row_sums > 0)
        entries *= scale[:, None]
    return JointSelectionMatrix(entries, t)


__all__ = [
    "RowColFill",
    "base_case_interval",
    "base_case_three",
    "construct_zero_loss",
    "fill_row_col",
    "reduce_instance",
]
