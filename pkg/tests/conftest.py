"""Shared fixtures and independent check helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from jointselect import validate_instance

# The running example used throughout: A favors the last arm, B the first,
# and every popularity stays at or below 1.
TABLE1_A = [0.3, 0.25, 0.45]
TABLE1_B = [0.5, 0.2, 0.3]

# Reference baselines computed by hand from their definitions (see the
# module tests for the arithmetic); frozen to 4 decimals as printed.
RENORM_TABLE1 = np.array(
    [
        [0.0, 0.0902, 0.1353],
        [0.1880, 0.0, 0.1128],
        [0.3383, 0.1353, 0.0],
    ]
)
ORDER_TABLE1 = np.array(
    [
        [0.0, 0.1, 0.1718],
        [0.1674, 0.0, 0.1151],
        [0.3214, 0.1243, 0.0],
    ]
)


@pytest.fixture
def table1():
    return validate_instance(TABLE1_A, TABLE1_B)


def random_feasible_instance(rng: np.random.Generator, n: int):
    """Uniform-simplex pair conditioned on max popularity <= 1."""
    while True:
        a = rng.dirichlet(np.ones(n))
        b = rng.dirichlet(np.ones(n))
        if float((a + b).max()) <= 1.0:
            return validate_instance(a, b)


def random_hot_instance(rng: np.random.Generator, n: int):
    """Uniform-simplex pair conditioned on some popularity > 1."""
    while True:
        a = rng.dirichlet(np.ones(n))
        b = rng.dirichlet(np.ones(n))
        if float((a + b).max()) > 1.0 + 1e-9:
            return validate_instance(a, b)


def raw_loss(entries: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Loss evaluated on a plain array, bypassing the matrix type entirely
    (used to finite-difference without tripping sum invariants)."""
    ga = entries.sum(axis=1) - a
    gb = entries.sum(axis=0) - b
    return float(ga @ ga + gb @ gb)


def fd_gradient(entries: np.ndarray, a: np.ndarray, b: np.ndarray, h: float = 1e-6):
    """Central-difference gradient over the off-diagonal entries."""
    n = entries.shape[0]
    g = np.zeros_like(entries)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            plus = entries.copy()
            minus = entries.copy()
            plus[i, j] += h
            minus[i, j] -= h
            g[i, j] = (raw_loss(plus, a, b) - raw_loss(minus, a, b)) / (2 * h)
    return g
