"""Max-cut instances, the zero-one UQP form, and exhaustive oracles.

Assignments are tuples ``y`` of 0/1 with ``y[k]`` for node ``k + 1``.
Enumeration runs over integers with ``y_1`` as the most significant bit, so
integer order equals lexicographic order of assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllOptimal, LengthMismatch, TooLarge
from .graphs import AdjacencyMatrix

CutAssignment = tuple[int, ...]

DEFAULT_LIMIT = 20


@dataclass(frozen=True, eq=False)
class UQPInstance:
    """Maximise ``sum_{i<j} b_quad[i, j] y_i y_j + sum_l b_lin[l] y_l``.

    ``b_quad`` is strictly upper triangular (0-based indices). Coefficients
    are stored as floats so perturbed instances share the type.
    """

    b_quad: np.ndarray
    b_lin: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        q = np.triu(np.asarray(self.b_quad, dtype=float), 1)
        lin = np.asarray(self.b_lin, dtype=float).reshape(-1)
        if q.shape != (lin.size, lin.size):
            raise LengthMismatch("b_quad must be n x n for n linear coefficients")
        q.setflags(write=False)
        lin.setflags(write=False)
        object.__setattr__(self, "b_quad", q)
        object.__setattr__(self, "b_lin", lin)
        object.__setattr__(self, "n", lin.size)


def _check(n: int, y) -> np.ndarray:
    arr = np.asarray(y, dtype=np.int64).reshape(-1)
    if arr.size != n:
        raise LengthMismatch(f"assignment has length {arr.size}, expected {n}")
    return arr


def cut_size(G: AdjacencyMatrix, y: CutAssignment) -> int:
    if len(y) != G.n:
        raise LengthMismatch(f"assignment has length {len(y)}, expected {G.n}")
    return int(sum(y[i - 1] != y[j - 1] for i, j in G.links()))


def uqp_from_graph(G: AdjacencyMatrix) -> UQPInstance:
    """Quadratic coefficients ``-2 a_ij``, linear coefficients the node degrees."""
    a = G.array.astype(float)
    return UQPInstance(-2.0 * np.triu(a, 1), a.sum(axis=1))


def uqp_objective(inst: UQPInstance, y: CutAssignment) -> float:
    arr = _check(inst.n, y).astype(float)
    return float(arr @ inst.b_quad @ arr + inst.b_lin @ arr)


def _all_assignments(n: int, limit: int) -> np.ndarray:
    if n > limit:
        raise TooLarge(f"n={n} exceeds the brute-force limit {limit}")
    codes = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.int8)


def _cut_values(G: AdjacencyMatrix, Y: np.ndarray) -> np.ndarray:
    vals = np.zeros(Y.shape[0], dtype=np.int64)
    for i, j in G.links():
        vals += Y[:, i - 1] != Y[:, j - 1]
    return vals


def _uqp_values(inst: UQPInstance, Y: np.ndarray) -> np.ndarray:
    Yf = Y.astype(float)
    return np.einsum("ki,ij,kj->k", Yf, inst.b_quad, Yf) + Yf @ inst.b_lin


def maxcut_bruteforce(G: AdjacencyMatrix, limit: int = DEFAULT_LIMIT) -> tuple[int, CutAssignment, int]:
    """``(max cut size, lexicographically smallest optimal y, number of optimal y)``."""
    Y = _all_assignments(G.n, limit)
    vals = _cut_values(G, Y)
    best = int(vals.max())
    hits = np.flatnonzero(vals == best)
    return best, tuple(int(b) for b in Y[hits[0]]), int(hits.size)


def maxcut_decision(G: AdjacencyMatrix, kappa: int, limit: int = DEFAULT_LIMIT) -> bool:
    return maxcut_bruteforce(G, limit)[0] >= kappa


def uqp_bruteforce(inst: UQPInstance, limit: int = DEFAULT_LIMIT) -> tuple[float, list[CutAssignment]]:
    """Exact maximum and the full optimal set, sorted lexicographically."""
    Y = _all_assignments(inst.n, limit)
    vals = _uqp_values(inst, Y)
    best = vals.max()
    return float(best), [tuple(int(b) for b in Y[k]) for k in np.flatnonzero(vals == best)]


def optimality_gap(inst: UQPInstance, limit: int = DEFAULT_LIMIT) -> float:
    """Smallest ``f_opt - f(y)`` over non-optimal assignments ``y``."""
    Y = _all_assignments(inst.n, limit)
    vals = _uqp_values(inst, Y)
    best = vals.max()
    rest = vals[vals != best]
    if rest.size == 0:
        raise AllOptimal("every assignment is optimal")
    return float(best - rest.max())
