"""Vectorised log-likelihood of one trace under many candidate matrices.

A trace is reduced to its tally of distinct transitions. Each transition's
probability depends on a candidate only through one integer: the number of
infected neighbours of the newly infected node, or the number of links
crossing the infected set for a no-change step. Those integers are linear in
the candidate's upper-triangle bits, so a whole block of candidates is
scored with one integer matrix product per block.
"""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch
from .graphs import AdjacencyMatrix, upper_pairs
from .sis import SISParams, ViralState

_IMPOSSIBLE, _CURE, _INFECT, _STAY = range(4)


class TallyModel:
    """Per-transition structure of a trace for a fixed node count and parameters."""

    def __init__(self, tally: dict[tuple[ViralState, ViralState], int], n: int, p: SISParams):
        self.n = n
        self.p = p
        self.pairs = upper_pairs(n)
        index = {pair: k for k, pair in enumerate(self.pairs)}
        T = len(tally)
        self.transitions = list(tally)
        self.counts = np.array([tally[t] for t in self.transitions], dtype=float)
        self.kind = np.empty(T, dtype=np.int8)
        self.base = np.zeros(T)
        self.W = np.zeros((len(self.pairs), T), dtype=np.int16)
        for t, (x, y) in enumerate(self.transitions):
            if len(x) != n or len(y) != n:
                raise LengthMismatch(f"transition states must have length {n}")
            flips = [k for k in range(n) if x[k] != y[k]]
            if len(flips) > 1:
                self.kind[t] = _IMPOSSIBLE
            elif len(flips) == 1 and x[flips[0]]:
                self.kind[t] = _CURE
            elif len(flips) == 1:
                i = flips[0] + 1
                self.kind[t] = _INFECT
                for j in range(1, n + 1):
                    if x[j - 1] and j != i:
                        self.W[index[(min(i, j), max(i, j))], t] = 1
            else:
                self.kind[t] = _STAY
                self.base[t] = 1.0 - p.delta_T * sum(x)
                for a, b in self.pairs:
                    if x[a - 1] != x[b - 1]:
                        self.W[index[(a, b)], t] = 1

    def log_probs(self, bits: np.ndarray) -> np.ndarray:
        """``(K, T)`` log transition probabilities for ``K`` candidates.

        Zero or negative probabilities map to ``-inf``; a negative no-change
        probability means the candidate is not a valid model under ``p``.
        """
        bits = np.asarray(bits, dtype=np.int16)
        k = bits @ self.W
        out = np.full(k.shape, -np.inf)
        p = self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            for t, kind in enumerate(self.kind):
                if kind == _CURE:
                    out[:, t] = np.log(p.delta_T)
                elif kind == _INFECT:
                    prob = p.beta_T * k[:, t]
                    out[:, t] = np.where(prob > 0, np.log(prob), -np.inf)
                elif kind == _STAY:
                    prob = self.base[t] - p.beta_T * k[:, t]
                    out[:, t] = np.where(prob > 0, np.log(prob), -np.inf)
        return out

    def totals(self, bits: np.ndarray) -> np.ndarray:
        """Log-likelihood per candidate, summed left to right in tally order."""
        lp = self.log_probs(bits)
        acc = np.zeros(lp.shape[0])
        for t in range(lp.shape[1]):
            acc = acc + self.counts[t] * lp[:, t]
        return acc


def codes_to_bits(codes: np.ndarray, width: int) -> np.ndarray:
    """Integers to bit rows, most significant bit first."""
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((np.asarray(codes, dtype=np.int64)[:, None] >> shifts) & 1).astype(np.int8)


def reduced_bits(host: AdjacencyMatrix, rows: np.ndarray) -> np.ndarray:
    """Candidate bits with ``a_12 = 1``, first-row entries ``a_13..a_1n`` from
    ``rows`` and every other entry copied from ``host``."""
    n = host.n
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int8))
    template = np.array([int(c) for c in host.upper_bits()], dtype=np.int8)
    template[0] = 1
    out = np.repeat(template[None, :], rows.shape[0], axis=0)
    # pairs (1, l) for l = 2..n occupy the first n - 1 slots
    out[:, 1 : n - 1] = rows
    return out
