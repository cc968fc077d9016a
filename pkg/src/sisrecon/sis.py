"""Sampled-time SIS Markov chain.

At most one node flips per step: an infected node cures with probability
``delta_T``; a susceptible node ``i`` is infected with probability
``beta_T * N_i`` where ``N_i`` counts its infected neighbours; the state is
unchanged with the remaining probability mass.

States are tuples of 0/1 ints, index ``k`` holding node ``k + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InfeasibleParams, LengthMismatch
from .graphs import AdjacencyMatrix

ViralState = tuple[int, ...]

NEG_INF = -math.inf


@dataclass(frozen=True)
class SISParams:
    """Per-step infection and curing probabilities.

    Only the products ``beta*T`` and ``delta*T`` enter the chain, so the
    rates and the sampling time are not stored separately.
    """

    beta_T: float
    delta_T: float

    def __post_init__(self):
        if not (self.beta_T > 0 and self.delta_T > 0):
            raise InfeasibleParams("beta_T and delta_T must be positive")


def validate_params(A: AdjacencyMatrix, p: SISParams) -> bool:
    """Sufficient feasibility check ``delta_T*n + beta_T*L <= 1``.

    This is a conservative stand-in for the exact sampling-time bound, which
    is not restated here: the no-change probability of any state is at least
    ``1 - delta_T*|infected| - beta_T*|cut links|`` and both counts are
    bounded by ``n`` and ``L``.
    """
    return p.delta_T * A.n + p.beta_T * A.link_count <= 1.0


# states -----------------------------------------------------------------


def basis_state(n: int, *nodes: int) -> ViralState:
    """Sum of unit vectors ``e_i`` for the given 1-based nodes."""
    bits = [0] * n
    for v in nodes:
        if not 1 <= v <= n:
            raise ValueError(f"node {v} outside 1..{n}")
        bits[v - 1] = 1
    return tuple(bits)


def state_from_bits(s: str) -> ViralState:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a bitstring: {s!r}")
    return tuple(int(c) for c in s)


def state_to_bits(x: ViralState) -> str:
    return "".join("1" if b else "0" for b in x)


def infected(x: ViralState) -> list[int]:
    return [k + 1 for k, b in enumerate(x) if b]


# traces -------------------------------------------------------------------


@dataclass(frozen=True)
class ViralTrace:
    """Run-length encoded viral-state sequence.

    ``segments`` holds ``(state, repeat)`` pairs; the expanded sequence
    repeats each state ``repeat`` times. Adjacent equal states are merged on
    construction so the encoding is canonical.
    """

    segments: tuple[tuple[ViralState, int], ...]

    def __post_init__(self):
        merged: list[list] = []
        n = None
        for state, repeat in self.segments:
            state = tuple(int(b) for b in state)
            if n is None:
                n = len(state)
            elif len(state) != n:
                raise LengthMismatch("all states in a trace must share one length")
            if repeat < 1:
                raise ValueError("segment repeat must be positive")
            if merged and merged[-1][0] == state:
                merged[-1][1] += int(repeat)
            else:
                merged.append([state, int(repeat)])
        if not merged:
            raise ValueError("a trace holds at least one state")
        object.__setattr__(self, "segments", tuple((s, r) for s, r in merged))

    @classmethod
    def from_states(cls, states: Iterable[Sequence[int]]) -> "ViralTrace":
        return cls(tuple((tuple(s), 1) for s in states))

    @property
    def n_nodes(self) -> int:
        return len(self.segments[0][0])

    def __len__(self) -> int:
        """Expanded observation length."""
        return sum(r for _, r in self.segments)

    @property
    def first(self) -> ViralState:
        return self.segments[0][0]

    @property
    def last(self) -> ViralState:
        return self.segments[-1][0]

    def expanded(self) -> list[ViralState]:
        out: list[ViralState] = []
        for s, r in self.segments:
            out.extend([s] * r)
        return out

    def transitions(self) -> Iterator[tuple[ViralState, ViralState, int]]:
        """Consecutive pairs ``(x, y, count)`` in trace order, without expansion."""
        prev = None
        for s, r in self.segments:
            if prev is not None:
                yield prev, s, 1
            if r > 1:
                yield s, s, r - 1
            prev = s

    def tally(self) -> dict[tuple[ViralState, ViralState], int]:
        """Counts of each distinct transition, keyed in first-seen order."""
        out: dict[tuple[ViralState, ViralState], int] = {}
        for x, y, c in self.transitions():
            out[(x, y)] = out.get((x, y), 0) + c
        return out

    def __add__(self, other: "ViralTrace") -> "ViralTrace":
        return ViralTrace(self.segments + other.segments)


class TraceBuilder:
    """Append-only accumulator producing a canonical :class:`ViralTrace`."""

    def __init__(self, start: ViralState | None = None):
        self._segs: list[list] = []
        if start is not None:
            self.append(start)

    def append(self, state: ViralState, repeat: int = 1) -> None:
        if repeat <= 0:
            return
        state = tuple(state)
        if self._segs and self._segs[-1][0] == state:
            self._segs[-1][1] += repeat
        else:
            self._segs.append([state, repeat])

    def extend(self, states: Iterable[ViralState]) -> None:
        for s in states:
            self.append(s)

    @property
    def last(self) -> ViralState | None:
        return self._segs[-1][0] if self._segs else None

    def build(self) -> ViralTrace:
        return ViralTrace(tuple((s, r) for s, r in self._segs))


# transition model ---------------------------------------------------------


def _infection_count(A: AdjacencyMatrix, x: ViralState, i: int) -> int:
    row = A.array[i]
    return int(sum(int(row[j]) for j in range(len(x)) if x[j]))


def no_change_probability(x: ViralState, A: AdjacencyMatrix, p: SISParams) -> float:
    """``1 - delta_T*|infected| - beta_T*sum_{i susceptible} N_i``; may be negative."""
    cure = sum(x)
    infect = sum(_infection_count(A, x, i) for i in range(len(x)) if not x[i])
    return 1.0 - p.delta_T * cure - p.beta_T * infect


def _check_lengths(x, y, A):
    if len(x) != A.n or len(y) != A.n:
        raise LengthMismatch(f"state lengths {len(x)}, {len(y)} vs n={A.n}")


def transition_probability(x: ViralState, y: ViralState, A: AdjacencyMatrix, p: SISParams) -> float:
    _check_lengths(x, y, A)
    flips = [k for k in range(len(x)) if x[k] != y[k]]
    if not flips:
        return no_change_probability(x, A, p)
    if len(flips) > 1:
        return 0.0
    (i,) = flips
    if x[i]:
        return p.delta_T
    return p.beta_T * _infection_count(A, x, i)


def enumerate_successors(x: ViralState, A: AdjacencyMatrix, p: SISParams) -> list[tuple[ViralState, float]]:
    """Every successor with positive probability.

    Ordered by flipped node index, the no-change successor last; this order
    fixes the inversion sampling used by :func:`simulate`.
    """
    if len(x) != A.n:
        raise LengthMismatch(f"state length {len(x)} vs n={A.n}")
    out: list[tuple[ViralState, float]] = []
    total = 0.0
    for i in range(len(x)):
        prob = p.delta_T if x[i] else p.beta_T * _infection_count(A, x, i)
        if prob > 0:
            y = list(x)
            y[i] = 1 - y[i]
            out.append((tuple(y), prob))
            total += prob
    stay = 1.0 - total
    if stay < -1e-15:
        raise InfeasibleParams(f"no-change probability {stay} < 0 in state {state_to_bits(x)}")
    if stay > 0:
        out.append((tuple(x), stay))
    return out


def simulate(A: AdjacencyMatrix, p: SISParams, x0: ViralState, steps: int, seed: int) -> ViralTrace:
    """Draw ``steps`` transitions from ``x0``.

    Uses numpy's PCG64 generator seeded with ``seed`` and one uniform per
    step, inverted against the cumulative successor probabilities.
    """
    if not validate_params(A, p):
        raise InfeasibleParams("parameters violate delta_T*n + beta_T*L <= 1")
    if len(x0) != A.n:
        raise LengthMismatch(f"x0 length {len(x0)} vs n={A.n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(steps)
    cache: dict[ViralState, tuple[list[ViralState], list[float]]] = {}
    builder = TraceBuilder(tuple(x0))
    x = tuple(x0)
    for k in range(steps):
        if x not in cache:
            succ = enumerate_successors(x, A, p)
            cum, acc = [], 0.0
            for _, prob in succ:
                acc += prob
                cum.append(acc)
            cache[x] = ([s for s, _ in succ], cum)
        states, cum = cache[x]
        idx = int(np.searchsorted(cum, u[k], side="right"))
        x = states[min(idx, len(states) - 1)]
        builder.append(x)
    return builder.build()


def log_likelihood(trace: ViralTrace, A: AdjacencyMatrix, p: SISParams) -> float:
    """Exact log-probability of the trace given its first state.

    Segments are consumed left to right: the transition into a segment, then
    ``(repeat - 1) * log(no-change probability)`` for its self-transitions.
    Returns ``-inf`` as soon as a transition has probability zero.
    """
    if trace.n_nodes != A.n:
        raise LengthMismatch(f"trace has {trace.n_nodes} nodes, graph has {A.n}")
    total = 0.0
    for x, y, count in trace.transitions():
        prob = transition_probability(x, y, A, p)
        if prob < 0:
            raise InfeasibleParams(f"negative no-change probability in state {state_to_bits(x)}")
        if prob == 0:
            return NEG_INF
        total += count * math.log(prob)
    return total


def log_likelihood_expanded(states: Sequence[ViralState], A: AdjacencyMatrix, p: SISParams) -> float:
    """Reference evaluation over the fully expanded sequence, one term per step."""
    total = 0.0
    for x, y in zip(states, states[1:]):
        prob = transition_probability(x, y, A, p)
        if prob <= 0:
            return NEG_INF
        total += math.log(prob)
    return total


def is_realizable(trace: ViralTrace, A: AdjacencyMatrix, p: SISParams) -> bool:
    """True iff every consecutive transition has positive probability under ``A``."""
    return all(transition_probability(x, y, A, p) > 0 for x, y, _ in trace.transitions())
