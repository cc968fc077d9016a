"""Gadget transitions, connectors and the covering walk used by the reduction.

The host graph is assumed relabelled so that ``a_12 = 1`` and the graph on
nodes ``2..n`` is connected. The free variables of the reduced problem are
the first-row entries ``a_13 .. a_1n``.

Gadget kinds:

* ``QUAD_INFECT(i, j)``: ``e2+ei+ej -> e1+e2+ei+ej``, node 1 infected while
  nodes 2, i, j are the infected set; contributes ``log(3/4) a_1i a_1j``.
* ``LIN_INFECT(l)``: ``e2+el -> e1+e2+el``; contributes ``log(2) a_1l``.
* ``LIN_CONST(l)``: ``el -> el``; contributes ``log(1 - beta_T/xi_l) a_1l``.
* ``FORCE_LINK(i, j)``: ``ei -> ei+ej -> ej``; zero probability unless
  ``a_ij = 1``.
* ``FORCE_ABSENT(l)``: ``el -> el``, repeated to penalise links at ``l``.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

from .errors import BadIndices, InfeasibleParams, NotConnected, Unreachable
from .graphs import AdjacencyMatrix, LinkSet, reduced_degree
from .sis import SISParams, TraceBuilder, ViralState, ViralTrace, basis_state


class Kind(enum.Enum):
    QUAD_INFECT = "quad_infect"
    LIN_INFECT = "lin_infect"
    LIN_CONST = "lin_const"
    FORCE_LINK = "force_link"
    FORCE_ABSENT = "force_absent"


@dataclass(frozen=True)
class GadgetTransition:
    kind: Kind
    nodes: tuple[int, ...]

    @classmethod
    def quad_infect(cls, i: int, j: int) -> "GadgetTransition":
        return cls(Kind.QUAD_INFECT, (i, j))

    @classmethod
    def lin_infect(cls, l: int) -> "GadgetTransition":
        return cls(Kind.LIN_INFECT, (l,))

    @classmethod
    def lin_const(cls, l: int) -> "GadgetTransition":
        return cls(Kind.LIN_CONST, (l,))

    @classmethod
    def force_link(cls, i: int, j: int) -> "GadgetTransition":
        return cls(Kind.FORCE_LINK, (i, j))

    @classmethod
    def force_absent(cls, l: int) -> "GadgetTransition":
        return cls(Kind.FORCE_ABSENT, (l,))

    def validate(self, n: int) -> None:
        k, v = self.kind, self.nodes
        if k is Kind.QUAD_INFECT:
            ok = len(v) == 2 and 3 <= v[0] < v[1] <= n
        elif k in (Kind.LIN_INFECT, Kind.LIN_CONST):
            ok = len(v) == 1 and 3 <= v[0] <= n
        elif k is Kind.FORCE_LINK:
            i, j = v
            lo, hi = min(i, j), max(i, j)
            ok = i != j and 1 <= lo and hi <= n and ((lo, hi) == (1, 2) or lo >= 2)
        else:
            ok = len(v) == 1 and 2 <= v[0] <= n
        if not ok:
            raise BadIndices(f"{k.value}{v} invalid for n={n}")


def gadget_states(t: GadgetTransition, n: int) -> list[ViralState]:
    t.validate(n)
    k, v = t.kind, t.nodes
    if k is Kind.QUAD_INFECT:
        i, j = v
        return [basis_state(n, 2, i, j), basis_state(n, 1, 2, i, j)]
    if k is Kind.LIN_INFECT:
        (l,) = v
        return [basis_state(n, 2, l), basis_state(n, 1, 2, l)]
    if k is Kind.FORCE_LINK:
        i, j = v
        return [basis_state(n, i), basis_state(n, i, j), basis_state(n, j)]
    (l,) = v
    return [basis_state(n, l), basis_state(n, l)]


# log-probability forms ----------------------------------------------------


def xi(host: AdjacencyMatrix, p: SISParams, l: int) -> float:
    """No-change probability of ``e_l`` with ``a_1l = 0``: ``1 - delta_T - beta_T d_l``."""
    return 1.0 - p.delta_T - p.beta_T * reduced_degree(host, l)


@dataclass(frozen=True)
class LogProbForm:
    """``const + sum lin[l] a_1l + sum quad[(i, j)] a_1i a_1j`` over first-row entries.

    ``requires`` lists links whose absence makes the probability zero.
    """

    const: float
    lin: dict[int, float] = field(default_factory=dict)
    quad: dict[tuple[int, int], float] = field(default_factory=dict)
    requires: tuple[tuple[int, int], ...] = ()

    def evaluate(self, row: dict[int, int], present: set[tuple[int, int]] | None = None) -> float:
        if present is not None and any(r not in present for r in self.requires):
            return -math.inf
        val = self.const
        for l, c in self.lin.items():
            val += c * row.get(l, 0)
        for (i, j), c in self.quad.items():
            val += c * row.get(i, 0) * row.get(j, 0)
        return val


def gadget_log_prob_form(t: GadgetTransition, host: AdjacencyMatrix, p: SISParams) -> LogProbForm:
    n = host.n
    t.validate(n)
    if host[1, 2] != 1:
        raise BadIndices("host must be relabelled with a_12 = 1")
    k, v = t.kind, t.nodes
    if k is Kind.QUAD_INFECT:
        i, j = v
        return LogProbForm(math.log(p.beta_T), {i: math.log(2), j: math.log(2)}, {(i, j): math.log(0.75)})
    if k is Kind.LIN_INFECT:
        return LogProbForm(math.log(p.beta_T), {v[0]: math.log(2)})
    if k is Kind.FORCE_LINK:
        i, j = v
        return LogProbForm(math.log(p.beta_T * p.delta_T), requires=((min(i, j), max(i, j)),))
    (l,) = v
    x = xi(host, p, l)
    if l == 2:
        # a_12 is fixed to 1, so the whole probability is constant.
        if x - p.beta_T <= 0:
            raise InfeasibleParams(f"no-change probability of e_2 is {x - p.beta_T}")
        return LogProbForm(math.log(x - p.beta_T))
    if x <= p.beta_T:
        raise InfeasibleParams(f"xi_{l} = {x} <= beta_T = {p.beta_T}")
    return LogProbForm(math.log(x), {l: math.log1p(-p.beta_T / x)})


# connectors ----------------------------------------------------------------


def build_connector(start: ViralState, end: ViralState, host: AdjacencyMatrix) -> ViralTrace:
    """Transition sequence from ``start`` to ``end`` that leaves node 1 susceptible.

    Node 1 cures first if infected; then nodes ``2..n`` are infected in
    breadth-first order over the host restricted to ``2..n`` until all are
    infected; then the nodes not infected in ``end`` cure in increasing
    index order. Every step flips exactly one node, so no constant
    transition occurs. The returned trace starts at ``start`` and ends at
    ``end``; its length minus one is the connector length.
    """
    n = host.n
    if len(start) != n or len(end) != n:
        raise BadIndices("state lengths must match the host")
    if end[0]:
        raise BadIndices("connector target must have node 1 susceptible")
    b = TraceBuilder(start)
    x = list(start)
    if x[0]:
        x[0] = 0
        b.append(tuple(x))
    if tuple(x) != tuple(end):
        frontier = deque(v for v in range(2, n + 1) if x[v - 1])
        if not frontier:
            raise Unreachable("no infected node among 2..n to spread from")
        while frontier:
            u = frontier.popleft()
            for v in host.neighbors(u):
                if v >= 2 and not x[v - 1]:
                    x[v - 1] = 1
                    b.append(tuple(x))
                    frontier.append(v)
        if not all(x[1:]):
            raise Unreachable("host restricted to nodes 2..n is not connected")
        for v in range(2, n + 1):
            if not end[v - 1]:
                x[v - 1] = 0
                b.append(tuple(x))
    return b.build()


# covering walk -------------------------------------------------------------


def build_edge_cover_walk(Lbar: LinkSet, start: int = 1) -> list[tuple[int, int]]:
    """Closed walk from ``start`` traversing every link exactly twice.

    Depth-first: each unused link ``(u, v)`` is walked out, explored from
    ``v`` if ``v`` is new, and walked back. Consecutive traversals chain
    (``i_{t+1} = j_t``) and every node other than ``start`` is the source of
    at least one traversal.
    """
    adj: dict[int, list[int]] = {}
    for i, j in Lbar:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    if not Lbar:
        return []
    if start not in adj:
        raise NotConnected(f"start node {start} has no link")
    walk: list[tuple[int, int]] = []
    used: set[tuple[int, int]] = set()
    seen = {start}

    def visit(u: int) -> None:
        for v in sorted(adj[u]):
            e = (min(u, v), max(u, v))
            if e in used:
                continue
            used.add(e)
            walk.append((u, v))
            if v not in seen:
                seen.add(v)
                visit(v)
            walk.append((v, u))

    visit(start)
    if len(used) != len(Lbar):
        raise NotConnected("link set is not connected")
    return walk


def enforcement_links(host: AdjacencyMatrix) -> LinkSet:
    """Host links ``(1, 2)`` and all links among nodes ``2..n``."""
    return LinkSet(l for l in host.links() if l == (1, 2) or l[0] >= 2)
