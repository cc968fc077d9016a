"""Undirected simple graphs on nodes labelled 1..n.

Node labels in the public API are 1-based (node 1 and node 2 play special
roles in the reduction); arrays are 0-based internally.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from .errors import IndexOutOfRange, NotConnected

Link = tuple[int, int]


def _norm_link(i: int, j: int) -> Link:
    return (i, j) if i < j else (j, i)


class LinkSet(frozenset):
    """Immutable set of unordered links ``(i, j)`` stored with ``i < j``."""

    def __new__(cls, links: Iterable[tuple[int, int]] = ()):
        normed = []
        for i, j in links:
            if i == j:
                raise ValueError(f"self-loop ({i}, {j}) is not a link")
            normed.append(_norm_link(int(i), int(j)))
        return super().__new__(cls, normed)

    def nodes(self) -> set[int]:
        return {v for link in self for v in link}

    def sorted(self) -> list[Link]:
        return sorted(self)


class AdjacencyMatrix:
    """Symmetric 0/1 matrix with zero diagonal. Immutable and hashable."""

    __slots__ = ("_a", "_key", "_links")

    def __init__(self, entries):
        a = np.array(entries, dtype=np.int8)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("adjacency matrix must be square with n >= 1")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        if (a != a.T).any():
            raise ValueError("adjacency matrix must be symmetric")
        if np.diag(a).any():
            raise ValueError("adjacency matrix must have a zero diagonal")
        a.setflags(write=False)
        self._a = a
        self._key = a.tobytes()
        self._links = None

    # construction ---------------------------------------------------------

    @classmethod
    def from_links(cls, n: int, links: Iterable[tuple[int, int]]) -> "AdjacencyMatrix":
        a = np.zeros((n, n), dtype=np.int8)
        for i, j in links:
            if not (1 <= i <= n and 1 <= j <= n):
                raise IndexOutOfRange(f"link ({i}, {j}) outside 1..{n}")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1
        return cls(a)

    @classmethod
    def empty(cls, n: int) -> "AdjacencyMatrix":
        return cls(np.zeros((n, n), dtype=np.int8))

    @classmethod
    def complete(cls, n: int) -> "AdjacencyMatrix":
        return cls.from_links(n, combinations(range(1, n + 1), 2))

    @classmethod
    def path(cls, n: int) -> "AdjacencyMatrix":
        return cls.from_links(n, [(k, k + 1) for k in range(1, n)])

    @classmethod
    def cycle(cls, n: int) -> "AdjacencyMatrix":
        links = [(k, k + 1) for k in range(1, n)]
        if n > 2:
            links.append((1, n))
        return cls.from_links(n, links)

    @classmethod
    def star(cls, n: int, center: int = 1) -> "AdjacencyMatrix":
        return cls.from_links(n, [(center, k) for k in range(1, n + 1) if k != center])

    @classmethod
    def from_upper_bits(cls, n: int, bits: int | str) -> "AdjacencyMatrix":
        """Inverse of :meth:`upper_bits`; the first pair (1, 2) is the most significant bit."""
        pairs = upper_pairs(n)
        if isinstance(bits, str):
            if len(bits) != len(pairs):
                raise ValueError(f"expected {len(pairs)} bits, got {len(bits)}")
            flags = [c == "1" for c in bits]
        else:
            flags = [(bits >> (len(pairs) - 1 - k)) & 1 for k in range(len(pairs))]
        return cls.from_links(n, [p for p, f in zip(pairs, flags) if f])

    # accessors ------------------------------------------------------------

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only 0-based view."""
        return self._a

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        self._check_node(i)
        self._check_node(j)
        return int(self._a[i - 1, j - 1])

    def _check_node(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise IndexOutOfRange(f"node {v} outside 1..{self.n}")

    def links(self) -> LinkSet:
        if self._links is None:
            rows, cols = np.nonzero(np.triu(self._a, 1))
            self._links = LinkSet((int(i) + 1, int(j) + 1) for i, j in zip(rows, cols))
        return self._links

    @property
    def link_count(self) -> int:
        return int(self._a.sum()) // 2

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self._a[v - 1].sum())

    def neighbors(self, v: int) -> list[int]:
        self._check_node(v)
        return [int(u) + 1 for u in np.flatnonzero(self._a[v - 1])]

    def upper_bits(self) -> str:
        """Upper triangle in row-major pair order as a '0'/'1' string."""
        iu = np.triu_indices(self.n, 1)
        return "".join("1" if b else "0" for b in self._a[iu])

    def upper_int(self) -> int:
        s = self.upper_bits()
        return int(s, 2) if s else 0

    def induced(self, nodes: Iterable[int]) -> "AdjacencyMatrix":
        """Subgraph on ``nodes``, relabelled 1..k in the given order."""
        idx = [v - 1 for v in nodes]
        return AdjacencyMatrix(self._a[np.ix_(idx, idx)])

    def permuted(self, perm: list[int]) -> "AdjacencyMatrix":
        """Relabel so that new node ``k`` is old node ``perm[k-1]``."""
        return self.induced(perm)

    def with_entry(self, i: int, j: int, value: int) -> "AdjacencyMatrix":
        a = self._a.copy()
        a[i - 1, j - 1] = a[j - 1, i - 1] = value
        return AdjacencyMatrix(a)

    # dunder ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.n == other.n and self._key == other._key

    def __hash__(self) -> int:
        return hash((self.n, self._key))

    def __repr__(self) -> str:
        return f"AdjacencyMatrix(n={self.n}, links={self.links().sorted()})"

    # text format ----------------------------------------------------------

    def to_text(self) -> str:
        lines = [str(self.n)] + [f"{i} {j}" for i, j in self.links().sorted()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "AdjacencyMatrix":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 1:
            raise ValueError("graph text must start with a line holding n")
        n = int(rows[0][0])
        links = []
        for row in rows[1:]:
            if len(row) != 2:
                raise ValueError(f"bad link line: {' '.join(row)!r}")
            links.append((int(row[0]), int(row[1])))
        return cls.from_links(n, links)


def upper_pairs(n: int) -> list[Link]:
    """All pairs ``(i, j)``, ``1 <= i < j <= n``, in row-major order."""
    return list(combinations(range(1, n + 1), 2))


def is_connected(A: AdjacencyMatrix) -> bool:
    """True iff every node is reachable from node 1."""
    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for v in A.neighbors(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == A.n


def reduced_degree(A: AdjacencyMatrix, l: int) -> int:
    """Degree of node ``l`` once node 1 is deleted, ``sum_{m>=2} a_ml``."""
    if not 2 <= l <= A.n:
        raise IndexOutOfRange(f"node {l} outside 2..{A.n}")
    return int(A.array[1:, l - 1].sum())


def _dfs_tree_degrees(A: AdjacencyMatrix) -> dict[int, int]:
    deg = {v: 0 for v in range(1, A.n + 1)}
    seen = {1}
    stack: list[tuple[int, Iterator[int]]] = [(1, iter(A.neighbors(1)))]
    while stack:
        u, it = stack[-1]
        for v in it:
            if v not in seen:
                seen.add(v)
                deg[u] += 1
                deg[v] += 1
                stack.append((v, iter(A.neighbors(v))))
                break
        else:
            stack.pop()
    return deg


def relabel_for_reduction(A: AdjacencyMatrix) -> tuple[AdjacencyMatrix, list[int]]:
    """Relabel a connected graph so node 1 is a removable leaf adjacent to node 2.

    A depth-first spanning tree is grown from node 1; its smallest-index leaf
    becomes the new node 1 and that leaf's smallest-index graph neighbour the
    new node 2. Remaining nodes keep their relative order.

    Returns ``(relabelled, perm)`` where new node ``k`` is old node ``perm[k-1]``.
    """
    if A.n < 2:
        raise NotConnected("relabelling needs at least two nodes")
    if not is_connected(A):
        raise NotConnected("graph is not connected")
    tree_deg = _dfs_tree_degrees(A)
    leaf = min(v for v, d in tree_deg.items() if d == 1)
    anchor = min(A.neighbors(leaf))
    rest = [v for v in range(1, A.n + 1) if v not in (leaf, anchor)]
    perm = [leaf, anchor] + rest
    return A.permuted(perm), perm


def connected_graphs(n: int) -> Iterator[AdjacencyMatrix]:
    """Every connected labelled graph on ``n`` nodes, in upper-bit order."""
    pairs = upper_pairs(n)
    for code in range(1 << len(pairs)):
        G = AdjacencyMatrix.from_upper_bits(n, code)
        if is_connected(G):
            yield G


def all_graphs(n: int) -> Iterator[AdjacencyMatrix]:
    pairs = upper_pairs(n)
    for code in range(1 << len(pairs)):
        yield AdjacencyMatrix.from_upper_bits(n, code)
