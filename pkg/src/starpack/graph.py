"""Undirected simple graphs with dense 1-based vertex ids.

Internally every neighborhood is a bitmask over bits 1..n (bit 0 unused),
which is what the solvers iterate over.  Instances are treated as immutable
once constructed.

Text format (round-trips bit-exactly through parse/serialize):

    # optional comment lines
    p <n> <m>
    e <u> <v>     (exactly m lines, 1 <= u,v <= n, u != v)

Duplicate edge lines are rejected, as are self-loops, ids out of range,
and n = 0.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator

from .errors import GraphParseError


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """A simple undirected graph on vertices 1..n."""

    __slots__ = ("n", "adj", "__dict__")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n <= 0:
            raise GraphParseError("vertex count must be positive")
        adj = [0] * (n + 1)
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphParseError(f"edge ({u},{v}) out of range 1..{n}")
            if u == v:
                raise GraphParseError(f"self-loop at vertex {u}")
            # repeated mentions of the same pair collapse into one edge
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)

    @classmethod
    def from_adj(cls, n: int, adj: tuple[int, ...]) -> "Graph":
        # Fast path for generators that already hold adjacency masks.
        # The caller is trusted to pass a symmetric, loop-free table.
        g = cls.__new__(cls)
        g.n = n
        g.adj = adj
        return g

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for u in range(1, self.n + 1):
            higher = self.adj[u] >> (u + 1)
            for off in bits(higher << (u + 1)):
                out.append((u, off))
        return tuple(out)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return ((1 << self.n) - 1) << 1

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def isolated_count(self) -> int:
        return sum(1 for v in range(1, self.n + 1) if not self.adj[v])

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def degrees_within(g: Graph, s: Iterable[int]) -> list[int]:
    """Degree of each vertex counted inside the set ``s``.

    Returns a list indexed 1..n (slot 0 unused); vertices outside ``s``
    report 0.
    """
    smask = mask_of(s)
    out = [0] * (g.n + 1)
    for v in bits(smask):
        out[v] = (g.adj[v] & smask).bit_count()
    return out


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph induced by ``s`` with vertices renumbered 1..|s|.

    Returns the new graph together with ``new_to_old`` where
    ``new_to_old[i]`` is the original id of new vertex ``i`` (slot 0 is 0).
    """
    old_ids = sorted(set(s))
    if not old_ids:
        raise ValueError("induced subgraph needs at least one vertex")
    if old_ids[0] < 1 or old_ids[-1] > g.n:
        raise ValueError("vertex id out of range")
    new_of = {old: i + 1 for i, old in enumerate(old_ids)}
    edges = []
    for i, old in enumerate(old_ids):
        for w in bits(g.adj[old]):
            if w in new_of and old < w:
                edges.append((i + 1, new_of[w]))
    return Graph(len(old_ids), edges), (0, *old_ids)


def parse_graph(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 3 or fields[0] != "p":
                raise GraphParseError(f"line {lineno}: expected header 'p <n> <m>'")
            try:
                n, m = int(fields[1]), int(fields[2])
            except ValueError:
                raise GraphParseError(f"line {lineno}: non-integer header field") from None
            if n <= 0:
                raise GraphParseError(f"line {lineno}: vertex count must be positive")
            if m < 0:
                raise GraphParseError(f"line {lineno}: negative edge count")
            continue
        if len(fields) != 3 or fields[0] != "e":
            raise GraphParseError(f"line {lineno}: expected edge line 'e <u> <v>'")
        if len(edges) >= m:
            raise GraphParseError(f"line {lineno}: more than {m} edge lines")
        try:
            u, v = int(fields[1]), int(fields[2])
        except ValueError:
            raise GraphParseError(f"line {lineno}: non-integer edge endpoint") from None
        edges.append((u, v))
    if n is None:
        raise GraphParseError("missing header line")
    if len(edges) != m:
        raise GraphParseError(f"expected {m} edge lines, found {len(edges)}")
    return Graph(n, edges)


def serialize_graph(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"# {part}")
    lines.append(f"p {g.n} {g.m}")
    for u, v in g.edges:
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    seen = 2  # vertex 1
    frontier = 2
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= g.adj[v]
        frontier = nxt & ~seen
        seen |= frontier
    return seen == g.full_mask
