"""Seeded instance generators and exhaustive small-graph enumeration.

All randomness flows through SplitMix64 (Steele, Lea & Flood's 64-bit
mixer), implemented here so the streams are identical on every platform
and never depend on the host's default RNG.  Floats are drawn as the top
53 bits of the next state, bounded integers by rejection sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, inf
from typing import Iterator

from .graph import Graph, bits, connected

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; one next() per draw."""

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # uniform in [0, 1) with 53 bits of precision
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def next_below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via rejection sampling."""
        assert bound > 0
        limit = MASK64 - (MASK64 + 1) % bound
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % bound

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def gnp(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each pair (u, v), u < v in ascending order, kept with prob p."""
    if n < 1:
        raise ValueError("n must be positive")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must be in [0, 1]")
    rng = SplitMix64(seed)
    edges = []
    for u in range(1, n):
        for v in range(u + 1, n + 1):
            if rng.next_float() < p:
                edges.append((u, v))
    return Graph(n, edges)


def random_regular(n: int, d: int, seed: int, max_tries: int = 1000) -> Graph:
    """d-regular simple graph via the pairing model, resampling on collisions."""
    if d < 0 or d >= n:
        raise ValueError("need 0 <= d < n")
    if (n * d) % 2 != 0:
        raise ValueError("n*d must be even")
    if d == 0:
        return Graph(n, [])
    rng = SplitMix64(seed)
    for _ in range(max_tries):
        points = [v for v in range(1, n + 1) for _ in range(d)]
        rng.shuffle(points)
        pairs = [(points[i], points[i + 1]) for i in range(0, len(points), 2)]
        seen = set()
        ok = True
        for u, v in pairs:
            if u == v or (min(u, v), max(u, v)) in seen:
                ok = False
                break
            seen.add((min(u, v), max(u, v)))
        if ok:
            return Graph(n, pairs)
    raise ValueError(f"no simple {d}-regular pairing found in {max_tries} tries")


def bipartite(n1: int, n2: int, p: float, seed: int) -> Graph:
    """Random bipartite graph on sides 1..n1 and n1+1..n1+n2."""
    if n1 < 1 or n2 < 1:
        raise ValueError("both sides need at least one vertex")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must be in [0, 1]")
    rng = SplitMix64(seed)
    edges = []
    for u in range(1, n1 + 1):
        for v in range(n1 + 1, n1 + n2 + 1):
            if rng.next_float() < p:
                edges.append((u, v))
    return Graph(n1 + n2, edges)


def labeled_connected_count(n: int) -> int:
    """Number of labeled connected graphs on n vertices (inclusion-exclusion)."""
    if n < 1:
        raise ValueError("n must be positive")
    total = [0] * (n + 1)
    for i in range(1, n + 1):
        c = 1 << comb(i, 2)
        for j in range(1, i):
            c -= comb(i - 1, j - 1) * total[j] * (1 << comb(i - j, 2))
        total[i] = c
    return total[n]


def enumerate_connected_small(n: int) -> Iterator[Graph]:
    """Every labeled connected graph on vertices 1..n, 1 <= n <= 8.

    Edge sets are enumerated as upper-triangle bitmasks in ascending numeric
    order, so the sequence is fixed.  On exhaustion the yield count is
    cross-checked against the inclusion-exclusion count and a mismatch
    raises, making the enumerator self-verifying.
    """
    if not (1 <= n <= 8):
        raise ValueError("exhaustive enumeration supports 1 <= n <= 8")
    pairs = [(u, v) for u in range(1, n) for v in range(u + 1, n + 1)]
    npairs = len(pairs)
    # bit i of the edge mask toggles pairs[i]; precompute adjacency deltas
    delta = []
    for u, v in pairs:
        row = [0] * (n + 1)
        row[u] = 1 << v
        row[v] = 1 << u
        delta.append(row)
    count = 0
    full = ((1 << n) - 1) << 1
    for emask in range(1 << npairs):
        adj = [0] * (n + 1)
        em = emask
        while em:
            low = em & -em
            i = low.bit_length() - 1
            row = delta[i]
            adj[pairs[i][0]] |= row[pairs[i][0]]
            adj[pairs[i][1]] |= row[pairs[i][1]]
            em ^= low
        # connectivity by bitmask BFS from vertex 1
        seen = 2
        frontier = 2
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~seen
            seen |= frontier
        if seen == full:
            count += 1
            yield Graph.from_adj(n, tuple(adj))
    expect = labeled_connected_count(n)
    if count != expect:
        raise AssertionError(f"enumerated {count} connected graphs on {n} vertices, expected {expect}")


# ---------------------------------------------------------------------------
# hand-built worst-case instances for the coverage local search
# ---------------------------------------------------------------------------


def pull_gadget(k: int, which: str) -> Graph:
    """Instances on which a specific pull operation is the only way forward.

    ``k_kp1`` needs the pull that trades a k-star plus one satellite of a
    bigger star for two fresh k-stars; ``kk`` the pull of two k-stars;
    ``kkk`` (k = 2 only) the pull of three 2-stars.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if which == "k_kp1":
        # center w=1 (k sats: v=3, s2..), center y=2 (k+1 sats: x, t1..),
        # u adjacent to v plus k-1 pendants, x adjacent to s2 plus k-1 pendants
        w, y = 1, 2
        v = 3
        s = list(range(4, 4 + (k - 1)))          # s2..sk
        x = s[-1] + 1
        ts = list(range(x + 1, x + 1 + k))       # t1..tk
        u = ts[-1] + 1
        os_ = list(range(u + 1, u + 1 + (k - 1)))
        ps = list(range(os_[-1] + 1, os_[-1] + 1 + (k - 1)))
        edges = [(w, v)] + [(w, si) for si in s]
        edges += [(y, x)] + [(y, ti) for ti in ts]
        edges += [(u, v)] + [(u, oi) for oi in os_]
        edges += [(x, pi) for pi in ps] + [(x, s[0])]
        return Graph(ps[-1], edges)
    if which == "kk":
        if k == 2:
            # the uniform shape collapses at k=2; this 9-vertex variant is the
            # smallest one verified to funnel into the two-k-star pull
            return Graph(9, [(1, 3), (1, 4), (2, 5), (2, 6), (3, 7), (7, 8), (4, 5), (5, 9)])
        # centers 1 and 2 with k sats each; u = first sat of star 1 with k-1
        # pendants; x = first sat of star 2 with k-1 pendants plus a cross
        # edge to the second sat of star 1
        c1, c2 = 1, 2
        a = list(range(3, 3 + k))        # sats of star 1; u = a[0]
        b = list(range(3 + k, 3 + 2 * k))  # sats of star 2; x = b[0]
        os_ = list(range(b[-1] + 1, b[-1] + 1 + (k - 1)))
        ps = list(range(os_[-1] + 1, os_[-1] + 1 + (k - 1)))
        edges = [(c1, ai) for ai in a] + [(c2, bi) for bi in b]
        edges += [(a[0], oi) for oi in os_]
        edges += [(b[0], pi) for pi in ps] + [(b[0], a[1])]
        return Graph(ps[-1], edges)
    if which == "kkk":
        if k == 2:
            # three 2-stars {1;4,5} {2;6,7} {3;8,9}; hub 8 reaches into all
            # three; pendant chains 10-11 and 12-13 hang off sats 4 and 6
            return Graph(
                13,
                [(1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9),
                 (8, 5), (8, 7), (10, 4), (10, 11), (12, 6), (12, 13)],
            )
        # structural analogue for larger k (not a worst case there: the
        # three-star pull is a k=2 move)
        centers = [1, 2, 3]
        sats = [list(range(4 + i * k, 4 + (i + 1) * k)) for i in range(3)]
        edges = [(c, s) for c, group in zip(centers, sats) for s in group]
        hub = sats[2][0]
        edges += [(hub, sats[0][-1]), (hub, sats[1][-1])]
        nxt = sats[2][-1] + 1
        hub_pad = list(range(nxt, nxt + max(0, k - 3)))
        edges += [(hub, h) for h in hub_pad]
        nxt += len(hub_pad)
        u = nxt
        u_pad = list(range(u + 1, u + k))
        edges += [(u, sats[0][0])] + [(u, q) for q in u_pad]
        nxt = u_pad[-1] + 1
        x = nxt
        x_pad = list(range(x + 1, x + k))
        edges += [(x, sats[1][0])] + [(x, q) for q in x_pad]
        return Graph(x_pad[-1], edges)
    raise ValueError(f"unknown pull gadget {which!r}")


def revise_gadget(k: int | float, t: int, which: str) -> Graph:
    """Instances whose exact first-stage packing leaves t-stars that only the
    named revise move can clear: ``single`` splits one t-star on its own,
    ``pair`` rewires a t-star against one neighbouring star, ``triple``
    needs two neighbouring stars at once."""
    if t < 2 or (k != inf and k <= t):
        raise ValueError("need k > t >= 2")
    if which == "single":
        if t < 3:
            raise ValueError("the single-star split needs t >= 3")
        # K_{1,t} plus an edge between the first two leaves
        edges = [(1, i) for i in range(2, t + 2)] + [(2, 3)]
        return Graph(t + 1, edges)
    if which == "pair":
        if t == 2:
            # two 2-stars with one satellite-to-center cross edge
            return Graph(6, [(1, 3), (1, 4), (2, 5), (2, 6), (3, 2)])
        # t-star {1; 3..t+2} + 1-star {2; t+3} + cross edge first-sat -> c2
        sats = list(range(3, t + 3))
        y = t + 3
        return Graph(y, [(1, s) for s in sats] + [(2, y), (sats[0], 2)])
    if which == "triple":
        # two t-stars + a 1-star {1;2}; centers of the t-stars reach 1 and 2
        a = 3
        a_sats = list(range(4, 4 + t))
        b = a_sats[-1] + 1
        b_sats = list(range(b + 1, b + 1 + t))
        edges = [(1, 2), (a, 1), (b, 2)]
        edges += [(a, s) for s in a_sats] + [(b, s) for s in b_sats]
        return Graph(b_sats[-1], edges)
    raise ValueError(f"unknown revise gadget {which!r}")


# ---------------------------------------------------------------------------
# serializable instance descriptions
# ---------------------------------------------------------------------------

FAMILIES = ("gnp", "regular", "bipartite", "exhaustive", "pullgadget", "revisegadget")


@dataclass
class InstanceSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}

    @staticmethod
    def from_json(obj: dict) -> "InstanceSpec":
        return InstanceSpec(obj["family"], dict(obj.get("params", {})), obj.get("seed", 0))


def generate(spec: InstanceSpec) -> Graph:
    fam, p = spec.family, spec.params
    if fam == "gnp":
        return gnp(p["n"], p["p"], spec.seed)
    if fam == "regular":
        return random_regular(p["n"], p["d"], spec.seed)
    if fam == "bipartite":
        return bipartite(p["n1"], p["n2"], p["p"], spec.seed)
    if fam == "exhaustive":
        idx = p.get("index", 0)
        for i, g in enumerate(enumerate_connected_small(p["n"])):
            if i == idx:
                return g
        raise ValueError(f"index {idx} out of range for n={p['n']}")
    if fam == "pullgadget":
        return pull_gadget(p["k"], p["which"])
    if fam == "revisegadget":
        k = inf if p["k"] == "inf" else p["k"]
        return revise_gadget(k, p["t"], p["which"])
    raise ValueError(f"unknown family {fam!r}")
