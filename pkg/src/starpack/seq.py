"""Exact maximum-coverage star packing with sizes 1..k (the first stage of
the two-stage size-constrained solver), plus structural analyses of its
output.

For unbounded k a spanning star forest is exact: every non-isolated vertex
can be covered (grow a maximal matching, attach leftover vertices, split
edges attached on both ends).  For finite k a branch-and-bound search
decides vertices in ascending id order; it is deterministic and keeps the
first optimum it finds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import NodeBudgetError
from .graph import Graph, bits
from .model import UNBOUNDED, Packing, Star


def spanning_star_forest(g: Graph) -> Packing:
    """Stars covering exactly the non-isolated vertices; no size bound."""
    matched = [0] * (g.n + 1)  # partner id or 0
    for u, v in g.edges:
        if not matched[u] and not matched[v]:
            matched[u] = v
            matched[v] = u
    attach: dict[int, list[int]] = {}
    for v in range(1, g.n + 1):
        if matched[v] or not g.adj[v]:
            continue
        host = next(w for w in bits(g.adj[v]) if matched[w])
        attach.setdefault(host, []).append(v)
    stars = []
    for u in range(1, g.n + 1):
        v = matched[u]
        if not (u < v):
            continue
        au, av = attach.get(u, []), attach.get(v, [])
        if au and av:
            stars.append(Star(u, tuple(au)))
            stars.append(Star(v, tuple(av)))
        elif au:
            stars.append(Star(u, (*au, v)))
        elif av:
            stars.append(Star(v, (*av, u)))
        else:
            stars.append(Star(u, (v,)))
    return Packing(stars)


def _greedy_incumbent(g: Graph, k: int) -> Packing:
    """Feasible warm start: the spanning forest with oversized stars trimmed
    to their k lowest satellites."""
    forest = spanning_star_forest(g)
    stars = []
    for s in forest.stars:
        if s.size > k:
            stars.append(Star(s.center, s.satellites[:k]))
        else:
            stars.append(s)
    return Packing(stars)


def _maximal_matching_size(g: Graph, avail: int) -> int:
    size = 0
    free = avail
    for v in bits(avail):
        if not (free >> v) & 1:
            continue
        nb = g.adj[v] & free & ~(1 << v)
        if nb:
            w = nb & -nb
            free &= ~((1 << v) | w)
            size += 1
    return size


def solve_sequential_exact(g: Graph, k: int | float, node_budget: int | None = None) -> Packing:
    """Maximum-coverage packing with star sizes 1..k, exactly.

    Branches on the lowest undecided vertex: first as a center (subsets of
    its undecided neighborhood, larger first), then as a satellite of each
    undecided neighbor, then left uncovered.  Bound: current coverage plus
    min(#non-isolated undecided, 2(k+1) * maximal matching of the undecided
    part).  Only strictly better solutions replace the incumbent, so the
    result is the deterministic first optimum.
    """
    if k == UNBOUNDED:
        return spanning_star_forest(g)
    k = int(k)
    if k < 1:
        raise ValueError("k must be positive")
    incumbent = _greedy_incumbent(g, k)
    best_cov = incumbent.coverage
    best_stars = list(incumbent.stars)
    nodes = 0
    chosen: list[tuple[int, tuple[int, ...]]] = []  # (center, satellites)

    def upper(avail: int) -> int:
        non_iso = sum(1 for v in bits(avail) if g.adj[v] & avail)
        cap = 2 * (k + 1) * _maximal_matching_size(g, avail)
        return min(non_iso, cap)

    def rec(avail: int, cov: int) -> None:
        nonlocal nodes, best_cov, best_stars
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise NodeBudgetError(f"exceeded {node_budget} nodes")
        if not avail:
            if cov > best_cov:
                best_cov = cov
                best_stars = [Star(c, ss) for c, ss in chosen]
            return
        if cov + upper(avail) <= best_cov:
            return
        low = avail & -avail
        v = low.bit_length() - 1
        nb = g.adj[v] & avail
        nb_ids = list(bits(nb))
        # v as center, larger satellite sets first
        for size in range(min(k, len(nb_ids)), 0, -1):
            for sats in combinations(nb_ids, size):
                smask = low
                for s in sats:
                    smask |= 1 << s
                chosen.append((v, sats))
                rec(avail & ~smask, cov + size + 1)
                chosen.pop()
        # v as satellite of a neighbor
        for u in nb_ids:
            others = [w for w in bits(g.adj[u] & avail) if w != v]
            for extra in range(min(k - 1, len(others)), -1, -1):
                for rest in combinations(others, extra):
                    smask = low | (1 << u)
                    for s in rest:
                        smask |= 1 << s
                    chosen.append((u, (v, *rest)))
                    rec(avail & ~smask, cov + extra + 2)
                    chosen.pop()
        # v left uncovered
        rec(avail ^ low, cov)

    rec(g.full_mask, 0)
    return Packing(best_stars)


@dataclass
class CriticalReport:
    """Closure of stars forced around the vertices an optimal packing misses."""

    uncovered: tuple[int, ...]
    per_vertex: dict[int, frozenset[int]] = field(default_factory=dict)  # v -> star indexes
    union_stars: frozenset[int] = frozenset()
    diagnostics: list[str] = field(default_factory=list)


def critical_closure(g: Graph, packing: Packing, k: int | float) -> CriticalReport:
    """For each uncovered vertex v, collect the k-star centers reachable by
    the neighbor-of-satellite chains starting at v.

    Neighbors of uncovered vertices, and of satellites of collected stars,
    are expected to be centers of k-stars; anything else is recorded as a
    diagnostic (it may point at a non-canonical optimum, not necessarily a
    bug), and the closure simply does not extend through it.
    """
    covered = packing.covered_mask()
    uncovered = tuple(v for v in range(1, g.n + 1) if not (covered >> v) & 1)
    center_idx = {s.center: i for i, s in enumerate(packing.stars)}
    is_k_star = [s.size == k for s in packing.stars]
    report = CriticalReport(uncovered=uncovered)
    union: set[int] = set()
    for v in uncovered:
        stars: set[int] = set()
        frontier = [v]
        satellites_seen: set[int] = set()
        while frontier:
            w = frontier.pop(0)
            for u in bits(g.adj[w]):
                idx = center_idx.get(u)
                if idx is not None and is_k_star[idx]:
                    if idx not in stars:
                        stars.add(idx)
                        for s in packing.stars[idx].satellites:
                            if s not in satellites_seen:
                                satellites_seen.add(s)
                                frontier.append(s)
                else:
                    report.diagnostics.append(
                        f"neighbor {u} of {'uncovered' if w == v and w not in satellites_seen else 'satellite'} {w} "
                        f"is not the center of a full-size star"
                    )
        report.per_vertex[v] = frozenset(stars)
        union |= stars
    report.union_stars = frozenset(union)
    return report
