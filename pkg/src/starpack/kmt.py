"""Local search for packings whose stars have 1..k satellites with size t
forbidden (k > t >= 2, or k unbounded).

Pipeline: start from the exact best packing with sizes 1..k (so coverage is
already maximum), then repeatedly rewrite small groups of stars at constant
coverage to drive the potential (#t-stars, then -#stars) down lexicographically,
and finally delete the highest-id satellite from each t-star that survived.

Revise moves, scanned in order with ascending star indexes, first improvement:

    ReviseT      one t-star whose satellites contain an edge (t >= 3 only)
    RevisePair   a t-star plus any second star, re-packed exactly
    ReviseTriple two t-stars plus a star of size 1, t-1 or t+1, re-packed
                 exactly into t-star-free form

Re-packing enumerates every exact cover of the involved vertices by stars of
size <= k (repack_subset), so a move is rejected only when no improving
rewrite exists at all.
"""

from __future__ import annotations

from itertools import combinations

from .errors import FootprintError, IterationLimitError
from .graph import Graph, bits, mask_of
from .model import (
    KMT,
    UNBOUNDED,
    Constraint,
    Packing,
    RunReport,
    SolveState,
    Star,
    TraceEvent,
    rebuild_state,
    validate,
)
from .seq import critical_closure, solve_sequential_exact

REVISE_T = "ReviseT"
REVISE_PAIR = "RevisePair"
REVISE_TRIPLE = "ReviseTriple"
TRIM = "Trim"

# Largest vertex set repack_subset will enumerate.  Three stars of sizes
# t, t and t+1 need 3t+4 vertices; a pair (t-star, k-star) needs t+k+2.
# With unbounded sizes the pair footprint has no formula bound, so a flat
# tractability cap applies and the scan simply skips anything larger.
_UNBOUNDED_CAP = 20


def repack_cap(k: int | float, t: int) -> int:
    if k is UNBOUNDED:
        return _UNBOUNDED_CAP
    return max(3 * t + 4, t + k + 2)


def repack_subset(g: Graph, vs, k: int | float, t: int):
    """Yield every packing of the induced vertex set `vs` (an id iterable or
    bitmask) that covers it exactly with stars of size <= k, in a fixed
    depth-first order: the lowest uncovered vertex is covered either as a
    center (satellite subsets by ascending size, then lexicographic) or as a
    satellite of an uncovered neighbor (neighbors ascending, extra satellites
    by ascending size).  Both orientations of a lone edge are distinct
    packings.  Yields tuples of stars."""
    mask = vs if isinstance(vs, int) else mask_of(vs)
    cap = repack_cap(k, t)
    if mask.bit_count() > cap:
        raise FootprintError(
            f"re-pack of {mask.bit_count()} vertices exceeds the cap of {cap}")
    max_size = mask.bit_count() if k is UNBOUNDED else k
    seen: set[frozenset] = set()
    stars: list[Star] = []

    def rec(uncov: int):
        if not uncov:
            key = frozenset(stars)
            if key not in seen:
                seen.add(key)
                yield tuple(stars)
            return
        p = (uncov & -uncov).bit_length() - 1
        nbrs = list(bits(g.adj[p] & uncov))
        for ssz in range(1, min(max_size, len(nbrs)) + 1):
            for sats in combinations(nbrs, ssz):
                stars.append(Star(p, sats))
                yield from rec(uncov & ~((1 << p) | mask_of(sats)))
                stars.pop()
        for u in nbrs:
            extra_pool = list(bits(g.adj[u] & uncov & ~(1 << p)))
            for esz in range(0, min(max_size - 1, len(extra_pool)) + 1):
                for extra in combinations(extra_pool, esz):
                    stars.append(Star(u, (p,) + extra))
                    yield from rec(uncov & ~((1 << p) | (1 << u) | mask_of(extra)))
                    stars.pop()

    yield from rec(mask)


def _pot(stars, t: int) -> tuple[int, int]:
    """(number of t-stars, number of stars) of a star collection."""
    return sum(1 for s in stars if s.size == t), len(stars)


def _improves(new: tuple[int, int], old: tuple[int, int]) -> bool:
    return new[0] < old[0] or (new[0] == old[0] and new[1] > old[1])


def _commit_revise(state: SolveState, kind: str, idxs: list[int],
                   new_stars) -> TraceEvent:
    before = state.coverage
    removed = [state.packing.stars[i] for i in sorted(idxs)]
    for i in sorted(idxs, reverse=True):
        state.remove_star(i)
    for s in new_stars:
        state.add_star(s)
    assert state.coverage == before, "revise moves never change coverage"
    return TraceEvent(kind, removed, list(new_stars), before, state.coverage)


def try_revise_t(state: SolveState, t: int, star_idx: int) -> TraceEvent | None:
    """Split one t-star with an edge between two satellites into a
    (t-2)-star plus that edge as a 1-star."""
    if t == 2:
        raise ValueError("no single-star revise exists when t = 2")
    star = state.packing.stars[star_idx]
    if star.size != t:
        raise ValueError("revise target must be a t-star")
    sats = star.satellites
    for ai in range(len(sats)):
        for bi in range(ai + 1, len(sats)):
            a, b = sats[ai], sats[bi]
            if (state.g.adj[a] >> b) & 1:
                rest = tuple(x for x in sats if x != a and x != b)
                return _commit_revise(state, REVISE_T, [star_idx],
                                      (Star(star.center, rest), Star(a, (b,))))
    return None


def try_revise_pair(state: SolveState, k: int | float, t: int,
                    t_idx: int, other_idx: int) -> TraceEvent | None:
    """Re-pack a t-star together with one other star; commit the first exact
    re-cover that improves (#t-stars down, or equal and #stars up)."""
    if t_idx == other_idx:
        raise ValueError("revise needs two distinct stars")
    a = state.packing.stars[t_idx]
    if a.size != t:
        raise ValueError("first star must be a t-star")
    b = state.packing.stars[other_idx]
    old = _pot((a, b), t)
    union = state.star_masks[t_idx] | state.star_masks[other_idx]
    for cand in repack_subset(state.g, union, k, t):
        if _improves(_pot(cand, t), old):
            return _commit_revise(state, REVISE_PAIR, [t_idx, other_idx], cand)
    return None


def try_revise_triple(state: SolveState, k: int | float, t: int,
                      t_idx1: int, t_idx2: int, other_idx: int) -> TraceEvent | None:
    """Re-pack two t-stars plus a star of size 1, t-1 or t+1; commit the
    first exact re-cover containing no t-star at all."""
    if len({t_idx1, t_idx2, other_idx}) != 3:
        raise ValueError("revise needs three distinct stars")
    s1 = state.packing.stars[t_idx1]
    s2 = state.packing.stars[t_idx2]
    other = state.packing.stars[other_idx]
    if s1.size != t or s2.size != t:
        raise ValueError("first two stars must be t-stars")
    if other.size not in (1, t - 1, t + 1):
        raise ValueError("third star must have size 1, t-1 or t+1")
    union = (state.star_masks[t_idx1] | state.star_masks[t_idx2]
             | state.star_masks[other_idx])
    for cand in repack_subset(state.g, union, k, t):
        if _pot(cand, t)[0] == 0:
            return _commit_revise(state, REVISE_TRIPLE,
                                  [t_idx1, t_idx2, other_idx], cand)
    return None


def _scan_revise(state: SolveState, k: int | float, t: int) -> TraceEvent | None:
    stars = state.packing.stars
    masks = state.star_masks
    if t >= 3:
        for i in range(len(stars)):
            if stars[i].size == t:
                ev = try_revise_t(state, t, i)
                if ev:
                    return ev
    cap = repack_cap(k, t)
    for i in range(len(stars)):
        if stars[i].size != t:
            continue
        for j in range(len(stars)):
            if j == i:
                continue
            if stars[j].size == t and j < i:
                continue  # same union already tried from the other side
            if (masks[i] | masks[j]).bit_count() > cap:
                continue  # only reachable with unbounded k
            ev = try_revise_pair(state, k, t, i, j)
            if ev:
                return ev
    for i in range(len(stars)):
        if stars[i].size != t:
            continue
        for j in range(i + 1, len(stars)):
            if stars[j].size != t:
                continue
            for l in range(len(stars)):
                if l == i or l == j or stars[l].size not in (1, t - 1, t + 1):
                    continue
                if (masks[i] | masks[j] | masks[l]).bit_count() > cap:
                    continue
                ev = try_revise_triple(state, k, t, i, j, l)
                if ev:
                    return ev
    return None


def _drop_highest(star: Star) -> Star:
    return Star(star.center, star.satellites[:-1])


def trim_all_t(packing: Packing, t: int) -> Packing:
    """The highest-id satellite dropped from every t-star, all else kept."""
    return Packing(_drop_highest(s) if s.size == t else s for s in packing)


def baseline_trim(g: Graph, k: int | float, t: int,
                  node_budget: int | None = None) -> Packing:
    """The plain strategy: exact 1..k packing, then one satellite off every
    t-star, with no rewriting in between."""
    Constraint(KMT, k, t)
    return trim_all_t(solve_sequential_exact(g, k, node_budget), t)


def run_local_search_kmt(
    g: Graph,
    k: int | float,
    t: int,
    max_iters: int | None = None,
    node_budget: int | None = None,
) -> tuple[Packing, RunReport]:
    constraint = Constraint(KMT, k, t)
    if max_iters is None:
        max_iters = g.n * g.n + g.n
    start = solve_sequential_exact(g, k, node_budget)
    crit = critical_closure(g, start, k)
    state = rebuild_state(g, start.copy())
    report = RunReport()
    while True:
        ev = _scan_revise(state, k, t)
        if ev is None:
            break
        report.iterations += 1
        report.trace.append(ev)
        if report.iterations > max_iters:
            raise IterationLimitError(
                f"exceeded {max_iters} accepted revises; the potential argument"
                " guarantees far fewer")
    pre_trim = state.packing.copy()
    for idx in range(len(state.packing.stars)):
        star = state.packing.stars[idx]
        if star.size == t:
            before = state.coverage
            state.replace_star(idx, _drop_highest(star))
            report.trace.append(TraceEvent(
                TRIM, [star], [state.packing.stars[idx]], before, state.coverage))
    assert not validate(g, state.packing, constraint)
    report.extras = {
        "exact_start": start,
        "critical": crit,
        "pre_trim": pre_trim,
        "revise_count": report.iterations,
    }
    return state.packing, report


def locally_optimal_violation_kmt(g: Graph, pre_trim: Packing,
                                  k: int | float, t: int) -> str | None:
    """Re-scan a finished pre-trim packing on a scratch state; returns the
    kind of a revise move that still applies, or None."""
    state = rebuild_state(g, pre_trim.copy())
    ev = _scan_revise(state, k, t)
    return ev.kind if ev else None
