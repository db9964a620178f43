"""Local search for packings whose stars all have at least k satellites,
maximizing the number of covered vertices.

The solver starts from the empty packing and repeatedly applies the first
applicable operation, scanning in a fixed priority order:

    Collect -> PullSat -> PullK -> PullK_Kp1 -> PullKK -> PullKKK

with star indexes and vertex ids ascending inside each family, restarting
from the top after every accepted operation.  All pull operations follow one
template: tentatively free some vertices, search for up to three maximal
Collect extractions around the freed seed (extraction_search), and commit
only if total coverage strictly increases.  After an accepted operation the
centers absorb every remaining neighbor (extend_centers); that re-extension
is part of the committed operation, so each trace event's coverage delta is
the full improvement.  A standalone ExtendCenters event only appears when
extend_centers is invoked directly with a trace sink.

PullKKK exists only in the k = 2 "extra" variant; the plain variant never
reaches it.
"""

from __future__ import annotations

from .errors import IterationLimitError
from .graph import Graph, bits
from .model import Packing, RunReport, SolveState, Star, TraceEvent, diff_stars, rebuild_state

COLLECT = "Collect"
EXTEND_CENTERS = "ExtendCenters"
PULL_SAT = "PullSat"
PULL_K = "PullK"
PULL_K_KP1 = "PullK_Kp1"
PULL_KK = "PullKK"
PULL_KKK = "PullKKK"

GENERAL = "general"
TWO_PLUS_EXTRA = "two_plus_extra"


def collect(state: SolveState, k: int, v: int) -> Star:
    """Create the maximal star centered at remainder vertex v (takes every
    remainder neighbor).  Caller guarantees remainderDegree(v) >= k."""
    sats = state.g.adj[v] & state.rem
    assert (state.rem >> v) & 1 and sats.bit_count() >= k
    star = Star(v, tuple(bits(sats)))
    state.add_star(star)
    return star


def extend_centers(state: SolveState, trace: list[TraceEvent] | None = None) -> int:
    """Absorb every remainder vertex adjacent to an internal center into that
    center's star (stars scanned in index order).  Returns absorbed count."""
    before = state.coverage
    stars_before = list(state.packing.stars) if trace is not None else None
    absorbed = 0
    for idx in range(len(state.packing.stars)):
        star = state.packing.stars[idx]
        grab = state.g.adj[star.center] & state.rem
        if grab:
            state.replace_star(idx, Star(star.center, star.satellites + tuple(bits(grab))))
            absorbed += grab.bit_count()
    if __debug__:
        all_centers_adj = 0
        for s in state.packing.stars:
            all_centers_adj |= state.g.adj[s.center]
        assert state.rem & all_centers_adj == 0
    if trace is not None and absorbed:
        removed, added = diff_stars(stars_before, state.packing.stars)
        trace.append(TraceEvent(EXTEND_CENTERS, removed, added, before, state.coverage))
    return absorbed


def extraction_search(state: SolveState, k: int, seed_mask: int) -> tuple[int, tuple[int, ...]]:
    """Best coverage gain achievable by at most three successive maximal
    Collects with centers drawn from seed u N(seed), followed by center
    extension.  Returns (gain relative to the current state, center order).
    Pure search: the state is not modified.

    Only seed-adjacent vertices can have climbed to remainder degree >= k
    (the scan tries Collect first, so everything else was already below k),
    which is why the candidate pool is sound.
    """
    g = state.g
    rem0 = state.rem
    base = rem0.bit_count()
    old_centers_adj = 0
    for s in state.packing.stars:
        old_centers_adj |= g.adj[s.center]
    pool = seed_mask
    for v in bits(seed_mask):
        pool |= g.adj[v]

    best_gain = base - (rem0 & ~old_centers_adj).bit_count()
    best_plan: tuple[int, ...] = ()

    def dfs(rem_now: int, new_centers_adj: int, plan: tuple[int, ...]) -> None:
        nonlocal best_gain, best_plan
        if len(plan) == 3:
            return
        for c in bits(pool & rem_now):
            sats = g.adj[c] & rem_now
            if sats.bit_count() >= k:
                rem_next = rem_now & ~((1 << c) | sats)
                cadj = new_centers_adj | g.adj[c]
                gain = base - (rem_next & ~(old_centers_adj | cadj)).bit_count()
                nxt = plan + (c,)
                if gain > best_gain:
                    best_gain = gain
                    best_plan = nxt
                dfs(rem_next, cadj, nxt)

    dfs(rem0, 0, ())
    return best_gain, best_plan


def _commit(state: SolveState, k: int, plan: tuple[int, ...], kind: str,
            stars_before: list[Star], before_cov: int, expect_cov: int) -> TraceEvent:
    for c in plan:
        collect(state, k, c)
    extend_centers(state)
    assert state.coverage == expect_cov, "committed plan must match its searched value"
    removed, added = diff_stars(stars_before, state.packing.stars)
    return TraceEvent(kind, removed, added, before_cov, state.coverage)


def _attempt(state: SolveState, k: int, kind: str, seed_mask: int,
             snap, stars_before: list[Star], before_cov: int) -> TraceEvent | None:
    """Shared tail of every pull: search around the seed, commit on strict
    coverage gain, restore otherwise."""
    gain, plan = extraction_search(state, k, seed_mask)
    final_cov = state.coverage + gain
    if final_cov > before_cov:
        return _commit(state, k, plan, kind, stars_before, before_cov, final_cov)
    state.restore(snap)
    return None


def try_pull_satellite(state: SolveState, k: int, star_idx: int, v: int) -> TraceEvent | None:
    star = state.packing.stars[star_idx]
    assert star.size >= k + 1 and v in star.satellites
    snap = state.snapshot()
    before = state.coverage
    state.replace_star(star_idx, Star(star.center, tuple(s for s in star.satellites if s != v)))
    return _attempt(state, k, PULL_SAT, 1 << v, snap, snap[0], before)


def try_pull_kstar(state: SolveState, k: int, star_idx: int) -> TraceEvent | None:
    star = state.packing.stars[star_idx]
    assert star.size == k
    snap = state.snapshot()
    before = state.coverage
    seed = star.vertices_mask()
    state.remove_star(star_idx)
    return _attempt(state, k, PULL_K, seed, snap, snap[0], before)


def try_pull_pair_k_big(state: SolveState, k: int, k_idx: int, big_idx: int, v: int) -> TraceEvent | None:
    kstar = state.packing.stars[k_idx]
    big = state.packing.stars[big_idx]
    assert kstar.size == k and big.size >= k + 1 and v in big.satellites
    snap = state.snapshot()
    before = state.coverage
    seed = kstar.vertices_mask() | (1 << v)
    state.replace_star(big_idx, Star(big.center, tuple(s for s in big.satellites if s != v)))
    state.remove_star(k_idx)
    return _attempt(state, k, PULL_K_KP1, seed, snap, snap[0], before)


def try_pull_pair_kk(state: SolveState, k: int, idx1: int, idx2: int) -> TraceEvent | None:
    s1, s2 = state.packing.stars[idx1], state.packing.stars[idx2]
    assert idx1 < idx2 and s1.size == k and s2.size == k
    snap = state.snapshot()
    before = state.coverage
    seed = s1.vertices_mask() | s2.vertices_mask()
    state.remove_star(idx2)
    state.remove_star(idx1)
    return _attempt(state, k, PULL_KK, seed, snap, snap[0], before)


def try_pull_triple_kkk(state: SolveState, k: int, idx1: int, idx2: int, idx3: int) -> TraceEvent | None:
    if k != 2:
        raise ValueError("the three-star pull is defined for k = 2 only")
    stars = state.packing.stars
    s1, s2, s3 = stars[idx1], stars[idx2], stars[idx3]
    assert idx1 < idx2 < idx3 and s1.size == s2.size == s3.size == 2
    snap = state.snapshot()
    before = state.coverage
    seed = s1.vertices_mask() | s2.vertices_mask() | s3.vertices_mask()
    state.remove_star(idx3)
    state.remove_star(idx2)
    state.remove_star(idx1)
    return _attempt(state, k, PULL_KKK, seed, snap, snap[0], before)


def _do_collect(state: SolveState, k: int, v: int) -> TraceEvent:
    before = state.coverage
    stars_before = list(state.packing.stars)
    collect(state, k, v)
    extend_centers(state)
    removed, added = diff_stars(stars_before, state.packing.stars)
    assert state.coverage > before
    return TraceEvent(COLLECT, removed, added, before, state.coverage)


def scan_once(state: SolveState, k: int, variant: str = GENERAL) -> TraceEvent | None:
    """Apply the first accepted operation in priority order; None if the
    packing is locally optimal (nothing accepts)."""
    for v in bits(state.rem):
        if (state.g.adj[v] & state.rem).bit_count() >= k:
            return _do_collect(state, k, v)
    stars = state.packing.stars
    for i in range(len(stars)):
        if stars[i].size >= k + 1:
            for v in stars[i].satellites:
                ev = try_pull_satellite(state, k, i, v)
                if ev:
                    return ev
    for i in range(len(stars)):
        if stars[i].size == k:
            ev = try_pull_kstar(state, k, i)
            if ev:
                return ev
    for i in range(len(stars)):
        if stars[i].size != k:
            continue
        for j in range(len(stars)):
            if stars[j].size >= k + 1:
                for v in stars[j].satellites:
                    ev = try_pull_pair_k_big(state, k, i, j, v)
                    if ev:
                        return ev
    for i in range(len(stars)):
        if stars[i].size != k:
            continue
        for j in range(i + 1, len(stars)):
            if stars[j].size == k:
                ev = try_pull_pair_kk(state, k, i, j)
                if ev:
                    return ev
    if variant == TWO_PLUS_EXTRA:
        for i in range(len(stars)):
            if stars[i].size != 2:
                continue
            for j in range(i + 1, len(stars)):
                if stars[j].size != 2:
                    continue
                for l in range(j + 1, len(stars)):
                    if stars[l].size == 2:
                        ev = try_pull_triple_kkk(state, k, i, j, l)
                        if ev:
                            return ev
    return None


def run_local_search_kplus(
    g: Graph,
    k: int,
    variant: str = GENERAL,
    max_iters: int | None = None,
    shadow_check: bool = False,
) -> tuple[Packing, RunReport]:
    if not isinstance(k, int) or k < 2:
        raise ValueError("k must be an integer >= 2")
    if variant not in (GENERAL, TWO_PLUS_EXTRA):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == TWO_PLUS_EXTRA and k != 2:
        raise ValueError("the extra variant is only defined for k = 2")
    if max_iters is None:
        max_iters = 10 * g.n
    state = SolveState(g, Packing())
    report = RunReport()
    while True:
        ev = scan_once(state, k, variant)
        if ev is None:
            break
        report.iterations += 1
        report.trace.append(ev)
        if report.iterations > max_iters:
            raise IterationLimitError(f"exceeded {max_iters} accepted iterations")
        if shadow_check:
            fresh = rebuild_state(g, Packing(state.packing.stars))
            assert fresh.rem == state.rem
            assert fresh.centers_mask == state.centers_mask
            assert fresh.star_masks == state.star_masks
    return state.packing, report


def locally_optimal_violation(g: Graph, packing: Packing, k: int, variant: str = GENERAL) -> str | None:
    """Re-run the applicability scan on a scratch copy of a finished packing;
    returns the kind of an operation that still accepts, or None."""
    state = rebuild_state(g, Packing(packing.stars))
    ev = scan_once(state, k, variant)
    return ev.kind if ev else None
