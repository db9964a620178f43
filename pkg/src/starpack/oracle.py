"""Exact maximum-coverage oracle over vertex subsets, plus ratio helpers.

The oracle runs a subset DP: f(S) = best coverage achievable inside S.  The
pivot is the lowest vertex of S; it is either skipped, the center of a star
whose satellites are drawn from its neighborhood in S, or a satellite of one
of its neighbors.  The table is filled by a compiled kernel iterating masks
in ascending order (every referenced submask clears at least the pivot bit,
so it is already final).

A deliberately separate, unmemoized pure-Python recursion is kept as a
cross-check; the two must agree everywhere (the test suite compares them on
the full small-graph catalogue).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .errors import NormalizationError, OracleSizeError
from .graph import Graph, bits
from .model import KMT, KPLUS, SEQ, UNBOUNDED, Constraint, Packing, Star

_MODE_NUM = {KPLUS: 0, SEQ: 1, KMT: 2}

# 16-bit popcount lookup shared with the kernel (masks here stay below 2^19)
_PC16 = np.array([x.bit_count() for x in range(1 << 16)], dtype=np.uint8)


@njit(cache=True)
def _dp_table(n, adj, mode, k, t, pc):
    size = 1 << n
    f = np.empty(size, dtype=np.int8)
    f[0] = 0
    for S in range(1, size):
        low = S & (-S)
        lm1 = low - 1
        p = pc[lm1 & 0xFFFF] + pc[lm1 >> 16]  # index of the lowest bit
        best = f[S & (S - 1)]                 # option: leave the pivot uncovered
        M = adj[p] & S
        # option: pivot is a center; satellites = any non-empty subset of M
        T = M
        while T:
            ell = pc[T & 0xFFFF] + pc[T >> 16]
            if (mode == 0 and ell >= k) or (mode != 0 and ell <= k and (mode == 1 or ell != t)):
                cand = f[S & ~(T | low)] + ell + 1
                if cand > best:
                    best = cand
            T = (T - 1) & M
        # option: pivot is a satellite of neighbor u
        nbrs = M
        while nbrs:
            ulow = nbrs & (-nbrs)
            um1 = ulow - 1
            u = pc[um1 & 0xFFFF] + pc[um1 >> 16]
            M2 = adj[u] & S & ~low
            T2 = M2
            while True:
                ell = pc[T2 & 0xFFFF] + pc[T2 >> 16] + 1
                if (mode == 0 and ell >= k) or (mode != 0 and ell <= k and (mode == 1 or ell != t)):
                    cand = f[S & ~(T2 | ulow | low)] + ell + 1
                    if cand > best:
                        best = cand
                if T2 == 0:
                    break
                T2 = (T2 - 1) & M2
            nbrs ^= ulow
        f[S] = best
    return f


def _mode_params(g: Graph, c: Constraint) -> tuple[int, int, int]:
    mode = _MODE_NUM[c.mode]
    k = g.n if c.k == UNBOUNDED else int(c.k)
    t = c.t if c.t is not None else 0
    return mode, k, t


def _legal(ell: int, mode: int, k: int, t: int) -> bool:
    if mode == 0:
        return ell >= k
    return ell <= k and (mode == 1 or ell != t)


@dataclass
class OracleResult:
    opt: int
    witness: Packing
    nodes: int


def oracle_max_packing(g: Graph, constraint: Constraint, max_n: int = 14) -> OracleResult:
    """Exact optimum coverage and one achieving packing."""
    if g.n > max_n:
        raise OracleSizeError(f"n={g.n} exceeds oracle limit {max_n}")
    mode, k, t = _mode_params(g, constraint)
    adj = np.array([g.adj[v] >> 1 for v in range(1, g.n + 1)], dtype=np.int64)
    f = _dp_table(g.n, adj, mode, k, t, _PC16)
    witness = _reconstruct(g, f, mode, k, t)
    opt = int(f[(1 << g.n) - 1])
    assert witness.coverage == opt
    return OracleResult(opt, witness, 1 << g.n)


def _reconstruct(g: Graph, f, mode: int, k: int, t: int) -> Packing:
    adj0 = [g.adj[v] >> 1 for v in range(1, g.n + 1)]
    S = (1 << g.n) - 1
    stars = []
    while S:
        low = S & -S
        p = low.bit_length() - 1
        if f[S] == f[S ^ low]:
            S ^= low
            continue
        target = int(f[S])
        M = adj0[p] & S
        star, rest = None, 0
        T = M
        while T:
            ell = T.bit_count()
            nxt = S & ~(T | low)
            if _legal(ell, mode, k, t) and int(f[nxt]) + ell + 1 == target:
                star = Star(p + 1, tuple(b + 1 for b in bits(T)))
                rest = nxt
                break
            T = (T - 1) & M
        if star is None:
            nbrs = M
            while nbrs and star is None:
                ulow = nbrs & -nbrs
                u = ulow.bit_length() - 1
                M2 = adj0[u] & S & ~low
                T2 = M2
                while True:
                    ell = T2.bit_count() + 1
                    nxt = S & ~(T2 | ulow | low)
                    if _legal(ell, mode, k, t) and int(f[nxt]) + ell + 1 == target:
                        star = Star(u + 1, (p + 1, *(b + 1 for b in bits(T2))))
                        rest = nxt
                        break
                    if T2 == 0:
                        break
                    T2 = (T2 - 1) & M2
                nbrs ^= ulow
        if star is None:  # pragma: no cover - would mean the table is inconsistent
            raise AssertionError("no achieving choice during table walk")
        stars.append(star)
        S = rest
    return Packing(stars)


def oracle_max_coverage_unmemoized(g: Graph, constraint: Constraint, max_n: int = 14) -> int:
    """Plain recursive enumeration, no memo table.  Slow; cross-check only."""
    if g.n > max_n:
        raise OracleSizeError(f"n={g.n} exceeds oracle limit {max_n}")
    mode, k, t = _mode_params(g, constraint)
    adj0 = [g.adj[v] >> 1 for v in range(1, g.n + 1)]

    def rec(S: int) -> int:
        if S == 0:
            return 0
        low = S & -S
        p = low.bit_length() - 1
        best = rec(S ^ low)
        M = adj0[p] & S
        T = M
        while T:
            ell = T.bit_count()
            if _legal(ell, mode, k, t):
                cand = rec(S & ~(T | low)) + ell + 1
                if cand > best:
                    best = cand
            T = (T - 1) & M
        nbrs = M
        while nbrs:
            ulow = nbrs & -nbrs
            u = ulow.bit_length() - 1
            M2 = adj0[u] & S & ~low
            T2 = M2
            while True:
                ell = T2.bit_count() + 1
                if _legal(ell, mode, k, t):
                    cand = rec(S & ~(T2 | ulow | low)) + ell + 1
                    if cand > best:
                        best = cand
                if T2 == 0:
                    break
                T2 = (T2 - 1) & M2
            nbrs ^= ulow
        return best

    return rec((1 << g.n) - 1)


def ratio_of(opt: int, apx: int) -> Fraction:
    """opt/apx as an exact fraction.

    apx = 0 with opt > 0 signals that a solver returned an empty packing on
    a coverable instance and is an error.  0/0 (edgeless instances) is
    reported as 1 -- there was nothing to cover.
    """
    if apx == 0:
        if opt > 0:
            raise ValueError(f"approximate coverage 0 against optimum {opt}")
        return Fraction(1)
    return Fraction(opt, apx)


def normalize_against(g: Graph, packing: Packing, reference: Packing, k: int | float) -> Packing:
    """Rebuild `packing` (a maximum packing under the all-sizes-up-to-k
    objective) so that its uncovered set is contained in `reference`'s,
    swapping satellites along chains of full-size-star centers.

    Coverage never changes; each outer round strictly shrinks the set of
    vertices `packing` misses but `reference` covers.  A missing chain step
    (possible only when `packing` is not maximum) raises NormalizationError.
    """
    cur = packing.copy()
    ref_of: dict[int, int] = {}
    for i, s in enumerate(reference.stars):
        ref_of[s.center] = i
        for w in s.satellites:
            ref_of[w] = i
    while True:
        cov = cur.covered_mask()
        missing = [v for v in range(1, g.n + 1) if not (cov >> v) & 1 and v in ref_of]
        if not missing:
            return cur
        v = missing[0]
        center_idx = {s.center: i for i, s in enumerate(cur.stars)}
        visited: set[int] = set()
        used_ref = {ref_of[v]}
        w = v
        while True:
            step = None
            for c in bits(g.adj[w]):
                idx = center_idx.get(c)
                if idx is not None and idx not in visited and cur.stars[idx].size == k:
                    step = idx
                    break
            if step is None:
                raise NormalizationError(f"no chain step from vertex {w}")
            visited.add(step)
            star = cur.stars[step]
            admissible = [s for s in star.satellites
                          if ref_of.get(s) is None or ref_of[s] not in used_ref]
            if not admissible:
                raise NormalizationError(f"no admissible satellite in star at {star.center}")
            x = admissible[0]
            cur.stars[step] = Star(star.center, tuple(set(star.satellites) - {x} | {w}))
            if x not in ref_of:
                break
            used_ref.add(ref_of[x])
            w = x
