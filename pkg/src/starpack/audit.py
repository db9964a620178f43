"""Certification harness: structural invariant checks, reference corpora and
the sweep engines behind the acceptance suite.

Checks are pure functions returning a list of violation notes (empty = ok);
sweeps run a solver battery over a corpus and aggregate every failed check
into a Tally, keeping the first few notes per category verbatim plus full
counts, so a red run always names concrete instances.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain

from .generate import SplitMix64, enumerate_connected_small, gnp, pull_gadget, revise_gadget
from .graph import Graph, bits
from .kmt import (
    REVISE_PAIR,
    REVISE_T,
    REVISE_TRIPLE,
    TRIM,
    _pot,
    locally_optimal_violation_kmt,
    run_local_search_kmt,
    trim_all_t,
)
from .kplus import (
    COLLECT,
    GENERAL,
    PULL_K,
    PULL_K_KP1,
    PULL_KK,
    PULL_KKK,
    PULL_SAT,
    TWO_PLUS_EXTRA,
    locally_optimal_violation,
    run_local_search_kplus,
)
from .model import KMT, KPLUS, SEQ, UNBOUNDED, Constraint, Packing, RunReport, validate
from .oracle import oracle_max_coverage_unmemoized, oracle_max_packing
from .seq import solve_sequential_exact

# Proven worst-case ratios, kept as exact fractions: the plain coverage
# search guarantees (k+1)^2/(2k+1); the k=2 variant with the triple pull
# guarantees 3/2; the size-t-avoiding search guarantees
# (kt+2k+1)/(kt+k+1) for finite k and (t+3)/(t+2) without a size cap.
RATIO_KPLUS = {2: Fraction(9, 5), 3: Fraction(16, 7), 4: Fraction(25, 9)}
RATIO_KPLUS_EXTRA = Fraction(3, 2)


def ratio_kplus(k: int, variant: str) -> Fraction:
    if variant == TWO_PLUS_EXTRA:
        return RATIO_KPLUS_EXTRA
    return Fraction((k + 1) * (k + 1), 2 * k + 1)


def ratio_kmt(k: int | float, t: int) -> Fraction:
    if k is UNBOUNDED:
        return Fraction(t + 3, t + 2)
    return Fraction(k * t + 2 * k + 1, k * t + k + 1)


KPLUS_CONFIGS = ((2, GENERAL), (3, GENERAL), (4, GENERAL), (2, TWO_PLUS_EXTRA))
KMT_CONFIGS = ((3, 2), (4, 2), (4, 3), (5, 3), (UNBOUNDED, 2), (UNBOUNDED, 3))

_KINDS_GENERAL = frozenset({COLLECT, PULL_SAT, PULL_K, PULL_K_KP1, PULL_KK})
_KINDS_EXTRA = _KINDS_GENERAL | {PULL_KKK}
_KINDS_REVISE = frozenset({REVISE_T, REVISE_PAIR, REVISE_TRIPLE})


@dataclass
class Tally:
    """Aggregated sweep outcome: instance counts, capped violation samples
    and per-configuration worst ratios."""

    instances: int = 0
    runs: int = 0
    counts: dict = field(default_factory=dict)     # category -> violation count
    samples: dict = field(default_factory=dict)    # category -> first notes
    max_ratio: dict = field(default_factory=dict)  # config -> worst opt/apx seen
    wall_seconds: float = 0.0
    keep: int = 20

    def note(self, category: str, message: str) -> None:
        self.counts[category] = self.counts.get(category, 0) + 1
        bucket = self.samples.setdefault(category, [])
        if len(bucket) < self.keep:
            bucket.append(message)

    def extend(self, category: str, prefix: str, messages) -> None:
        for m in messages:
            self.note(category, f"{prefix}: {m}")

    def ratio_seen(self, config, opt: int, apx: int) -> None:
        r = Fraction(opt, apx) if apx else Fraction(1)
        if r > self.max_ratio.get(config, Fraction(0)):
            self.max_ratio[config] = r

    def violations(self, *categories: str) -> int:
        if categories:
            return sum(self.counts.get(c, 0) for c in categories)
        return sum(self.counts.values())

    def summary(self) -> str:
        bad = {c: n for c, n in sorted(self.counts.items())}
        return (f"{self.instances} instances, {self.runs} runs, "
                f"{self.violations()} violations {bad if bad else ''} "
                f"in {self.wall_seconds:.1f}s")


def ratio_violated(opt: int, apx: int, bound: Fraction) -> bool:
    """opt <= bound*apx, tested in integers (no floating point)."""
    return opt * bound.denominator > bound.numerator * apx


# ---------------------------------------------------------------- checks --

def check_kplus_exit(g: Graph, packing: Packing, k: int) -> list[str]:
    """Remainder-graph facts that must hold once no operation applies:
    remainder degrees below k, remainder never touching a center, satellite
    remainder degrees below k, and no big-star satellite one hop from a
    remainder vertex that is itself one neighbor short of a star."""
    errs = []
    covered = packing.covered_mask()
    rem = g.full_mask & ~covered
    centers = 0
    for s in packing.stars:
        centers |= 1 << s.center
    for v in bits(rem):
        rdeg = (g.adj[v] & rem).bit_count()
        if rdeg > k - 1:
            errs.append(f"remainder vertex {v} has remainder degree {rdeg}")
        if g.adj[v] & centers:
            errs.append(f"remainder vertex {v} is adjacent to a center")
    for s in packing.stars:
        big = s.size >= k + 1
        for sat in s.satellites:
            rnbrs = g.adj[sat] & rem
            if rnbrs.bit_count() > k - 1:
                errs.append(f"satellite {sat} has {rnbrs.bit_count()} remainder neighbors")
            if big:
                for u in bits(rnbrs):
                    if (g.adj[u] & rem).bit_count() == k - 1:
                        errs.append(
                            f"satellite {sat} of a big star sees remainder "
                            f"vertex {u} of remainder degree {k - 1}")
    return errs


def check_kplus_trace(report: RunReport, g: Graph, variant: str) -> list[str]:
    """Progress facts: strict coverage growth per accepted event, chained
    coverage bookkeeping, legal event kinds, at most n accepted events."""
    errs = []
    allowed = _KINDS_EXTRA if variant == TWO_PLUS_EXTRA else _KINDS_GENERAL
    prev_after = 0
    for i, ev in enumerate(report.trace):
        if ev.kind not in allowed:
            errs.append(f"event {i} has kind {ev.kind} illegal for {variant}")
        if ev.after <= ev.before:
            errs.append(f"event {i} ({ev.kind}) did not increase coverage")
        if ev.before != prev_after:
            errs.append(f"event {i} coverage bookkeeping broken")
        prev_after = ev.after
    if report.iterations != len(report.trace):
        errs.append("iteration count disagrees with trace length")
    if report.iterations > g.n:
        errs.append(f"{report.iterations} accepted iterations on {g.n} vertices")
    return errs


def check_kmt_anchor(g: Graph, report: RunReport) -> list[str]:
    """The vertices left uncovered by the exact start, and every star in the
    closure around them, must survive the whole revise loop untouched."""
    errs = []
    start: Packing = report.extras["exact_start"]
    pre: Packing = report.extras["pre_trim"]
    crit = report.extras["critical"]
    if start.covered_mask() != pre.covered_mask():
        errs.append("covered set changed during the revise loop")
    pre_set = set(pre.stars)
    for idx in sorted(crit.union_stars):
        if start.stars[idx] not in pre_set:
            errs.append(f"closure star {start.stars[idx]} was rewritten")
    return errs


def check_kmt_exit(g: Graph, pre: Packing, k: int | float, t: int) -> list[str]:
    """Adjacency facts for every t-star still standing when no revise move
    applies: its satellites only border centers of (t-1)-stars, centers of
    k-stars (size-capped runs), or ends of 1-stars when t = 2; its center
    only borders other centers, 1-star ends, or satellites of (t+1)-stars."""
    errs = []
    center_size: dict[int, int] = {}
    sat_star_size: dict[int, int] = {}
    for s in pre.stars:
        center_size[s.center] = s.size
        for sat in s.satellites:
            sat_star_size[sat] = s.size

    def ok_for_satellite(u: int) -> bool:
        if center_size.get(u) == t - 1:
            return True
        if t == 2 and sat_star_size.get(u) == 1:
            return True
        return k is not UNBOUNDED and center_size.get(u) == k

    def ok_for_center(u: int) -> bool:
        if u in center_size:
            return True
        if sat_star_size.get(u) == 1:
            return True
        return sat_star_size.get(u) == t + 1

    for s in pre.stars:
        if s.size != t:
            continue
        own = s.vertices_mask()
        for sat in s.satellites:
            for u in bits(g.adj[sat] & ~own):
                if not ok_for_satellite(u):
                    errs.append(
                        f"satellite {sat} of t-star at {s.center} borders {u} "
                        f"({_role(u, center_size, sat_star_size)})")
        for u in bits(g.adj[s.center] & ~own):
            if not ok_for_center(u):
                errs.append(
                    f"center {s.center} of a t-star borders {u} "
                    f"({_role(u, center_size, sat_star_size)})")
    return errs


def _role(u: int, center_size: dict, sat_star_size: dict) -> str:
    if u in center_size:
        return f"center of a {center_size[u]}-star"
    if u in sat_star_size:
        return f"satellite of a {sat_star_size[u]}-star"
    return "uncovered"


def check_kmt_trace(report: RunReport, g: Graph, t: int) -> list[str]:
    """Per-event facts for the revise loop and the final trim: constant
    coverage over identical vertex sets with strict potential improvement,
    one-coverage trims, and the potential-argument iteration budget."""
    errs = []
    start: Packing = report.extras["exact_start"]
    revises = 0
    for i, ev in enumerate(report.trace):
        if ev.kind in _KINDS_REVISE:
            revises += 1
            if ev.after != ev.before:
                errs.append(f"event {i} ({ev.kind}) changed coverage")
            rm = sum((s.vertices_mask() for s in ev.removed), 0)
            ad = sum((s.vertices_mask() for s in ev.added), 0)
            if rm != ad:
                errs.append(f"event {i} ({ev.kind}) moved to a different vertex set")
            old, new = _pot(ev.removed, t), _pot(ev.added, t)
            if not (new[0] < old[0] or (new[0] == old[0] and new[1] > old[1])):
                errs.append(f"event {i} ({ev.kind}) did not improve the potential")
            if ev.kind == REVISE_TRIPLE and new[0] != 0:
                errs.append(f"event {i} triple revise left a t-star")
        elif ev.kind == TRIM:
            if ev.after != ev.before - 1:
                errs.append(f"event {i} trim freed {ev.before - ev.after} vertices")
        else:
            errs.append(f"event {i} has unexpected kind {ev.kind}")
    if revises != report.extras["revise_count"]:
        errs.append("revise count disagrees with trace")
    t0 = sum(1 for s in start.stars if s.size == t)
    if 2 * revises > t0 * (g.n + 2) + g.n:
        errs.append(f"{revises} revises exceed the potential budget (start {t0} t-stars)")
    return errs


# --------------------------------------------------------------- corpora --

GNP_PS = (0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50)


def exhaustive_corpus(max_n: int = 7):
    """Every labeled connected graph with 1..max_n vertices, streamed."""
    for n in range(1, max_n + 1):
        for i, g in enumerate(enumerate_connected_small(n)):
            yield f"conn{n}-{i}", g


def gnp_corpus(count: int = 2000, base_seed: int = 20250819):
    for i in range(count):
        n = 8 + (i % 5)
        p = GNP_PS[i % 7]
        seed = base_seed + i
        yield f"gnp{n}-p{int(p * 100)}-s{seed}", gnp(n, p, seed)


def seq_corpus(count: int = 1000, base_seed: int = 777000):
    ps = (0.1, 0.2, 0.3, 0.4, 0.5)
    for i in range(count):
        n = 4 + (i % 11)
        p = ps[i % 5]
        seed = base_seed + i
        yield f"seq{n}-p{int(p * 100)}-s{seed}", gnp(n, p, seed)


def _progress(label: str, done: int, every: int) -> None:
    if every and done % every == 0:
        print(f"  [{label}] {done} instances", file=sys.stderr, flush=True)


# ---------------------------------------------------------------- sweeps --

def sweep_kplus(max_n: int = 7, gnp_count: int = 2000, progress_every: int = 0) -> Tally:
    """Coverage-search battery: for every corpus graph and every (k, variant)
    configuration, certify the proven ratio against the exact optimum and
    every exit/progress invariant."""
    tally = Tally()
    t0 = time.perf_counter()
    for iid, g in chain(exhaustive_corpus(max_n), gnp_corpus(gnp_count)):
        tally.instances += 1
        opts = {k: oracle_max_packing(g, Constraint(KPLUS, k)).opt for k in (2, 3, 4)}
        for k, variant in KPLUS_CONFIGS:
            tag = f"{iid}/k{k}{'x' if variant == TWO_PLUS_EXTRA else ''}"
            packing, report = run_local_search_kplus(g, k, variant)
            tally.runs += 1
            apx, opt = packing.coverage, opts[k]
            bound = ratio_kplus(k, variant)
            if ratio_violated(opt, apx, bound):
                tally.note(f"ratio/{variant}", f"{tag}: opt {opt} > {bound} * apx {apx}")
            tally.ratio_seen((k, variant), opt, apx)
            tally.extend("validate", tag, validate(g, packing, Constraint(KPLUS, k)))
            tally.extend("exit", tag, check_kplus_exit(g, packing, k))
            tally.extend("progress", tag, check_kplus_trace(report, g, variant))
            still = locally_optimal_violation(g, packing, k, variant)
            if still:
                tally.note("local_opt", f"{tag}: {still} still applies at exit")
        _progress("kplus", tally.instances, progress_every)
    tally.wall_seconds = time.perf_counter() - t0
    return tally


def sweep_kmt(max_n: int = 7, gnp_count: int = 2000, progress_every: int = 0) -> Tally:
    """Size-t-avoiding battery: ratio, dominance over the plain trim, the
    anchored-closure fact, exit adjacency facts, per-event trace facts and
    a no-move-still-applies re-scan, for each (k, t) configuration over the
    shared corpus."""
    tally = Tally()
    t0 = time.perf_counter()
    for iid, g in chain(exhaustive_corpus(max_n), gnp_corpus(gnp_count)):
        tally.instances += 1
        for k, t in KMT_CONFIGS:
            tag = f"{iid}/k{'u' if k is UNBOUNDED else k}t{t}"
            opt = oracle_max_packing(g, Constraint(KMT, k, t)).opt
            packing, report = run_local_search_kmt(g, k, t)
            tally.runs += 1
            apx = packing.coverage
            bound = ratio_kmt(k, t)
            if ratio_violated(opt, apx, bound):
                tally.note("ratio", f"{tag}: opt {opt} > {bound} * apx {apx}")
            tally.ratio_seen((k, t), opt, apx)
            baseline = trim_all_t(report.extras["exact_start"], t)
            if apx < baseline.coverage:
                tally.note("dominance",
                           f"{tag}: coverage {apx} below plain trim {baseline.coverage}")
            tally.extend("validate", tag, validate(g, packing, Constraint(KMT, k, t)))
            tally.extend("anchor", tag, check_kmt_anchor(g, report))
            tally.extend("exit", tag, check_kmt_exit(g, report.extras["pre_trim"], k, t))
            tally.extend("trace", tag, check_kmt_trace(report, g, t))
            still = locally_optimal_violation_kmt(g, report.extras["pre_trim"], k, t)
            if still:
                tally.note("local_opt", f"{tag}: {still} still applies at exit")
        _progress("kmt", tally.instances, progress_every)
    tally.wall_seconds = time.perf_counter() - t0
    return tally


def sweep_seq(count: int = 1000, progress_every: int = 0) -> Tally:
    """Exact-subroutine battery: equality with the reference optimum for
    size caps 2..4 and the isolated-vertex formula without a cap."""
    tally = Tally()
    t0 = time.perf_counter()
    for iid, g in seq_corpus(count):
        tally.instances += 1
        for k in (2, 3, 4):
            packing = solve_sequential_exact(g, k)
            tally.runs += 1
            opt = oracle_max_packing(g, Constraint(SEQ, k)).opt
            if packing.coverage != opt:
                tally.note("exact", f"{iid}/k{k}: got {packing.coverage}, optimum {opt}")
            tally.extend("validate", f"{iid}/k{k}",
                         validate(g, packing, Constraint(SEQ, k)))
        packing = solve_sequential_exact(g, UNBOUNDED)
        tally.runs += 1
        want = g.n - g.isolated_count()
        if packing.coverage != want:
            tally.note("exact", f"{iid}/unbounded: got {packing.coverage}, want {want}")
        tally.extend("validate", f"{iid}/unbounded",
                     validate(g, packing, Constraint(SEQ, UNBOUNDED)))
        _progress("seq", tally.instances, progress_every)
    tally.wall_seconds = time.perf_counter() - t0
    return tally


PULL_GADGETS = (
    ("k_kp1", 2, GENERAL, PULL_K_KP1),
    ("kk", 2, GENERAL, PULL_KK),
    ("k_kp1", 4, GENERAL, PULL_K_KP1),
    ("kk", 4, GENERAL, PULL_KK),
    ("kkk", 2, TWO_PLUS_EXTRA, PULL_KKK),
)

REVISE_GADGETS = (
    ("single", 4, 3, REVISE_T),
    ("single", 5, 4, REVISE_T),
    ("pair", 3, 2, REVISE_PAIR),
    ("pair", 4, 3, REVISE_PAIR),
    ("triple", 3, 2, REVISE_TRIPLE),
    ("triple", 4, 3, REVISE_TRIPLE),
)


def sweep_gadgets() -> Tally:
    """Run every activation gadget and certify that the operation it was
    built to trigger fires, and that the final coverage is exactly optimal."""
    tally = Tally()
    t0 = time.perf_counter()
    for which, k, variant, kind in PULL_GADGETS:
        g = pull_gadget(k, which)
        tally.instances += 1
        tag = f"{which}/k{k}"
        packing, report = run_local_search_kplus(g, k, variant, shadow_check=True)
        tally.runs += 1
        if kind not in report.kinds():
            tally.note("fires", f"{tag}: {kind} never fired ({report.kinds()})")
        opt = oracle_max_packing(g, Constraint(KPLUS, k), max_n=18).opt
        if packing.coverage != opt:
            tally.note("optimal", f"{tag}: coverage {packing.coverage} != optimum {opt}")
    for which, k, t, kind in REVISE_GADGETS:
        g = revise_gadget(k, t, which)
        tally.instances += 1
        tag = f"{which}/k{k}t{t}"
        packing, report = run_local_search_kmt(g, k, t)
        tally.runs += 1
        if kind not in report.kinds():
            tally.note("fires", f"{tag}: {kind} never fired ({report.kinds()})")
        opt = oracle_max_packing(g, Constraint(KMT, k, t)).opt
        if packing.coverage != opt:
            tally.note("optimal", f"{tag}: coverage {packing.coverage} != optimum {opt}")
    tally.wall_seconds = time.perf_counter() - t0
    return tally


ORACLE_MODES = (Constraint(KPLUS, 2), Constraint(SEQ, 3), Constraint(KMT, 3, 2))


def sweep_oracle_selfcheck(max_n: int = 6, sample_count: int = 200,
                           mono_count: int = 500, progress_every: int = 0) -> Tally:
    """Two independent routes to the optimum must agree (table-driven vs
    plain recursion), and adding an edge must never lower any optimum."""
    tally = Tally()
    t0 = time.perf_counter()

    def compare(iid: str, g: Graph) -> None:
        for c in ORACLE_MODES:
            fast = oracle_max_packing(g, c).opt
            slow = oracle_max_coverage_unmemoized(g, c)
            tally.runs += 2
            if fast != slow:
                tally.note("twin", f"{iid}/{c.mode}: table {fast} != recursion {slow}")

    for iid, g in exhaustive_corpus(max_n):
        tally.instances += 1
        compare(iid, g)
        _progress("oracle", tally.instances, progress_every)
    for i in range(sample_count):
        n = 7 + (i % 3)
        p = 0.25 if i % 2 == 0 else 0.40
        g = gnp(n, p, 909000 + i)
        tally.instances += 1
        compare(f"samp{n}-{i}", g)
        _progress("oracle", tally.instances, progress_every)
    for i in range(mono_count):
        n = 6 + (i % 7)
        g = gnp(n, 0.3, 555000 + i)
        non_edges = [(u, v) for u in range(1, g.n + 1) for v in range(u + 1, g.n + 1)
                     if not (g.adj[u] >> v) & 1]
        if not non_edges:
            continue
        u, v = non_edges[SplitMix64(555000 + i).next_below(len(non_edges))]
        g2 = Graph(g.n, list(g.edges) + [(u, v)])
        tally.instances += 1
        for c in ORACLE_MODES:
            before = oracle_max_packing(g, c).opt
            after = oracle_max_packing(g2, c).opt
            tally.runs += 2
            if after < before:
                tally.note("monotone",
                           f"mono{n}-{i}/{c.mode}: adding ({u},{v}) dropped {before}->{after}")
        _progress("oracle", tally.instances, progress_every)
    tally.wall_seconds = time.perf_counter() - t0
    return tally
