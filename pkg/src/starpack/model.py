"""Packing model: stars, packings, constraints, solver state, traces.

A star is one center plus a non-empty satellite set; a packing is a list of
vertex-disjoint stars.  Three constraint modes exist:

* ``kplus``  -- every star has at least k satellites (k >= 2)
* ``seq``    -- every star has between 1 and k satellites
* ``kmt``    -- sizes 1..k except exactly t (k > t >= 2, or k unbounded)

Unbounded k is represented by ``math.inf`` in code and the string ``"inf"``
in JSON and on the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import InvalidPackingError
from .graph import Graph, bits, mask_of

UNBOUNDED = math.inf

KPLUS = "kplus"
SEQ = "seq"
KMT = "kmt"


def parse_k(text: str) -> int | float:
    if text == "inf":
        return UNBOUNDED
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"k must be an integer or 'inf', got {text!r}") from None


def k_to_json(k: int | float) -> Any:
    return "inf" if k == UNBOUNDED else int(k)


@dataclass(frozen=True)
class Star:
    center: int
    satellites: tuple[int, ...]

    def __post_init__(self):
        sats = tuple(sorted(self.satellites))
        if not sats:
            raise InvalidPackingError(f"star at {self.center} has no satellites")
        if len(set(sats)) != len(sats) or self.center in sats:
            raise InvalidPackingError(f"star at {self.center} has repeated vertices")
        object.__setattr__(self, "satellites", sats)

    @property
    def size(self) -> int:
        """Number of satellites (the star's ell)."""
        return len(self.satellites)

    def vertices_mask(self) -> int:
        return (1 << self.center) | mask_of(self.satellites)

    def to_json(self) -> dict:
        return {"center": self.center, "satellites": list(self.satellites)}

    @staticmethod
    def from_json(obj: dict) -> "Star":
        return Star(obj["center"], tuple(obj["satellites"]))


@dataclass
class Constraint:
    mode: str
    k: int | float
    t: int | None = None

    def __post_init__(self):
        if self.mode not in (KPLUS, SEQ, KMT):
            raise ValueError(f"unknown mode {self.mode!r}")
        k, t = self.k, self.t
        if k != UNBOUNDED and (not isinstance(k, int) or k < 1):
            raise ValueError("k must be a positive integer or unbounded")
        if self.mode == KPLUS:
            if k == UNBOUNDED or k < 2:
                raise ValueError("coverage mode needs a finite k >= 2")
            if t is not None:
                raise ValueError("t is not used in kplus mode")
        elif self.mode == SEQ:
            if t is not None:
                raise ValueError("t is not used in seq mode")
        else:
            if t is None or t < 2:
                raise ValueError("kmt mode needs t >= 2")
            if k != UNBOUNDED and k <= t:
                raise ValueError("kmt mode needs k > t")

    def allows(self, size: int) -> bool:
        if self.mode == KPLUS:
            return size >= self.k
        if self.mode == SEQ:
            return 1 <= size <= self.k
        return 1 <= size <= self.k and size != self.t


class Packing:
    """A mutable list of stars plus derived coverage helpers."""

    __slots__ = ("stars",)

    def __init__(self, stars: Iterable[Star] = ()):
        self.stars: list[Star] = list(stars)

    def covered_mask(self) -> int:
        mask = 0
        for s in self.stars:
            mask |= s.vertices_mask()
        return mask

    @property
    def coverage(self) -> int:
        return sum(s.size + 1 for s in self.stars)

    def copy(self) -> "Packing":
        return Packing(self.stars)

    def __len__(self) -> int:
        return len(self.stars)

    def __iter__(self):
        return iter(self.stars)

    def to_json(self, constraint: Constraint) -> dict:
        return {
            "mode": constraint.mode,
            "k": k_to_json(constraint.k),
            "t": constraint.t,
            "stars": [s.to_json() for s in self.stars],
            "covered": self.coverage,
        }

    @staticmethod
    def from_json(obj: dict) -> tuple["Packing", Constraint]:
        c = Constraint(obj["mode"], parse_k(str(obj["k"])), obj.get("t"))
        p = Packing(Star.from_json(s) for s in obj["stars"])
        if obj.get("covered") != p.coverage:
            raise InvalidPackingError(
                f"covered field says {obj.get('covered')}, stars cover {p.coverage}"
            )
        return p, c


def validate(g: Graph, packing: Packing, constraint: Constraint | None = None) -> list[str]:
    """Structural check; returns human-readable violations (empty == valid).

    Adjacency and disjointness are always checked; star sizes only when a
    constraint is given.
    """
    issues = []
    used = 0
    for idx, star in enumerate(packing.stars):
        if not (1 <= star.center <= g.n):
            issues.append(f"star {idx}: center {star.center} out of range")
            continue
        for v in star.satellites:
            if not (1 <= v <= g.n):
                issues.append(f"star {idx}: satellite {v} out of range")
            elif not g.has_edge(star.center, v):
                issues.append(f"star {idx}: satellite {v} not adjacent to center {star.center}")
        smask = star.vertices_mask()
        overlap = used & smask
        if overlap:
            shared = ",".join(str(v) for v in bits(overlap))
            issues.append(f"star {idx}: vertices {{{shared}}} already used by an earlier star")
        used |= smask
        if constraint is not None and not constraint.allows(star.size):
            issues.append(f"star {idx}: size {star.size} not allowed in {constraint.mode} mode")
    return issues


def potential_kmt(packing: Packing, t: int) -> tuple[int, int]:
    """(number of t-stars, number of stars) -- compared lexicographically,
    fewer t-stars first, then more stars."""
    num_t = sum(1 for s in packing.stars if s.size == t)
    return num_t, len(packing.stars)


class SolveState:
    """Incremental view of a packing used by the local-search solvers.

    Tracks the remainder (uncovered vertices) as a bitmask, per-star vertex
    masks, and the set of centers.  ``rebuild_state`` derives everything from
    scratch; the solver mutators keep the fields coherent and a test compares
    the two after every accepted operation.
    """

    __slots__ = ("g", "packing", "star_masks", "rem", "centers_mask")

    def __init__(self, g: Graph, packing: Packing):
        self.g = g
        self.packing = packing
        self.star_masks = [s.vertices_mask() for s in packing.stars]
        covered = 0
        centers = 0
        for s, m in zip(packing.stars, self.star_masks):
            covered |= m
            centers |= 1 << s.center
        self.rem = g.full_mask & ~covered
        self.centers_mask = centers

    @property
    def coverage(self) -> int:
        return self.g.n - self.rem.bit_count()

    def remainder_degree(self, v: int) -> int:
        return (self.g.adj[v] & self.rem).bit_count()

    def center_of(self, v: int) -> int | None:
        for idx, s in enumerate(self.packing.stars):
            if s.center == v:
                return idx
        return None

    # -- mutators ---------------------------------------------------

    def add_star(self, star: Star) -> int:
        m = star.vertices_mask()
        assert self.rem & m == m, "new star must lie in the remainder"
        self.packing.stars.append(star)
        self.star_masks.append(m)
        self.rem &= ~m
        self.centers_mask |= 1 << star.center
        return len(self.packing.stars) - 1

    def remove_star(self, idx: int) -> Star:
        star = self.packing.stars.pop(idx)
        m = self.star_masks.pop(idx)
        self.rem |= m
        self.centers_mask &= ~(1 << star.center)
        return star

    def replace_star(self, idx: int, star: Star) -> None:
        old = self.packing.stars[idx]
        old_mask = self.star_masks[idx]
        new_mask = star.vertices_mask()
        assert star.center == old.center, "replace keeps the center"
        freed = old_mask & ~new_mask
        taken = new_mask & ~old_mask
        assert self.rem & taken == taken
        self.packing.stars[idx] = star
        self.star_masks[idx] = new_mask
        self.rem = (self.rem | freed) & ~taken

    def snapshot(self):
        return (list(self.packing.stars), list(self.star_masks), self.rem, self.centers_mask)

    def restore(self, snap) -> None:
        stars, masks, rem, centers = snap
        self.packing.stars[:] = stars
        self.star_masks[:] = masks
        self.rem = rem
        self.centers_mask = centers


def rebuild_state(g: Graph, packing: Packing) -> SolveState:
    issues = validate(g, packing)
    if issues:
        raise InvalidPackingError("; ".join(issues))
    return SolveState(g, packing)


@dataclass
class TraceEvent:
    kind: str
    removed: list[Star]
    added: list[Star]
    before: int
    after: int

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "removed": [s.to_json() for s in self.removed],
            "added": [s.to_json() for s in self.added],
            "before": self.before,
            "after": self.after,
        }


@dataclass
class RunReport:
    """What a local-search run did: accepted iterations plus the full trace."""

    iterations: int = 0
    trace: list[TraceEvent] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def kinds(self) -> list[str]:
        return [ev.kind for ev in self.trace]


def diff_stars(before: list[Star], after: list[Star]) -> tuple[list[Star], list[Star]]:
    """Stars removed and added between two packing snapshots."""
    bset = set(before)
    aset = set(after)
    removed = [s for s in before if s not in aset]
    added = [s for s in after if s not in bset]
    return removed, added
