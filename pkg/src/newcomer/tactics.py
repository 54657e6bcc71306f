"""Newcomer tactics: which vertices ``u`` links to next.

Every selector looks only at the current graph. Before its first edge the
newcomer is absent from the graph; selectors treat that the same as an
isolated newcomer (every vertex is "uncovered").
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .graph_core import (
    Graph,
    GraphError,
    Star,
    attach_star,
    best_vertex,
    betweenness,
    bfs_distances,
    center_profile,
)


class RsetMode(enum.Enum):
    EXAMPLE = "example"  # {v : dist(x, v) < rad}, reproduces the worked example
    STRICT = "strict"  # {v : dist(x, v) > rad}, the formula as printed


_SINGLE = ("smax", "sbtw", "rmax", "rbtw", "muf", "center-adjacent")


@dataclass(frozen=True)
class Tactic:
    """A tactic name, plus ``k`` for the flooding tactic.

    Text form: ``smax|sbtw|rmax|rbtw|muf|flood:<k>|center-adjacent``.
    """

    name: str
    k: int = 1

    def __post_init__(self):
        if self.name == "flood":
            if self.k < 1:
                raise ValueError("flood tactic needs k >= 1")
        elif self.name not in _SINGLE:
            raise ValueError(f"unknown tactic {self.name!r}")

    @classmethod
    def parse(cls, text: str) -> Tactic:
        text = text.strip().lower()
        if text.startswith("flood:"):
            return cls("flood", int(text.split(":", 1)[1]))
        return cls(text)

    @property
    def single_edge(self) -> bool:
        return self.name != "flood"

    def __str__(self) -> str:
        return f"flood:{self.k}" if self.name == "flood" else self.name


SMAX, SBTW, RMAX, RBTW, MUF = (Tactic(n) for n in ("smax", "sbtw", "rmax", "rbtw", "muf"))
CENTER_ADJACENT = Tactic("center-adjacent")
GREEDY = (SMAX, SBTW, RMAX, RBTW, MUF)


@dataclass(frozen=True)
class SelectionContext:
    graph: Graph
    newcomer: int
    rset_mode: RsetMode = RsetMode.EXAMPLE

    @property
    def isolated(self) -> bool:
        g, u = self.graph, self.newcomer
        return u not in g or not g.neighbors(u)

    def linked(self) -> set[int]:
        """``u`` together with its current neighbours."""
        u = self.newcomer
        if u not in self.graph:
            return {u}
        return self.graph.neighbors(u) | {u}

    def others(self) -> list[int]:
        return [v for v in self.graph.vertices if v != self.newcomer]


@dataclass(frozen=True)
class BrokerSet:
    members: frozenset[int]

    def __len__(self):
        return len(self.members)


def _furthest(dist: dict[int, float], u: int) -> int:
    top = max(d for v, d in dist.items() if v != u)
    return min(v for v, d in dist.items() if d == top and v != u)


def uncovered_set(ctx: SelectionContext) -> set[int]:
    """Vertices farther from ``u`` than the current radius."""
    if ctx.isolated:
        return set(ctx.others())
    g, u = ctx.graph, ctx.newcomer
    rad = center_profile(g).radius
    dist = bfs_distances(g, u)
    return {v for v, d in dist.items() if d > rad and v != u}


def remote_center_set(ctx: SelectionContext) -> set[int]:
    """Vertices near (EXAMPLE) or far from (STRICT) the vertex furthest from ``u``."""
    if ctx.isolated:
        return set(ctx.others())
    g, u = ctx.graph, ctx.newcomer
    rad = center_profile(g).radius
    x = _furthest(bfs_distances(g, u), u)
    dx = bfs_distances(g, x)
    if ctx.rset_mode is RsetMode.STRICT:
        pool = {v for v, d in dx.items() if d > rad}
    else:
        pool = {v for v, d in dx.items() if d < rad}
    return pool - ctx.linked()


def _in_center(ctx: SelectionContext) -> bool:
    g, u = ctx.graph, ctx.newcomer
    return u in g and u in center_profile(g).center


def _scores(kind: str, g: Graph):
    return betweenness(g) if kind.endswith("btw") else g.degrees()


def select_target(tactic: Tactic, ctx: SelectionContext) -> int | None:
    """SMax / SBtw / RMax / RBtw: one vertex, or None once ``u`` is central."""
    name = tactic.name
    if name not in ("smax", "sbtw", "rmax", "rbtw"):
        raise ValueError(f"select_target does not handle {tactic}")
    if name.startswith("s"):
        pool = uncovered_set(ctx)
    else:
        pool = remote_center_set(ctx)
        if not pool and not _in_center(ctx):
            pool = uncovered_set(ctx)
    pool -= ctx.linked()
    return best_vertex(pool, _scores(name, ctx.graph))


def select_muf(ctx: SelectionContext) -> int | None:
    """Most useful friend: a well-placed neighbour of a least-degree center vertex."""
    g, u = ctx.graph, ctx.newcomer
    if len(g) == 0:
        return None
    prof = center_profile(g)
    if u in prof.center or not prof.center:
        return None
    deg = g.degrees()
    c = min(prof.center, key=lambda v: (deg[v], v))
    linked = ctx.linked() | {u}
    around = g.neighbors(c) - linked
    if not ctx.isolated:
        x = _furthest(bfs_distances(g, u), u)
        dx = bfs_distances(g, x)
        friends = {v for v in around if dx[v] == prof.radius - 1}
        if friends:
            return best_vertex(friends, deg)
    # isolated u, or no useful friend left: any unlinked neighbour of c, else c itself
    if around:
        return best_vertex(around, deg)
    return None if c in linked else c


def select_flood(k: int, ctx: SelectionContext) -> set[int]:
    """The ``k`` smallest-id vertices not yet linked to ``u``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    linked = ctx.linked()
    return set(sorted(v for v in ctx.graph.vertices if v not in linked)[:k])


def select_center_adjacent(ctx: SelectionContext) -> int | None:
    """Smallest-id unlinked vertex within distance 1 of the center."""
    g = ctx.graph
    if len(g) == 0:
        return None
    center = center_profile(g).center
    near = set(center)
    for w in center:
        near |= g.neighbors(w)
    near -= ctx.linked()
    return min(near) if near else None


def select(tactic: Tactic, ctx: SelectionContext) -> frozenset[int]:
    """Dispatch to the selector for ``tactic``; always returns a vertex set.

    Every tactic is idle once ``u`` is in the center.
    """
    if _in_center(ctx):
        return frozenset()
    if tactic.name == "flood":
        return frozenset(select_flood(tactic.k, ctx))
    if tactic.name == "muf":
        v = select_muf(ctx)
    elif tactic.name == "center-adjacent":
        v = select_center_adjacent(ctx)
    else:
        v = select_target(tactic, ctx)
    return frozenset() if v is None else frozenset([v])


def is_broker_set(g: Graph, b: BrokerSet | frozenset[int], u: int) -> bool:
    """True iff linking ``u`` to every member puts ``u`` in the center."""
    members = b.members if isinstance(b, BrokerSet) else frozenset(b)
    if u in g:
        raise GraphError(f"newcomer {u} already in graph")
    composed = attach_star(g, Star(u, members))
    return u in center_profile(composed).center


def min_broker_set_bruteforce(g: Graph, u: int, size_cap: int | None = None, max_subsets: int = 5_000_000) -> BrokerSet:
    """Smallest broker set by exhaustive search (size, then lexicographic order)."""
    verts = sorted(g.vertices)
    cap = len(verts) if size_cap is None else min(size_cap, len(verts))
    if sum(comb(len(verts), s) for s in range(cap + 1)) > max_subsets:
        raise ValueError(f"too many subsets to enumerate up to size {cap}")
    for size in range(cap + 1):
        for combo in combinations(verts, size):
            if is_broker_set(g, frozenset(combo), u):
                return BrokerSet(frozenset(combo))
    raise ValueError("no broker set within cap")
