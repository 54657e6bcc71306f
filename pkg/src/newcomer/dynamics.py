"""The integration process: newcomer moves and network expansions applied together.

One timestamp turns ``G_i`` into ``G_{i+1} = G_i ⊕ (F_i ⊕ (S_i ⊗ u))`` where
``S_i`` is chosen by the tactic from ``G_i`` alone and ``F_i`` comes from a
trace source. The run stops at the first timestamp with ``u`` in the center.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator, Protocol, Sequence

from .graph_core import (
    UNREACHABLE,
    Graph,
    GraphError,
    bfs_distances,
    center_profile,
)
from .tactics import RsetMode, SelectionContext, Tactic, select


class ExpansionError(GraphError):
    """An expansion or newcomer move that violates the process rules."""


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Expansion:
    """The environment's move: new vertices and edges attached to the current graph.

    ``removed_edges`` is only used by generators that rewire existing edges
    (the onion model); replayed and scripted traces are purely additive.
    """

    new_vertices: frozenset[int] = frozenset()
    new_edges: frozenset[tuple[int, int]] = frozenset()
    removed_edges: frozenset[tuple[int, int]] = frozenset()

    @classmethod
    def from_edges(cls, g: Graph, edges: Iterable[tuple[int, int]], removed: Iterable[tuple[int, int]] = ()) -> Expansion:
        """Build an expansion of ``g``; endpoints outside ``g`` become new vertices."""
        es = frozenset(_edge(a, b) for a, b in edges)
        new = frozenset(v for e in es for v in e if v not in g)
        return cls(new, es, frozenset(_edge(a, b) for a, b in removed))

    @property
    def empty(self) -> bool:
        return not (self.new_vertices or self.new_edges or self.removed_edges)

    def as_graph(self) -> Graph:
        return Graph(self.new_edges, vertices=self.new_vertices)

    def validate(self, g: Graph, u: int | None = None) -> None:
        for a, b in itertools.chain(self.new_edges, self.removed_edges):
            if u is not None and u in (a, b):
                raise ExpansionError(f"expansion edge {a}-{b} touches the newcomer")
            if a == b:
                raise ExpansionError(f"self-loop on {a}")
        if u is not None and u in self.new_vertices:
            raise ExpansionError("expansion contains the newcomer")
        for v in self.new_vertices:
            if v in g:
                raise ExpansionError(f"new vertex {v} already in graph")
        for a, b in self.removed_edges:
            if not g.has_edge(a, b):
                raise ExpansionError(f"removed edge {a}-{b} not in graph")
        for a, b in self.new_edges:
            for v in (a, b):
                if v not in g and v not in self.new_vertices:
                    raise ExpansionError(f"edge endpoint {v} is neither existing nor declared new")
            if g.has_edge(a, b) and (a, b) not in self.removed_edges:
                raise ExpansionError(f"edge {a}-{b} already present")
        if self.new_vertices:
            # every component of the expansion must reach an existing vertex
            parent: dict[int, int] = {}

            def find(x):
                while parent.get(x, x) != x:
                    x = parent[x]
                return x

            for a, b in self.new_edges:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
            anchored = {find(v) for e in self.new_edges for v in e if v in g}
            for v in self.new_vertices:
                if find(v) not in anchored:
                    raise ExpansionError(f"new vertex {v} is not connected to the existing graph")


EMPTY = Expansion()


def _apply(g: Graph, f: Expansion, s: Iterable[int], u: int) -> None:
    for a, b in f.removed_edges:
        g.remove_edge(a, b)
    for v in f.new_vertices:
        g.add_vertex(v)
    for a, b in f.new_edges:
        g.add_edge(a, b)
    for v in s:
        g.add_edge(u, v)


def _check_move(g: Graph, s: Iterable[int], u: int) -> None:
    for v in s:
        if v == u:
            raise ExpansionError("newcomer cannot link to itself")
        if v not in g:
            raise ExpansionError(f"newcomer target {v} not in graph")
        if g.has_edge(u, v):
            raise ExpansionError(f"newcomer already adjacent to {v}")


def ip_step(g: Graph, f: Expansion, s: Iterable[int], u: int) -> Graph:
    """One timestamp: apply the expansion and the newcomer's links at once."""
    s = list(s)
    _check_move(g, s, u)
    f.validate(g, u)
    out = g.copy()
    _apply(out, f, s, u)
    return out


class TraceSource(Protocol):
    """Supplies the environment's expansion for each timestamp.

    ``pending`` is the newcomer's simultaneous move; ordinary sources ignore
    it, the adversary uses it. Returning None means the trace is exhausted.
    """

    def next_expansion(self, g: Graph, pending: frozenset[int], u: int) -> Expansion | None: ...


class ScriptedTrace:
    def __init__(self, expansions: Sequence[Expansion | Iterable[tuple[int, int]]]):
        self._items = list(expansions)
        self._pos = 0

    def next_expansion(self, g, pending, u):
        if self._pos >= len(self._items):
            return None
        item = self._items[self._pos]
        self._pos += 1
        if not isinstance(item, Expansion):
            item = Expansion.from_edges(g, item)
        return item


def fresh_ids(g: Graph, *reserved: int) -> Iterator[int]:
    """Ids above every vertex of ``g`` and every reserved id."""
    top = max(itertools.chain(g.vertices, reserved), default=-1)
    return itertools.count(top + 1)


def adversary_expansion(g: Graph, u: int, ell: int, ids: Iterator[int] | None = None) -> Expansion:
    """A path of ``ell`` new vertices hung on the vertex furthest from ``u``."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    others = [v for v in g.vertices if v != u]
    if not others:
        raise GraphError("adversary needs a nonempty graph")
    if ids is None:
        ids = fresh_ids(g, u)
    if u in g and g.neighbors(u):
        dist = bfs_distances(g, u)
        top = max(dist[v] for v in others)
        anchor = min(v for v in others if dist[v] == top)
    else:
        base = g.subgraph(others)
        ecc = center_profile(base).ecc
        top = max(ecc.values())
        anchor = min(v for v in others if ecc[v] == top)
    path = [anchor] + [next(ids) for _ in range(ell)]
    return Expansion(frozenset(path[1:]), frozenset(_edge(a, b) for a, b in zip(path, path[1:])))


class AdversaryTrace:
    """Hangs a fresh path on whatever vertex will be furthest from ``u``."""

    def __init__(self, ell: int):
        self.ell = ell

    def next_expansion(self, g, pending, u):
        h = g.copy()
        for v in pending:
            h.add_edge(u, v)
        return adversary_expansion(h, u, self.ell, fresh_ids(g, u))


@dataclass
class IPRun:
    initial: Graph
    newcomer: int
    tactic: Tactic
    trace: TraceSource
    k: int = 1
    max_steps: int = 500
    rset_mode: RsetMode = RsetMode.EXAMPLE
    stop_at_entry: bool = True
    keep_snapshots: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.newcomer in self.initial:
            raise ValueError(f"newcomer {self.newcomer} already in the initial graph")


@dataclass(frozen=True)
class StepMeta:
    step: int
    vertices: int
    edges: int
    radius: float
    diameter: float
    newcomer_ecc: float | None
    in_center: bool


@dataclass
class IPResult:
    cost: int | None  # None: did not enter within the horizon
    entered_at: int | None
    edges_built: list[int]
    timestamps: int
    horizon: int
    steps: list[StepMeta] = field(default_factory=list)
    snapshots: list[Graph] | None = None

    @property
    def entered(self) -> bool:
        return self.entered_at is not None

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or x == UNREACHABLE else x

        return {
            "cost": self.cost,
            "entered_at": self.entered_at,
            "edges_built": self.edges_built,
            "timestamps": self.timestamps,
            "horizon": self.horizon,
            "steps": [
                {k: (num(v) if isinstance(v, float) else v) for k, v in asdict(m).items()}
                for m in self.steps
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def summary_row(self, tactic: Tactic | str, seed: int) -> str:
        cost = "DNF" if self.cost is None else str(self.cost)
        entered = "" if self.entered_at is None else str(self.entered_at)
        return f"{tactic},{seed},{cost},{entered}"


def _meta(step: int, g: Graph, u: int) -> StepMeta:
    prof = center_profile(g) if len(g) else None
    ecc_u = prof.ecc[u] if prof is not None and u in g else None
    return StepMeta(
        step,
        len(g),
        g.number_of_edges(),
        prof.radius if prof else UNREACHABLE,
        prof.diameter if prof else UNREACHABLE,
        ecc_u,
        prof is not None and u in prof.center,
    )


def run_ip(run: IPRun) -> IPResult:
    """Simulate one integration process until ``u`` enters the center or the horizon."""
    g = run.initial.copy()
    u = run.newcomer
    steps = [_meta(0, g, u)]
    snaps = [g.copy()] if run.keep_snapshots else None
    built: list[int] = []
    acted: list[int] = []  # timestamps where the newcomer linked
    entered_at = None
    i = 0
    while True:
        central = steps[-1].in_center
        if central and entered_at is None:
            entered_at = i
            if run.stop_at_entry:
                break
        if i >= run.max_steps:
            break
        s = frozenset() if central else select(run.tactic, SelectionContext(g, u, run.rset_mode))
        if len(s) > run.k:
            raise ExpansionError(f"tactic chose {len(s)} vertices, more than k={run.k}")
        f = run.trace.next_expansion(g, s, u)
        if f is None:
            if not s:
                break
            f = EMPTY
        _check_move(g, s, u)
        f.validate(g, u)
        _apply(g, f, sorted(s), u)
        if s:
            acted.append(i)
            built.extend(sorted(s))
        i += 1
        steps.append(_meta(i, g, u))
        if snaps is not None:
            snaps.append(g.copy())
    cost = None if entered_at is None else sum(1 for t in acted if t < entered_at)
    return IPResult(cost, entered_at, built, i, run.max_steps, steps, snaps)


@dataclass(frozen=True)
class BoundedCenterReport:
    union_center_size: int
    max_center_dist_to_ref: float
    ref: int
    union_sizes: tuple[int, ...]  # union size after each prefix


def bounded_center_report(snapshots: Sequence[Graph], ref: int) -> BoundedCenterReport:
    union: set[int] = set()
    sizes = []
    worst: float = 0
    for g in snapshots:
        if ref not in g:
            raise GraphError(f"reference vertex {ref} missing from a snapshot")
        center = center_profile(g).center
        union |= center
        sizes.append(len(union))
        if center:
            dist = bfs_distances(g, ref)
            worst = max(worst, max(dist[v] for v in center))
    return BoundedCenterReport(len(union), worst, ref, tuple(sizes))


@dataclass(frozen=True)
class ProfileRow:
    size: int
    gdiam: float
    cdiam: float
    dist_ref: float


def temporal_profile(snapshots: Sequence[Graph], ref: int) -> list[ProfileRow]:
    """Size, diameter, center diameter and center-to-reference distance per snapshot."""
    rows = []
    for g in snapshots:
        prof = center_profile(g)
        center = sorted(prof.center)
        cdiam: float = 0
        for c in center:
            dist = bfs_distances(g, c)
            cdiam = max(cdiam, max(dist[w] for w in center))
        dist_ref: float = UNREACHABLE
        if ref in g:
            dref = bfs_distances(g, ref)
            dist_ref = max((dref[v] for v in center), default=UNREACHABLE)
        rows.append(ProfileRow(len(g), prof.diameter, cdiam, dist_ref))
    return rows
