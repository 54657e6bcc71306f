"""Undirected simple graphs and the static metrics used by the newcomer tactics.

Distances are hop counts; a vertex that cannot be reached is at distance
``UNREACHABLE`` (``math.inf``), which compares greater than any finite value.
Score comparisons break ties by the smaller vertex id everywhere.
"""

from __future__ import annotations

import logging
import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels

log = logging.getLogger(__name__)

UNREACHABLE = math.inf

# relative slack when comparing floating scores (betweenness) for ties
SCORE_TOL = 1e-9


class GraphError(ValueError):
    """Raised on invalid graph input (unknown vertex, self-loop, ...)."""


class Graph:
    """Undirected simple graph over non-negative integer vertex ids.

    Mutation is meant for the single owner that builds a graph; once a graph
    is handed to other code treat it as read-only. Derived quantities
    (CSR arrays, center profile, betweenness) are cached and dropped on any
    mutation.
    """

    __slots__ = ("_adj", "_m", "_cache")

    def __init__(self, edges: Iterable[tuple[int, int]] = (), vertices: Iterable[int] = ()):
        self._adj: dict[int, set[int]] = {}
        self._m = 0
        self._cache: dict = {}
        for v in vertices:
            self.add_vertex(v)
        for a, b in edges:
            self.add_edge(a, b)

    # -- queries -------------------------------------------------------
    @property
    def vertices(self):
        return self._adj.keys()

    def neighbors(self, v: int) -> set[int]:
        """The neighbour set of ``v``; do not mutate it."""
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"vertex not found: {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def degrees(self) -> dict[int, int]:
        return {v: len(nb) for v, nb in self._adj.items()}

    def has_edge(self, a: int, b: int) -> bool:
        nb = self._adj.get(a)
        return nb is not None and b in nb

    def number_of_edges(self) -> int:
        return self._m

    def edges(self) -> Iterator[tuple[int, int]]:
        """Each edge once, as ``(smaller, larger)``."""
        for a, nb in self._adj.items():
            for b in nb:
                if a < b:
                    yield a, b

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __iter__(self):
        return iter(self._adj)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self._adj)}, |E|={self._m})"

    # -- mutation ------------------------------------------------------
    def add_vertex(self, v: int) -> None:
        if v not in self._adj:
            if v < 0:
                raise GraphError(f"vertex ids must be non-negative, got {v}")
            self._adj[v] = set()
            self._cache.clear()

    def add_edge(self, a: int, b: int) -> bool:
        """Insert edge ``ab``; returns False if it was already present."""
        if a == b:
            raise GraphError(f"self-loop on vertex {a}")
        self.add_vertex(a)
        self.add_vertex(b)
        if b in self._adj[a]:
            return False
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._m += 1
        self._cache.clear()
        return True

    def remove_edge(self, a: int, b: int) -> None:
        if not self.has_edge(a, b):
            raise GraphError(f"edge not found: {a}-{b}")
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        self._m -= 1
        self._cache.clear()

    def copy(self) -> Graph:
        h = Graph()
        h._adj = {v: set(nb) for v, nb in self._adj.items()}
        h._m = self._m
        return h

    def subgraph(self, keep: Iterable[int]) -> Graph:
        keep = set(keep)
        h = Graph()
        h._adj = {v: self._adj[v] & keep for v in self._adj if v in keep}
        h._m = sum(len(nb) for nb in h._adj.values()) // 2
        return h

    # -- compiled-kernel support ----------------------------------------
    def csr(self):
        """``(ids, index, indptr, indices)`` with ``ids`` sorted ascending."""
        cached = self._cache.get("csr")
        if cached is not None:
            return cached
        ids = np.array(sorted(self._adj), dtype=np.int64)
        index = {int(v): i for i, v in enumerate(ids)}
        indptr = np.zeros(len(ids) + 1, dtype=np.int64)
        flat: list[int] = []
        for i, v in enumerate(ids):
            nb = self._adj[int(v)]
            flat.extend(index[w] for w in nb)
            indptr[i + 1] = len(flat)
        indices = np.array(flat, dtype=np.int64)
        out = (ids, index, indptr, indices)
        self._cache["csr"] = out
        return out


@dataclass(frozen=True)
class Star:
    """``leaves ⊗ hub``: the hub joined to every leaf."""

    hub: int
    leaves: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "leaves", frozenset(self.leaves))
        if self.hub in self.leaves:
            raise GraphError("star hub cannot be one of its leaves")

    def as_graph(self) -> Graph:
        return Graph(((self.hub, v) for v in self.leaves), vertices=[self.hub])


@dataclass(frozen=True)
class CenterProfile:
    ecc: Mapping[int, float]
    radius: float
    diameter: float
    center: frozenset[int]


def best_vertex(candidates: Iterable[int], score: Mapping[int, float]):
    """Highest-scoring candidate, ties to the smallest id; None if no candidates."""
    cands = list(candidates)
    if not cands:
        return None
    top = max(score[v] for v in cands)
    slack = SCORE_TOL * max(1.0, abs(top))
    return min(v for v in cands if score[v] >= top - slack)


def bfs_distances(g: Graph, src: int) -> dict[int, float]:
    if src not in g:
        raise GraphError(f"vertex not found: {src}")
    dist: dict[int, float] = dict.fromkeys(g.vertices, UNREACHABLE)
    dist[src] = 0
    queue = deque([src])
    adj = g._adj
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for w in adj[v]:
            if dist[w] is UNREACHABLE:
                dist[w] = dv
                queue.append(w)
    return dist


def is_connected(g: Graph) -> bool:
    if len(g) == 0:
        return True
    src = next(iter(g.vertices))
    seen = {src}
    stack = [src]
    adj = g._adj
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g)


def connected_components(g: Graph) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    adj = g._adj
    for s in sorted(g.vertices):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            for w in adj[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def largest_component(g: Graph) -> Graph:
    """Subgraph on the largest component (ties: the one holding the smallest id)."""
    comps = connected_components(g)
    if len(comps) <= 1:
        return g
    return g.subgraph(max(comps, key=len))


def center_profile(g: Graph) -> CenterProfile:
    """Eccentricities, radius, diameter and center of ``g``.

    On a disconnected graph no component spans V, so every eccentricity is
    unreachable and the center is empty.
    """
    if len(g) == 0:
        raise GraphError("center of an empty graph is undefined")
    cached = g._cache.get("profile")
    if cached is not None:
        return cached
    ids, _, indptr, indices = g.csr()
    raw = _kernels.eccentricities(indptr, indices)
    if raw[0] < 0:
        ecc = dict.fromkeys(ids.tolist(), UNREACHABLE)
        prof = CenterProfile(ecc, UNREACHABLE, UNREACHABLE, frozenset())
    else:
        ecc = dict(zip(ids.tolist(), raw.tolist()))
        rad = int(raw.min())
        prof = CenterProfile(
            ecc,
            rad,
            int(raw.max()),
            frozenset(ids[raw == rad].tolist()),
        )
    g._cache["profile"] = prof
    return prof


def betweenness(g: Graph) -> dict[int, float]:
    """Unnormalized shortest-path betweenness (Brandes accumulation)."""
    cached = g._cache.get("betweenness")
    if cached is not None:
        return cached
    if len(g) == 0:
        return {}
    ids, _, indptr, indices = g.csr()
    bc = dict(zip(ids.tolist(), _kernels.brandes(indptr, indices).tolist()))
    g._cache["betweenness"] = bc
    return bc


def graph_oplus(g: Graph, h: Graph) -> Graph:
    """``g ⊕ h``: union of vertex and edge sets."""
    out = g.copy()
    for v in h.vertices:
        out.add_vertex(v)
    for a, b in h.edges():
        out.add_edge(a, b)
    return out


def attach_star(g: Graph, s: Star) -> Graph:
    """``g ⊕ (leaves ⊗ hub)``."""
    missing = [v for v in s.leaves if v not in g]
    if missing:
        raise GraphError(f"star leaves not in graph: {sorted(missing)}")
    out = g.copy()
    out.add_vertex(s.hub)
    for v in s.leaves:
        out.add_edge(s.hub, v)
    return out


def clustering_coefficient(g: Graph) -> float:
    """Average local clustering; vertices of degree < 2 count as 0."""
    if len(g) == 0:
        raise GraphError("clustering of an empty graph is undefined")
    adj = g._adj
    total = 0.0
    for v, nb in adj.items():
        k = len(nb)
        if k < 2:
            continue
        links = sum(len(adj[w] & nb) for w in nb) / 2
        total += links / (k * (k - 1) / 2)
    return total / len(adj)


def k_core_decomposition(g: Graph) -> dict[int, int]:
    """Core number of every vertex (bucket-based peeling)."""
    deg = g.degrees()
    if not deg:
        return {}
    maxdeg = max(deg.values())
    buckets: list[set[int]] = [set() for _ in range(maxdeg + 1)]
    for v, d in deg.items():
        buckets[d].add(v)
    core: dict[int, int] = {}
    k = 0
    adj = g._adj
    for _ in range(len(deg)):
        while not buckets[k]:
            k += 1
        v = buckets[k].pop()
        core[v] = k
        for w in adj[v]:
            if w in core:
                continue
            dw = deg[w]
            if dw > k:
                buckets[dw].discard(w)
                buckets[dw - 1].add(w)
                deg[w] = dw - 1
    return core


def closeness(g: Graph) -> dict[int, float]:
    """``(n-1) / sum of distances``; requires a connected graph."""
    n = len(g)
    if n == 1:
        return dict.fromkeys(g.vertices, 0.0)
    ids, _, indptr, indices = g.csr()
    total, reached = _kernels.distance_sums(indptr, indices)
    if reached.min() < n:
        raise GraphError("closeness needs a connected graph")
    return dict(zip(ids.tolist(), ((n - 1) / total).tolist()))


def _ratio_from_csr(indptr, indices) -> float:
    n = indptr.shape[0] - 1
    total, _ = _kernels.distance_sums(indptr, indices)
    clo = (n - 1) / total
    core = _kernels.core_numbers(indptr, indices)
    overall = clo.mean()
    best = max(clo[core >= k].mean() for k in np.unique(core))
    return float(best / overall)


def core_closeness_ratio(g: Graph) -> float:
    """Best mean closeness over the k-core vertex sets, relative to the overall mean."""
    if len(g) < 2 or not is_connected(g):
        raise GraphError("core_closeness_ratio needs a connected graph with >= 2 vertices")
    _, _, indptr, indices = g.csr()
    return _ratio_from_csr(indptr, indices)


def _edge_arrays(g: Graph):
    _, index, _, _ = g.csr()
    pairs = np.array([(index[a], index[b]) for a, b in sorted(g.edges())], dtype=np.int64).reshape(-1, 2)
    return pairs[:, 0].copy(), pairs[:, 1].copy()


def double_edge_swap(g: Graph, nswap: int, rng: random.Random, max_tries: int | None = None) -> Graph:
    """Degree-preserving rewiring: ``ab, cd -> ad, cb`` repeated ``nswap`` times."""
    if max_tries is None:
        max_tries = 100 * nswap
    ids = g.csr()[0]
    src, dst = _edge_arrays(g)
    if len(src) < 2 or nswap <= 0:
        return g.copy()
    a, b = _kernels.rewire(src, dst, len(ids), nswap, max_tries, rng.randrange(2**31))
    h = Graph(vertices=ids.tolist())
    for x, y in zip(ids[a].tolist(), ids[b].tolist()):
        h.add_edge(x, y)
    return h


def cp_coefficient(
    g: Graph,
    null_samples: int = 20,
    rng_seed: int = 0,
    swaps_per_edge: int = 10,
    max_redraws: int = 50,
) -> float:
    """Core/periphery coefficient against a degree-preserving null model.

    ``core_closeness_ratio(g)`` minus its mean over ``null_samples`` rewired
    copies; a rewired copy that falls apart is re-drawn up to ``max_redraws``
    times and otherwise skipped (logged).
    """
    if null_samples < 1:
        raise ValueError("null_samples must be >= 1")
    if len(g) < 2 or not is_connected(g):
        raise GraphError("cp_coefficient needs a connected graph")
    observed = core_closeness_ratio(g)
    rng = random.Random(rng_seed)
    n = len(g)
    src, dst = _edge_arrays(g)
    nswap = swaps_per_edge * len(src)
    ratios = []
    skipped = 0
    for _ in range(null_samples):
        for _ in range(max_redraws):
            a, b = _kernels.rewire(src, dst, n, nswap, 100 * nswap, rng.randrange(2**31))
            indptr, indices = _kernels.csr_from_edges(a, b, n)
            if _kernels.reached_from(indptr, indices, 0) == n:
                ratios.append(_ratio_from_csr(indptr, indices))
                break
        else:
            skipped += 1
    if skipped:
        log.warning("cp_coefficient: skipped %d disconnected null samples", skipped)
    if not ratios:
        raise GraphError("no connected degree-preserving null sample found")
    return observed - sum(ratios) / len(ratios)
