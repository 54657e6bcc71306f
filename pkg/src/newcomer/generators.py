"""Dynamic network models: each step produces an :class:`Expansion` of the current graph.

Models: preferential attachment (``ba``), Jackson-Rogers friend-of-friend
meetings (``jr``), rich-club (``richclub``) and a dynamized onion model
(``onion``). Every model ignores the newcomer: it is never an endpoint of a
generated edge and its links do not count toward anybody's degree.
"""

from __future__ import annotations

import bisect
import math
import random
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .dynamics import Expansion, _edge, fresh_ids
from .graph_core import Graph, GraphError

MODELS = ("ba", "jr", "richclub", "onion")


class OnionStallError(RuntimeError):
    """Stud pairing could not be completed."""


@dataclass(frozen=True)
class ModelParams:
    model: str
    d: int = 6
    N: int = 500
    growth: int = 1
    jr_p: float = 0.5
    seed: int = 0
    n0: int = 10

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.d < 2:
            raise ValueError("average degree d must be >= 2")
        if self.n0 < 3 or self.N <= self.n0:
            raise ValueError("need n0 >= 3 and N > n0")
        if self.growth < 1:
            raise ValueError("growth rate must be >= 1")
        if not 0 < self.jr_p <= 1:
            raise ValueError("jr_p must lie in (0, 1]")

    @property
    def m(self) -> int:
        """Jackson-Rogers sample size, ``d / 4p`` rounded."""
        return max(1, round(self.d / (4 * self.jr_p)))

    @property
    def alpha(self) -> float:
        """Rich-club probability that an event adds a vertex."""
        return 2 * (self.N + 1) / (self.N * self.d + 2)

    @cached_property
    def degree_distribution(self) -> DegreeDistribution:
        return power_law(self.d, 2, math.ceil(math.sqrt(self.N * self.d)))


@dataclass(frozen=True)
class DegreeDistribution:
    """``q(k) ∝ k^-gamma`` on ``k_min..k_max``."""

    k_min: int
    k_max: int
    gamma: float

    @cached_property
    def support(self) -> list[int]:
        return list(range(self.k_min, self.k_max + 1))

    @cached_property
    def weights(self) -> list[float]:
        raw = [k ** -self.gamma for k in self.support]
        total = sum(raw)
        return [w / total for w in raw]

    @cached_property
    def _cum(self) -> list[float]:
        out, acc = [], 0.0
        for w in self.weights:
            acc += w
            out.append(acc)
        return out

    @property
    def mean(self) -> float:
        return sum(k * w for k, w in zip(self.support, self.weights))

    def sample(self, rng: random.Random) -> int:
        return rng.choices(self.support, cum_weights=self._cum)[0]


def _power_mean(gamma: float, k_min: int, k_max: int) -> float:
    ws = [k ** -gamma for k in range(k_min, k_max + 1)]
    return sum(k * w for k, w in zip(range(k_min, k_max + 1), ws)) / sum(ws)


def calibrate_gamma(d: float, k_min: int, k_max: int, lo: float = 1.01, hi: float = 6.0,
                    tol: float = 1e-6, max_iter: int = 100) -> float:
    """Exponent whose truncated power law on ``k_min..k_max`` has mean ``d``."""
    if k_min < 1 or k_max < k_min:
        raise ValueError("need 1 <= k_min <= k_max")
    if k_min == k_max:
        if d != k_min:
            raise ValueError(f"point mass at {k_min} cannot have mean {d}")
        return lo
    top, bottom = _power_mean(lo, k_min, k_max), _power_mean(hi, k_min, k_max)
    if not bottom <= d <= top:
        raise ValueError(f"mean {d} not achievable for gamma in [{lo}, {hi}] (range {bottom:.4g}..{top:.4g})")
    # the mean decreases in gamma
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        mean = _power_mean(mid, k_min, k_max)
        if abs(mean - d) < tol:
            return mid
        if mean > d:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def power_law(d: float, k_min: int, k_max: int, lo: float = 1.01, hi: float = 6.0,
              slack: float = 0.5) -> DegreeDistribution:
    """Calibrated power law; a mean just outside the reachable range uses the nearest end of ``[lo, hi]``.

    ``d = k_min`` (e.g. the onion model at ``d = 2``) is only reachable as a point
    mass, so it gets the steepest exponent instead, as long as the mean lands
    within ``slack`` of ``d``.
    """
    try:
        return DegreeDistribution(k_min, k_max, calibrate_gamma(d, k_min, k_max, lo, hi))
    except ValueError:
        if k_min == k_max:
            raise
    for gamma in (hi, lo):
        if abs(_power_mean(gamma, k_min, k_max) - d) <= slack:
            return DegreeDistribution(k_min, k_max, gamma)
    raise ValueError(f"no power law on {k_min}..{k_max} has mean within {slack} of {d}")


def _without(g: Graph, u: int | None) -> Graph:
    if u is None or u not in g:
        return g
    return g.subgraph(v for v in g.vertices if v != u)


def _ids(g: Graph, u: int | None):
    return fresh_ids(g, *(() if u is None else (u,)))


def ba_step(g: Graph, d: int, ell: int, rng: random.Random, newcomer: int | None = None) -> Expansion:
    """``ell`` new vertices, each linking to ``d // 2`` distinct degree-weighted targets."""
    h = _without(g, newcomer)
    m = max(1, d // 2)
    ids = _ids(g, newcomer)
    order = sorted(h.vertices)
    repeated = [v for v in order for _ in range(h.degree(v))]
    if not repeated:
        repeated = list(order)
    population = set(order)
    new_v, new_e = [], []
    for _ in range(ell):
        v = next(ids)
        if len(population) <= m:
            targets = sorted(population)
        else:
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(rng.choice(repeated))
            targets = sorted(chosen)
        for t in targets:
            new_e.append(_edge(v, t))
        repeated.extend(targets)
        repeated.extend([v] * len(targets))
        population.add(v)
        new_v.append(v)
    return Expansion(frozenset(new_v), frozenset(new_e))


def jr_step(g: Graph, p: float, m: int, ell: int, rng: random.Random, newcomer: int | None = None) -> Expansion:
    """Jackson-Rogers arrivals: an anchor link, then random and friend-of-friend meetings."""
    if m < 1:
        raise ValueError("m must be >= 1")
    h = _without(g, newcomer).copy()
    ids = _ids(g, newcomer)
    pool = sorted(h.vertices)
    new_v, new_e = [], []

    def link(a, b):
        h.add_edge(a, b)
        new_e.append(_edge(a, b))

    for _ in range(ell):
        v = next(ids)
        link(v, rng.choice(pool))
        nb = h.neighbors(v)
        free = len(pool) - len(nb)
        if free <= m:
            s1 = [w for w in pool if w not in nb]
        else:
            picked: set[int] = set()
            while len(picked) < m:
                w = rng.choice(pool)
                if w not in nb:
                    picked.add(w)
            s1 = sorted(picked)
        for w in s1:
            if rng.random() < p:
                link(v, w)
        nb = h.neighbors(v)
        second = set()
        for w in nb:
            second |= h.neighbors(w)
        second -= nb
        second.discard(v)
        s2 = rng.sample(sorted(second), min(m, len(second)))
        seen = set(s1)
        for w in s2:
            if w not in seen and rng.random() < p:
                link(v, w)
        pool.append(v)
        new_v.append(v)
    return Expansion(frozenset(new_v), frozenset(new_e))


class _DegreeClasses:
    """Vertices bucketed by degree, for ``P(z in [k]) ∝ k |[k]|`` sampling."""

    def __init__(self, h: Graph):
        self.deg: dict[int, int] = {}
        self.cls: dict[int, list[int]] = {}
        self.pos: dict[int, int] = {}
        for v in sorted(h.vertices):
            self._put(v, h.degree(v))

    def _put(self, v, k):
        bucket = self.cls.setdefault(k, [])
        self.pos[v] = len(bucket)
        bucket.append(v)
        self.deg[v] = k

    def _take(self, v):
        k = self.deg[v]
        bucket = self.cls[k]
        i = self.pos[v]
        last = bucket.pop()
        if last != v:
            bucket[i] = last
            self.pos[last] = i
        if not bucket:
            del self.cls[k]

    def bump(self, v):
        if v in self.deg:
            k = self.deg[v]
            self._take(v)
            self._put(v, k + 1)
        else:
            self._put(v, 1)

    def sample(self, rng: random.Random) -> int:
        keys = sorted(k for k in self.cls if k > 0)
        cum, acc = [], 0
        for k in keys:
            acc += k * len(self.cls[k])
            cum.append(acc)
        k = keys[bisect.bisect_right(cum, rng.random() * acc)]
        return rng.choice(self.cls[k])


def richclub_step(g: Graph, d: int, N: int, ell: int, rng: random.Random, newcomer: int | None = None,
                  max_retries: int = 100) -> Expansion:
    """Rich-club events until ``ell`` vertices were added."""
    alpha = 2 * (N + 1) / (N * d + 2)
    h = _without(g, newcomer).copy()
    ids = _ids(g, newcomer)
    pool = sorted(h.vertices)
    classes = _DegreeClasses(h)
    new_v, new_e = [], []

    def link(a, b):
        h.add_edge(a, b)
        new_e.append(_edge(a, b))
        classes.bump(a)
        classes.bump(b)

    added = 0
    while added < ell:
        if rng.random() < alpha:
            v = next(ids)
            anchor = rng.choice(pool)
            link(v, anchor)
            pool.append(v)
            new_v.append(v)
            added += 1
            continue
        w = rng.choice(pool)
        for _ in range(max_retries):
            z = classes.sample(rng)
            if z != w and not h.has_edge(w, z):
                link(w, z)
                break
    return Expansion(frozenset(new_v), frozenset(new_e))


class _EdgeBag:
    """Edge set with O(1) uniform sampling and removal."""

    def __init__(self, edges):
        self.items = list(edges)
        self.pos = {e: i for i, e in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def __contains__(self, e):
        return e in self.pos

    def add(self, e):
        self.pos[e] = len(self.items)
        self.items.append(e)

    def remove(self, e):
        i = self.pos.pop(e)
        last = self.items.pop()
        if last != e:
            self.items[i] = last
            self.pos[last] = i

    def choice(self, rng):
        return self.items[rng.randrange(len(self.items))]


def stud_join_probability(layer_a: int, layer_b: int) -> float:
    return 1.0 / (1 + 3 * abs(layer_a - layer_b))


def onion_step(g: Graph, q: DegreeDistribution, ell: int, rng: random.Random, newcomer: int | None = None,
               stall: int = 100, max_forced: int = 1000, max_retries: int = 50) -> Expansion:
    """Insert ``ell`` vertices, rewiring existing edges through a stud pool.

    Each insertion samples a degree ``k`` from ``q`` (odd values are moved to
    a neighbouring even value with equal probability so the pool can be fully
    paired), severs ``k`` pre-existing edges and pairs the ``3k`` studs, with
    studs in layers ``s``, ``t`` joining with probability ``1/(1 + 3|s-t|)``.
    The layer of a vertex is the rank of its degree among the distinct degrees
    present. After ``stall`` consecutive rejections one more old edge ``c-d``
    is cut and merged with the stalled pair ``a, b`` into ``a-c`` and ``b-d``.
    An insertion that disconnects the graph is undone and redrawn.
    """
    h = _without(g, newcomer).copy()
    adj = h._adj
    ids = _ids(g, newcomer)
    old = _EdgeBag(sorted(h.edges()))  # severable: present before this step
    created: set[tuple[int, int]] = set()
    removed: set[tuple[int, int]] = set()
    degcount = Counter(len(nb) for nb in adj.values())
    new_v = []

    def add(a, b, log):
        e = _edge(a, b)
        h.add_edge(a, b)
        if e in removed:
            removed.discard(e)
            old.add(e)
            log.append(("restore", e))
        else:
            created.add(e)
            log.append(("add", e))

    def cut(e, log):
        h.remove_edge(*e)
        old.remove(e)
        if e in created:  # only after a refill
            created.discard(e)
            log.append(("uncreate", e))
        else:
            removed.add(e)
            log.append(("cut", e))

    def undo(log):
        for op, e in reversed(log):
            if op == "cut":
                h.add_edge(*e)
                old.add(e)
                removed.discard(e)
            elif op == "uncreate":
                h.add_edge(*e)
                old.add(e)
                created.add(e)
            elif op == "add":
                h.remove_edge(*e)
                created.discard(e)
            else:
                h.remove_edge(*e)
                old.remove(e)
                removed.add(e)

    for _ in range(ell):
        v = next(ids)
        for _attempt in range(max_retries):
            k = q.sample(rng)
            if k % 2:
                k += 1 if rng.random() < 0.5 else -1
            if len(old) < k:
                # large growth can exhaust the pre-step edges; let this step's own edges be severed
                for e in sorted(created - set(old.items)):
                    old.add(e)
            k = min(k, len(old) // 2 * 2)
            if k < 2:
                raise GraphError("onion step needs at least 2 severable edges")
            keys = sorted(set(degcount) | {k})
            layer_of_degree = {x: i for i, x in enumerate(keys)}
            h.add_vertex(v)
            log: list = []
            studs = [v] * k
            for _ in range(k):
                e = old.choice(rng)
                cut(e, log)
                studs.extend(e)
            # layers come from degrees after pairing, which equal degrees before severing
            pending = Counter(studs)

            def layer_of(w):
                return layer_of_degree[k if w == v else len(adj[w]) + pending[w]]

            layer = {w: layer_of(w) for w in pending}
            ok = _pair_studs(h, studs, layer, layer_of, rng, old, add, cut, log, stall, max_forced)
            if ok and _reaches_all(h, v, set(layer)):  # layer keys: every stud owner
                break
            undo(log)
            del adj[v]
        else:
            raise OnionStallError("onion pairing stalled")
        degcount[k] += 1
        new_v.append(v)
    return Expansion(frozenset(new_v), frozenset(created), frozenset(removed))


def _pair_studs(h, studs, layer, layer_of, rng, old, add, cut, log, stall, max_forced) -> bool:
    adj = h._adj
    rejections = forced = 0
    while studs:
        n = len(studs)
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        a, b = studs[i], studs[j]
        if a != b and b not in adj[a] and rng.random() < stud_join_probability(layer[a], layer[b]):
            add(a, b, log)
            for idx in sorted((i, j), reverse=True):
                studs[idx] = studs[-1]
                studs.pop()
            rejections = 0
            continue
        rejections += 1
        if rejections < stall:
            continue
        # stalled: cut one more old edge c-d and merge it with the stalled studs into a-c, b-d
        forced += 1
        if forced > max_forced or not len(old):
            return False
        rejections = 0
        e = old.choice(rng)
        c, d = e
        if a in e or b in e or c in adj[a] or d in adj[b]:
            continue
        for w in e:
            if w not in layer:
                layer[w] = layer_of(w)
        cut(e, log)
        add(a, c, log)
        add(b, d, log)
        for idx in sorted((i, j), reverse=True):
            studs[idx] = studs[-1]
            studs.pop()
    return True


def _reaches_all(h: Graph, src: int, targets: set[int]) -> bool:
    """Whether every target lies in the component of ``src`` (early exit)."""
    adj = h._adj
    missing = set(targets)
    missing.discard(src)
    seen = {src}
    frontier = [src]
    while frontier and missing:
        nxt = []
        for x in frontier:
            for w in adj[x]:
                if w not in seen:
                    seen.add(w)
                    missing.discard(w)
                    nxt.append(w)
        frontier = nxt
    return not missing


def cycle_graph(n: int) -> Graph:
    return Graph((i, (i + 1) % n) for i in range(n))


def model_step(params: ModelParams, g: Graph, ell: int, rng: random.Random, newcomer: int | None = None) -> Expansion:
    if params.model == "ba":
        return ba_step(g, params.d, ell, rng, newcomer)
    if params.model == "jr":
        return jr_step(g, params.jr_p, params.m, ell, rng, newcomer)
    if params.model == "richclub":
        return richclub_step(g, params.d, params.N, ell, rng, newcomer)
    return onion_step(g, params.degree_distribution, ell, rng, newcomer)


def apply_expansion(g: Graph, f: Expansion) -> None:
    for a, b in f.removed_edges:
        g.remove_edge(a, b)
    for v in f.new_vertices:
        g.add_vertex(v)
    for a, b in f.new_edges:
        g.add_edge(a, b)


def build_initial(params: ModelParams, rng: random.Random, history: list | None = None) -> Graph:
    """Cycle of ``params.n0`` vertices grown one vertex per step to ``params.N``.

    If ``history`` is given, every expansion is appended to it.
    """
    g = cycle_graph(params.n0)
    while len(g) < params.N:
        f = model_step(params, g, 1, rng)
        apply_expansion(g, f)
        if history is not None:
            history.append(f)
    return g


class GeneratorTrace:
    """A model used as the environment of an integration process."""

    def __init__(self, params: ModelParams, rng: random.Random, growth: int | None = None):
        self.params = params
        self.rng = rng
        self.growth = params.growth if growth is None else growth

    def next_expansion(self, g, pending, u):
        return model_step(self.params, g, self.growth, self.rng, newcomer=u)
