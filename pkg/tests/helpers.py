"""Random inputs and slow, obviously-correct reference computations for tests."""

from __future__ import annotations

import itertools
import math
import random

from newcomer.dynamics import Expansion
from newcomer.graph_core import Graph, center_profile

INF = math.inf


def random_connected(rng: random.Random, n: int, extra: float = 0.3) -> Graph:
    """Random spanning tree on 0..n-1 plus each remaining pair with probability ``extra``."""
    order = list(range(n))
    rng.shuffle(order)
    g = Graph(vertices=range(n))
    for i in range(1, n):
        g.add_edge(order[i], order[rng.randrange(i)])
    for a, b in itertools.combinations(range(n), 2):
        if not g.has_edge(a, b) and rng.random() < extra:
            g.add_edge(a, b)
    return g


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    g = Graph(vertices=range(n))
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < p:
            g.add_edge(a, b)
    return g


def floyd_warshall(g: Graph) -> dict[int, dict[int, float]]:
    vs = sorted(g.vertices)
    d = {a: {b: (0 if a == b else (1 if g.has_edge(a, b) else INF)) for b in vs} for a in vs}
    for k in vs:
        dk = d[k]
        for i in vs:
            dik = d[i][k]
            if dik == INF:
                continue
            di = d[i]
            for j in vs:
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return d


def oracle_profile(g: Graph):
    """(ecc, radius, diameter, center) by all-pairs relaxation."""
    d = floyd_warshall(g)
    ecc = {v: max(row.values()) for v, row in d.items()}
    rad = min(ecc.values())
    if rad == INF:
        return ecc, INF, INF, frozenset()
    return ecc, rad, max(ecc.values()), frozenset(v for v, e in ecc.items() if e == rad)


def oracle_betweenness(g: Graph) -> dict[int, float]:
    """Enumerate every simple path between each pair and keep the shortest ones."""
    vs = sorted(g.vertices)
    bc = dict.fromkeys(vs, 0.0)
    for s, t in itertools.combinations(vs, 2):
        paths = []
        best = [INF]

        def walk(v, path):
            if len(path) - 1 > best[0]:
                return
            if v == t:
                if len(path) - 1 < best[0]:
                    best[0] = len(path) - 1
                    paths.clear()
                paths.append(list(path))
                return
            for w in g.neighbors(v):
                if w not in path:
                    path.append(w)
                    walk(w, path)
                    path.pop()

        walk(s, [s])
        paths = [p for p in paths if len(p) - 1 == best[0]]
        for p in paths:
            for v in p[1:-1]:
                bc[v] += 1 / len(paths)
    return bc


def oracle_min_broker(g: Graph, u: int) -> int:
    """Size of the smallest S with u central in g + u-S, by exhaustive search."""
    vs = sorted(g.vertices)
    for size in range(len(vs) + 1):
        for combo in itertools.combinations(vs, size):
            h = g.copy()
            h.add_vertex(u)
            for v in combo:
                h.add_edge(u, v)
            if u in oracle_profile(h)[3]:
                return size
    raise AssertionError("linking to everything always works")


class RandomConfinedTrace:
    """Each step adds at most one edge: a pendant vertex or a chord between existing vertices."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def next_expansion(self, g, pending, u):
        others = sorted(v for v in g.vertices if v != u)
        rng = self.rng
        r = rng.random()
        if r < 0.2:
            return Expansion()
        if r < 0.6 or len(others) < 2:
            v = max(max(g.vertices), u) + 1
            return Expansion.from_edges(g, [(rng.choice(others), v)])
        for _ in range(20):
            a, b = rng.sample(others, 2)
            if not g.has_edge(a, b):
                return Expansion.from_edges(g, [(a, b)])
        return Expansion()


class PeripheralPendantTrace:
    """Hangs a short path on a random vertex at eccentricity >= radius + 1 (never on ``u``)."""

    def __init__(self, rng: random.Random, max_len: int = 2):
        self.rng = rng
        self.max_len = max_len

    def next_expansion(self, g, pending, u):
        prof = center_profile(g)
        far = sorted(v for v, e in prof.ecc.items() if v != u and e >= prof.radius + 1)
        if not far:
            return Expansion()
        anchor = self.rng.choice(far)
        nxt = max(max(g.vertices), u) + 1
        path = [anchor] + list(range(nxt, nxt + self.rng.randint(1, self.max_len)))
        return Expansion.from_edges(g, zip(path, path[1:]))


def double_ray_trace(steps: int, v: int = 0, x0: int = 1, y0: int = 2, start: int = 10):
    """``F_i = {x_{i-1} x_i, y_{i-1} y_i}``: both rays grow by one vertex per step."""
    xs, ys = [x0], [y0]
    nxt = start
    out = []
    for _ in range(steps):
        xs.append(nxt)
        ys.append(nxt + 1)
        nxt += 2
        out.append([(xs[-2], xs[-1]), (ys[-2], ys[-1])])
    return out


# criterion number -> [(check name, status, detail)], status in PASS / FAIL / SKIP
ACCEPTANCE: dict[int, list[tuple[str, str, str]]] = {}


def record(criterion: int, check: str, ok, detail: str = "") -> None:
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    ACCEPTANCE.setdefault(criterion, []).append((check, status, detail))
    print(f"criterion {criterion} [{check}]: {status} {detail}".rstrip())
