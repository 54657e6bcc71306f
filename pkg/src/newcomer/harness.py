"""Experiment drivers behind the command line.

Every driver returns plain rows (dicts with a fixed column order) so the
writer can emit CSV or JSON. Rows carry no wall-clock data unless asked, which
keeps output byte-identical across runs with the same seed.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .dynamics import IPResult, IPRun, ScriptedTrace, run_ip, temporal_profile
from .generators import MODELS, GeneratorTrace, ModelParams, OnionStallError, apply_expansion, build_initial, cycle_graph, model_step
from .graph_core import UNREACHABLE, Graph, GraphError, largest_component
from .ingest import EdgeEvent, PerEvent, ReplayTrace, SnapshotPolicy, snapshots
from .tactics import GREEDY, RMAX, RBTW, RsetMode, Tactic

RESULT_COLUMNS = [
    "experiment", "source", "tactic", "d", "ell", "start", "trial", "seed",
    "initial_vertices", "cost", "entered_at", "edges_built", "horizon",
]
SUMMARY_COLUMNS = [
    "experiment", "source", "tactic", "d", "ell", "start", "trials", "entered", "dnf", "failed",
    "mean_cost", "std_cost",
]
PROFILE_COLUMNS = ["snapshot", "size", "gdiam", "cdiam", "dist_ref"]

DNF = "DNF"
FAILED = "FAILED"

# the worked example: u = 0 joins this graph while the trace below arrives
FIG1_EDGES = [(1, 2), (1, 3), (2, 8), (2, 9), (2, 10), (3, 4), (3, 5), (3, 6), (4, 6), (5, 7), (8, 10)]
FIG1_TRACE = [[(9, 11)], [(6, 12)], [(8, 13)]]
FIG1_NEWCOMER = 0
# costs under smallest-id ties and unnormalized betweenness
FIG1_EXPECTED = {"smax": 3, "sbtw": 2, "rmax": 2, "rbtw": 2, "muf": 2}
FIG1_NOTES = [
    "smax: the often-quoted run links {2,6,7}; with smallest-id ties the second pick is 4, cost is 3 either way",
    "sbtw: the often-quoted run links {2,5,12}; unnormalized betweenness ranks 3 first (24 vs 20), giving [3,9]",
]


def trial_seed(base: int, *key: int) -> int:
    """Independent 63-bit seed for ``key`` under ``base`` (splittable, order-free)."""
    ss = np.random.SeedSequence(base, spawn_key=key)
    return int(ss.generate_state(2, np.uint64)[0] >> np.uint64(1))


def fig1_graph() -> Graph:
    return Graph(FIG1_EDGES)


def fig1_events() -> list[EdgeEvent]:
    """The worked example as an event stream: G0 at time 0, one trace edge per later time."""
    evs = [EdgeEvent(0, a, b) for a, b in FIG1_EDGES]
    for t, step in enumerate(FIG1_TRACE, 1):
        evs.extend(EdgeEvent(t, a, b) for a, b in step)
    return evs


def run_fig1(tactic: Tactic, rset_mode: RsetMode = RsetMode.EXAMPLE, horizon: int = 500) -> IPResult:
    run = IPRun(fig1_graph(), FIG1_NEWCOMER, tactic, ScriptedTrace(FIG1_TRACE), k=tactic.k,
                max_steps=horizon, rset_mode=rset_mode)
    return run_ip(run)


def cmd_fig1(tactics: Sequence[Tactic] = GREEDY, rset_mode: RsetMode = RsetMode.EXAMPLE,
             horizon: int = 500) -> tuple[list[dict], list[str], bool]:
    """Rows, notes and whether the RMax/RBtw check passed."""
    rows = []
    results = {}
    for t in tactics:
        res = run_fig1(t, rset_mode, horizon)
        results[t.name] = res
        rows.append({
            "tactic": str(t),
            "cost": DNF if res.cost is None else res.cost,
            "entered_at": "" if res.entered_at is None else res.entered_at,
            "edges_built": " ".join(map(str, res.edges_built)),
            "horizon": horizon,
        })
    ok = True
    for t in (RMAX, RBTW):
        res = results.get(t.name) or run_fig1(t, rset_mode, horizon)
        ok &= res.cost == 2
    return rows, list(FIG1_NOTES), ok


def _row(experiment, source, tactic, d, ell, start, trial, seed, initial, res: IPResult | None,
         horizon: int, wall: float | None = None) -> dict:
    if res is None:
        cost, entered, built = FAILED, "", ""
    else:
        cost = DNF if res.cost is None else res.cost
        entered = "" if res.entered_at is None else res.entered_at
        built = len(res.edges_built)
    row = {
        "experiment": experiment, "source": source, "tactic": str(tactic), "d": d, "ell": ell,
        "start": start, "trial": trial, "seed": seed, "initial_vertices": initial, "cost": cost,
        "entered_at": entered, "edges_built": built, "horizon": horizon,
    }
    if wall is not None:
        row["wall_time"] = f"{wall:.3f}"
    return row


@dataclass(frozen=True)
class Exp2Task:
    experiment: str
    model: str
    d: int
    ell: int
    trial: int
    base_seed: int
    tactics: tuple[Tactic, ...]
    N: int = 500
    jr_p: float = 0.5
    horizon: int = 500
    rset_mode: RsetMode = RsetMode.EXAMPLE
    wall_time: bool = False


def run_exp2_task(task: Exp2Task) -> list[dict]:
    """One trial: one initial graph, every tactic run against the same model."""
    seed = trial_seed(task.base_seed, task.trial)
    params = ModelParams(task.model, d=task.d, N=task.N, growth=task.ell, jr_p=task.jr_p)
    common = (task.experiment, task.model)
    try:
        g0 = build_initial(params, random.Random(seed))
    except (GraphError, OnionStallError):
        return [_row(*common, t, task.d, task.ell, "", task.trial, seed, "", None, task.horizon)
                for t in task.tactics]
    u = max(g0.vertices) + 1
    rows = []
    for t in task.tactics:
        trace = GeneratorTrace(params, random.Random(trial_seed(task.base_seed, task.trial, 1)))
        run = IPRun(g0, u, t, trace, k=t.k, max_steps=task.horizon, rset_mode=task.rset_mode)
        t0 = time.perf_counter()
        try:
            res = run_ip(run)
        except (GraphError, OnionStallError):
            res = None
        wall = time.perf_counter() - t0 if task.wall_time else None
        rows.append(_row(*common, t, task.d, task.ell, "", task.trial, seed, len(g0), res, task.horizon, wall))
    return rows


def run_tasks(fn: Callable, tasks: Sequence, jobs: int = 1) -> list[dict]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(fn, tasks))
    else:
        chunks = [fn(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    return sort_rows(rows)


def sort_rows(rows: list[dict]) -> list[dict]:
    def key(r):
        return (r["experiment"], r["source"], _num(r["d"]), _num(r["ell"]), _num(r["start"]),
                r["tactic"], _num(r["trial"]))
    return sorted(rows, key=key)


def _num(x):
    return -1 if x == "" else x


def cmd_experiment2(experiment: str, models: Sequence[str], degrees: Sequence[int], growths: Sequence[int],
                    tactics: Sequence[Tactic], trials: int, seed: int, N: int = 500, jr_p: float = 0.5,
                    horizon: int = 500, rset_mode: RsetMode = RsetMode.EXAMPLE, jobs: int = 1,
                    wall_time: bool = False) -> list[dict]:
    """Sweep models over ``degrees`` x ``growths``; each (model, d, ell) gets its own seed stream."""
    tasks = []
    for model in models:
        if model not in MODELS:
            raise ValueError(f"unknown model {model!r}")
        for d in degrees:
            for ell in growths:
                base = trial_seed(seed, MODELS.index(model), d, ell)
                for trial in range(trials):
                    tasks.append(Exp2Task(experiment, model, d, ell, trial, base, tuple(tactics), N, jr_p,
                                          horizon, rset_mode, wall_time))
    return run_tasks(run_exp2_task, tasks, jobs)


def cmd_experiment1(events: list[EdgeEvent], source: str, starts: Sequence[int], interval: int,
                    tactics: Sequence[Tactic], policy: SnapshotPolicy = PerEvent(), horizon: int = 500,
                    rset_mode: RsetMode = RsetMode.EXAMPLE, wall_time: bool = False) -> list[dict]:
    """Replay a dataset from each start snapshot, once per tactic."""
    rows = []
    for start in starts:
        for t in tactics:
            trace = ReplayTrace(events, interval, start, policy)
            run = IPRun(trace.initial, trace.newcomer, t, trace, k=t.k, max_steps=horizon, rset_mode=rset_mode)
            t0 = time.perf_counter()
            res = run_ip(run)
            wall = time.perf_counter() - t0 if wall_time else None
            rows.append(_row("exp1", source, t, "", interval, start, 0, "", len(trace.initial), res, horizon, wall))
    return sort_rows(rows)


def summarize(rows: Iterable[dict]) -> list[dict]:
    """Mean and standard deviation of the cost over trials that entered the center."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        key = tuple(r[c] for c in ("experiment", "source", "tactic", "d", "ell", "start"))
        groups.setdefault(key, []).append(r)
    out = []
    for key, rs in groups.items():
        costs = [r["cost"] for r in rs if r["cost"] not in (DNF, FAILED)]
        out.append({
            **dict(zip(("experiment", "source", "tactic", "d", "ell", "start"), key)),
            "trials": len(rs),
            "entered": len(costs),
            "dnf": sum(r["cost"] == DNF for r in rs),
            "failed": sum(r["cost"] == FAILED for r in rs),
            "mean_cost": _fmt(statistics.fmean(costs)) if costs else "",
            "std_cost": _fmt(statistics.pstdev(costs)) if costs else "",
        })
    return out


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _profile_rows(graphs: Iterable[Graph], ref: int) -> list[dict]:
    rows = []
    for i, g in enumerate(graphs):
        h = largest_component(g) if len(g) else g
        (p,) = temporal_profile([h], ref) if len(h) else [None]
        if p is None:
            continue
        rows.append({"snapshot": i, "size": p.size, "gdiam": _dist(p.gdiam), "cdiam": _dist(p.cdiam),
                     "dist_ref": _dist(p.dist_ref)})
    return rows


def _dist(x: float):
    return "inf" if x == UNREACHABLE else int(x)


def model_snapshots(params: ModelParams, rng: random.Random, steps: int | None = None) -> Iterable[Graph]:
    """The n0-cycle and the graph after each growth step, up to ``params.N`` vertices or ``steps`` steps."""
    g = cycle_graph(params.n0)
    yield g.copy()
    i = 0
    while (len(g) < params.N) if steps is None else (i < steps):
        apply_expansion(g, model_step(params, g, params.growth, rng))
        i += 1
        yield g.copy()


def cmd_profile_model(params: ModelParams, seed: int, ref: int = 0, steps: int | None = None) -> list[dict]:
    return _profile_rows(model_snapshots(params, random.Random(trial_seed(seed, 0)), steps), ref)


def cmd_profile_events(events: list[EdgeEvent], policy: SnapshotPolicy, ref: int) -> list[dict]:
    return _profile_rows(snapshots(events, policy), ref)


def generate_events(params: ModelParams, seed: int, steps: int | None = None) -> list[EdgeEvent]:
    """A model's growth from the n0-cycle as an event stream (one time unit per step)."""
    from .ingest import events_from_expansions

    rng = random.Random(trial_seed(seed, 0))
    g = cycle_graph(params.n0)
    start = g.copy()
    hist = []
    i = 0
    while (len(g) < params.N) if steps is None else (i < steps):
        f = model_step(params, g, params.growth, rng)
        apply_expansion(g, f)
        hist.append(f)
        i += 1
    return events_from_expansions(start, hist)


def write_rows(rows: list[dict], columns: Sequence[str] | None = None, fmt: str = "csv") -> str:
    if columns is None:
        columns = list(rows[0]) if rows else []
    if fmt == "json":
        return json.dumps([{c: r.get(c, "") for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r.get(c, "") for c in columns])
    return buf.getvalue()


def result_columns(wall_time: bool) -> list[str]:
    return RESULT_COLUMNS + (["wall_time"] if wall_time else [])
