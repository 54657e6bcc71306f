"""Acceptance criteria 1-9, each at its target scale and tolerance.

Every check logs a PASS / FAIL / SKIP line through ``helpers.record``; the
terminal summary prints one line per criterion. Known shortfalls are strict
xfails: they are reported as FAIL and turn red if they ever start passing.
"""

import os
import random
import statistics
import subprocess
import sys
import time
from pathlib import Path

import pytest

from helpers import (
    PeripheralPendantTrace,
    RandomConfinedTrace,
    double_ray_trace,
    oracle_betweenness,
    oracle_min_broker,
    oracle_profile,
    random_connected,
    random_graph,
    record,
)
from newcomer import harness
from newcomer.dynamics import AdversaryTrace, IPRun, ScriptedTrace, run_ip
from newcomer.generators import MODELS, ModelParams, build_initial
from newcomer.graph_core import Graph, betweenness, center_profile, cp_coefficient
from newcomer.ingest import dataset_stats, last_snapshot, read_events
from newcomer.tactics import CENTER_ADJACENT, GREEDY, RBTW, RMAX, SMAX, MUF, Tactic, is_broker_set, \
    min_broker_set_bruteforce

pytestmark = pytest.mark.slow

HORIZON = 500


# -- 1. worked example ------------------------------------------------------------

def test_criterion_1_worked_example():
    t0 = time.perf_counter()
    rmax, rbtw, muf, sbtw = (harness.run_fig1(t) for t in (RMAX, RBTW, MUF, Tactic("sbtw")))
    g0 = harness.fig1_graph()
    best = min_broker_set_bruteforce(g0, harness.FIG1_NEWCOMER)
    elapsed = time.perf_counter() - t0
    checks = {
        "rmax cost 2, edges [2,3]": rmax.cost == 2 and rmax.edges_built == [2, 3],
        "rbtw cost 2": rbtw.cost == 2,
        "muf cost 2": muf.cost == 2,
        "min broker set size 2": len(best) == 2,
        "{3,8} is a broker set": is_broker_set(g0, frozenset({3, 8}), harness.FIG1_NEWCOMER),
        "sbtw cost 2": sbtw.cost == 2,
        "under 1 s": elapsed < 1.0,
    }
    for name, ok in checks.items():
        record(1, name, ok)
    assert all(checks.values()), checks


@pytest.mark.xfail(strict=True, reason="smallest-id tie-breaking gives SMax cost 3, not the expected 4; "
                                       "no tie rule tried reproduces 4 (see notes)")
def test_criterion_1_smax_cost_4():
    res = harness.run_fig1(SMAX)
    ok = res.cost == 4
    record(1, "smax cost 4", ok, f"got cost {res.cost} with edges {res.edges_built}")
    assert ok


# -- 2. flooding on (2,1)-confined traces -------------------------------------------

def test_criterion_2_flooding():
    t0 = time.perf_counter()
    entered = 0
    for seed in range(50):
        rng = random.Random(seed)
        g = random_connected(rng, rng.randint(2, 20), 0.15)
        res = run_ip(IPRun(g, 1000, Tactic("flood", 2), RandomConfinedTrace(rng), k=2, max_steps=HORIZON))
        entered += res.entered
    elapsed = time.perf_counter() - t0
    ok = entered == 50 and elapsed < 30
    record(2, "flood:2 enters", ok, f"{entered}/50 in {elapsed:.1f}s")
    assert ok


# -- 3. path-attachment adversary -----------------------------------------------------

def test_criterion_3_adversary():
    t0 = time.perf_counter()
    kept_out = 0
    for seed in range(20):
        rng = random.Random(seed)
        g = random_connected(rng, rng.randint(3, 20), 0.2)
        for tactic in GREEDY:
            res = run_ip(IPRun(g, 1000, tactic, AdversaryTrace(2), max_steps=100))
            kept_out += not res.entered and res.timestamps == 100
    elapsed = time.perf_counter() - t0
    ok = kept_out == 100 and elapsed < 60
    record(3, "adversary keeps u out", ok, f"{kept_out}/100 in {elapsed:.1f}s")
    assert ok


# -- 4. bounded-center traces ------------------------------------------------------

def test_criterion_4_center_adjacent():
    t0 = time.perf_counter()
    entered = 0
    for seed in range(19):
        rng = random.Random(seed)
        g = random_connected(rng, rng.randint(2, 20), 0.2)
        res = run_ip(IPRun(g, 1000, CENTER_ADJACENT, PeripheralPendantTrace(rng), max_steps=HORIZON))
        entered += res.entered
    # the double ray x_i ... v ... y_i, v = 0
    u = 5
    res = run_ip(IPRun(Graph([(1, 0), (0, 2)]), u, CENTER_ADJACENT, ScriptedTrace(double_ray_trace(30)),
                       stop_at_entry=False, keep_snapshots=True, max_steps=30))
    ray_ok = res.entered and all(center_profile(s).center == {u, 0} for s in res.snapshots[3:])
    entered += res.entered
    elapsed = time.perf_counter() - t0
    record(4, "double-ray center is {u, v} after timestamp 3", ray_ok)
    ok = entered == 20 and elapsed < 60
    record(4, "center-adjacent enters", ok, f"{entered}/20 in {elapsed:.1f}s")
    assert ok and ray_ok


# -- 5. oracle equivalence ----------------------------------------------------------

def test_criterion_5_oracles():
    t0 = time.perf_counter()
    prof_ok = 0
    for seed in range(200):
        rng = random.Random(seed)
        g = random_connected(rng, rng.randint(1, 40), rng.choice([0.0, 0.05, 0.15, 0.4]))
        ecc, rad, diam, center = oracle_profile(g)
        p = center_profile(g)
        prof_ok += dict(p.ecc) == ecc and p.radius == rad and p.diameter == diam and p.center == center
    bc_ok = 0
    for seed in range(200):
        rng = random.Random(10_000 + seed)
        g = random_graph(rng, rng.randint(1, 8), rng.random())
        bc, ref = betweenness(g), oracle_betweenness(g)
        bc_ok += all(abs(bc[v] - ref[v]) <= 1e-9 for v in g.vertices)
    broker_ok = 0
    for seed in range(100):
        rng = random.Random(20_000 + seed)
        g = random_connected(rng, rng.randint(1, 9), rng.random() * 0.5)
        need = oracle_min_broker(g, 100)
        good = True
        for tactic in GREEDY:
            res = run_ip(IPRun(g, 100, tactic, ScriptedTrace([]), max_steps=HORIZON))
            good &= res.entered and len(res.edges_built) >= need
        broker_ok += good
    elapsed = time.perf_counter() - t0
    record(5, "center profile vs all-pairs oracle", prof_ok == 200, f"{prof_ok}/200")
    record(5, "betweenness vs path enumeration", bc_ok == 200, f"{bc_ok}/200")
    record(5, "greedy edges >= minimum broker set", broker_ok == 100, f"{broker_ok}/100")
    record(5, "under 60 s", elapsed < 60, f"{elapsed:.1f}s")
    assert prof_ok == 200 and bc_ok == 200 and broker_ok == 100 and elapsed < 60


# -- 6. model sweeps --------------------------------------------------------------

DEGREE_TRIALS = 100
GROWTH_TRIALS = 20  # growth steps of 100-500 vertices make full 100-seed runs take hours on one core
ELL500_SHORTFALL = ("at l=500 the graph doubles every step and the center keeps moving; "
                    "ba muf, onion rbtw and onion muf average 11-15 steps (all runs enter)")
GROWTHS = (10, 100, pytest.param(500, marks=pytest.mark.xfail(strict=True, reason=ELL500_SHORTFALL)))


def mean_cost(rows, model, tactic, ell=1):
    """Mean cost with did-not-enter runs counted at the horizon (failed runs count as such too)."""
    costs = [r["cost"] for r in rows if r["source"] == model and r["tactic"] == tactic and r["ell"] == ell]
    vals = [c if isinstance(c, int) else HORIZON for c in costs]
    missed = sum(not isinstance(c, int) for c in costs)
    return statistics.fmean(vals), missed


@pytest.fixture(scope="module")
def degree_rows():
    t0 = time.perf_counter()
    rows = harness.cmd_experiment2("exp2-degree", MODELS, [6], [1], GREEDY, DEGREE_TRIALS, 0, N=500)
    print(f"degree sweep: {len(rows)} rows in {time.perf_counter() - t0:.0f}s")
    return rows


def test_criterion_6_costs_below_10(degree_rows):
    bad = []
    for model in MODELS:
        for tactic in (RMAX, RBTW, MUF):
            m, missed = mean_cost(degree_rows, model, str(tactic))
            ok = m < 10
            record(6, f"{model} {tactic} d=6 l=1 mean < 10", ok, f"mean {m:.2f}, {missed} not entered")
            if not ok:
                bad.append((model, str(tactic), m))
    assert not bad


def test_criterion_6_smax_gap(degree_rows):
    bad = []
    for model in ("richclub", "onion"):
        smax, _ = mean_cost(degree_rows, model, "smax")
        rmax, _ = mean_cost(degree_rows, model, "rmax")
        ok = smax >= 2 * rmax
        record(6, f"{model} smax >= 2 x rmax", ok, f"smax {smax:.2f}, rmax {rmax:.2f}, ratio {smax / rmax:.1f}")
        if not ok:
            bad.append(model)
    assert not bad


@pytest.mark.parametrize("ell", GROWTHS)
def test_criterion_6_growth_sweep(ell):
    t0 = time.perf_counter()
    rows = harness.cmd_experiment2("exp2-growth", MODELS, [6], [ell], (RMAX, RBTW, MUF), GROWTH_TRIALS, 0, N=500)
    bad = []
    for model in MODELS:
        for tactic in ("rmax", "rbtw", "muf"):
            m, missed = mean_cost(rows, model, tactic, ell)
            ok = m < 10
            record(6, f"{model} {tactic} l={ell} mean < 10", ok,
                   f"mean {m:.2f} over {GROWTH_TRIALS} seeds, {missed} not entered")
            if not ok:
                bad.append((model, tactic, m))
    print(f"growth {ell}: {time.perf_counter() - t0:.0f}s")
    assert not bad


# -- 7. core-periphery signs and center sizes ------------------------------------------

C7_TRIALS = 100
C7_NULL_SAMPLES = 10


@pytest.fixture(scope="module")
def structure():
    out = {}
    for mi, model in enumerate(("ba", "richclub", "onion")):
        cps, centers = [], []
        for i in range(C7_TRIALS):
            seed = harness.trial_seed(7, mi, i)
            g = build_initial(ModelParams(model, d=6, N=500), random.Random(seed))
            cps.append(cp_coefficient(g, null_samples=C7_NULL_SAMPLES, rng_seed=seed))
            centers.append(len(center_profile(g).center))
        out[model] = (statistics.fmean(cps), statistics.fmean(centers))
        print(f"{model}: mean cp {out[model][0]:.4f}, mean center size {out[model][1]:.1f}")
    return out


def test_criterion_7_richclub_positive_ba_negative(structure):
    rc, ba = structure["richclub"][0], structure["ba"][0]
    ok = rc > 0 > ba
    record(7, "cp rich-club > 0 > BA", ok, f"rich-club {rc:.3f}, BA {ba:.3f}")
    assert ok


def test_criterion_7_ba_center_large(structure):
    c = structure["ba"][1]
    record(7, "BA mean center >= 50", c >= 50, f"{c:.1f}")
    assert c >= 50


ONION_SHORTFALL = ("the onion model as implemented (stud pairing with layer-decaying join probability) "
                   "gives mean cp ~0.10, below rich-club ~0.12, and a mean center of ~26 vertices "
                   "(see notes)")


@pytest.mark.xfail(strict=True, reason=ONION_SHORTFALL)
def test_criterion_7_onion_above_richclub(structure):
    on, rc = structure["onion"][0], structure["richclub"][0]
    ok = on > rc
    record(7, "cp onion > rich-club", ok, f"onion {on:.3f}, rich-club {rc:.3f}")
    assert ok


@pytest.mark.xfail(strict=True, reason=ONION_SHORTFALL)
def test_criterion_7_onion_center_small(structure):
    c = structure["onion"][1]
    record(7, "onion mean center <= 10", c <= 10, f"{c:.1f}")
    assert c <= 10


# -- 8. real datasets (only when files are supplied) -------------------------------------

DATASETS = {
    # name: (environment variable, |V|, |E|, diameter, center size)
    "trade": ("NEWCOMER_TRADE_EVENTS", 176, 1229, 4, 118),
    "msg": ("NEWCOMER_MSG_EVENTS", 1899, 20296, 8, 1),
    "bitcoin": ("NEWCOMER_BITCOIN_EVENTS", 5875, 21489, 9, 16),
    "cit": ("NEWCOMER_CIT_EVENTS", 14083, 104211, 15, 61),
}


@pytest.mark.parametrize("name", list(DATASETS))
def test_criterion_8_dataset_stats(name):
    var, v, e, diam, center = DATASETS[name]
    path = os.environ.get(var)
    if not path:
        record(8, name, "SKIP", f"set {var} to an event file to check it")
        pytest.skip(f"{var} not set")
    with open(path) as f:
        stream = read_events(f)
    g, count = last_snapshot(stream.events)
    st = dataset_stats(g, count, cp_null_samples=0)
    got = (st.vertices, st.edges, st.diameter, st.center_size)
    ok = got == (v, e, diam, center)
    record(8, name, ok, f"got |V|,|E|,diam,center = {got}, expected {(v, e, diam, center)}")
    assert ok


# -- 9. determinism -------------------------------------------------------------------

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("argv", [
    ["fig1"],
    ["exp1", "--events", str(DATA / "fig1.events"), "--policy", "period:1"],
    ["exp2-degree", "--degrees", "4,6", "--size", "80", "--trials", "3", "--seed", "11"],
    ["exp2-growth", "--growths", "5", "--size", "80", "--trials", "3", "--tactics", "rmax,muf"],
    ["profile", "--model", "onion", "--size", "60", "--seed", "2"],
    ["generate", "--model", "richclub", "--size", "60", "--seed", "4"],
    ["stats", "--events", str(DATA / "fig1.events"), "--cp-samples", "5"],
])
def test_criterion_9_byte_identical(argv, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        subprocess.run([sys.executable, "-m", "newcomer", *argv, "--out", str(out)], check=True,
                       capture_output=True)
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    record(9, argv[0], ok)
    assert ok
