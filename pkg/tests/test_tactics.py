import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import oracle_min_broker, random_connected
from newcomer.graph_core import Graph, GraphError, center_profile
from newcomer.tactics import (
    CENTER_ADJACENT,
    GREEDY,
    MUF,
    RMAX,
    SMAX,
    BrokerSet,
    RsetMode,
    SelectionContext,
    Tactic,
    is_broker_set,
    min_broker_set_bruteforce,
    remote_center_set,
    select,
    select_center_adjacent,
    select_flood,
    select_muf,
    select_target,
    uncovered_set,
)

FIG1 = [(1, 2), (1, 3), (2, 8), (2, 9), (2, 10), (3, 4), (3, 5), (3, 6), (4, 6), (5, 7), (8, 10)]
U = 0


def ctx(edges, u=U, mode=RsetMode.EXAMPLE, extra=()):
    g = Graph(edges)
    for v in extra:
        g.add_edge(u, v)
    return SelectionContext(g, u, mode)


# -- parsing ----------------------------------------------------------------

@pytest.mark.parametrize("text", ["smax", "sbtw", "rmax", "rbtw", "muf", "center-adjacent", "flood:3"])
def test_tactic_text_round_trip(text):
    assert str(Tactic.parse(text)) == text


def test_bad_tactics():
    with pytest.raises(ValueError):
        Tactic.parse("greedy")
    with pytest.raises(ValueError):
        Tactic.parse("flood:0")
    assert Tactic.parse(" SMax ") == SMAX
    assert not Tactic.parse("flood:2").single_edge and RMAX.single_edge


# -- first picks on the worked example ------------------------------------------

def test_isolated_newcomer_sees_every_vertex_uncovered():
    c = ctx(FIG1)
    assert c.isolated
    assert uncovered_set(c) == set(range(1, 11))
    assert remote_center_set(c) == set(range(1, 11))


def test_smax_first_pick_ties_by_id():
    # 2 and 3 both have degree 4
    assert select_target(SMAX, ctx(FIG1)) == 2


def test_sbtw_first_pick_is_highest_betweenness():
    assert select_target(Tactic("sbtw"), ctx(FIG1)) == 3


def test_muf_isolated_picks_best_neighbour_of_low_degree_center():
    # center {1, 3}; 1 has the smaller degree; its neighbours 2, 3 tie on degree 4
    assert select_muf(ctx(FIG1)) == 2


def test_muf_on_a_path():
    assert select_muf(ctx([(1, 2), (2, 3)])) == 1


def test_rset_modes_after_first_link():
    c = ctx(FIG1, extra=[2])
    # furthest from u is 7 (dist 5); radius with u attached is 3
    example = remote_center_set(c)
    strict = remote_center_set(SelectionContext(c.graph, U, RsetMode.STRICT))
    assert example == {3, 5, 7}
    assert strict == {8, 9, 10}
    assert select_target(RMAX, c) == 3


def test_rset_falls_back_to_uset_when_empty():
    # u-3-2-1: strict Rset around x=1 holds only u, so RMax uses the Uset {1}
    g = Graph([(1, 2), (2, 3), (U, 3)])
    c = SelectionContext(g, U, RsetMode.STRICT)
    assert remote_center_set(c) == set()
    assert U not in center_profile(g).center
    assert select_target(RMAX, c) == 1


def test_flood_takes_smallest_unlinked_ids():
    c = ctx(FIG1, extra=[1, 3])
    assert select_flood(2, c) == {2, 4}
    with pytest.raises(ValueError):
        select_flood(0, c)


def test_center_adjacent_prefers_smallest_id_near_center():
    assert select_center_adjacent(ctx(FIG1)) == 1
    assert select_center_adjacent(ctx(FIG1, extra=[1])) == 2


def test_nothing_to_do_once_central():
    c = ctx(FIG1, extra=[1, 3])
    assert U in center_profile(c.graph).center
    for t in GREEDY:
        assert select(t, c) == frozenset()


# -- broker sets ----------------------------------------------------------

def test_fig1_minimum_broker_set():
    g = Graph(FIG1)
    best = min_broker_set_bruteforce(g, U)
    assert len(best) == 2 and best.members == {1, 3}
    assert is_broker_set(g, frozenset({3, 8}), U)
    assert is_broker_set(g, BrokerSet(frozenset({1, 3})), U)
    assert not is_broker_set(g, frozenset({3}), U)


def test_broker_set_rejects_present_newcomer():
    with pytest.raises(GraphError):
        is_broker_set(Graph([(0, 1)]), frozenset({1}), 0)


def test_bruteforce_guards_its_budget():
    g = random_connected(random.Random(0), 40, 0.1)
    with pytest.raises(ValueError):
        min_broker_set_bruteforce(g, 100, max_subsets=1000)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10_000))
def test_bruteforce_matches_exhaustive_oracle(n, seed):
    g = random_connected(random.Random(seed), n, 0.3)
    assert len(min_broker_set_bruteforce(g, 99)) == oracle_min_broker(g, 99)


# -- general selector properties ---------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(2, 15), st.integers(0, 10_000), st.sampled_from(list(GREEDY) + [CENTER_ADJACENT]),
       st.integers(0, 3), st.sampled_from(list(RsetMode)))
def test_selection_never_relinks(n, seed, tactic, links, mode):
    rng = random.Random(seed)
    g = random_connected(rng, n, 0.2)
    u = 100
    for v in rng.sample(sorted(g.vertices), min(links, n)):
        g.add_edge(u, v)
    c = SelectionContext(g, u, mode)
    s = select(tactic, c)
    assert len(s) <= 1
    assert not (s & c.linked())
    assert s <= set(g.vertices)
    if u in g and u in center_profile(g).center:
        assert not s


def test_muf_falls_back_to_any_neighbour():
    # center {0, 4}, c = 0; x = 3 and no neighbour of 0 sits at distance rad-1 = 1 from 3
    u = 99
    g = Graph([(0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (4, u)])
    c = SelectionContext(g, u)
    assert select_muf(c) == 3
    assert select(MUF, c) == frozenset({3})


def test_muf_links_a_lone_center_vertex():
    # the only center vertex has no neighbours to recommend
    assert select_muf(SelectionContext(Graph(vertices=[4]), U)) == 4
