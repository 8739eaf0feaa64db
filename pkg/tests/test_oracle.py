from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_max_edges
from shforge.errors import BudgetExceeded
from shforge.hypergraph import (
    Hypergraph,
    is_free,
    is_free_naive,
    max_pairwise_intersection,
)
from shforge.oracle import SearchConfig, exact_max_edges, greedy_free_graph


@pytest.mark.parametrize("n,expected", [(3, 1), (4, 2), (5, 2), (6, 4)])
def test_small_exact_values(n, expected):
    count, H = exact_max_edges(SearchConfig(n, 3, 5, 3))
    assert count == expected == len(H)
    assert count == brute_max_edges(n, 3, 5, 3)
    assert is_free_naive(H, 5, 3) is True


def test_fewer_vertices_than_r():
    count, H = exact_max_edges(SearchConfig(2, 3, 5, 3))
    assert count == 0 and len(H) == 0


@pytest.mark.parametrize(
    "n,r,v,e,cap",
    [
        (5, 3, 4, 2, None),
        (6, 3, 4, 2, None),
        (6, 3, 6, 3, None),
        (6, 3, 7, 3, 1),
        (5, 4, 6, 2, None),
        (6, 4, 7, 3, None),
        (6, 4, 6, 2, 2),
    ],
)
def test_exact_matches_unbounded_search(n, r, v, e, cap):
    cfg = SearchConfig(n, r, v, e, max_pairwise_intersection=cap)
    count, H = exact_max_edges(cfg)
    assert count == brute_max_edges(n, r, v, e, cap)
    assert is_free_naive(H, v, e) is True
    if cap is not None and len(H) >= 2:
        assert max_pairwise_intersection(H) <= cap


def test_candidate_limit():
    with pytest.raises(BudgetExceeded):
        exact_max_edges(SearchConfig(20, 3, 5, 3))


def test_time_budget_returns_best_so_far():
    with pytest.raises(BudgetExceeded) as info:
        exact_max_edges(SearchConfig(10, 3, 5, 3, time_budget=0.0))
    count, H = info.value.best
    assert count == len(H)
    assert is_free(H, 5, 3) is True


@pytest.mark.parametrize("kwargs", [dict(e=1), dict(v=2)])
def test_config_validation(kwargs):
    base = dict(n=5, r=3, v=5, e=3)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SearchConfig(**base)


def test_greedy_example():
    H = greedy_free_graph(SearchConfig(5, 3, 5, 3, max_pairwise_intersection=1, seed=7))
    assert len(H) == 2
    assert max_pairwise_intersection(H) <= 1


configs = st.builds(
    lambda r, n_extra, e, v_off, cap, seed: SearchConfig(
        r + n_extra, r, min(r + v_off, e * r - 1), e, max_pairwise_intersection=cap, seed=seed
    ),
    st.sampled_from([2, 3, 4]),
    st.integers(0, 3),
    st.sampled_from([2, 3]),
    st.integers(0, 8),
    st.one_of(st.none(), st.integers(0, 3)),
    st.integers(0, 10**6),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_greedy_is_free_maximal_and_below_exact(cfg):
    H = greedy_free_graph(cfg)
    assert is_free_naive(H, cfg.v, cfg.e) is True
    cap = cfg.intersection_cap
    if cap is not None and len(H) >= 2:
        assert max_pairwise_intersection(H) <= cap
    present = set(H.edges)
    for c in itertools.combinations(range(cfg.n), cfg.r):
        if c in present:
            continue
        bigger = Hypergraph(cfg.r, cfg.n, H.edges + (c,))
        over_cap = cap is not None and max_pairwise_intersection(bigger) > cap
        assert over_cap or is_free(bigger, cfg.v, cfg.e) is not True
    count, _ = exact_max_edges(cfg)
    assert len(H) <= count


def test_greedy_is_seeded():
    cfg = SearchConfig(9, 3, 6, 3, seed=3)
    assert greedy_free_graph(cfg) == greedy_free_graph(cfg)


@pytest.mark.parametrize("seed", range(4))
def test_relabelled_optimum_stays_free(seed):
    cfg = SearchConfig(7, 3, 5, 3)
    count, H = exact_max_edges(cfg)
    perm = list(range(7))
    random.Random(seed).shuffle(perm)
    G = H.relabeled(perm, 7)
    assert len(G) == count == 7
    assert is_free(G, 5, 3) is True


def test_almost_linear_flag_caps_intersections_at_two():
    cfg = SearchConfig(6, 4, 7, 3, almost_linear=True)
    assert cfg.intersection_cap == 2
    count, H = exact_max_edges(cfg)
    assert count == brute_max_edges(6, 4, 7, 3, 2)
    assert max_pairwise_intersection(H) <= 2
