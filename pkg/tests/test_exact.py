"""Exact oracle: fixtures, brute-force equivalence, search properties."""

import pytest

from trifactor.errors import BudgetExceededError
from trifactor.exact import BUDGET, COVER, NO_FACTOR, exact_factor, has_factor
from trifactor.families import (
    complete_tripartite,
    gamma3,
    gen_random_min_degree,
    theta32,
    theta33,
)
from trifactor.graph import TripartiteGraph, build_graph, verify_cover

from conftest import brute_count_factors, brute_has_factor


def test_k333_count_is_36():
    g = complete_tripartite(3)
    res = exact_factor(g, count_mode=True)
    assert res.count == 36
    assert res.count == brute_count_factors(g)


def test_k222_count():
    g = complete_tripartite(2)
    res = exact_factor(g, count_mode=True)
    assert res.count == brute_count_factors(g) == 4


def test_gamma3_base_nofactor():
    assert exact_factor(gamma3(1)).status == NO_FACTOR


def test_gamma3_t2_cover_verified():
    res = exact_factor(gamma3(2))
    assert res.status == COVER
    assert verify_cover(gamma3(2), res.cover, require_perfect=True).ok


def test_theta33_cover_is_latin_transversal():
    res = exact_factor(theta33(1))
    assert res.status == COVER
    # with one vertex per column per class, the three triangles form a
    # Latin-square transversal family: each (class, column) used once
    used = {(c, t[c]) for t in res.cover.triangles for c in range(3)}
    assert len(used) == 9


def test_theta32_blowups_have_no_factor():
    for t in (1, 2, 3):
        assert not has_factor(theta32(t))


def test_k111_has_factor():
    assert has_factor(complete_tripartite(1))


def test_gamma3_parity_table():
    for t, expected in ((1, False), (2, True), (3, False), (4, True), (5, False)):
        assert has_factor(gamma3(t)) is expected, t


@pytest.mark.parametrize("seed", range(200))
def test_matches_naive_enumeration_small(seed):
    n = 2 + seed % 3  # class sizes 2..4
    frac = (seed % 5) / 5
    g = gen_random_min_degree(n, frac, seed)
    assert has_factor(g) == brute_has_factor(g)


def _reversed_graph(g: TripartiteGraph) -> TripartiteGraph:
    n = g.n
    edges = [((u.class_id, n - 1 - u.index), (v.class_id, n - 1 - v.index))
             for u, v in g.edges()]
    return build_graph(n, edges)


@pytest.mark.parametrize("seed", range(20))
def test_branch_order_invariance(seed):
    g = gen_random_min_degree(6, 0.55, seed)
    assert has_factor(g) == has_factor(_reversed_graph(g))


def test_twin_pruning_matches_plain_search():
    for t in (1, 2, 3):
        g = gamma3(t)
        fast = exact_factor(g, twin_pruning=True).status
        slow = exact_factor(g, twin_pruning=False).status
        assert fast == slow


def test_budget_exceeded_is_distinct():
    g = complete_tripartite(6)
    res = exact_factor(g, budget=2)
    assert res.status == BUDGET
    assert res.cover is None
    with pytest.raises(BudgetExceededError):
        has_factor(g, budget=2)


def test_stats_populated():
    res = exact_factor(gamma3(2))
    assert res.stats.nodes_expanded > 0
    assert res.stats.max_depth <= gamma3(2).n
    assert res.stats.elapsed >= 0
