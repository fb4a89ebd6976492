import random

import pytest

from maxleaf.branching import leaf_count, validate
from maxleaf.digraph import Digraph, Graph, underlying_graph
from maxleaf.oracles import (
    BudgetExhausted,
    exact_max_leaf_branching,
    exact_max_leaf_tree,
    exact_pathwidth,
    exact_vertex_separation,
    naive_max_leaf_branching,
)


def random_digraph(n, seed, p=0.3):
    rng = random.Random(seed)
    arcs = [(u, v) for u in range(n) for v in range(n)
            if u != v and rng.random() < p]
    return Digraph.build(n, arcs)


class TestNaiveOracle:
    def test_no_branching_gives_zero(self):
        assert naive_max_leaf_branching(Digraph.build(3, [])) == (0, None)

    def test_star(self):
        D = Digraph.build(4, [(0, 1), (0, 2), (0, 3)])
        v, T = naive_max_leaf_branching(D)
        assert v == 3 and T.root == 0

    def test_cycle(self):
        D = Digraph.build(4, [(i, (i + 1) % 4) for i in range(4)])
        v, _ = naive_max_leaf_branching(D)
        assert v == 1

    def test_witness_validates(self):
        D = random_digraph(5, 1, p=0.5)
        v, T = naive_max_leaf_branching(D)
        if T is not None:
            assert validate(D, T) is None
            assert leaf_count(T) == v


class TestBranchAndBound:
    def test_agrees_with_naive_on_random_instances(self):
        for seed in range(40):
            D = random_digraph(random.Random(seed).randint(2, 7), seed)
            a, _ = naive_max_leaf_branching(D)
            b, T = exact_max_leaf_branching(D, 10_000)
            assert a == b
            if T is not None:
                assert leaf_count(T) == b

    def test_complete_digraph(self):
        n = 6
        D = Digraph.build(n, [(u, v) for u in range(n) for v in range(n) if u != v])
        v, _ = exact_max_leaf_branching(D, 10_000)
        assert v == n - 1

    def test_single_vertex(self):
        v, T = exact_max_leaf_branching(Digraph.build(1, []))
        assert v == 0 and T.n == 1

    def test_budget_exhaustion_carries_lower_bound(self):
        D = random_digraph(14, 2, p=0.6)
        with pytest.raises(BudgetExhausted) as e:
            exact_max_leaf_branching(D, time_budget_ms=0.0)
        assert e.value.best_value >= -1

    def test_initial_lower_bound_respected(self):
        # seeding with the true optimum cannot change the answer
        D = random_digraph(6, 7, p=0.4)
        v0, T0 = exact_max_leaf_branching(D, 10_000)
        v1, _ = exact_max_leaf_branching(D, 10_000, initial_lower_bound=(v0, T0))
        assert v0 == v1


class TestMaxLeafTree:
    def test_tree_at_least_branching(self):
        for seed in range(15):
            D = random_digraph(6, 100 + seed, p=0.35)
            vb, _ = exact_max_leaf_branching(D, 10_000)
            vt = exact_max_leaf_tree(D, 10_000)
            assert vt >= vb

    def test_two_disjoint_stars(self):
        # no out-branching exists, but an out-tree covers one star
        D = Digraph.build(6, [(0, 1), (0, 2), (3, 4), (3, 5)])
        assert exact_max_leaf_branching(D, 10_000) == (0, None)
        assert exact_max_leaf_tree(D, 10_000) == 2

    def test_strong_digraph_tree_equals_branching(self):
        D = Digraph.build(4, [(i, (i + 1) % 4) for i in range(4)])
        vb, _ = exact_max_leaf_branching(D, 10_000)
        assert exact_max_leaf_tree(D, 10_000) == vb


def ugraph(n, edges):
    return Graph(n, frozenset(frozenset(e) for e in edges))


def path_graph(n):
    return ugraph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return ugraph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


class TestVertexSeparation:
    def test_empty_and_singleton(self):
        assert exact_pathwidth(ugraph(0, [])) == 0
        assert exact_pathwidth(ugraph(1, [])) == 0

    def test_path_graph(self):
        assert exact_pathwidth(path_graph(6)) == 1

    def test_cycle_graph(self):
        G = ugraph(5, [(i, (i + 1) % 5) for i in range(5)])
        assert exact_pathwidth(G) == 2

    def test_complete_graph(self):
        assert exact_pathwidth(complete_graph(5)) == 4

    def test_caterpillar_pathwidth_one(self):
        edges = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]
        assert exact_pathwidth(ugraph(7, edges)) == 1

    def test_spider_pathwidth_two(self):
        # three legs of length two meeting at a center
        edges = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]
        assert exact_pathwidth(ugraph(7, edges)) == 2

    def test_ordering_achieves_cost(self):
        G = underlying_graph(random_digraph(8, 3, p=0.3))
        value, ordering = exact_vertex_separation(G)
        # recompute the max prefix boundary of the returned ordering
        pos = {v: i for i, v in enumerate(ordering.order)}
        worst = 0
        for i in range(G.n):
            prefix = set(ordering.order[: i + 1])
            boundary = sum(
                1 for v in prefix
                if any(w not in prefix for w in G.adjacency()[v]))
            worst = max(worst, boundary)
        assert worst == value == ordering.cost
        assert sorted(ordering.order) == list(range(G.n))

    def test_size_guard(self):
        with pytest.raises(ValueError, match="n <= 20"):
            exact_vertex_separation(ugraph(21, []))

    def test_monotone_under_edge_removal(self):
        G = complete_graph(5)
        sub = ugraph(5, [tuple(sorted(e)) for e in list(G.edges)[:6]])
        assert exact_pathwidth(sub) <= exact_pathwidth(G)
