import pytest

from maxleaf.branching import (
    OutBranching,
    classify,
    leaf_count,
    siblings,
    to_dot,
    validate,
)
from maxleaf.digraph import Digraph


def path_branching(n):
    return OutBranching(n, 0, tuple([-1] + list(range(n - 1))))


def star_branching(n):
    return OutBranching(n, 0, tuple([-1] + [0] * (n - 1)))


class TestValidate:
    def test_non_host_arc(self):
        D = Digraph.build(3, [(0, 1), (1, 2), (2, 0)])
        T = OutBranching.from_parent_map(3, 0, {1: 0, 2: 0})
        assert "non-host arc" in validate(D, T)

    def test_valid_path(self):
        D = Digraph.build(3, [(0, 1), (1, 2)])
        assert validate(D, path_branching(3)) is None

    def test_cycle_among_non_roots(self):
        D = Digraph.build(3, [(0, 1), (1, 2), (2, 1)])
        T = OutBranching.from_parent_map(3, 0, {1: 2, 2: 1})
        assert "unreachable" in validate(D, T)

    def test_missing_parent(self):
        D = Digraph.build(3, [(0, 1), (1, 2)])
        T = OutBranching(3, 0, (-1, 0, -1))
        assert "no parent" in validate(D, T)


class TestClassify:
    def test_star(self):
        cls = classify(star_branching(5))
        assert cls.leaves == {1, 2, 3, 4}
        assert cls.branches == {0}
        assert cls.links == frozenset()
        assert cls.link_paths == ()

    def test_path(self):
        cls = classify(path_branching(4))
        assert cls.leaves == {3}
        assert cls.links == {0, 1, 2}
        assert cls.link_paths == ((0, 1, 2),)
        assert cls.first_vertices == {0}

    def test_binary_tree_fact1_tight(self):
        # root 0 -> 1,2; 1 -> 3,4; 2 -> 5,6
        T = OutBranching.from_parent_map(
            7, 0, {1: 0, 2: 0, 3: 1, 4: 1, 5: 2, 6: 2})
        cls = classify(T)
        assert len(cls.branches) == len(cls.leaves) - 1 == 3

    def test_counting_facts_on_random_trees(self):
        import random
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(2, 14)
            parent = {v: rng.randint(0, v - 1) for v in range(1, n)}
            T = OutBranching.from_parent_map(n, 0, parent)
            cls = classify(T)
            nl = len(cls.leaves)
            assert len(cls.branches) <= nl - 1
            assert len(cls.link_paths) <= 2 * nl - 1
            assert cls.leaves | cls.links | cls.branches == set(range(n))
            covered = [v for p in cls.link_paths for v in p]
            assert sorted(covered) == sorted(cls.links)

    def test_link_paths_ordered_by_depth_then_id(self):
        # two link paths at different depths
        T = OutBranching.from_parent_map(
            6, 0, {1: 0, 2: 0, 3: 1, 4: 2, 5: 4})
        cls = classify(T)
        depths = T.depths()
        keys = [(depths[p[0]], p[0]) for p in cls.link_paths]
        assert keys == sorted(keys)


class TestLeafCount:
    def test_star(self):
        assert leaf_count(star_branching(5)) == 4

    def test_path(self):
        assert leaf_count(path_branching(4)) == 1

    def test_single_vertex_counts_zero(self):
        assert leaf_count(OutBranching(1, 0, (-1,))) == 0


class TestSiblings:
    def test_star_non_roots_are_siblings(self):
        T = star_branching(4)
        assert siblings(T, 1, 2)
        assert siblings(T, 2, 3)

    def test_path_never_siblings(self):
        T = path_branching(4)
        for u in range(4):
            for v in range(4):
                if u != v:
                    assert not siblings(T, u, v)

    def test_root_never_sibling(self):
        T = star_branching(4)
        assert not siblings(T, 0, 2)

    def test_same_vertex_rejected(self):
        with pytest.raises(ValueError):
            siblings(path_branching(3), 1, 1)


class TestSerialization:
    def test_json_round_trip(self):
        T = OutBranching.from_parent_map(4, 2, {0: 2, 1: 0, 3: 2})
        back = OutBranching.from_json(T.to_json(), 4)
        assert back == T

    def test_dot_marks_leaves(self):
        assert "doublecircle" in to_dot(star_branching(3))


def test_depth_increases_along_arcs():
    T = OutBranching.from_parent_map(6, 0, {1: 0, 2: 1, 3: 1, 4: 3, 5: 0})
    d = T.depths()
    for v in range(6):
        if v != T.root:
            assert d[v] == d[T.parent[v]] + 1
