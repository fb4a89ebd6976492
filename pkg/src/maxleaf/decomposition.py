"""Path decompositions and the constructive decomposition algorithms.

Two constructions are provided: one for acyclic single-source digraphs
(width at most 4k-6 when no out-branching with k leaves exists) and one
for strongly connected digraphs via recursive halving of an out-branching
at a leaf-weighted centroid, with the separator cloned into both halves
("beta decomposition").  Each either certifies a branching with >= k
leaves or returns a valid path decomposition of the underlying graph.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .branching import (
    Classification,
    OutBranching,
    classify,
    leaf_count,
)
from .digraph import (
    Digraph,
    Graph,
    has_out_branching,
    in_class_L,
    is_strongly_connected,
    strong_components,
    underlying_graph,
)
from .local_search import bfs_branching, improve_to_1ae
from .oracles import VertexOrdering


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset[int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def to_json(self) -> str:
        return json.dumps({"bags": [sorted(b) for b in self.bags]})

    def to_text(self) -> str:
        return "\n".join(" ".join(str(v) for v in sorted(b)) for b in self.bags) + "\n"

    @staticmethod
    def from_json(text: str) -> "PathDecomposition":
        doc = json.loads(text)
        return PathDecomposition(tuple(frozenset(b) for b in doc["bags"]))

    @staticmethod
    def from_text(text: str) -> "PathDecomposition":
        bags = []
        for line in text.splitlines():
            if line.strip():
                bags.append(frozenset(int(x) for x in line.split()))
        return PathDecomposition(tuple(bags))


def validate_pd(G: Graph, P: PathDecomposition) -> str | None:
    """None when P satisfies the three path-decomposition axioms for G,
    else a message naming the first violated axiom and a witness."""
    covered: set[int] = set()
    for b in P.bags:
        for v in b:
            if not (0 <= v < G.n):
                return f"bag vertex {v} outside host graph"
        covered |= b
    missing = set(range(G.n)) - covered
    if missing:
        return f"axiom 1: vertex {min(missing)} in no bag"
    for e in G.edges:
        u, v = sorted(e)
        if not any(u in b and v in b for b in P.bags):
            return f"axiom 2: edge {{{u},{v}}} in no bag"
    for v in range(G.n):
        idx = [i for i, b in enumerate(P.bags) if v in b]
        if idx and idx != list(range(idx[0], idx[-1] + 1)):
            return f"axiom 3: vertex {v} occurs non-contiguously"
    return None


def ordering_to_decomposition(G: Graph, sigma: VertexOrdering) -> PathDecomposition:
    """Path decomposition induced by a vertex ordering.

    Bag j holds v_j plus every earlier vertex that still has a neighbor
    at position j or later; width is at most the ordering's cost.
    """
    adj = G.adjacency()
    return _ordering_to_pd(list(sigma.order), lambda v: adj[v])


def _ordering_to_pd(order: Sequence[int],
                    neighbors: Callable[[int], set[int]]) -> PathDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    for j, vj in enumerate(order):
        bag = {vj}
        for i in range(j):
            vi = order[i]
            if any(pos[w] >= j for w in neighbors(vi) if w in pos):
                bag.add(vi)
        bags.append(frozenset(bag))
    if not bags:
        bags = []
    return PathDecomposition(tuple(bags))


def tighten(G: Graph, P: PathDecomposition) -> PathDecomposition:
    """Shrink a valid decomposition by restricting every vertex to the
    smallest contiguous bag interval that still covers its incident
    edges.  Each edge is anchored at one bag containing both endpoints;
    edges with few shared bags are anchored first, later edges pick the
    shared bag that extends the endpoint intervals least.  Width never
    increases."""
    assert validate_pd(G, P) is None, "tighten requires a valid decomposition"
    occ: dict[int, list[int]] = {}
    for i, b in enumerate(P.bags):
        for v in b:
            occ.setdefault(v, []).append(i)
    lo: dict[int, int] = {}
    hi: dict[int, int] = {}

    def cost(v: int, j: int) -> int:
        if v not in lo:
            return 0
        return max(0, lo[v] - j) + max(0, j - hi[v])

    def commit(v: int, j: int) -> None:
        lo[v] = min(lo.get(v, j), j)
        hi[v] = max(hi.get(v, j), j)

    edges = []
    for e in G.edges:
        u, v = sorted(e)
        common = [i for i in occ[u] if i in set(occ[v])]
        edges.append((len(common), u, v, common))
    for _, u, v, common in sorted(edges):
        j = min(common, key=lambda i: (cost(u, i) + cost(v, i), i))
        commit(u, j)
        commit(v, j)
    for v in occ:
        if v not in lo:
            commit(v, occ[v][0])
    bags = tuple(frozenset(v for v in b if lo[v] <= i <= hi[v])
                 for i, b in enumerate(P.bags))
    bags = tuple(b for b in bags if b) or (frozenset(),)
    out = PathDecomposition(bags)
    assert validate_pd(G, out) is None
    return out


@dataclass(frozen=True)
class DecomposeOutcome:
    """Either a witness branching with >= k leaves or a decomposition."""

    witness: Optional[OutBranching] = None
    decomposition: Optional[PathDecomposition] = None
    layers: int = 0
    diagnostics: tuple[str, ...] = ()

    @property
    def kind(self) -> str:
        return "witness" if self.witness is not None else "decomposition"


def _is_acyclic(D: Digraph) -> bool:
    return len(set(strong_components(D).component_id)) == D.n


def decompose_acyclic(D: Digraph, k: int) -> DecomposeOutcome:
    """Witness a branching with >= k leaves or decompose UN(D).

    Requires D acyclic with a single vertex of in-degree zero.  The
    decomposition unions the leaf, branch and path-head vertices of a
    locally optimal branching into every bag of a width-1 decomposition
    of the remaining link paths; width is at most 4k-6 when the local
    optimum has fewer than k leaves.
    """
    if not _is_acyclic(D):
        raise ValueError("digraph is not acyclic")
    sources = [v for v in range(D.n) if D.in_degree(v) == 0]
    if len(sources) != 1:
        raise ValueError(f"expected a single source, found {len(sources)}")
    root = sources[0]

    T = improve_to_1ae(D, bfs_branching(D, root))
    if leaf_count(T) >= k:
        return DecomposeOutcome(witness=T)

    if leaf_count(T) == 1:
        # T is a Hamiltonian path; acyclicity plus local optimality leave
        # no room for extra arcs, so decompose along the path itself
        order = [root]
        ch = T.children()
        while ch[order[-1]]:
            order.append(ch[order[-1]][0])
        assert set(D.arcs) == set(zip(order, order[1:]))
        bags_ = tuple(frozenset(p) for p in zip(order, order[1:])) or (
            frozenset({root}),)
        return DecomposeOutcome(decomposition=PathDecomposition(bags_),
                                layers=1)

    cls = classify(T)
    W = set(cls.leaves) | set(cls.branches) | set(cls.first_vertices)
    # residual: maximal link paths with their first vertex removed
    residual_paths = [p[1:] for p in cls.link_paths if len(p) > 1]

    bags: list[frozenset[int]] = []
    for path in residual_paths:
        if len(path) == 1:
            bags.append(frozenset({path[0]}) | frozenset(W))
        else:
            for a, b in zip(path, path[1:]):
                bags.append(frozenset({a, b}) | frozenset(W))
    if not bags:
        bags.append(frozenset(W))
    pd = tighten(underlying_graph(D), PathDecomposition(tuple(bags)))

    diags: list[str] = []
    if pd.width > 4 * k - 6:
        diags.append(f"width {pd.width} exceeds 4k-6 = {4 * k - 6}")
    return DecomposeOutcome(decomposition=pd, layers=1,
                            diagnostics=tuple(diags))


# ---------------------------------------------------------------------------
# beta decomposition of an out-branching


@dataclass
class _Tree:
    """Mutable out-tree over arbitrary (possibly cloned) vertex ids."""

    root: int
    parent: dict[int, int]  # every vertex except root

    def vertices(self) -> set[int]:
        return {self.root} | set(self.parent)

    def children(self) -> dict[int, list[int]]:
        ch: dict[int, list[int]] = {v: [] for v in self.vertices()}
        for v, p in self.parent.items():
            ch[p].append(v)
        return ch

    def leaf_weight(self) -> int:
        """Number of vertices with no children (root included if alone)."""
        ch = self.children()
        return sum(1 for v in ch if not ch[v])


@dataclass
class BetaNode:
    tree: _Tree
    layer: int
    separator: Optional[tuple[int, int]] = None  # (v, clone of v)
    children: tuple["BetaNode", "BetaNode"] | None = None


@dataclass
class BetaTree:
    root_node: BetaNode
    clone_of: dict[int, int]  # clone id -> id it copies (possibly a clone)
    n_original: int

    def orig(self, v: int) -> int:
        while v in self.clone_of:
            v = self.clone_of[v]
        return v

    @property
    def layers(self) -> int:
        def depth(node: BetaNode) -> int:
            if node.children is None:
                return node.layer
            return max(depth(node.children[0]), depth(node.children[1]))
        return depth(self.root_node)

    def leaf_nodes(self) -> list[BetaNode]:
        out: list[BetaNode] = []

        def walk(node: BetaNode) -> None:
            if node.children is None:
                out.append(node)
            else:
                walk(node.children[0])
                walk(node.children[1])

        walk(self.root_node)
        return out


def _components_after_removal(T: _Tree, v: int) -> list[_Tree]:
    """Components of T - v, each as an out-tree."""
    ch = T.children()
    comps: list[_Tree] = []
    for c in ch[v]:
        sub_parent: dict[int, int] = {}
        stack = [c]
        while stack:
            u = stack.pop()
            for w in ch[u]:
                sub_parent[w] = u
                stack.append(w)
        comps.append(_Tree(c, sub_parent))
    if v != T.root:
        below = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in ch[u]:
                below.add(w)
                stack.append(w)
        rest_parent = {u: p for u, p in T.parent.items()
                       if u not in below and p not in below}
        comps.append(_Tree(T.root, rest_parent))
    return comps


def _pick_centroid(T: _Tree) -> tuple[int, list[_Tree]]:
    """Separator vertex whose removal leaves components of original leaf
    weight at most half the total; among qualifying vertices the one with
    the most balanced split (then lowest id) is taken."""
    ch = T.children()
    orig_leaves = {u for u in ch if not ch[u]}
    total = len(orig_leaves)
    verts = T.vertices()
    # undirected degree >= 2 avoids pendant separators (always possible
    # for trees with >= 2 leaves)
    deg = {u: len(ch[u]) + (0 if u == T.root else 1) for u in verts}
    candidates = [u for u in verts if deg[u] >= 2] or sorted(verts)

    best_key = None
    best: tuple[int, list[_Tree]] | None = None
    for u in sorted(candidates):
        comps = _components_after_removal(T, u)
        weights = [sum(1 for x in c.vertices() if x in orig_leaves) for c in comps]
        if any(2 * w > total for w in weights):
            continue
        max_l = max((c.leaf_weight() for c in comps), default=0)
        max_sz = max((len(c.vertices()) for c in comps), default=0)
        key = (max_l, max_sz, u)
        if best_key is None or key < best_key:
            best_key = key
            best = (u, comps)
    assert best is not None, "no qualifying separator vertex"
    return best


def beta_split(T: _Tree, next_clone_id: int,
               diags: list[str]) -> tuple[_Tree, _Tree, int, int]:
    """Split T at a leaf-weighted centroid into two out-trees.

    The separator v is duplicated: the original stays in the first tree,
    the clone roots (or joins) the second.  Returns (first, second, v,
    clone_id).  Requires at least two leaves.
    """
    lam = T.leaf_weight()
    assert lam >= 2, "beta_split requires at least two leaves"
    v, comps = _pick_centroid(T)

    def comp_key(c: _Tree):
        return (-c.leaf_weight(), min(c.vertices()))

    comps.sort(key=comp_key)
    s = len(comps)
    assert s >= 2, "separator must split the tree"
    lcounts = [c.leaf_weight() for c in comps]

    prefix = 0
    j = s
    for i, l in enumerate(lcounts):
        prefix += l
        if 2 * prefix >= lam + 2:
            j = i + 1
            break
    case_a = 4 * lcounts[j - 1] <= lam + 2 if j <= s else True
    p = j if case_a else 1
    if p >= s:
        p = s - 1  # keep both sides nonempty (small-lambda corner)

    if lam >= 7:
        pre = sum(lcounts[:p])
        suf = sum(lcounts[p:])
        if case_a:
            ok = (2 * pre >= lam + 2 and 4 * pre <= 3 * (lam + 2)
                  and 4 * suf >= lam - 6 and 2 * suf <= lam)
        else:
            ok = (4 * pre >= lam + 2 and 2 * pre <= lam + 2
                  and 2 * suf >= lam - 2 and 4 * suf <= 3 * lam + 2)
        if not ok:
            diags.append(
                f"split balance outside case bounds: lam={lam} case_a={case_a} "
                f"prefix={pre} suffix={suf}")

    clone = next_clone_id
    first_comps = comps[:p]
    second_comps = comps[p:]

    def assemble(side_comps: list[_Tree], copy_id: int) -> _Tree:
        has_rest = any(c.root == T.root and v != T.root for c in side_comps)
        parent: dict[int, int] = {}
        for c in side_comps:
            parent.update(c.parent)
        if has_rest:
            # side containing the part above v: keep root, hang copy under p(v)
            parent[copy_id] = T.parent[v]
            root = T.root
        else:
            root = copy_id
        for c in side_comps:
            if not (c.root == T.root and v != T.root):
                parent[c.root] = copy_id  # child subtree of v
        return _Tree(root, parent)

    first = assemble(first_comps, v)
    second = assemble(second_comps, clone)
    return first, second, v, clone


def build_beta_tree(D: Digraph, T: OutBranching) -> BetaTree:
    """Recursively split T down to single-leaf paths."""
    root_tree = _Tree(T.root, {v: T.parent[v] for v in range(T.n) if v != T.root})
    clone_of: dict[int, int] = {}
    next_id = [D.n]
    diags: list[str] = []

    def recurse(tree: _Tree, layer: int) -> BetaNode:
        if tree.leaf_weight() <= 1 or len(tree.vertices()) <= 2:
            return BetaNode(tree, layer)
        first, second, v, clone = beta_split(tree, next_id[0], diags)
        clone_of[clone] = v
        next_id[0] += 1
        node = BetaNode(tree, layer, (v, clone))
        node.children = (recurse(first, layer + 1), recurse(second, layer + 1))
        return node

    bt = BetaTree(recurse(root_tree, 1), clone_of, D.n)

    # original ids across leaf paths partition V(D); clones are the extras
    seen: set[int] = set()
    for node in bt.leaf_nodes():
        for u in node.tree.vertices():
            if u < D.n:
                assert u not in seen, f"vertex {u} in two leaf paths"
                seen.add(u)
    assert seen == set(range(D.n)), "leaf paths do not cover the digraph"
    return bt


def _path_order(tree: _Tree) -> list[int]:
    """Root-to-end vertex order of a single-leaf tree (a directed path)."""
    ch = tree.children()
    order = [tree.root]
    cur = tree.root
    while ch[cur]:
        assert len(ch[cur]) == 1, "leaf node of the split tree is not a path"
        cur = ch[cur][0]
        order.append(cur)
    assert len(order) == len(tree.vertices())
    return order


def layer_bound(k: int) -> int:
    return 2 + math.ceil(math.log(max(k, 2)) / math.log(4 / 3))


def decompose_strong(D: Digraph, k: int, seed: int = 0,
                     assume_premise: bool = False) -> DecomposeOutcome:
    """Witness a branching with >= k leaves or decompose UN(D).

    Applies to strongly connected digraphs, and more generally to
    digraphs with an out-branching where out-tree and out-branching leaf
    optima coincide.  The decomposition recursively splits a locally
    optimal branching, decomposes each resulting directed path along its
    own order, and merges children by unioning the cross-arc neighbor
    set (at most 2k vertices when the machinery's premises hold) into
    every bag.
    """
    if D.n == 0:
        raise ValueError("empty digraph")
    if not is_strongly_connected(D):
        ok, _ = has_out_branching(D)
        if not ok:
            raise ValueError("digraph has no out-branching")
        # the in-neighbor test is sufficient, not necessary; callers that
        # know the tree/branching leaf optima coincide (e.g. reachable
        # subdigraphs) may bypass it.  Only width guarantees rely on it.
        if not assume_premise and not in_class_L(D):
            raise ValueError(
                "digraph is neither strongly connected nor in the "
                "supported out-branching class")
    if D.n == 1:
        return DecomposeOutcome(
            decomposition=PathDecomposition((frozenset({0}),)), layers=1)

    _, roots = has_out_branching(D)
    T = improve_to_1ae(D, bfs_branching(D, min(roots)))
    if leaf_count(T) >= k:
        return DecomposeOutcome(witness=T)

    cls = classify(T)
    W_full = set(cls.leaves) | set(cls.branches) | set(cls.first_vertices)
    diags: list[str] = []
    if len(W_full) >= 4 * k:
        diags.append(f"|W| = {len(W_full)} not below 4k = {4 * k}")

    bt = build_beta_tree(D, T)
    t = bt.layers
    if t > layer_bound(k):
        diags.append(f"layer count {t} exceeds {layer_bound(k)}")

    def base_arcs(a: int, b: int) -> bool:
        return (bt.orig(a), bt.orig(b)) in D.arcs

    def pd_for_leaf(node: BetaNode) -> PathDecomposition:
        order = _path_order(node.tree)
        idx = {u: i for i, u in enumerate(order)}
        W_local = {u for u in order if bt.orig(u) in W_full}
        path_arcs = set(zip(order, order[1:]))
        # adjacency of the stripped digraph R
        adj: dict[int, set[int]] = {u: set() for u in order}
        for a in order:
            for b in order:
                if a == b or not base_arcs(a, b):
                    continue
                touches_w = a in W_local or b in W_local
                if touches_w and (a, b) not in path_arcs:
                    continue
                adj[a].add(b)
                adj[b].add(a)
        boundary = max(
            (sum(1 for u in order[:i + 1] if any(idx[w] > i for w in adj[u]))
             for i in range(len(order))), default=0)
        if boundary > k:
            diags.append(
                f"stripped path ordering boundary {boundary} exceeds k={k}")
        pd = _ordering_to_pd(order, lambda u: adj[u])
        bags = tuple(b | frozenset(W_local) for b in pd.bags)
        out = PathDecomposition(bags)
        if out.width >= 5 * k:
            diags.append(f"leaf path width {out.width} not below 5k = {5 * k}")
        return out

    def combine(node: BetaNode) -> PathDecomposition:
        if node.children is None:
            return pd_for_leaf(node)
        left = combine(node.children[0])
        right = combine(node.children[1])
        v, clone = node.separator
        # rename the clone back to v throughout the second half
        right_bags = [frozenset(v if x == clone else x for x in b)
                      for b in right.bags]
        lverts = set().union(*left.bags) if left.bags else set()
        rverts = set().union(*right_bags) if right_bags else set()
        Y: set[int] = set()
        for a in lverts:
            for b in rverts:
                if base_arcs(a, b):
                    Y.add(b)
                if base_arcs(b, a):
                    Y.add(a)
        if len(Y - {v}) > 2 * k:
            diags.append(
                f"cross-neighbor set size {len(Y)} exceeds 2k = {2 * k}")
        glue = frozenset(Y | {v})
        bags = tuple(b | glue for b in list(left.bags) + right_bags)
        return PathDecomposition(bags)

    pd = tighten(underlying_graph(D), combine(bt.root_node))
    if pd.width > 2 * (t + 1.5) * k:
        diags.append(
            f"final width {pd.width} exceeds 2(t+1.5)k = {2 * (t + 1.5) * k}")
    return DecomposeOutcome(decomposition=pd, layers=t, diagnostics=tuple(diags))


def centroid(n: int, edges: set[frozenset[int]], weight: dict[int, float]) -> int:
    """Vertex of an undirected tree whose removal leaves components each of
    weight at most half the total.  Ties broken to the lowest id."""
    total = sum(weight.get(v, 0.0) for v in range(n))
    if total <= 0:
        raise ValueError("total weight must be positive")
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for e in edges:
        a, b = sorted(e)
        adj[a].add(b)
        adj[b].add(a)
    for v in range(n):
        ok = True
        seen = {v}
        for start in adj[v]:
            if start in seen:
                continue
            comp_w = 0.0
            stack = [start]
            seen.add(start)
            while stack:
                u = stack.pop()
                comp_w += weight.get(u, 0.0)
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if comp_w > total / 2:
                ok = False
                break
        if ok:
            return v
    raise AssertionError("weighted tree has no qualifying separator")
