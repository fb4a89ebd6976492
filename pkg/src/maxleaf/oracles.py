"""Exact ground truth at desk scale.

Maximum-leaf out-branching values via branch and bound (plus a naive
enumerate-all-parent-maps reference used to cross-check it), maximum-leaf
out-tree values, and exact pathwidth via the vertex separation DP.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .branching import OutBranching, leaf_count, validate
from .digraph import Digraph, Graph, has_out_branching, reachable_subdigraph


class BudgetExhausted(Exception):
    """Raised when the oracle exceeds its wall-clock budget.

    Carries the best value/witness found so far as an inexact lower bound.
    """

    def __init__(self, best_value: int, witness: Optional[OutBranching]):
        self.best_value = best_value
        self.witness = witness
        super().__init__(f"time budget exhausted; lower bound {best_value}")


@dataclass(frozen=True)
class VertexOrdering:
    """Vertex elimination ordering with its max prefix-boundary size."""

    order: tuple[int, ...]
    cost: int


def naive_max_leaf_branching(D: Digraph) -> tuple[int, Optional[OutBranching]]:
    """Reference oracle: enumerate every parent assignment.

    Each non-root vertex picks a parent among its in-neighbors; the
    assignment is kept iff the arcs form an out-branching.  Exponential;
    only for cross-checking on tiny or sparse instances.
    """
    best, best_T = 0, None
    ok, roots = has_out_branching(D)
    if not ok:
        return 0, None
    for root in sorted(roots):
        others = [v for v in range(D.n) if v != root]
        choices = [D.in_adj[v] for v in others]
        if any(not c for c in choices):
            continue
        for combo in product(*choices):
            parent = [-1] * D.n
            for v, p in zip(others, combo):
                parent[v] = p
            T = OutBranching(D.n, root, tuple(parent))
            if any(d < 0 for d in T.depths()):
                continue
            k = leaf_count(T)
            if k > best:
                best, best_T = k, T
    return best, best_T


def exact_max_leaf_branching(
    D: Digraph,
    time_budget_ms: float = 60_000.0,
    initial_lower_bound: tuple[int, Optional[OutBranching]] | None = None,
) -> tuple[int, Optional[OutBranching]]:
    """Exact maximum-leaf out-branching value with a validating witness.

    Branch and bound over parent choices: at each node pick an unattached
    frontier vertex (fewest remaining parent candidates first) and branch
    on taking or permanently excluding one candidate arc into it.
    Vertices whose only possible parent is already in the tree are
    attached by unit propagation.  The admissible bound combines the
    vertices already forced internal, a greedy parent-capacity cover of
    the unattached set, and the depth of the layered reachability
    frontier.  Returns (0, None) when D has no out-branching.  Raises
    BudgetExhausted past the wall-clock budget.
    """
    ok, roots = has_out_branching(D)
    if not ok or D.n == 0:
        return 0, None
    if D.n == 1:
        return 0, OutBranching(1, 0, (-1,))

    import sys

    if sys.getrecursionlimit() < 4 * (D.n + D.m) + 100:
        sys.setrecursionlimit(4 * (D.n + D.m) + 100)
    deadline = time.monotonic() + time_budget_ms / 1000.0
    best = -1
    best_T: Optional[OutBranching] = None
    if initial_lower_bound is not None:
        best, best_T = initial_lower_bound

    n = D.n
    FULL = (1 << n) - 1
    out_mask = [0] * n
    in_mask = [0] * n
    for a, b in D.arcs:
        out_mask[a] |= 1 << b
        in_mask[b] |= 1 << a
    INFEASIBLE = -(10 ** 9)

    for root in sorted(roots):
        parent = [-1] * n
        children = [0] * n
        banned_in = [0] * n   # banned_in[v]: parents excluded for v
        banned_out = [0] * n  # mirror, child side
        st = {"attached": 1 << root, "internal": 0}

        def take(u: int, v: int, trail: list) -> None:
            parent[v] = u
            children[u] += 1
            st["attached"] |= 1 << v
            newly_internal = children[u] == 1
            if newly_internal:
                st["internal"] |= 1 << u
            trail.append((u, v, newly_internal))

        def undo(trail: list) -> None:
            for u, v, newly_internal in reversed(trail):
                parent[v] = -1
                children[u] -= 1
                st["attached"] &= ~(1 << v)
                if newly_internal:
                    st["internal"] &= ~(1 << u)

        def propagate(trail: list) -> bool:
            """Attach vertices with a unique surviving parent candidate."""
            changed = True
            while changed:
                changed = False
                um = FULL & ~st["attached"]
                while um:
                    v = (um & -um).bit_length() - 1
                    um &= um - 1
                    avail = in_mask[v] & ~banned_in[v]
                    if avail == 0:
                        return False
                    if avail & (avail - 1) == 0 and st["attached"] >> (
                            avail.bit_length() - 1) & 1:
                        take(avail.bit_length() - 1, v, trail)
                        changed = True
            return True

        def bound() -> int:
            attached, internal = st["attached"], st["internal"]
            U = FULL & ~attached
            if U == 0:
                return n - max(internal.bit_count(), 1)
            demand = U.bit_count()
            im = internal
            while im and demand > 0:
                u = (im & -im).bit_length() - 1
                im &= im - 1
                demand -= (out_mask[u] & U & ~banned_out[u]).bit_count()
            extra = 0
            if demand > 0:
                caps = []
                om = FULL & ~internal
                while om:
                    u = (om & -om).bit_length() - 1
                    om &= om - 1
                    c = (out_mask[u] & U & ~banned_out[u]).bit_count()
                    if c:
                        caps.append(c)
                caps.sort(reverse=True)
                for c in caps:
                    if demand <= 0:
                        break
                    demand -= c
                    extra += 1
                if demand > 0:
                    return INFEASIBLE  # cannot span
            # layered reachability: layer d > 1 forces an internal vertex
            # in every earlier layer, all of them currently unattached
            frontier, rem, layers = attached, U, 0
            while rem:
                nxt = 0
                fm = frontier
                while fm:
                    u = (fm & -fm).bit_length() - 1
                    fm &= fm - 1
                    nxt |= out_mask[u] & ~banned_out[u]
                nxt &= rem
                if nxt == 0:
                    return INFEASIBLE  # unreachable vertex
                layers += 1
                rem &= ~nxt
                frontier = nxt
            extra = max(extra, layers - 1)
            return n - max(internal.bit_count() + extra, 1)

        def rec() -> None:
            nonlocal best, best_T
            if time.monotonic() > deadline:
                raise BudgetExhausted(best, best_T)
            trail: list = []
            if not propagate(trail):
                undo(trail)
                return
            attached = st["attached"]
            if attached == FULL:
                k = n - max(st["internal"].bit_count(), 1)
                if k > best:
                    best = k
                    best_T = OutBranching(n, root, tuple(parent))
                undo(trail)
                return
            if bound() <= best:
                undo(trail)
                return
            # branch vertex: frontier vertex with fewest parent candidates
            pick_v, pick_key, pick_cand = -1, None, 0
            um = FULL & ~attached
            while um:
                v = (um & -um).bit_length() - 1
                um &= um - 1
                avail = in_mask[v] & ~banned_in[v]
                cand = avail & attached
                if cand:
                    key = (avail.bit_count(), v)
                    if pick_key is None or key < pick_key:
                        pick_v, pick_key, pick_cand = v, key, cand
            if pick_v < 0:
                undo(trail)
                return
            v = pick_v
            ic = pick_cand & st["internal"]
            u = ((ic & -ic) if ic else (pick_cand & -pick_cand)).bit_length() - 1
            sub: list = []
            take(u, v, sub)
            rec()
            undo(sub)
            banned_in[v] |= 1 << u
            banned_out[u] |= 1 << v
            rec()
            banned_in[v] &= ~(1 << u)
            banned_out[u] &= ~(1 << v)
            undo(trail)

        rec()

    if best < 0:
        return 0, None
    assert best_T is not None and validate(D, best_T) is None
    return best, best_T


def exact_max_leaf_tree(D: Digraph, time_budget_ms: float = 60_000.0) -> int:
    """Exact maximum leaf count over out-trees of D (need not span).

    Uses the identity: the optimum equals the max over v of the spanning
    optimum on the subdigraph reachable from v.
    """
    best = 0
    for v in range(D.n):
        sub, _ = reachable_subdigraph(D, v)
        val, _ = exact_max_leaf_branching(sub, time_budget_ms)
        best = max(best, val)
    return best


def exact_vertex_separation(G: Graph) -> tuple[int, VertexOrdering]:
    """Exact vertex separation by subset DP; n <= 20.

    f(S) = min over v in S of max(f(S - v), |boundary(S)|), where the
    boundary of S is the set of its vertices with a neighbor outside S.
    """
    n = G.n
    if n > 20:
        raise ValueError(f"exact vertex separation limited to n <= 20, got {n}")
    if n == 0:
        return 0, VertexOrdering((), 0)
    nbr = [0] * n
    for e in G.edges:
        u, v = sorted(e)
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u

    full = (1 << n) - 1

    def boundary_size(S: int) -> int:
        comp = full & ~S
        b = 0
        s = S
        while s:
            v = (s & -s).bit_length() - 1
            s &= s - 1
            if nbr[v] & comp:
                b += 1
        return b

    INF = n + 1
    f = [INF] * (1 << n)
    choice = [-1] * (1 << n)
    f[0] = 0
    for S in range(1, 1 << n):
        bS = boundary_size(S)
        s = S
        while s:
            v = (s & -s).bit_length() - 1
            s &= s - 1
            val = max(f[S & ~(1 << v)], bS)
            if val < f[S] or (val == f[S] and (choice[S] == -1 or v < choice[S])):
                f[S] = val
                choice[S] = v
        # keep lowest-vertex choice among minimizers for determinism

    order: list[int] = []
    S = full
    while S:
        v = choice[S]
        order.append(v)
        S &= ~(1 << v)
    order.reverse()
    return f[full], VertexOrdering(tuple(order), f[full])


def exact_pathwidth(G: Graph) -> int:
    """Pathwidth equals vertex separation."""
    value, _ = exact_vertex_separation(G)
    return value
