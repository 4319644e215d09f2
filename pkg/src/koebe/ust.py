"""Exact uniform-spanning-tree distributions on small graphs.

Trees are enumerated by include/exclude backtracking over the edge list
(with connectivity pruning), so parallel edges from contractions are
handled naturally.  Counts are cross-checked against an exact
integer-arithmetic determinant of the reduced Laplacian.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError, ComputationError
from . import network as _net
from .planar import dual_map


class TooLarge(ValidationError):
    pass


class ZeroProbabilityConditioning(ValidationError):
    pass


def _as_graph(g):
    """Accept a Network or an (n, edge_pair_list) tuple."""
    if isinstance(g, _net.Network):
        return g.n, [(u, v) for (u, v, _) in g.edges]
    n, edges = g
    return n, [(u, v) for (u, v) in edges]


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.p[ra] = rb
        return True

    def copy(self):
        d = _DSU(0)
        d.p = self.p[:]
        return d


@dataclass
class TreeDistribution:
    """All spanning trees of a small graph, as sets of edge indexes."""

    n: int
    edges: list           # [(u, v), ...]
    trees: list           # [frozenset(edge ids), ...]
    count: int

    def probability(self):
        return Fraction(1, self.count)

    def containing(self, edge_id):
        return [t for t in self.trees if edge_id in t]


def matrix_tree_count(g):
    """Number of spanning trees via the reduced Laplacian determinant,
    computed in exact integer arithmetic (fraction-free elimination)."""
    n, edges = _as_graph(g)
    if n == 1:
        return 1
    k = n - 1
    L = [[0] * k for _ in range(k)]
    for (u, v) in edges:
        if u == v:
            continue
        if u < k:
            L[u][u] += 1
        if v < k:
            L[v][v] += 1
        if u < k and v < k:
            L[u][v] -= 1
            L[v][u] -= 1
    # Bareiss fraction-free elimination
    prev = 1
    sign = 1
    for i in range(k):
        if L[i][i] == 0:
            swap = next((j for j in range(i + 1, k) if L[j][i] != 0), None)
            if swap is None:
                return 0
            L[i], L[swap] = L[swap], L[i]
            sign = -sign
        for j in range(i + 1, k):
            for c in range(i + 1, k):
                L[j][c] = (L[j][c] * L[i][i] - L[j][i] * L[i][c]) // prev
            L[j][i] = 0
        prev = L[i][i]
    return sign * L[k - 1][k - 1]


def enumerate_spanning_trees(g, max_edges=24, step_budget=20_000_000):
    """All spanning trees, cross-checked against the matrix-tree count."""
    n, edges = _as_graph(g)
    m = len(edges)
    if m > max_edges:
        raise TooLarge(f"{m} edges exceeds the enumeration budget of {max_edges}")
    simple = [(u, v) for (u, v) in edges if u != v]
    if len({_r for e in simple for _r in e} | set(range(n))) != n:
        raise ValidationError("isolated vertex")
    trees = []
    steps = [0]

    def connectable(dsu, i):
        # can the remaining edges i.. still connect everything?
        probe = dsu.copy()
        comps = len({probe.find(v) for v in range(n)})
        for j in range(i, m):
            u, v = edges[j]
            if u != v and probe.union(u, v):
                comps -= 1
                if comps == 1:
                    return True
        return comps == 1

    def recurse(i, dsu, chosen, comps):
        steps[0] += 1
        if steps[0] > step_budget:
            raise ComputationError("enumeration step budget exhausted")
        if comps == 1:
            trees.append(frozenset(chosen))
            return
        if i == m:
            return
        u, v = edges[i]
        # include edge i
        if u != v and dsu.find(u) != dsu.find(v):
            d2 = dsu.copy()
            d2.union(u, v)
            chosen.append(i)
            recurse(i + 1, d2, chosen, comps - 1)
            chosen.pop()
        # exclude edge i
        if connectable(dsu, i + 1):
            recurse(i + 1, dsu, chosen, comps)

    recurse(0, _DSU(n), [], n)
    expected = matrix_tree_count(g)
    if len(trees) != expected:
        raise ComputationError(
            f"enumeration found {len(trees)} trees, determinant says {expected}")
    return TreeDistribution(n, edges, trees, len(trees))


def edge_probability(g, edge_id, dist=None):
    """P(edge in uniform spanning tree), exact.  Equals the effective
    resistance between its endpoints for unit conductances."""
    if dist is None:
        dist = enumerate_spanning_trees(g)
    if dist.count == 0:
        raise ValidationError("graph has no spanning tree")
    k = sum(1 for t in dist.trees if edge_id in t)
    return Fraction(k, dist.count)


def _contract(n, edges, contract_ids, delete_ids):
    """(G - delete)/contract, keeping original edge ids for the survivors."""
    dsu = _DSU(n)
    for i in contract_ids:
        u, v = edges[i]
        dsu.union(u, v)
    roots = sorted({dsu.find(v) for v in range(n)})
    relabel = {r: i for i, r in enumerate(roots)}
    new_edges = []
    kept_ids = []
    for i, (u, v) in enumerate(edges):
        if i in contract_ids or i in delete_ids:
            continue
        a, b = relabel[dsu.find(u)], relabel[dsu.find(v)]
        if a == b:
            continue  # loop: never in a spanning tree
        new_edges.append((a, b))
        kept_ids.append(i)
    return len(roots), new_edges, kept_ids


def spatial_markov_check(g, A, B, dist=None):
    """Conditioning the UST on containing A and avoiding B equals A union a
    UST of the contracted-and-deleted graph; verified exactly.

    Raises ZeroProbabilityConditioning when the event is impossible.
    Returns True when the two distributions coincide."""
    n, edges = _as_graph(g)
    A, B = set(A), set(B)
    if A & B:
        raise ValidationError("A and B overlap")
    if dist is None:
        dist = enumerate_spanning_trees((n, edges))
    conditioned = [t for t in dist.trees if A <= t and not (B & t)]
    if not conditioned:
        raise ZeroProbabilityConditioning(
            "conditioning event has zero probability")
    n2, edges2, kept = _contract(n, edges, A, B)
    if n2 > 1:
        sub = enumerate_spanning_trees((n2, [edges2[k] for k in range(len(edges2))]))
        rebuilt = {frozenset(A | {kept[i] for i in t}) for t in sub.trees}
        counts_match = len(sub.trees) == len(conditioned)
    else:
        rebuilt = {frozenset(A)}
        counts_match = len(conditioned) == 1
    return counts_match and set(conditioned) == rebuilt


# ---------------------------------------------------------------------------
# planar duality


def dual_tree(pmap, tree_edge_ids, dual_pair=None):
    """Complementary dual tree: e in t  iff  dual(e) not in dual(t).

    tree_edge_ids index pmap.edges().  Returns (dual_map, dual_tree_ids);
    the result is verified to be a spanning tree of the dual."""
    if dual_pair is None:
        dual_pair = dual_map(pmap)
    dual, bij = dual_pair
    t = set(tree_edge_ids)
    dual_ids = frozenset(bij[i] for i in range(pmap.edge_count) if i not in t)
    if not _is_spanning_tree(dual.n, [(u, v) for (u, v, _, _) in dual.edges()],
                             dual_ids):
        raise ComputationError("complement does not dualize to a spanning tree")
    return dual, dual_ids


def _is_spanning_tree(n, edges, ids):
    if len(ids) != n - 1:
        return False
    dsu = _DSU(n)
    for i in ids:
        u, v = edges[i]
        if u == v or not dsu.union(u, v):
            return False
    return True


# ---------------------------------------------------------------------------
# free/wired marginals along exhaustions


def usf_edge_marginals(family, depths):
    """Free and wired marginals of a fixed edge along an exhaustion.

    family: callable depth -> (net, x, y, boundary_vertex_set); the edge
    {x, y} must lie inside the smallest ball.  The free marginal at depth d
    is Reff(x <-> y) in the ball; the wired one glues the boundary first.
    Returns (free_list, wired_list).
    """
    free, wired = [], []
    for d in depths:
        net, x, y, boundary = family(d)
        free.append(float(_net.effective_resistance(net, {x}, {y}, kind="free")))
        boundary = set(boundary) - {x, y}
        if boundary:
            g, mapping = _net.glue(net, boundary)
            gx, gy = int(mapping[x]), int(mapping[y])
            wired.append(float(_net.effective_resistance(g, {gx}, {gy}, kind="wired")))
        else:
            wired.append(free[-1])
    return free, wired


def wired_triangle_bound_check(net, A, B, z):
    """The wired resistance between two finite sets is at most three times
    the larger of the resistances from each set to the other joined with
    the boundary vertex z (standing in for infinity).

    Returns (holds, lhs, rhs)."""
    A, B = set(A), set(B)
    lhs = float(_net.effective_resistance(net, A, B, kind="wired"))
    ra = float(_net.effective_resistance(net, A, B | {z}))
    rb = float(_net.effective_resistance(net, B, A | {z}))
    rhs = 3.0 * max(ra, rb)
    return lhs <= rhs + 1e-12, lhs, rhs
