"""Degree-reducing star-tree surgery and rooted-graph distributions.

Every edge of the input map is subdivided, and every vertex star is
replaced by a balanced binary tree over the subdividers, preserving their
cyclic order (so planarity survives).  Two extra leaves hang off each tree
root, which makes the edge count of the tree exactly twice the original
degree.  Marking every tree edge with that degree, and giving it
resistance 1/degree, flows transfer from the original map with at most a
4x energy loss.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError, ComputationError
from .planar import PlanarMap
from .network import Network, Flow


class ZeroDegreeRoot(ValidationError):
    pass


@dataclass
class MarkedMap:
    """Star-tree transform output: the new map plus per-edge markings."""

    map: PlanarMap
    markings: list          # per edge of map.edges(): degree of the tree root
    tree_root: list         # per edge: the original vertex owning the tree
    subdivider_of_edge: list  # original edge id -> subdivider vertex
    extras: list            # the two extra leaves per original vertex
    tree_edges: list        # (parent, child, root, leaf_lo, leaf_hi)
    source: PlanarMap

    def resistances(self):
        return [1.0 / m for m in self.markings]

    def network(self):
        """Network on the transformed map with conductance = marking."""
        return Network(self.map.n,
                       [(u, v, float(m)) for (u, v, _, _), m in
                        zip(self.map.edges(), self.markings)])

    def core_map(self):
        """The transform with the extra leaves removed (max degree 3)."""
        drop = set(self.extras)
        keep = [v for v in range(self.map.n) if v not in drop]
        relabel = {v: i for i, v in enumerate(keep)}
        rot = [[relabel[u] for u in self.map.rotations[v] if u not in drop]
               for v in keep]
        return PlanarMap(len(keep), rot)

    def to_json(self):
        doc = self.map.to_json()
        doc["markings"] = list(self.markings)
        return doc

    def dumps(self):
        return json.dumps(self.to_json())


def star_tree_transform(pmap):
    """Subdivide every edge and replace each vertex star by a balanced
    binary tree over its subdividers (cyclic order preserved), with two
    extra leaves at each root.  Returns a MarkedMap."""
    n = pmap.n
    edges = pmap.edges()
    m = len(edges)
    edge_id_of_dart = {}
    for i, (u, v, d, r) in enumerate(edges):
        edge_id_of_dart[d] = i
        edge_id_of_dart[r] = i
    sub_of_edge = [n + i for i in range(m)]
    next_id = n + m

    rotations = {v: None for v in range(n)}
    children = {}   # internal node -> (left, right); rotation set later
    parent_of = {}  # node -> parent within its tree (subdividers: per tree)
    tree_edges = []
    extras = []
    sub_parents = {w: [] for w in sub_of_edge}

    for v in range(n):
        leaves = []
        for s in range(pmap.degree(v)):
            leaves.append(sub_of_edge[edge_id_of_dart[pmap.dart(v, s)]])
        d = len(leaves)
        if d == 0:
            raise ValidationError("isolated vertex")

        local_edges = []  # (parent, child, lo, hi)

        def build(lo, hi):
            nonlocal next_id
            if hi - lo == 1:
                return leaves[lo]
            mid = lo + (hi - lo + 1) // 2
            x = next_id
            next_id += 1
            a = build(lo, mid)
            b = build(mid, hi)
            children[x] = (a, b)
            local_edges.append((x, a, lo, mid))
            local_edges.append((x, b, mid, hi))
            return x

        if d == 1:
            roots = [leaves[0]]
            local_edges.append((v, leaves[0], 0, 1))
        else:
            mid = (d + 1) // 2
            a = build(0, mid)
            b = build(mid, d)
            roots = [a, b]
            local_edges.append((v, a, 0, mid))
            local_edges.append((v, b, mid, d))
        x1, x2 = next_id, next_id + 1
        next_id += 2
        extras += [x1, x2]
        local_edges.append((v, x1, 0, 0))
        local_edges.append((v, x2, 0, 0))
        rotations[v] = roots + [x1, x2]
        rotations[x1] = [v]
        rotations[x2] = [v]
        for (p, c, lo, hi) in local_edges:
            tree_edges.append((p, c, v, lo, hi))
            if c in children:
                parent_of[c] = p
            elif c in sub_parents:
                sub_parents[c].append(p)

    for x, (a, b) in children.items():
        rotations[x] = [parent_of[x], a, b]
    for w, ps in sub_parents.items():
        if len(ps) != 2:
            raise ComputationError("subdivider not shared by two trees")
        rotations[w] = ps

    rot_list = [rotations[v] for v in range(next_id)]
    gstar = PlanarMap(next_id, rot_list)

    root_of_edge = {}
    for (p, c, v, lo, hi) in tree_edges:
        root_of_edge[(min(p, c), max(p, c))] = v
    markings = []
    roots = []
    for (u, v, _, _) in gstar.edges():
        rt = root_of_edge[(min(u, v), max(u, v))]
        roots.append(rt)
        markings.append(pmap.degree(rt))
    return MarkedMap(gstar, markings, roots, sub_of_edge, extras,
                     tree_edges, pmap)


def tree_edge_counts(marked):
    """Edges per tree; equals twice the root degree in the source map."""
    counts = {}
    for rt in marked.tree_root:
        counts[rt] = counts.get(rt, 0) + 1
    return counts


def transfer_flow(flow, marked):
    """Push a flow on the source map through the transform.

    For a tree edge below which the leaf subdividers w carry source-flow
    values theta(v, v_w), the transferred flow is their sum; its energy in
    the marked network (resistance 1/degree) is at most 4x the original.
    Returns a Flow on marked.network().
    """
    pmap = marked.source
    src_net = flow.net
    gstar = marked.map
    # theta(v -> u) per dart slot of the source map, using source edge order
    src_edges = pmap.edges()
    if src_net.m != len(src_edges):
        raise ValidationError("flow network does not match the source map")
    theta_out = {}  # (v, slot) -> flow out of v along that dart
    for i, (u, v, d, r) in enumerate(src_edges):
        a, b, _ = src_net.edges[i]
        if {a, b} != {u, v}:
            raise ValidationError("flow network edge order does not match the map")
        val = flow.values[i] if a == u else -flow.values[i]
        su = d - pmap._offset[u]
        sv = r - pmap._offset[v]
        theta_out[(u, su)] = val
        theta_out[(v, sv)] = -val

    # prefix sums of leaf flows per tree root
    prefix = {}
    for v in range(pmap.n):
        deg = pmap.degree(v)
        acc = [0.0]
        for s in range(deg):
            acc.append(acc[-1] + theta_out[(v, s)])
        prefix[v] = acc

    net = marked.network()
    index = {}
    for i, (u, v, _, _) in enumerate(gstar.edges()):
        index[(min(u, v), max(u, v))] = i
    vals = [0.0] * net.m
    for (p, c, v, lo, hi) in marked.tree_edges:
        i = index[(min(p, c), max(p, c))]
        a, _, _ = net.edges[i]
        flow_pc = prefix[v][hi] - prefix[v][lo]
        vals[i] = flow_pc if a == p else -flow_pc
    return Flow(net, vals, flow.sources, flow.sinks)


# ---------------------------------------------------------------------------
# rooted-graph distributions


def _rooted_canonical(n, adj, root):
    """Canonical certificate of a rooted graph via color refinement with
    individualization on ties.  Exact for the small graphs used here."""
    colors = [(v == root, len(adj[v])) for v in range(n)]

    def refine(cols):
        cols = list(cols)
        while True:
            sig = [(cols[v], tuple(sorted(cols[u] for u in adj[v])))
                   for v in range(n)]
            palette = {s: i for i, s in enumerate(sorted(set(sig)))}
            new = [palette[s] for s in sig]
            if len(set(new)) == len(set(cols)) and _same_partition(cols, new, n):
                return new
            cols = new

    def _same_partition(a, b, n):
        seen = {}
        for v in range(n):
            if a[v] in seen and seen[a[v]] != b[v]:
                return False
            seen[a[v]] = b[v]
        return True

    def cert_from(cols):
        cols = refine(cols)
        classes = {}
        for v in range(n):
            classes.setdefault(cols[v], []).append(v)
        ambiguous = [c for c, vs in classes.items() if len(vs) > 1]
        if not ambiguous:
            order = sorted(range(n), key=lambda v: cols[v])
            label = {v: i for i, v in enumerate(order)}
            rows = tuple(tuple(sorted(label[u] for u in adj[v])) for v in order)
            return (label[root], rows)
        target = min(ambiguous, key=lambda c: (len(classes[c]), c))
        best = None
        for w in classes[target]:
            forced = [(c, 1 if u == w else 0) for u, c in enumerate(cols)]
            sub = cert_from(forced)
            if best is None or sub < best:
                best = sub
        return best

    return (n, cert_from(colors))


def _graph_key(n, edges, root):
    adj = [[] for _ in range(n)]
    for (u, v) in edges:
        adj[u].append(v)
        adj[v].append(u)
    return _rooted_canonical(n, adj, root)


class RootedDistribution:
    """Exact probability table over rooted-isomorphism classes of finite
    graphs; all arithmetic in Fractions."""

    def __init__(self, items):
        """items: iterable of ((n, edges, root), probability)."""
        self._classes = {}
        total = Fraction(0)
        for (graph, p) in items:
            p = Fraction(p)
            if p < 0:
                raise ValidationError("negative probability")
            if p == 0:
                continue
            n, edges, root = graph
            key = _graph_key(n, edges, root)
            if key in self._classes:
                rep, q = self._classes[key]
                self._classes[key] = (rep, q + p)
            else:
                self._classes[key] = ((n, list(edges), root), p)
            total += p
        if total != 1:
            raise ValidationError(f"probabilities sum to {total}, not 1")

    @classmethod
    def uniform_root(cls, n, edges):
        return cls((((n, edges, v), Fraction(1, n)) for v in range(n)))

    def items(self):
        return [(rep, p) for (rep, p) in self._classes.values()]

    def support_size(self):
        return len(self._classes)

    def __eq__(self, other):
        if not isinstance(other, RootedDistribution):
            return NotImplemented
        a = {k: p for k, (rep, p) in self._classes.items()}
        b = {k: p for k, (rep, p) in other._classes.items()}
        return a == b

    def __hash__(self):
        return hash(frozenset((k, p) for k, (rep, p) in self._classes.items()))

    def expected_root_degree(self):
        out = Fraction(0)
        for ((n, edges, root), p) in self.items():
            deg = sum(1 for (u, v) in edges if root in (u, v))
            out += p * deg
        return out


def degree_bias(dist):
    """Reweight by deg(root) / E[deg(root)]."""
    mean = dist.expected_root_degree()
    if mean == 0:
        raise ZeroDegreeRoot("all roots have degree zero")
    items = []
    for ((n, edges, root), p) in dist.items():
        deg = sum(1 for (u, v) in edges if root in (u, v))
        items.append(((n, edges, root), p * Fraction(deg) / mean))
    return RootedDistribution(items)


def degree_unbias(dist):
    """Reweight by (1/deg(root)) / E[1/deg(root)]."""
    inv_mean = Fraction(0)
    for ((n, edges, root), p) in dist.items():
        deg = sum(1 for (u, v) in edges if root in (u, v))
        if deg == 0:
            raise ZeroDegreeRoot("a support class has a degree-zero root")
        inv_mean += p / deg
    items = []
    for ((n, edges, root), p) in dist.items():
        deg = sum(1 for (u, v) in edges if root in (u, v))
        items.append(((n, edges, root), (p / deg) / inv_mean))
    return RootedDistribution(items)


def one_step(dist):
    """Move the root to a uniformly random neighbor."""
    items = []
    for ((n, edges, root), p) in dist.items():
        nbrs = []
        for (u, v) in edges:
            if u == root:
                nbrs.append(v)
            elif v == root:
                nbrs.append(u)
        if not nbrs:
            raise ZeroDegreeRoot("root has no neighbors to walk to")
        share = p / len(nbrs)
        for u in nbrs:
            items.append(((n, edges, u), share))
    return RootedDistribution(items)


def stationarity_check(dist):
    """True when one random-walk step leaves the distribution unchanged
    (exact comparison)."""
    return one_step(dist) == dist


def truncate_degrees(graph, k):
    """Remove every edge incident to a vertex of degree >= k; the vertex
    set is unchanged."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    n, edges = graph
    deg = [0] * n
    for (u, v) in edges:
        deg[u] += 1
        deg[v] += 1
    kept = [(u, v) for (u, v) in edges if deg[u] < k and deg[v] < k]
    return (n, kept)
