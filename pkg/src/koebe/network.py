"""Electric networks: voltages, current flows, effective resistance.

A network is a connected multigraph with a positive conductance c_e per
edge (resistance r_e = 1/c_e).  Voltages are harmonic off the terminal
sets; the current flow of a voltage h is theta(xy) = c_xy (h(y) - h(x)),
so current runs from low to high voltage and the effective resistance
between terminal sets is the voltage difference per unit current after
the sets are glued.
"""

import json
import math

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import ValidationError, ComputationError

_DENSE_LIMIT = 2000


class Disconnected(ValidationError):
    pass


class SingularSystem(ComputationError):
    pass


class StrengthNotOne(ValidationError):
    pass


class NotACutset(ValidationError):
    def __init__(self, index, msg=None):
        self.index = index
        super().__init__(msg or f"cutset {index} does not separate the terminals")


class OverlappingCutsets(ValidationError):
    pass


class PathNotTerminating(ComputationError):
    pass


class Network:
    """Weighted multigraph; edges is a list of (u, v, conductance)."""

    def __init__(self, n, edges, check_connected=True):
        self.n = n
        es = []
        for (u, v, c) in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            c = float(c)
            if not (c > 0 and math.isfinite(c)):
                raise ValidationError(f"conductance {c} on edge ({u},{v})")
            es.append((u, v, c))
        self.edges = es
        self.m = len(es)
        self.incident = [[] for _ in range(n)]  # (edge_id, other endpoint)
        for i, (u, v, c) in enumerate(es):
            self.incident[u].append((i, v))
            self.incident[v].append((i, u))
        self.pi = np.zeros(n)
        for (u, v, c) in es:
            self.pi[u] += c
            self.pi[v] += c
        if check_connected and not self._connected():
            raise Disconnected("network is not connected")

    def _connected(self):
        if self.n == 1:
            return True
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            v = stack.pop()
            for (_, u) in self.incident[v]:
                if not seen[u]:
                    seen[u] = True
                    count += 1
                    stack.append(u)
        return count == self.n

    @classmethod
    def from_graph(cls, n, pairs, conductance=1.0):
        return cls(n, [(u, v, conductance) for (u, v) in pairs])

    @classmethod
    def from_map(cls, pmap, conductance=1.0):
        return cls(pmap.n, [(u, v, conductance) for (u, v, _, _) in pmap.edges()])

    def conductances(self):
        return np.array([c for (_, _, c) in self.edges])

    def resistances(self):
        return 1.0 / self.conductances()

    def laplacian(self):
        L = np.zeros((self.n, self.n))
        for (u, v, c) in self.edges:
            L[u, u] += c
            L[v, v] += c
            L[u, v] -= c
            L[v, u] -= c
        return L

    def laplacian_sparse(self):
        rows, cols, vals = [], [], []
        for (u, v, c) in self.edges:
            rows += [u, v, u, v]
            cols += [u, v, v, u]
            vals += [c, c, -c, -c]
        return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))

    def to_json(self):
        return {"n": self.n, "edges": [[u, v, c] for (u, v, c) in self.edges]}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["n"], [tuple(e) for e in doc["edges"]])

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))

    def __repr__(self):
        return f"Network(n={self.n}, m={self.m})"


class Voltage:
    def __init__(self, net, values, sources, sinks):
        self.net = net
        self.values = np.asarray(values, dtype=float)
        self.sources = frozenset(sources)
        self.sinks = frozenset(sinks)

    def __getitem__(self, v):
        return self.values[v]

    def harmonicity_residual(self):
        """Max |h(x) - weighted neighbor average| over interior vertices."""
        worst = 0.0
        terminals = self.sources | self.sinks
        for x in range(self.net.n):
            if x in terminals:
                continue
            acc = 0.0
            for (i, y) in self.net.incident[x]:
                acc += self.net.edges[i][2] * self.values[y]
            worst = max(worst, abs(self.values[x] - acc / self.net.pi[x]))
        return worst


class Flow:
    """Antisymmetric edge function; values[i] is the flow along edge i in
    its stored (u -> v) orientation."""

    def __init__(self, net, values, sources, sinks):
        self.net = net
        self.values = np.asarray(values, dtype=float)
        self.sources = frozenset(sources)
        self.sinks = frozenset(sinks)

    def value(self, u, v):
        """Flow along the directed edge (u, v), summed over parallels."""
        tot = 0.0
        for (i, w) in self.net.incident[u]:
            a, b, _ = self.net.edges[i]
            if w == v:
                tot += self.values[i] if (a, b) == (u, v) else -self.values[i]
        return tot

    def strength(self):
        out = 0.0
        for s in self.sources:
            for (i, w) in self.net.incident[s]:
                if w in self.sources:
                    continue
                a, b, _ = self.net.edges[i]
                out += self.values[i] if a == s else -self.values[i]
        return out

    def divergence(self):
        """Net outflow per vertex."""
        div = np.zeros(self.net.n)
        for i, (u, v, _) in enumerate(self.net.edges):
            div[u] += self.values[i]
            div[v] -= self.values[i]
        return div

    def node_law_residual(self):
        div = self.divergence()
        worst = 0.0
        for x in range(self.net.n):
            if x in self.sources or x in self.sinks:
                continue
            worst = max(worst, abs(div[x]))
        return worst


class ResistanceValue:
    """Effective resistance, possibly an infinity sentinel (never a float inf)."""

    def __init__(self, value, kind="plain", infinite=False):
        self.kind = kind
        self.infinite = bool(infinite)
        self.value = None if self.infinite else float(value)

    @classmethod
    def infinity(cls, kind="plain"):
        return cls(0.0, kind=kind, infinite=True)

    def __float__(self):
        if self.infinite:
            raise ComputationError("infinite resistance has no float value")
        return self.value

    def __repr__(self):
        return f"ResistanceValue(inf, {self.kind})" if self.infinite else \
            f"ResistanceValue({self.value:.12g}, {self.kind})"


# ---------------------------------------------------------------------------
# linear solves


def _solve_dirichlet(net, fixed):
    """Solve the harmonic system with the given fixed boundary values.

    fixed: dict vertex -> value.  Returns the full value array.
    """
    n = net.n
    free = [v for v in range(n) if v not in fixed]
    h = np.zeros(n)
    for v, val in fixed.items():
        h[v] = val
    if not free:
        return h
    index = {v: i for i, v in enumerate(free)}
    k = len(free)
    rhs = np.zeros(k)
    if n <= _DENSE_LIMIT:
        A = np.zeros((k, k))
        for v in free:
            i = index[v]
            A[i, i] = net.pi[v]
            for (e, u) in net.incident[v]:
                c = net.edges[e][2]
                if u in fixed:
                    rhs[i] += c * fixed[u]
                else:
                    A[i, index[u]] -= c
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from None
    else:
        rows, cols, vals = [], [], []
        for v in free:
            i = index[v]
            rows.append(i)
            cols.append(i)
            vals.append(net.pi[v])
            for (e, u) in net.incident[v]:
                c = net.edges[e][2]
                if u in fixed:
                    rhs[i] += c * fixed[u]
                else:
                    rows.append(i)
                    cols.append(index[u])
                    vals.append(-c)
        A = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(k, k))
        sol = scipy.sparse.linalg.spsolve(A, rhs)
    for v in free:
        h[v] = sol[index[v]]
    return h


def solve_voltage(net, sources, sinks, alpha=0.0, beta=1.0):
    """The unique voltage with h = alpha on sources and h = beta on sinks.

    alpha and beta may be scalars or per-vertex dicts.
    """
    A, Z = set(sources), set(sinks)
    if not A or not Z:
        raise ValidationError("source and sink sets must be nonempty")
    if A & Z:
        raise ValidationError("source and sink sets must be disjoint")
    fixed = {}
    for v in A:
        fixed[v] = alpha[v] if isinstance(alpha, dict) else float(alpha)
    for v in Z:
        fixed[v] = beta[v] if isinstance(beta, dict) else float(beta)
    h = _solve_dirichlet(net, fixed)
    return Voltage(net, h, A, Z)


def current_flow(voltage):
    """theta(xy) = c_xy (h(y) - h(x)): satisfies the node and cycle laws."""
    net = voltage.net
    h = voltage.values
    vals = np.array([c * (h[v] - h[u]) for (u, v, c) in net.edges])
    # current enters at the lower-voltage side
    lo = min(voltage.values[v] for v in voltage.sources | voltage.sinks)
    srcs = voltage.sources
    sinks = voltage.sinks
    if min(h[v] for v in sinks) < min(h[v] for v in srcs):
        srcs, sinks = sinks, srcs
    return Flow(net, vals, srcs, sinks)


def flow_energy(net, flow):
    vals = flow.values if isinstance(flow, Flow) else np.asarray(flow)
    return float(np.sum(vals * vals * net.resistances()))


def function_energy(net, h):
    vals = h.values if isinstance(h, Voltage) else np.asarray(h)
    return float(sum(c * (vals[u] - vals[v]) ** 2 for (u, v, c) in net.edges))


# ---------------------------------------------------------------------------
# gluing and reductions


def glue(net, group, check_connected=True):
    """Identify the vertices of `group` into one vertex; parallel edges are
    kept, edges inside the group (would-be loops) are dropped.

    Returns (network, mapping) where mapping[old] = new id.
    """
    group = set(group)
    if not group:
        raise ValidationError("empty glue set")
    mapping = np.zeros(net.n, dtype=int)
    target = min(group)
    nxt = 0
    for v in range(net.n):
        if v in group:
            mapping[v] = -1
        else:
            mapping[v] = nxt
            nxt += 1
    glued_id = nxt
    for v in range(net.n):
        if mapping[v] < 0:
            mapping[v] = glued_id
    edges = []
    for (u, v, c) in net.edges:
        a, b = mapping[u], mapping[v]
        if a != b:
            edges.append((int(a), int(b), c))
    return Network(nxt + 1, edges, check_connected=check_connected), mapping


def reduce_parallel(net):
    """Merge parallel edges; conductances add."""
    acc = {}
    for (u, v, c) in net.edges:
        key = (min(u, v), max(u, v))
        acc[key] = acc.get(key, 0.0) + c
    return Network(net.n, [(u, v, c) for (u, v), c in acc.items()])


def reduce_series(net, protected):
    """Repeatedly erase degree-2 vertices outside `protected`; the two
    incident resistances add.  Effective resistance between protected
    vertices is preserved.  Returns (network, mapping) with mapping[old]
    = new id (-1 for erased vertices).
    """
    protected = set(protected)
    edges = {i: e for i, e in enumerate(net.edges)}
    incident = {v: set() for v in range(net.n)}
    for i, (u, v, c) in edges.items():
        incident[u].add(i)
        incident[v].add(i)
    nxt_id = net.m
    changed = True
    alive = set(range(net.n))
    while changed:
        changed = False
        for w in list(alive):
            if w in protected or len(incident[w]) != 2:
                continue
            i, j = sorted(incident[w])
            u1, v1, c1 = edges[i]
            u2, v2, c2 = edges[j]
            a = u1 if v1 == w else v1
            b = u2 if v2 == w else v2
            if a == b or a == w or b == w:
                continue  # would create a loop
            r = 1.0 / c1 + 1.0 / c2
            for e in (i, j):
                for x in (edges[e][0], edges[e][1]):
                    incident[x].discard(e)
                del edges[e]
            k = nxt_id
            nxt_id += 1
            edges[k] = (a, b, 1.0 / r)
            incident[a].add(k)
            incident[b].add(k)
            alive.discard(w)
            changed = True
    mapping = np.full(net.n, -1, dtype=int)
    nxt = 0
    for v in range(net.n):
        if v in alive:
            mapping[v] = nxt
            nxt += 1
    new_edges = [(int(mapping[u]), int(mapping[v]), c) for (u, v, c) in edges.values()]
    return Network(nxt, new_edges), mapping


# ---------------------------------------------------------------------------
# effective resistance


def _glued_terminals(net, A, Z):
    A, Z = set(A), set(Z)
    if not A or not Z:
        raise ValidationError("terminal sets must be nonempty")
    if A & Z:
        raise ValidationError("terminal sets must be disjoint")
    g1, m1 = glue(net, A) if len(A) > 1 else (net, np.arange(net.n))
    a = int(m1[next(iter(A))])
    Z2 = {int(m1[z]) for z in Z}
    g2, m2 = glue(g1, Z2) if len(Z2) > 1 else (g1, np.arange(g1.n))
    z = int(m2[next(iter(Z2))])
    a = int(m2[a])
    return g2, a, z


def effective_resistance(net, A, Z, kind="plain"):
    """Effective resistance between vertex sets; sets are glued first."""
    if isinstance(A, int):
        A = {A}
    if isinstance(Z, int):
        Z = {Z}
    g, a, z = _glued_terminals(net, A, Z)
    h = solve_voltage(g, {a}, {z}, 0.0, 1.0)
    theta = current_flow(h)
    s = theta.strength()
    if s <= 0:
        raise SingularSystem("unit-voltage current has nonpositive strength")
    return ResistanceValue(1.0 / s, kind=kind)


def hitting_times(net, targets):
    """Expected hitting time of the target set from every vertex, for the
    weighted random walk p(x, y) = c_xy / pi_x."""
    T = set(targets) if not isinstance(targets, int) else {targets}
    if not T:
        raise ValidationError("target set must be nonempty")
    n = net.n
    free = [v for v in range(n) if v not in T]
    t = np.zeros(n)
    if not free:
        return t
    index = {v: i for i, v in enumerate(free)}
    k = len(free)
    A = np.zeros((k, k))
    rhs = np.ones(k)
    for v in free:
        i = index[v]
        A[i, i] = 1.0
        for (e, u) in net.incident[v]:
            p = net.edges[e][2] / net.pi[v]
            if u not in T:
                A[i, index[u]] -= p
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    for v in free:
        t[v] = sol[index[v]]
    return t


# ---------------------------------------------------------------------------
# bounds


def nash_williams_bound(net, A, Z, cutsets):
    """Lower bound on Reff(A <-> Z) from pairwise disjoint separating cutsets:
    sum over cutsets of 1 / (sum of conductances).

    Each cutset is a collection of edge indexes; every one is verified to
    separate A from Z.
    """
    if isinstance(A, int):
        A = {A}
    if isinstance(Z, int):
        Z = {Z}
    seen = set()
    for idx, cut in enumerate(cutsets):
        cut = set(cut)
        if cut & seen:
            raise OverlappingCutsets(f"cutset {idx} shares edges with an earlier one")
        seen |= cut
        if not _separates(net, A, Z, cut):
            raise NotACutset(idx)
    total = 0.0
    for cut in cutsets:
        total += 1.0 / sum(net.edges[e][2] for e in cut)
    return total


def _separates(net, A, Z, cut):
    blocked = set(cut)
    seen = set(A)
    stack = list(A)
    while stack:
        v = stack.pop()
        if v in Z:
            return False
        for (e, u) in net.incident[v]:
            if e in blocked or u in seen:
                continue
            seen.add(u)
            stack.append(u)
    return not (seen & set(Z))


# ---------------------------------------------------------------------------
# random-path flows


def _path_edges(net, path):
    """Resolve a vertex path to edge ids (first matching edge per hop)."""
    out = []
    for (x, y) in zip(path, path[1:]):
        eid = None
        for (i, w) in net.incident[x]:
            if w == y:
                eid = i
                break
        if eid is None:
            raise ValidationError(f"path uses a missing edge ({x},{y})")
        out.append((eid, x))
    return out


def random_path_flow(net, a, sinks, sampler=None, exact=None, samples=1000,
                     seed=0, step_cap=100000):
    """Unit flow from expected traversal counts of random a -> sink paths.

    Either `exact` (a list of (path, probability) pairs, probabilities
    summing to 1) or `sampler` (callable rng -> vertex path) must be given.
    With a sampler the flow is Monte-Carlo over `samples` draws.
    """
    sinks = set(sinks) if not isinstance(sinks, int) else {sinks}
    vals = np.zeros(net.m)

    def add(path, weight):
        if len(path) > step_cap:
            raise PathNotTerminating(f"path of length {len(path)} exceeds cap")
        if path[0] != a or path[-1] not in sinks:
            raise ValidationError("path must run from the source to a sink")
        for (eid, tail) in _path_edges(net, path):
            u, v, _ = net.edges[eid]
            vals[eid] += weight if u == tail else -weight

    if exact is not None:
        tot = sum(p for (_, p) in exact)
        if abs(tot - 1.0) > 1e-12:
            raise ValidationError("exact path probabilities must sum to 1")
        for (path, p) in exact:
            add(list(path), p)
        flow = Flow(net, vals, {a}, sinks)
        flow.samples = None
        return flow
    if sampler is None:
        raise ValidationError("need a sampler or an exact path distribution")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        add(list(sampler(rng)), 1.0 / samples)
    flow = Flow(net, vals, {a}, sinks)
    flow.samples = samples
    return flow


def boundary_resistance(family, indices):
    """Resistance to the glued boundary along an exhaustion.

    family: callable i -> (net, source_vertex, boundary_vertex_set).
    Returns a list of (i, ResistanceValue); the values are nondecreasing
    when the family is a genuine exhaustion.
    """
    out = []
    for i in indices:
        net, a, boundary = family(i)
        boundary = set(boundary) - {a}
        if not boundary:
            out.append((i, ResistanceValue.infinity(kind="to_boundary")))
            continue
        out.append((i, effective_resistance(net, {a}, boundary, kind="to_boundary")))
    return out
