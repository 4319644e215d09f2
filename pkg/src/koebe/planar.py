"""Planar maps as rotation systems.

A planar map is a graph together with a cyclic clockwise order of the
neighbors of every vertex.  Faces are traced combinatorially: the directed
edge (x, v) is followed by (v, y) where y is the successor of x in the
rotation at v.  A rotation system is accepted as planar exactly when the
face count satisfies n - m + f = 2.

Darts (directed edge slots) are indexed by (vertex, slot); parallel edges
are supported behind the ``multigraph`` flag via an explicit dart pairing.
"""

import json
import math
from dataclasses import dataclass

from .errors import ValidationError


class AsymmetricRotation(ValidationError):
    pass


class NotSimple(ValidationError):
    pass


class Disconnected(ValidationError):
    pass


class NonPlanarEulerViolation(ValidationError):
    pass


class NotATriangulation(ValidationError):
    pass


@dataclass(frozen=True)
class Face:
    """A face as the cyclic sequence of directed edges bounding it."""

    directed_edges: tuple  # ((u, v), ...) rotated so the smallest dart is first
    dart_ids: tuple

    @property
    def degree(self):
        return len(self.directed_edges)

    @property
    def vertices(self):
        return tuple(e[0] for e in self.directed_edges)


class PlanarMap:
    """Immutable rotation-system planar map.

    rotations[v] lists the neighbors of v in clockwise order.  ``rev`` maps
    every dart to its reversal; for simple maps it is derived from the
    rotations, for multigraphs it may be supplied explicitly (parallel
    occurrences otherwise pair in anti-cyclic order, the convention under
    which parallel edges bound consecutive faces).
    """

    def __init__(self, n, rotations, outer=None, multigraph=False, rev=None,
                 clockwise=True, validate=True):
        if n <= 0:
            raise ValidationError("vertex count must be positive")
        if len(rotations) != n:
            raise ValidationError("one rotation per vertex required")
        rot = []
        for v in range(n):
            seq = list(rotations[v])
            if not clockwise:
                seq = seq[::-1]
            for u in seq:
                if not (0 <= u < n):
                    raise ValidationError(f"neighbor id {u} out of range at vertex {v}")
            rot.append(tuple(seq))
        self.n = n
        self.rotations = tuple(rot)
        self.multigraph = bool(multigraph)
        self.outer = tuple(outer) if outer is not None else None

        # dart layout: dart id = offset[v] + slot
        self._offset = [0] * (n + 1)
        for v in range(n):
            self._offset[v + 1] = self._offset[v] + len(rot[v])
        self.dart_count = self._offset[n]
        self._dart_head = [0] * self.dart_count  # neighbor pointed to
        self._dart_tail = [0] * self.dart_count
        for v in range(n):
            base = self._offset[v]
            for s, u in enumerate(rot[v]):
                self._dart_head[base + s] = u
                self._dart_tail[base + s] = v

        if rev is not None:
            self.rev = list(rev)
            self._check_rev()
        else:
            self.rev = self._pair_darts()
        self._faces = None
        if validate:
            self._validate()

    # -- construction helpers ------------------------------------------------

    def dart(self, v, slot):
        return self._offset[v] + slot

    def dart_endpoints(self, d):
        return self._dart_tail[d], self._dart_head[d]

    def degree(self, v):
        return self._offset[v + 1] - self._offset[v]

    def _pair_darts(self):
        n = self.n
        if not self.multigraph:
            slot_of = [dict() for _ in range(n)]
            for v in range(n):
                for s, u in enumerate(self.rotations[v]):
                    if u == v:
                        raise NotSimple(f"self-loop at vertex {v}")
                    if u in slot_of[v]:
                        raise NotSimple(f"repeated neighbor {u} at vertex {v}")
                    slot_of[v][u] = s
            rev = [0] * self.dart_count
            for v in range(n):
                for s, u in enumerate(self.rotations[v]):
                    if v not in slot_of[u]:
                        raise AsymmetricRotation(
                            f"{u} listed at {v} but {v} missing at {u}")
                    rev[self.dart(v, s)] = self.dart(u, slot_of[u][v])
            return rev
        # multigraph: k-th occurrence of u at v pairs with the
        # (count-1-k)-th occurrence of v at u
        occ = {}
        for v in range(n):
            for s, u in enumerate(self.rotations[v]):
                if u == v:
                    raise NotSimple(
                        "self-loops in a multigraph need an explicit dart pairing")
                occ.setdefault((v, u), []).append(self.dart(v, s))
        rev = [0] * self.dart_count
        for (v, u), darts in occ.items():
            back = occ.get((u, v))
            if back is None or len(back) != len(darts):
                raise AsymmetricRotation(
                    f"occurrence counts of {u} at {v} and {v} at {u} differ")
            for k, d in enumerate(darts):
                rev[d] = back[len(back) - 1 - k]
        return rev

    def _check_rev(self):
        if len(self.rev) != self.dart_count:
            raise ValidationError("dart pairing has wrong length")
        for d in range(self.dart_count):
            r = self.rev[d]
            if not (0 <= r < self.dart_count) or self.rev[r] != d:
                raise ValidationError("dart pairing is not an involution")
            if self._dart_head[d] != self._dart_tail[r] or \
               self._dart_tail[d] != self._dart_head[r]:
                raise ValidationError("dart pairing does not reverse endpoints")

    def _validate(self):
        n = self.n
        if self.dart_count == 0 and n > 1:
            raise Disconnected("no edges")
        # connectivity
        seen = [False] * n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            v = stack.pop()
            for u in self.rotations[v]:
                if not seen[u]:
                    seen[u] = True
                    count += 1
                    stack.append(u)
        if count != n:
            raise Disconnected(f"{n - count} vertices unreachable from 0")
        # Euler planarity witness
        m = self.dart_count // 2
        f = len(self.faces())
        if n - m + f != 2:
            raise NonPlanarEulerViolation(
                f"n - m + f = {n} - {m} + {f} = {n - m + f} != 2")

    # -- faces ---------------------------------------------------------------

    def next_dart(self, d):
        """Successor of dart d along its face."""
        r = self.rev[d]
        v = self._dart_tail[r]
        s = r - self._offset[v]
        deg = self.degree(v)
        return self._offset[v] + (s + 1) % deg

    def faces(self):
        """All faces; every dart belongs to exactly one.  Deterministic order
        by smallest contained dart."""
        if self._faces is not None:
            return self._faces
        seen = [False] * self.dart_count
        out = []
        for d0 in range(self.dart_count):
            if seen[d0]:
                continue
            cyc = []
            d = d0
            while not seen[d]:
                seen[d] = True
                cyc.append(d)
                d = self.next_dart(d)
            edges = tuple((self._dart_tail[d], self._dart_head[d]) for d in cyc)
            out.append(Face(directed_edges=edges, dart_ids=tuple(cyc)))
        self._faces = out
        return out

    def face_of_dart(self):
        """dart id -> face index."""
        lookup = [0] * self.dart_count
        for i, f in enumerate(self.faces()):
            for d in f.dart_ids:
                lookup[d] = i
        return lookup

    # -- edges ---------------------------------------------------------------

    def edges(self):
        """Undirected edges as (u, v, dart, rev_dart), ordered by smaller dart."""
        out = []
        for d in range(self.dart_count):
            r = self.rev[d]
            if d < r:
                out.append((self._dart_tail[d], self._dart_head[d], d, r))
        return out

    @property
    def edge_count(self):
        return self.dart_count // 2

    def has_edge(self, u, v):
        return v in self.rotations[u]

    def neighbors(self, v):
        return self.rotations[v]

    # -- serialization -------------------------------------------------------

    def to_json(self):
        doc = {"n": self.n, "rotations": [list(r) for r in self.rotations]}
        if self.outer is not None:
            doc["outer"] = list(self.outer)
        if self.multigraph:
            doc["multigraph"] = True
        return doc

    @classmethod
    def from_json(cls, doc):
        return cls(doc["n"], doc["rotations"], outer=doc.get("outer"),
                   multigraph=doc.get("multigraph", False))

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))

    def __repr__(self):
        return f"PlanarMap(n={self.n}, m={self.edge_count})"


def build_map(n, rotations, outer=None, multigraph=False, clockwise=True):
    """Validate a rotation system and return the map.

    Raises AsymmetricRotation, NotSimple, Disconnected or
    NonPlanarEulerViolation when the input is not a planar rotation system.
    """
    return PlanarMap(n, rotations, outer=outer, multigraph=multigraph,
                     clockwise=clockwise)


def trace_faces(pmap):
    return pmap.faces()


@dataclass(frozen=True)
class Triangulation:
    """A planar map all of whose faces are triangles, with a designated outer face."""

    map: PlanarMap
    outer_face_id: int

    def __post_init__(self):
        faces = self.map.faces()
        bad = [f.degree for f in faces if f.degree != 3]
        if bad:
            raise NotATriangulation(f"faces of degree {sorted(set(bad))} present")
        n = self.map.n
        if len(faces) != 2 * n - 4:
            raise NotATriangulation(
                f"{len(faces)} faces but a triangulation on {n} vertices has {2 * n - 4}")
        if not (0 <= self.outer_face_id < len(faces)):
            raise NotATriangulation("outer face index out of range")

    @property
    def outer_vertices(self):
        return self.map.faces()[self.outer_face_id].vertices

    def inner_faces(self):
        faces = self.map.faces()
        return [f for i, f in enumerate(faces) if i != self.outer_face_id]


# ---------------------------------------------------------------------------
# face surgery


def _insert_after(seq, anchor, new):
    """Insert `new` right after `anchor` in a rotation list."""
    i = seq.index(anchor)
    seq.insert(i + 1, new)


def _star_into(rot, verts, center):
    """Wire a fresh vertex `center` to the face boundary `verts` (face order),
    mutating the rotation lists."""
    rot.append(list(reversed(verts)))
    for j in range(len(verts)):
        v = verts[j]
        prev = verts[j - 1]
        _insert_after(rot[v], prev, center)


def star_face(pmap, face_id):
    """Add one vertex inside the given face, joined to its boundary in
    cyclic order.  Returns (new_map, new_vertex_id)."""
    face = pmap.faces()[face_id]
    rot = [list(r) for r in pmap.rotations]
    c = pmap.n
    _star_into(rot, list(face.vertices), c)
    return PlanarMap(pmap.n + 1, rot, outer=pmap.outer,
                     multigraph=pmap.multigraph), c


def triangulate_star(pmap, exclude_face=None):
    """Add one vertex inside every face of degree > 3 and join it to the
    face boundary in cyclic order.

    exclude_face: optional face index left untouched (kept as outer face).
    Returns (new_map, new_vertex_ids).  Deleting the new vertices recovers
    the input map.
    """
    faces = pmap.faces()
    rot = [list(r) for r in pmap.rotations]
    new_ids = []
    nxt = pmap.n
    for i, face in enumerate(faces):
        if i == exclude_face or face.degree <= 3:
            continue
        c = nxt
        nxt += 1
        new_ids.append(c)
        _star_into(rot, list(face.vertices), c)
    return PlanarMap(nxt, rot, outer=pmap.outer, multigraph=pmap.multigraph), new_ids


def _zigzag_chords(k):
    """Chord index pairs triangulating a k-gon in zigzag order.

    Each chord cuts an ear off the remaining polygon, alternating ends:
    (0,2), (2,k-1), (k-1,3), (3,k-2), ...
    """
    chords = []
    lo, hi = 2, k  # polygon currently 0-indexed [lo-2?]: track explicit list instead
    poly = list(range(k))
    left = True
    while len(poly) > 3:
        if left:
            # cut ear at poly[1]
            chords.append((poly[0], poly[2]))
            poly.pop(1)
            poly.append(poly.pop(0))  # rotate so the new edge is at the end
        else:
            chords.append((poly[-2], poly[0]))
            poly.pop(-1)
        left = not left
    return chords


def _cut_ear(rot, x, y, z):
    """Add chord {x, z} cutting the ear x->y->z off a face."""
    _insert_after(rot[x], _pred_in_face(rot, x, y), z)
    _insert_after(rot[z], y, x)


def _pred_in_face(rot, x, y):
    """Neighbor w of x such that succ(w) = y in the rotation at x."""
    seq = rot[x]
    i = seq.index(y)
    return seq[i - 1]


def _face_has_chord(pmap, verts):
    vs = list(verts)
    k = len(vs)
    if len(set(vs)) != k:
        return True
    vset = set(vs)
    for i, v in enumerate(vs):
        for u in pmap.rotations[v]:
            if u in vset:
                j = vs.index(u)
                if abs(i - j) not in (1, k - 1):
                    return True
    return False


def triangulate_zigzag(pmap, exclude_face=None):
    """Triangulate faces by zigzag diagonals; faces with a chord get an
    inner cycle first so the result stays simple.  Max degree at most
    triples.  The excluded face (default: none) is left alone.
    """
    faces = pmap.faces()
    rot = [list(r) for r in pmap.rotations]
    nxt = pmap.n

    def cut_zigzag(verts):
        # verts: current polygon in face order; all chords are ear cuts
        poly = list(verts)
        left = True
        while len(poly) > 3:
            if left:
                x, y, z = poly[0], poly[1], poly[2]
                _cut_ear(rot, x, y, z)
                poly.pop(1)
                poly.append(poly.pop(0))
            else:
                x, y, z = poly[-3], poly[-2], poly[-1]
                _cut_ear(rot, x, y, z)
                poly.pop(-2)
            left = not left

    for i, face in enumerate(faces):
        if i == exclude_face or face.degree <= 3:
            continue
        verts = list(face.vertices)
        k = len(verts)
        if not _face_has_chord(pmap, verts):
            cut_zigzag(verts)
            continue
        # inner cycle u_1..u_k, u_i joined to v_i and v_{i+1}
        inner = list(range(nxt, nxt + k))
        nxt += k
        for j in range(k):
            u_prev = inner[j - 1]
            u_next = inner[(j + 1) % k]
            v_j = verts[j]
            v_next = verts[(j + 1) % k]
            rot.append([u_prev, u_next, v_next, v_j])
        for j in range(k):
            v = verts[j]
            prev = verts[j - 1]
            anchor = _pred_in_face(rot, v, verts[(j + 1) % k])
            # insert u_{j-1}, u_j between v_{j-1} and v_{j+1}
            idx = rot[v].index(anchor)
            rot[v][idx + 1:idx + 1] = [inner[j - 1], inner[j]]
        cut_zigzag(inner)

    return PlanarMap(nxt, rot, outer=pmap.outer, multigraph=pmap.multigraph)


# ---------------------------------------------------------------------------
# duality


def dual_map(pmap):
    """The dual map: one vertex per face, one edge crossing each primal edge.

    Returns (dual, primal_to_dual) where primal_to_dual maps a primal edge
    index (position in pmap.edges()) to a dual edge index.  The dual is a
    multigraph whenever two faces share several edges.
    """
    faces = pmap.faces()
    face_of = pmap.face_of_dart()
    nf = len(faces)
    rotations = []
    # dual dart for primal dart d: sits at face_of[d], points to face_of[rev d];
    # slot = position of d in its face cycle
    dart_index = {}
    for i, f in enumerate(faces):
        row = []
        for s, d in enumerate(f.dart_ids):
            row.append(face_of[pmap.rev[d]])
            dart_index[d] = (i, s)
        rotations.append(row)
    offsets = [0] * (nf + 1)
    for i in range(nf):
        offsets[i + 1] = offsets[i] + len(rotations[i])
    rev = [0] * offsets[nf]
    for d in range(pmap.dart_count):
        i, s = dart_index[d]
        j, t = dart_index[pmap.rev[d]]
        rev[offsets[i] + s] = offsets[j] + t
    multigraph = True
    dual = PlanarMap(nf, rotations, multigraph=multigraph, rev=rev)

    # edge bijection
    primal_edges = pmap.edges()
    dual_edge_of_dart = {}
    for k, (_, _, d, r) in enumerate(dual.edges()):
        dual_edge_of_dart[d] = k
        dual_edge_of_dart[r] = k
    primal_to_dual = []
    for (_, _, d, r) in primal_edges:
        i, s = dart_index[d]
        primal_to_dual.append(dual_edge_of_dart[offsets[i] + s])
    return dual, primal_to_dual


# ---------------------------------------------------------------------------
# canonical form / isomorphism


def canonical_form(pmap):
    """Canonical certificate of a planar map up to isomorphism and reflection.

    BFS dart relabeling from every starting dart, in both orientations;
    the lexicographically smallest encoding is the certificate.
    """
    certs = []
    for mirror in (False, True):
        if not mirror:
            probe = pmap
        else:
            rot = tuple(tuple(reversed(r)) for r in pmap.rotations)
            # transform the dart pairing instead of re-deriving it
            def mirrored(d):
                v = pmap._dart_tail[d]
                s = d - pmap._offset[v]
                return pmap._offset[v] + pmap.degree(v) - 1 - s
            rev = [0] * pmap.dart_count
            for d in range(pmap.dart_count):
                rev[mirrored(d)] = mirrored(pmap.rev[d])
            probe = PlanarMap(pmap.n, rot, multigraph=pmap.multigraph,
                              rev=rev, validate=False)
        for d0 in range(probe.dart_count):
            certs.append(_bfs_encoding(probe, d0))
    return min(certs)


def _bfs_encoding(pmap, d0):
    order = {}  # vertex -> new label
    enc = []
    v0, _ = pmap.dart_endpoints(d0)
    order[v0] = 0
    first_dart = {v0: d0}
    queue = [v0]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        start = first_dart[v]
        s0 = start - pmap._offset[v]
        deg = pmap.degree(v)
        row = []
        for k in range(deg):
            d = pmap._offset[v] + (s0 + k) % deg
            u = pmap._dart_head[d]
            if u not in order:
                order[u] = len(order)
                first_dart[u] = pmap.rev[d]
                queue.append(u)
            row.append(order[u])
        enc.append(tuple(row))
    return tuple(enc)


def maps_isomorphic(a, b):
    return canonical_form(a) == canonical_form(b)


# ---------------------------------------------------------------------------
# lattice balls


def _hex_dist(a, b):
    return max(abs(a), abs(b), abs(a + b))


def generate_ball(kind, radius):
    """Combinatorial ball of the given graph-distance radius around a root.

    kind: 'triangular6' (6-regular triangular lattice), 'hyperbolic7'
    (7-regular triangulation of the hyperbolic plane) or 'grid' (Z^2).
    Returns (map, root_id).
    """
    if radius < 1:
        raise ValidationError("radius must be >= 1")
    if kind == "triangular6":
        return _triangular_ball(radius)
    if kind == "grid":
        return _grid_ball(radius)
    if kind == "hyperbolic7":
        return _hyperbolic_ball(radius)
    raise ValidationError(f"unknown ball kind {kind!r}")


def _triangular_ball(radius):
    # axial coordinates; CCW neighbor directions, reversed for clockwise
    dirs = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
    pts = sorted(
        ((a, b) for a in range(-radius, radius + 1)
         for b in range(-radius, radius + 1) if _hex_dist(a, b) <= radius),
        key=lambda p: (_hex_dist(p[0], p[1]),
                       math.atan2(p[1], p[0]) % (2 * math.pi)))
    index = {p: i for i, p in enumerate(pts)}
    rotations = []
    for (a, b) in pts:
        row = []
        for (da, db) in reversed(dirs):
            q = (a + da, b + db)
            if q in index:
                row.append(index[q])
        rotations.append(row)
    return PlanarMap(len(pts), rotations), 0


def _grid_ball(radius):
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)]  # CCW
    pts = sorted(
        ((a, b) for a in range(-radius, radius + 1)
         for b in range(-radius, radius + 1) if abs(a) + abs(b) <= radius),
        key=lambda p: (abs(p[0]) + abs(p[1]),
                       math.atan2(p[1], p[0]) % (2 * math.pi)))
    index = {p: i for i, p in enumerate(pts)}
    rotations = []
    for (a, b) in pts:
        row = []
        for (da, db) in reversed(dirs):
            q = (a + da, b + db)
            if q in index:
                row.append(index[q])
        rotations.append(row)
    return PlanarMap(len(pts), rotations), 0


def _hyperbolic_ball(radius):
    """Layer-by-layer 7-regular triangulation ball.

    Layers are kept in counterclockwise cyclic order.  A vertex with p
    parents gets 7 - p - 2 children; consecutive layer vertices share one
    child, so all faces between layers are triangles.
    """
    parents = {0: []}
    children = {0: []}
    layers = [[0]]
    nxt = 1
    for k in range(1, radius + 1):
        prev = layers[-1]
        if k == 1:
            layer = list(range(1, 8))
            nxt = 8
            for v in layer:
                parents[v] = [0]
                children[v] = []
            children[0] = layer[:]
            layers.append(layer)
            continue
        m = len(prev)
        kid_lists = [[] for _ in range(m)]
        shared = [None] * m  # shared[i]: child shared by prev[i], prev[i+1]
        layer = []
        for i in range(m):
            v = prev[i]
            total = 7 - len(parents[v]) - 2
            # children of v: [shared(i-1,i)] + own + [shared(i,i+1)]
            n_own = total - 2
            for _ in range(n_own):
                w = nxt
                nxt += 1
                parents[w] = [v]
                children[w] = []
                kid_lists[i].append(w)
                layer.append(w)
            w = nxt  # child shared with the next layer vertex
            nxt += 1
            parents[w] = [v, prev[(i + 1) % m]]
            children[w] = []
            shared[i] = w
            kid_lists[i].append(w)
            layer.append(w)
        for i in range(m):
            kid_lists[(i + 1) % m].insert(0, shared[i])
        # the first vertex's received child (shared[m-1]) was appended at the very
        # end of `layer`; cyclic order is unaffected
        for i in range(m):
            children[prev[i]] = kid_lists[i]
        layers.append(layer)

    n = nxt
    rotations = [None] * n
    rotations[0] = list(reversed(layers[1]))
    for k in range(1, radius + 1):
        layer = layers[k]
        m = len(layer)
        for i, v in enumerate(layer):
            row = list(parents[v]) + [layer[(i + 1) % m]] + \
                list(reversed(children[v])) + [layer[(i - 1) % m]]
            rotations[v] = row
    return PlanarMap(n, rotations), 0
