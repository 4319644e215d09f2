"""Circle packings of finite triangulations.

The radii of the packing are characterized by angle sums: around every
interior vertex the tangent-circle triangle angles add to 2*pi, and at the
three outer vertices they add to the angles of the triangle formed by the
three prescribed outer radii.  The solver drives the vector of angle
deficits to zero; the layout then places centers by breadth-first angle
propagation, which is consistent exactly because the deficits vanish.
"""

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError, ComputationError
from . import _radii
from .planar import PlanarMap, Triangulation, star_face, generate_ball

# type aliases: a RadiusVector / DeficitVector is a plain (n,) float array
RadiusVector = np.ndarray
DeficitVector = np.ndarray


class NonPositiveRadius(ValidationError):
    pass


class MaxIterExceeded(ComputationError):
    """Carries the best-so-far radii and the solver report."""

    def __init__(self, radii, report):
        self.radii = radii
        self.report = report
        super().__init__(f"no convergence within {report.iterations} iterations "
                         f"(energy {report.final_energy:.3e})")


class InconsistentAngles(ComputationError):
    pass


class EmptyAnnulus(ValidationError):
    pass


class DomainTooThin(ValidationError):
    pass


# ---------------------------------------------------------------------------
# angles and deficits


def face_angle(r_center, r_left, r_right):
    """Angle at the center vertex of the triangle formed by three mutually
    tangent circles: cos = 1 - 2 r_l r_r / ((r_l + r_c)(r_c + r_r))."""
    if r_center <= 0 or r_left <= 0 or r_right <= 0:
        raise NonPositiveRadius(f"radii ({r_center}, {r_left}, {r_right})")
    c = 1.0 - 2.0 * r_left * r_right / ((r_left + r_center) * (r_center + r_right))
    return math.acos(max(-1.0, min(1.0, c)))


def boundary_angles(rho1, rho2, rho3):
    """Angles of the triangle with side lengths rho_i + rho_j; the third is
    computed as pi minus the others so the sum is exactly pi."""
    t1 = face_angle(rho1, rho2, rho3)
    t2 = face_angle(rho2, rho3, rho1)
    return (t1, t2, math.pi - t1 - t2)


def _triangulation_arrays(tri):
    """(faces (F,3) int64 array in trace order, outer vertex triple)."""
    inner = tri.inner_faces()
    F = np.array([f.vertices for f in inner], dtype=np.int64)
    return F, tuple(tri.outer_vertices)


def _target_vector(n, outer, thetas):
    target = np.full(n, 2.0 * math.pi)
    for v, t in zip(outer, thetas):
        target[v] = t
    return target


def angle_deficits(tri, r, boundary=None):
    """Per-vertex angle deficit: angle sum under r minus the target
    (2*pi interior, the prescribed outer angles at the outer face)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise NonPositiveRadius("radii must be positive")
    F, outer = _triangulation_arrays(tri)
    if boundary is None:
        boundary = boundary_angles(*(r[list(outer)]))
    n = tri.map.n
    target = _target_vector(n, outer, boundary)
    i0, i1, i2 = F[:, 0], F[:, 1], F[:, 2]
    r0, r1, r2 = r[i0], r[i1], r[i2]
    a0 = np.arccos(np.clip(1 - 2 * r1 * r2 / ((r1 + r0) * (r0 + r2)), -1, 1))
    a1 = np.arccos(np.clip(1 - 2 * r0 * r2 / ((r0 + r1) * (r1 + r2)), -1, 1))
    a2 = np.pi - a0 - a1
    sig = np.bincount(i0, weights=a0, minlength=n)
    sig += np.bincount(i1, weights=a1, minlength=n)
    sig += np.bincount(i2, weights=a2, minlength=n)
    return sig - target


# ---------------------------------------------------------------------------
# solver


@dataclass
class SolverReport:
    iterations: int
    final_energy: float
    energy_trace: np.ndarray
    lambdas: np.ndarray
    converged: bool
    method: str
    scale: float = 1.0


def solve_radii(tri, boundary_radii=(1.0, 1.0, 1.0), tol=1e-18,
                max_iter=2_000_000, init="uniform", seed=0, method="gap",
                gap_rtol=1e-3, strict=True):
    """Radii of the packing of `tri` whose outer circles have the given radii.

    method: 'gap' (the max-gap angle-sum iteration), 'flower'
    (uniform-neighbor fixed point; same answer by uniqueness, faster on
    large inputs), or 'auto'.
    Returns (radii, report); the radii are rescaled so the outer radii equal
    boundary_radii, with the common factor in report.scale.
    """
    rho = tuple(float(x) for x in boundary_radii)
    if any(x <= 0 for x in rho):
        raise NonPositiveRadius(f"outer radii {rho}")
    n = tri.map.n
    if n == 3:
        r = np.array(rho)
        report = SolverReport(0, 0.0, np.zeros(1), np.zeros(0), True, "direct")
        return r, report
    F, outer = _triangulation_arrays(tri)
    thetas = boundary_angles(*rho)
    target = _target_vector(n, outer, thetas)

    if isinstance(init, str) and init == "uniform":
        r0 = np.full(n, 1.0 / n)
    elif isinstance(init, str) and init == "random":
        rng = np.random.default_rng(seed)
        r0 = rng.uniform(0.5, 1.5, size=n)
        r0 /= r0.sum()
    else:
        r0 = np.asarray(init, dtype=float)
        if np.any(r0 <= 0):
            raise NonPositiveRadius("initial radii must be positive")
        r0 = r0 / r0.sum()

    if method == "auto":
        method = "gap" if n <= 400 else "flower"
    i0 = np.ascontiguousarray(F[:, 0])
    i1 = np.ascontiguousarray(F[:, 1])
    i2 = np.ascontiguousarray(F[:, 2])
    if method == "gap":
        r, iters, energies, lambdas, status = _radii.solve_gap(
            i0, i1, i2, target, r0, tol, max_iter, gap_rtol)
        energies = np.asarray(energies)
        lambdas = np.asarray(lambdas)
    elif method == "flower":
        faces_at = np.bincount(F.ravel(), minlength=n).astype(float)
        r, iters, energies, status = _radii.solve_flower(
            i0, i1, i2, target, faces_at, r0, tol, max_iter)
        energies = np.asarray(energies)
        lambdas = np.zeros(0)
    else:
        raise ValidationError(f"unknown method {method!r}")

    scale = rho[0] / r[outer[0]]
    report = SolverReport(iters, float(energies[-1]), energies, lambdas,
                          status == 0, method, scale)
    if status != 0 and strict:
        raise MaxIterExceeded(r * scale, report)
    return r * scale, report


# ---------------------------------------------------------------------------
# layout


@dataclass
class Packing:
    """Circle centers and radii realizing a planar map."""

    centers: np.ndarray  # (n, 2)
    radii: np.ndarray    # (n,)
    map: PlanarMap = None
    outer_cycle: tuple = None

    @property
    def n(self):
        return len(self.radii)

    def center_complex(self):
        return self.centers[:, 0] + 1j * self.centers[:, 1]

    def scaled(self, factor, offset=(0.0, 0.0)):
        return Packing(self.centers * factor + np.asarray(offset),
                       self.radii * abs(factor), self.map, self.outer_cycle)

    def to_json(self):
        doc = {"centers": [[float(x), float(y)] for (x, y) in self.centers],
               "radii": [float(r) for r in self.radii]}
        if self.map is not None:
            doc["map"] = self.map.to_json()
        return doc

    @classmethod
    def from_json(cls, doc):
        pmap = PlanarMap.from_json(doc["map"]) if "map" in doc else None
        return cls(np.array(doc["centers"], dtype=float),
                   np.array(doc["radii"], dtype=float), pmap)

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def layout(tri, r, root_edge=None, tol=None):
    """Place centers by breadth-first angle propagation from a root edge laid
    on the positive x-axis.  Vanishing interior deficits make the result
    independent of the propagation order up to the stated tolerance."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise NonPositiveRadius("radii must be positive")
    pmap = tri.map
    n = pmap.n
    if tol is None:
        tol = 1e-6 * float(r.max())
    faces = pmap.faces()
    face_of = pmap.face_of_dart()
    inner_ids = [i for i in range(len(faces)) if i != tri.outer_face_id]

    # root dart: requested edge, else smallest dart on an inner face
    root_dart = None
    if root_edge is not None:
        u0, v0 = root_edge
        for s, w in enumerate(pmap.rotations[u0]):
            d = pmap.dart(u0, s)
            if w == v0 and face_of[d] != tri.outer_face_id:
                root_dart = d
                break
        if root_dart is None:
            raise ValidationError(f"no inner-face dart for edge {root_edge}")
    else:
        for d in range(pmap.dart_count):
            if face_of[d] != tri.outer_face_id:
                root_dart = d
                break

    pos = np.zeros((n, 2))
    placed = np.zeros(n, dtype=bool)
    u0, v0 = pmap.dart_endpoints(root_dart)
    pos[u0] = (0.0, 0.0)
    pos[v0] = (r[u0] + r[v0], 0.0)
    placed[u0] = placed[v0] = True

    worst = 0.0
    done = set()
    queue = [face_of[root_dart]]
    queued = {face_of[root_dart]}
    qi = 0
    while qi < len(queue):
        fi = queue[qi]
        qi += 1
        face = faces[fi]
        vs = face.vertices
        k = [placed[v] for v in vs]
        if sum(k) < 2:
            # requeue until two corners are known (can happen off the root)
            queue.append(fi)
            if qi > 4 * len(queue):
                raise InconsistentAngles("layout frontier stalled")
            continue
        if not all(k):
            j = k.index(False)
            w = vs[j]
            a, b = vs[(j + 1) % 3], vs[(j + 2) % 3]
            # face order (w, a, b) counterclockwise: rotate a->b by the angle
            # at a to aim at w
            alpha = face_angle(r[a], r[b], r[w])
            za = complex(pos[a, 0], pos[a, 1])
            zb = complex(pos[b, 0], pos[b, 1])
            direction = (zb - za) / abs(zb - za)
            zw = za + direction * cmath.exp(1j * alpha) * (r[a] + r[w])
            pos[w] = (zw.real, zw.imag)
            placed[w] = True
        done.add(fi)
        for d in face.dart_ids:
            g = face_of[pmap.rev[d]]
            if g != tri.outer_face_id and g not in queued:
                queued.add(g)
                queue.append(g)

    for (u, v, _, _) in pmap.edges():
        res = abs(float(np.hypot(*(pos[u] - pos[v]))) - (r[u] + r[v]))
        worst = max(worst, res)
    if worst > tol:
        raise InconsistentAngles(
            f"worst edge-length residual {worst:.3e} exceeds tolerance {tol:.3e}")
    return Packing(pos, r.copy(), pmap, outer_cycle=tuple(tri.outer_vertices))


_ROT_DIR_NOTE = """The propagation above rotates counterclockwise because inner
faces trace counterclockwise when rotations are stored clockwise."""


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    passed: bool
    worst_tangency: float
    worst_tangency_edge: tuple
    worst_overlap: float
    worst_overlap_pair: tuple
    orientation_ok: bool
    bad_orientation: tuple = ()

    def __bool__(self):
        return self.passed


def verify_packing(packing, pmap, tol):
    """Check tangency along edges, non-overlap along non-edges, and that the
    clockwise order of neighbors around every center matches the rotation
    system."""
    pos = packing.centers
    r = packing.radii
    worst_t, worst_edge = 0.0, None
    adjacent = set()
    for (u, v, _, _) in pmap.edges():
        adjacent.add((min(u, v), max(u, v)))
        res = abs(float(np.hypot(*(pos[u] - pos[v]))) - (r[u] + r[v]))
        if res > worst_t:
            worst_t, worst_edge = res, (u, v)
    worst_o, worst_pair = 0.0, None
    n = pmap.n
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    rsum = r[:, None] + r[None, :]
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) in adjacent:
                continue
            gap = rsum[u, v] - math.sqrt(d2[u, v])
            if gap > worst_o:
                worst_o, worst_pair = gap, (u, v)
    bad = []
    for v in range(n):
        nbr = pmap.rotations[v]
        if len(nbr) < 3:
            continue
        ang = [math.atan2(pos[u, 1] - pos[v, 1], pos[u, 0] - pos[v, 0]) for u in nbr]
        ascents = sum(1 for j in range(len(ang)) if ang[(j + 1) % len(ang)] > ang[j])
        if ascents != 1:
            bad.append(v)
    passed = worst_t <= tol and worst_o <= tol and not bad
    return VerificationReport(passed, worst_t, worst_edge, worst_o, worst_pair,
                              not bad, tuple(bad))


# ---------------------------------------------------------------------------
# packing in the unit disc


def _designated_outer_face(pmap):
    faces = pmap.faces()
    if pmap.outer is not None:
        want = set(pmap.outer)
        for i, f in enumerate(faces):
            if set(f.vertices) == want and f.degree == len(pmap.outer):
                return i
        raise ValidationError("designated outer cycle is not a face")
    big = [i for i, f in enumerate(faces) if f.degree != 3]
    if len(big) == 1:
        return big[0]
    if not big:
        return 0  # full triangulation: any face works, take the canonical first
    raise ValidationError(
        "need a designated outer face (set map.outer) or a unique non-triangle face")


def _invert_circle(c, r):
    """Image of the circle (center c, radius r), origin outside, under z -> 1/z."""
    denom = abs(c) ** 2 - r * r
    return c.conjugate() / denom, r / abs(denom)


def pack_in_disc(pmap, tol=1e-18, method="auto", max_iter=2_000_000,
                 center=None):
    """Pack a map whose inner faces are triangles so that the outer-cycle
    circles are internally tangent to the unit circle.

    A helper vertex is joined to the outer cycle, the triangulation is
    packed, the helper circle is normalized to the unit circle and the
    whole picture is inverted through it.  `center`: optional vertex whose
    circle is then moved to be concentric with the origin (by a disc
    automorphism).
    """
    outer_id = _designated_outer_face(pmap)
    starred, hub = star_face(pmap, outer_id)
    faces = starred.faces()
    # solve with an outer face away from the helper so it ends up interior
    solve_outer = next((i for i, f in enumerate(faces)
                        if hub not in f.vertices), None)
    if solve_outer is None:
        solve_outer = 0
    tri = Triangulation(starred, solve_outer)
    r, report = solve_radii(tri, (1.0, 1.0, 1.0), tol=tol, method=method,
                            max_iter=max_iter)
    packing = layout(tri, r)

    z = packing.center_complex()
    rad = packing.radii.copy()
    z = (z - z[hub]) / rad[hub]
    rad = rad / rad[hub]
    n = pmap.n
    cname = np.zeros(n, dtype=complex)
    rnew = np.zeros(n)
    for v in range(n):
        cv, rv = _invert_circle(z[v], rad[v])
        cname[v] = cv
        rnew[v] = rv
        # three-point check of the inversion formula
        for k in range(3):
            p = z[v] + rad[v] * cmath.exp(2j * math.pi * k / 3)
            w = 1.0 / p
            if abs(abs(w - cv) - rv) > 1e-9 * max(rv, 1e-30):
                raise ComputationError("circle inversion self-check failed")
    centers = np.column_stack([cname.real, cname.imag])
    outer_cycle = pmap.faces()[outer_id].vertices
    result = Packing(centers, rnew, pmap, outer_cycle=tuple(outer_cycle))
    if center is not None:
        result = mobius_center_circle(result, center)
    result.report = report
    return result


# ---------------------------------------------------------------------------
# ring ratios and annulus test functions


def ring_ratio_stats(packing, pmap, interior=None):
    """Radius ratios between each completely surrounded circle and its
    neighbors, reported both ways and per degree class."""
    r = packing.radii
    if interior is None:
        if packing.outer_cycle is not None:
            boundary = set(packing.outer_cycle)
        elif pmap.outer is not None:
            boundary = set(pmap.outer)
        else:
            boundary = set()
        interior = [v for v in range(pmap.n) if v not in boundary]
    by_degree = {}
    by_degree_surround = {}
    for v in interior:
        nbr = pmap.rotations[v]
        if not nbr:
            continue
        d = len(nbr)
        ratio = r[v] / min(r[u] for u in nbr)
        surround = max(r[u] for u in nbr) / r[v]
        by_degree[d] = max(by_degree.get(d, 0.0), ratio)
        by_degree_surround[d] = max(by_degree_surround.get(d, 0.0), surround)
    overall = max(by_degree.values(), default=0.0)
    overall_s = max(by_degree_surround.values(), default=0.0)
    return {"by_degree": by_degree, "by_degree_surround": by_degree_surround,
            "max": overall, "max_surround": overall_s}


@dataclass
class AnnulusReport:
    energy: float
    lower_bound: float
    inner_count: int
    outer_count: int
    crossing_edges: int


def annulus_test_function(packing, pmap, center, R, C):
    """The clipped radial test function h of the annulus R..C*R around
    `center`: 0 inside, 1 outside, linear in |cent(v)| between.  Its energy
    gives the lower bound 1/energy <= Reff(V_R <-> V beyond C*R)."""
    if C <= 1:
        raise ValidationError("need C > 1")
    pos = packing.centers
    dist = np.hypot(pos[:, 0] - center[0], pos[:, 1] - center[1])
    inner = dist <= R
    outer = dist >= C * R
    if not inner.any() or not outer.any():
        raise EmptyAnnulus(f"no circles {'inside' if not inner.any() else 'beyond'} "
                           f"the annulus at R={R}, C={C}")
    h = np.clip((dist - R) / ((C - 1) * R), 0.0, 1.0)
    energy = 0.0
    crossing = 0
    for (u, v, _, _) in pmap.edges():
        energy += (h[u] - h[v]) ** 2
        if (inner[u] and outer[v]) or (inner[v] and outer[u]):
            crossing += 1
    report = AnnulusReport(energy, 1.0 / energy if energy > 0 else math.inf,
                           int(inner.sum()), int(outer.sum()), crossing)
    return h, energy, report


# ---------------------------------------------------------------------------
# Moebius recentering and the packing-type probe


def _circumcircle(p1, p2, p3):
    """Center and radius of the circle through three points (complex)."""
    ax, ay = p1.real, p1.imag
    bx, by = p2.real, p2.imag
    cx, cy = p3.real, p3.imag
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    c = complex(ux, uy)
    return c, abs(p1 - c)


def mobius_recenter(packing, a):
    """Apply the disc automorphism z -> (z - a)/(1 - conj(a) z).  Circles map
    to circles; each image is refit through three mapped boundary points."""
    a = complex(a)
    z = packing.center_complex()
    rad = packing.radii
    centers = np.zeros_like(packing.centers)
    radii = np.zeros_like(rad)
    for v in range(len(rad)):
        pts = [z[v] + rad[v] * cmath.exp(2j * math.pi * k / 3) for k in range(3)]
        imgs = [(p - a) / (1 - a.conjugate() * p) for p in pts]
        c, r = _circumcircle(*imgs)
        centers[v] = (c.real, c.imag)
        radii[v] = r
    return Packing(centers, radii, packing.map, packing.outer_cycle)


def mobius_center_circle(packing, v):
    """Disc automorphism making circle v exactly concentric with the origin.

    For a circle at distance d from the origin with radius r, the parameter
    a lies on the same ray with |a| solving d s^2 - (d^2 - r^2 + 1) s + d = 0
    (the root inside the unit disc)."""
    c = complex(packing.centers[v, 0], packing.centers[v, 1])
    d = abs(c)
    if d < 1e-15:
        return packing
    r = float(packing.radii[v])
    b = d * d - r * r + 1.0
    disc = b * b - 4.0 * d * d
    if disc < 0:
        raise ComputationError("circle centering discriminant negative")
    s = (b - math.sqrt(disc)) / (2.0 * d)
    return mobius_recenter(packing, (c / d) * s)


def cp_type_probe(kind, depths, tol=1e-14, method="auto"):
    """Root radius of the disc packing of combinatorial balls of increasing
    depth, with the root circle recentered at the origin.

    A radius tending to zero signals the plane-like (recurrent) type;
    staying bounded away from zero signals the disc-like (transient) type.
    """
    if list(depths) != sorted(depths):
        raise ValidationError("depths must be increasing")
    out = []
    for depth in depths:
        ball, root = generate_ball(kind, depth)
        packing = pack_in_disc(ball, tol=tol, method=method, center=root)
        out.append((depth, float(packing.radii[root])))
    return out


# ---------------------------------------------------------------------------
# conformal map demo


def _point_in_polygon(x, y, poly):
    inside = False
    k = len(poly)
    for i in range(k):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % k]
        if (y1 > y) != (y2 > y):
            xt = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xt:
                inside = not inside
    return inside


def _dist_to_boundary(x, y, poly):
    best = math.inf
    k = len(poly)
    for i in range(k):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % k]
        dx, dy = x2 - x1, y2 - y1
        L2 = dx * dx + dy * dy
        t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((x - x1) * dx + (y - y1) * dy) / L2))
        best = min(best, math.hypot(x - (x1 + t * dx), y - (y1 + t * dy)))
    return best


_HEX_DIRS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]  # CCW axial


def _axial_to_xy(a, b, eps):
    return eps * (a + 0.5 * b), eps * (math.sqrt(3) / 2) * b


class ConformalMap:
    """Piecewise-affine approximation of the conformal map from a polygon to
    the unit disc: lattice vertices go to their circle centers, triangles are
    extended affinely."""

    def __init__(self, epsilon, axial_points, centers, index):
        self.epsilon = epsilon
        self.axial = axial_points
        self.centers = centers  # complex per vertex
        self._index = index

    def __call__(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.full(zs.shape, np.nan + 0j)
        eps = self.epsilon
        for i, w in enumerate(zs.ravel()):
            b = 2.0 * w.imag / (math.sqrt(3) * eps)
            a = w.real / eps - 0.5 * b
            ia, ib = math.floor(a), math.floor(b)
            fa, fb = a - ia, b - ib
            if fa + fb <= 1.0:
                corners = [(ia, ib), (ia + 1, ib), (ia, ib + 1)]
                weights = [1 - fa - fb, fa, fb]
            else:
                corners = [(ia + 1, ib + 1), (ia, ib + 1), (ia + 1, ib)]
                weights = [fa + fb - 1, 1 - fa, 1 - fb]
            try:
                ids = [self._index[c] for c in corners]
            except KeyError:
                continue
            out.ravel()[i] = sum(wt * self.centers[j] for wt, j in zip(weights, ids))
        return out if np.asarray(z).shape else out[0]


def conformal_demo(polygon, epsilon, z0=None, tol=1e-14, method="auto"):
    """Approximate the conformal uniformization of a simple polygon by circle
    packing the epsilon-triangular-lattice graph inside it.

    Returns a ConformalMap phi with phi(z0) ~ 0 and the first lattice
    direction at z0 mapped to the positive real axis.
    """
    poly = [(float(x), float(y)) for (x, y) in polygon]
    if z0 is None:
        z0 = complex(sum(p[0] for p in poly) / len(poly),
                     sum(p[1] for p in poly) / len(poly))
    z0 = complex(z0)
    span = max(max(abs(x) for (x, y) in poly), max(abs(y) for (x, y) in poly))
    reach = int(math.ceil(2.2 * span / epsilon)) + 2

    good = {}
    for a in range(-reach, reach + 1):
        for b in range(-reach, reach + 1):
            x, y = _axial_to_xy(a, b, epsilon)
            if _point_in_polygon(x, y, poly) and \
               _dist_to_boundary(x, y, poly) >= 2 * epsilon:
                good[(a, b)] = (x, y)
    if not good:
        raise DomainTooThin("no lattice points deep enough inside the domain")

    # component containing the lattice point nearest z0
    u = min(good, key=lambda p: abs(complex(*good[p]) - z0))
    comp = {u}
    stack = [u]
    while stack:
        (a, b) = stack.pop()
        for (da, db) in _HEX_DIRS:
            q = (a + da, b + db)
            if q in good and q not in comp:
                comp.add(q)
                stack.append(q)
    pts = sorted(comp)
    index = {p: i for i, p in enumerate(pts)}
    rotations = []
    for (a, b) in pts:
        row = []
        for (da, db) in reversed(_HEX_DIRS):
            q = (a + da, b + db)
            if q in index:
                row.append(index[q])
        rotations.append(row)
    if len(pts) < 7:
        raise DomainTooThin(f"only {len(pts)} usable lattice points")
    lattice = PlanarMap(len(pts), rotations)
    big = [i for i, f in enumerate(lattice.faces()) if f.degree != 3]
    if len(big) != 1:
        raise DomainTooThin("lattice graph has holes at this resolution")

    packing = pack_in_disc(lattice, tol=tol, method=method)

    # normalization: u at the origin, u+1 on the positive real axis,
    # u + (1+sqrt(3)i)/2 in the upper half plane
    ua, ub = u
    v = (ua + 1, ub)
    w = (ua, ub + 1)
    if v not in index or w not in index:
        raise DomainTooThin("marked directions fall outside the lattice graph")
    a = complex(*packing.centers[index[u]])
    recentered = mobius_recenter(packing, a)
    z = recentered.center_complex()
    rot = z[index[v]]
    if rot != 0:
        z = z * (abs(rot) / rot)
    if z[index[w]].imag < 0:
        z = z.conjugate()
    return ConformalMap(epsilon, pts, z, index)
