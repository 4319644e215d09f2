"""Isolation radii and supported-point counting for planar point sets.

A point w of a finite set C is (delta, s)-supported when every closed disc
of radius delta * rho_w misses at least s points of C inside the disc of
radius rho_w / delta around w, where rho_w is w's nearest-neighbor
distance.  The decision is exact: the maximum number of points a closed
disc of fixed radius can cover is attained by a disc centered on a point
or with two points on its boundary.
"""

import math

import numpy as np

from .errors import ValidationError
from . import network as _net
from .planar import generate_ball
from .packing import pack_in_disc


class SingletonSet(ValidationError):
    pass


_TIE = 1e-12  # closed-disc boundary tolerance


def _points(C):
    pts = np.asarray(C, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("point set must be (k, 2)")
    return pts


def isolation_radius(C, w):
    """Distance from point index w to its nearest neighbor in C."""
    pts = _points(C)
    if len(pts) < 2:
        raise SingletonSet("need at least two points")
    d = np.hypot(pts[:, 0] - pts[w, 0], pts[:, 1] - pts[w, 1])
    d[w] = np.inf
    return float(d.min())


def max_disc_cover(pts, radius):
    """Maximum number of points of pts coverable by one closed disc of the
    given radius.  Candidate centers: every point, and the two circle
    centers through every pair closer than the diameter."""
    pts = _points(pts)
    k = len(pts)
    if k == 0:
        return 0
    best = 1
    r2 = radius * radius
    dx = pts[:, 0][:, None] - pts[:, 0][None, :]
    dy = pts[:, 1][:, None] - pts[:, 1][None, :]
    d2 = dx * dx + dy * dy

    def covered(cx, cy):
        return int(np.count_nonzero(
            (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2 <= r2 * (1 + _TIE) + _TIE))

    for i in range(k):
        best = max(best, covered(pts[i, 0], pts[i, 1]))
    for i in range(k):
        for j in range(i + 1, k):
            if d2[i, j] > 4 * r2 * (1 + _TIE):
                continue
            mx, my = (pts[i] + pts[j]) / 2.0
            half = math.sqrt(d2[i, j]) / 2.0
            h2 = r2 - half * half
            h = math.sqrt(h2) if h2 > 0 else 0.0
            ux, uy = pts[j] - pts[i]
            norm = math.hypot(ux, uy)
            nx, ny = -uy / norm, ux / norm
            best = max(best, covered(mx + h * nx, my + h * ny))
            best = max(best, covered(mx - h * nx, my - h * ny))
    return best


def is_supported(C, w, delta, s):
    """Exact (delta, s)-support decision for point index w."""
    if not (0 < delta < 1):
        raise ValidationError("delta must be in (0, 1)")
    if s < 2:
        raise ValidationError("s must be >= 2")
    pts = _points(C)
    rho = isolation_radius(pts, w)
    d = np.hypot(pts[:, 0] - pts[w, 0], pts[:, 1] - pts[w, 1])
    ball = pts[d <= rho / delta + _TIE]
    if len(ball) < s:
        return False
    return len(ball) - max_disc_cover(ball, delta * rho) >= s


def count_supported(C, delta, s):
    """Number of (delta, s)-supported points, with the normalized ratio
    count * s / (|C| * delta^-2 * ln(1/delta)) for cross-delta comparison."""
    pts = _points(C)
    count = sum(1 for w in range(len(pts)) if is_supported(pts, w, delta, s))
    denom = len(pts) * delta ** -2 * math.log(1.0 / delta)
    return count, count * s / denom


# ---------------------------------------------------------------------------
# resistance growth probe


def resistance_growth_probe(ks, kind="triangular6", depth_of=None, tol=1e-14,
                            method="auto"):
    """Wired resistance from the root to the complement of a k-point
    neighborhood, against log k.

    For each k the ball is disc-packed, rescaled so the root circle is a
    unit circle at the origin, and B_k collects the k circle centers
    nearest the origin.  Returns a list of (k, |B_k|, resistance); the
    resistance is an infinity sentinel when B_k swallows the whole ball.
    """
    if depth_of is None:
        depth_of = lambda k: max(3, int(math.ceil(1.8 * k ** (1.0 / 3.0))) + 2)
    out = []
    for k in ks:
        ball, root = generate_ball(kind, depth_of(k))
        packing = pack_in_disc(ball, tol=tol, method=method)
        pos = (packing.centers - packing.centers[root]) / packing.radii[root]
        dist = np.hypot(pos[:, 0], pos[:, 1])
        order = np.argsort(dist, kind="stable")
        take = min(k, ball.n)
        bk = set(int(v) for v in order[:take])
        complement = [v for v in range(ball.n) if v not in bk]
        if not complement:
            out.append((k, len(bk), _net.ResistanceValue.infinity(kind="wired")))
            continue
        net = _net.Network.from_map(ball)
        glued, mapping = _net.glue(net, complement)
        res = _net.effective_resistance(
            glued, {int(mapping[root])}, {int(mapping[complement[0]])}, kind="wired")
        out.append((k, len(bk), res))
    return out
