"""Command-line front end.

Exit codes: 0 success, 2 validation error (bad files or flags), 1
computational failure.  KOEBE_LOG={quiet,info,trace} controls stderr
verbosity (default info).
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import ValidationError, ComputationError
from .planar import PlanarMap, Triangulation, triangulate_star
from . import network as _net
from . import packing as _packing
from . import ust as _ust
from . import magic as _magic
from .startree import star_tree_transform
from .svg import render_packing


def _log_level():
    return os.environ.get("KOEBE_LOG", "info")


def _info(msg):
    if _log_level() in ("info", "trace"):
        print(msg, file=sys.stderr)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None


def _sig12(x):
    return f"{x:#.12g}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_pack(args):
    pmap = PlanarMap.from_json(_load_json(args.map))
    if args.disc:
        packing = _packing.pack_in_disc(pmap, tol=args.tol, method=args.method)
        report = packing.report
        helpers = []
    else:
        faces = pmap.faces()
        nontriangle = [i for i, f in enumerate(faces) if f.degree != 3]
        helpers = []
        if nontriangle:
            if not args.auto_triangulate:
                raise ValidationError(
                    "map is not a triangulation (use --auto-triangulate or --disc)")
            outer_id = nontriangle[0] if len(nontriangle) == 1 else None
            if pmap.outer is not None:
                want = set(pmap.outer)
                outer_id = next(i for i, f in enumerate(faces)
                                if set(f.vertices) == want)
            pmap2, helpers = triangulate_star(pmap, exclude_face=outer_id)
            if outer_id is None:
                raise ValidationError("cannot pick an outer face to keep")
            pmap = pmap2
            faces = pmap.faces()
        if pmap.outer is not None:
            want = set(pmap.outer)
            outer_id = next((i for i, f in enumerate(faces)
                             if set(f.vertices) == want and f.degree == 3), 0)
        else:
            outer_id = 0
        tri = Triangulation(pmap, outer_id)
        rho = tuple(args.rho)
        radii, report = _packing.solve_radii(tri, rho, tol=args.tol,
                                             max_iter=args.max_iter,
                                             method=args.method)
        packing = _packing.layout(tri, radii)
        if helpers:
            keep = [v for v in range(pmap.n) if v not in set(helpers)]
            packing = _packing.Packing(packing.centers[keep],
                                       packing.radii[keep], None)
    if _log_level() == "trace" and report is not None:
        for i, e in enumerate(report.energy_trace):
            print(json.dumps({"iteration": i, "energy": float(e)}),
                  file=sys.stderr)
    if report is not None:
        _info(json.dumps({"iterations": report.iterations,
                          "energy": report.final_energy,
                          "method": report.method}))
    doc = packing.to_json()
    text = json.dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_render(args):
    doc = _load_json(args.packing)
    if not doc.get("radii"):
        raise ValidationError("packing has no circles")
    packing = _packing.Packing.from_json(doc)
    flow = None
    if args.flow:
        fdoc = _load_json(args.flow)
        flow = [(int(u), int(v), float(t)) for (u, v, t) in fdoc["flow"]]
    svg = render_packing(packing, labels=args.labels, flow=flow)
    with open(args.out, "w") as fh:
        fh.write(svg)
    return 0


def cmd_reff(args):
    net = _net.Network.from_json(_load_json(args.network))
    A, Z = set(args.source), set(args.sink)
    if not A or not Z or (A & Z) or \
       any(not (0 <= v < net.n) for v in A | Z):
        raise ValidationError("invalid terminal sets")
    if args.bound is None:
        value = float(_net.effective_resistance(net, A, Z))
    elif args.bound == "nashwilliams":
        cutsets = _load_json(args.aux)
        value = _net.nash_williams_bound(net, A, Z, cutsets)
    elif args.bound == "thomson":
        doc = _load_json(args.aux)
        vals = np.array(doc["theta"], dtype=float)
        flow = _net.Flow(net, vals, A, Z)
        s = flow.strength()
        if abs(s - 1.0) > 1e-9:
            raise _net.StrengthNotOne(f"flow strength {s}")
        value = _net.flow_energy(net, flow)
    elif args.bound == "dirichlet":
        doc = _load_json(args.aux)
        h = np.array(doc["values"], dtype=float)
        e = _net.function_energy(net, h)
        value = 1.0 / e
    print(_sig12(value))
    return 0


def cmd_probe(args):
    if args.mode == "type":
        if not args.depths:
            raise ValidationError("no depths given")
        rows = _packing.cp_type_probe(args.kind, args.depths, tol=args.tol)
        header = "depth,root_radius"
        lines = [f"{d},{r:.12g}" for (d, r) in rows]
    else:
        if not args.ks:
            raise ValidationError("no k values given")
        rows = _magic.resistance_growth_probe(args.ks, kind=args.kind,
                                              tol=args.tol)
        header = "k,ball_size,reff"
        lines = [f"{k},{sz},{'inf' if r.infinite else f'{float(r):.12g}'}"
                 for (k, sz, r) in rows]
    text = header + "\n" + "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_ust(args):
    doc = _load_json(args.graph)
    edges = [tuple(e[:2]) for e in doc["edges"]]
    dist = _ust.enumerate_spanning_trees((doc["n"], edges))
    _info(f"{dist.count} spanning trees")
    if args.edge is not None:
        u, v = args.edge
        eid = next((i for i, (a, b) in enumerate(edges)
                    if {a, b} == {u, v}), None)
        if eid is None:
            raise ValidationError(f"no edge {{{u},{v}}}")
        p = _ust.edge_probability((doc["n"], edges), eid, dist=dist)
        print(f"{p.numerator}/{p.denominator} = {_sig12(float(p))}")
    else:
        print(dist.count)
    return 0


def cmd_transform(args):
    pmap = PlanarMap.from_json(_load_json(args.map))
    marked = star_tree_transform(pmap)
    text = marked.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_magic(args):
    pts = _load_json(args.points)
    if args.point is not None:
        ok = _magic.is_supported(pts, args.point, args.delta, args.s)
        print("supported" if ok else "not-supported")
    else:
        count, ratio = _magic.count_supported(pts, args.delta, args.s)
        print(f"{count},{ratio:.12g}")
    return 0


_DOMAINS = {
    "square": [(-1, -1), (1, -1), (1, 1), (-1, 1)],
    "disc": [(math.cos(2 * math.pi * k / 64), math.sin(2 * math.pi * k / 64))
             for k in range(64)],
}


def cmd_conformal(args):
    poly = _DOMAINS[args.domain]
    phi = _packing.conformal_demo(poly, args.epsilon, z0=0j, tol=args.tol)
    g = args.grid
    pts = [complex(x, y)
           for x in np.linspace(-0.4, 0.4, g) for y in np.linspace(-0.4, 0.4, g)]
    lines = ["z_re,z_im,phi_re,phi_im"]
    for z in pts:
        w = phi(z)
        if w == w:  # skip NaN
            lines.append(f"{z.real:.6f},{z.imag:.6f},{w.real:.9f},{w.imag:.9f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="koebe",
        description="Circle packings, electric networks and spanning trees "
                    "on finite planar maps.")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for any randomized subroutine")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("pack", help="compute a circle packing of a map")
    q.add_argument("map")
    q.add_argument("--rho", type=float, nargs=3, default=(1.0, 1.0, 1.0),
                   metavar=("R1", "R2", "R3"), help="outer-circle radii")
    q.add_argument("--disc", action="store_true",
                   help="pack in the unit disc (outer cycle tangent to it)")
    q.add_argument("--tol", type=float, default=1e-18)
    q.add_argument("--max-iter", type=int, default=2_000_000)
    q.add_argument("--method", default="auto",
                   choices=("auto", "gap", "flower"))
    q.add_argument("--auto-triangulate", action="store_true",
                   help="star non-triangular faces first, strip helpers after")
    q.add_argument("-o", "--out")
    q.set_defaults(func=cmd_pack)

    q = sub.add_parser("render", help="render a packing to SVG")
    q.add_argument("packing")
    q.add_argument("-o", "--out", required=True)
    q.add_argument("--labels", action="store_true")
    q.add_argument("--flow", help="flow overlay JSON: {'flow': [[u,v,theta],...]}")
    q.set_defaults(func=cmd_render)

    q = sub.add_parser("reff", help="effective resistance or a bound on it")
    q.add_argument("network")
    q.add_argument("--source", type=int, nargs="+", required=True)
    q.add_argument("--sink", type=int, nargs="+", required=True)
    q.add_argument("--bound", choices=("thomson", "dirichlet", "nashwilliams"))
    q.add_argument("--aux", help="flow / function / cutsets file for --bound")
    q.set_defaults(func=cmd_reff)

    q = sub.add_parser("probe", help="packing-type or resistance-growth probe")
    q.add_argument("--kind", default="triangular6",
                   choices=("triangular6", "hyperbolic7", "grid"))
    q.add_argument("--mode", default="type", choices=("type", "growth"))
    q.add_argument("--depths", type=int, nargs="*", default=[])
    q.add_argument("--ks", type=int, nargs="*", default=[])
    q.add_argument("--tol", type=float, default=1e-14)
    q.add_argument("--out")
    q.set_defaults(func=cmd_probe)

    q = sub.add_parser("ust", help="spanning tree count / edge probability")
    q.add_argument("graph")
    q.add_argument("--edge", type=int, nargs=2, metavar=("U", "V"))
    q.set_defaults(func=cmd_ust)

    q = sub.add_parser("transform", help="star-tree transform of a map")
    q.add_argument("map")
    q.add_argument("-o", "--out")
    q.set_defaults(func=cmd_transform)

    q = sub.add_parser("magic", help="supported-point counting")
    q.add_argument("points")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--point", type=int)
    q.set_defaults(func=cmd_magic)

    q = sub.add_parser("conformal", help="piecewise-affine uniformization demo")
    q.add_argument("--domain", choices=sorted(_DOMAINS), required=True)
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--grid", type=int, default=5)
    q.add_argument("--tol", type=float, default=1e-14)
    q.add_argument("--out")
    q.set_defaults(func=cmd_conformal)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
