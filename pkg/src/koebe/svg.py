"""Deterministic SVG rendering of packings and flow overlays.

Output is byte-stable: fixed 6-decimal precision, elements emitted in
vertex / edge order, no timestamps.
"""

from .errors import ValidationError


def _fmt(x):
    return f"{x:.6f}"


def render_packing(packing, labels=False, flow=None, size=720, margin=0.05):
    """SVG document for a packing; optional vertex labels and a flow overlay
    drawn as center-to-center arrows with width proportional to |theta|.

    flow: list of (u, v, value) triples.
    """
    if packing.n == 0:
        raise ValidationError("empty packing")
    xs = packing.centers[:, 0]
    ys = packing.centers[:, 1]
    r = packing.radii
    x0 = float((xs - r).min())
    x1 = float((xs + r).max())
    y0 = float((ys - r).min())
    y1 = float((ys + r).max())
    span = max(x1 - x0, y1 - y0)
    pad = margin * span
    x0, y0, span = x0 - pad, y0 - pad, span + 2 * pad

    def sx(x):
        return (x - x0) / span * size

    def sy(y):
        return size - (y - y0) / span * size  # flip: y up

    def sr(v):
        return v / span * size

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
               f'height="{size}" viewBox="0 0 {size} {size}">')
    out.append('<g fill="none" stroke="#1f3a5f" stroke-width="1">')
    for v in range(packing.n):
        out.append(f'<circle cx="{_fmt(sx(xs[v]))}" cy="{_fmt(sy(ys[v]))}" '
                   f'r="{_fmt(sr(r[v]))}"/>')
    out.append('</g>')
    if flow:
        top = max(abs(t) for (_, _, t) in flow) or 1.0
        out.append('<g stroke="#b03030" stroke-linecap="round">')
        for (u, v, t) in flow:
            if t == 0:
                continue
            a, b = (u, v) if t > 0 else (v, u)
            w = 0.6 + 3.4 * abs(t) / top
            ax, ay = sx(xs[a]), sy(ys[a])
            bx, by = sx(xs[b]), sy(ys[b])
            out.append(f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" '
                       f'y2="{_fmt(by)}" stroke-width="{_fmt(w)}"/>')
            # arrowhead: short dash toward the head
            hx = bx + (ax - bx) * 0.15
            hy = by + (ay - by) * 0.15
            out.append(f'<line x1="{_fmt(hx)}" y1="{_fmt(hy)}" x2="{_fmt(bx)}" '
                       f'y2="{_fmt(by)}" stroke-width="{_fmt(w * 2.2)}"/>')
        out.append('</g>')
    if labels:
        out.append('<g font-family="sans-serif" fill="#202020" '
                   'text-anchor="middle">')
        for v in range(packing.n):
            fs = max(6.0, sr(r[v]) * 0.8)
            out.append(f'<text x="{_fmt(sx(xs[v]))}" y="{_fmt(sy(ys[v]))}" '
                       f'font-size="{_fmt(fs)}">{v}</text>')
        out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
