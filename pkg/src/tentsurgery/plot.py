"""Static SVG figures with their backing CSV.

Output is deterministic: fixed sampling, fixed number formatting, no
timestamps or generated ids.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .preimage import enumerate_tree, iter_nodes, level_counts
from .surgery import SurgeredMapDescriptor
from .verify import simulate_basin

DEFAULT_SAMPLES = 2048
WHATS = ("map", "tree", "lengths", "basin")

W, H, PAD = 640, 480, 40


def _f(v: float) -> str:
    return f"{v:.6g}"


class _Canvas:
    def __init__(self, xr, yr, title: str):
        self.x0, self.x1 = xr
        self.y0, self.y1 = yr
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
            f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" '
            'fill="none" stroke="#888" stroke-width="1"/>',
            f'<text x="{W // 2}" y="{PAD // 2 + 5}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="14">{title}</text>',
        ]

    def X(self, x: float) -> float:
        span = (self.x1 - self.x0) or 1.0
        return PAD + (x - self.x0) / span * (W - 2 * PAD)

    def Y(self, y: float) -> float:
        span = (self.y1 - self.y0) or 1.0
        return H - PAD - (y - self.y0) / span * (H - 2 * PAD)

    def polyline(self, pts, color="#1f4e9c", width=1.0):
        if not pts:
            return
        d = " ".join(f"{_f(self.X(x))},{_f(self.Y(y))}" for x, y in pts)
        self.parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{d}"/>')

    def dot(self, x, y, r=1.5, color="#1f4e9c"):
        self.parts.append(f'<circle cx="{_f(self.X(x))}" cy="{_f(self.Y(y))}" r="{r}" fill="{color}"/>')

    def span(self, a, b, y, color="#c0392b"):
        self.parts.append(f'<line x1="{_f(self.X(a))}" y1="{_f(self.Y(y))}" x2="{_f(self.X(b))}" '
                          f'y2="{_f(self.Y(y))}" stroke="{color}" stroke-width="3"/>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>", ""])


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_f(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def map_figure(desc: SurgeredMapDescriptor, samples: int = DEFAULT_SAMPLES, eps: float = 1e-9):
    top = desc.b_beta
    rows = []
    for i in range(samples):
        y = top * i / (samples - 1)
        g, r = desc.eval(y, eps)
        rows.append((y, g, r))
    cv = _Canvas((0.0, top), (0.0, top), f"surgered map, beta = {_f(desc.bf)}")
    for rec in desc.records:
        if rec.orbit_index is not None:
            cv.span(rec.u, rec.v, 0.0)
    cv.polyline([(0.0, 0.0), (top, top)], color="#bbb")
    cv.polyline([(y, g) for y, g, _ in rows])
    return cv.render(), _csv(["y", "g", "radius"], rows)


def tree_figure(desc: SurgeredMapDescriptor, depth: int = 10):
    levels = enumerate_tree(desc.beta, desc.orbit, depth)
    rows = sorted(((nd.level, nd.word if isinstance(nd.word, str) else str(nd.word), float(nd.point))
                   for nd in iter_nodes(levels)), key=lambda r: (r[0], r[2], r[1]))
    cv = _Canvas((0.0, 1.0), (float(depth) + 0.5, -0.5), f"first-hit preimages of c_t, depth {depth}")
    for lv, _, x in rows:
        cv.dot(x, float(lv), r=2.0)
    return cv.render(), _csv(["level", "word", "x"], rows)


def lengths_figure(desc: SurgeredMapDescriptor, n_max: int = 30):
    F = level_counts(desc.beta, desc.orbit, n_max)
    sched = desc.schedule
    rows = []
    cum = 0.0
    for n in range(1, n_max + 1):
        a = sched.a(n)
        cum += F[n] * a
        rows.append((n, F[n], a, cum))
    total = desc.mass.sum_Fa(1)
    cv = _Canvas((0.0, float(n_max)), (0.0, max(cum, total[1]) * 1.05), "accumulated inserted length")
    cv.polyline([(0.0, total[1]), (float(n_max), total[1])], color="#bbb")
    cv.polyline([(float(n), c) for n, _, _, c in rows])
    for n, _, _, c in rows:
        cv.dot(float(n), c)
    return cv.render(), _csv(["n", "F", "a", "cum_Fa"], rows)


def basin_figure(desc: SurgeredMapDescriptor, samples: int = 128, max_iter: int = 48):
    # seeds on the Cantor part never reach an insertion; they show up at -1
    top = desc.b_beta
    rows = []
    for i in range(samples):
        y = top * (i + 0.5) / samples
        rep = simulate_basin(desc, y, max_iter)
        ent = -1 if rep.entered_cycle_at is None else rep.entered_cycle_at
        rows.append((y, rep.classification, ent))
    hi = max(max(r[2] for r in rows), 1)
    cv = _Canvas((0.0, top), (-1.0, float(hi) + 1), "iterations to reach the orbit intervals")
    for y, cls, ent in rows:
        cv.dot(y, float(ent), color="#1f4e9c" if ent >= 0 else "#c0392b")
    return cv.render(), _csv(["y0", "classification", "entered_at"], rows)


def render(desc: SurgeredMapDescriptor, what: str, samples: int = DEFAULT_SAMPLES):
    if what == "map":
        return map_figure(desc, samples)
    if what == "tree":
        return tree_figure(desc, min(desc.N, 10))
    if what == "lengths":
        return lengths_figure(desc)
    if what == "basin":
        return basin_figure(desc, min(samples, 128))
    raise ValueError(f"unknown plot {what!r}; choose from {WHATS}")


def write_plot(desc: SurgeredMapDescriptor, what: str, out, samples: int = DEFAULT_SAMPLES):
    """Write ``out`` (SVG) and the CSV beside it; returns both paths."""
    svg, table = render(desc, what, samples)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg)
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(table)
    return out, csv_path
