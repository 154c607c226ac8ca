"""Static SVG pictures of a solution, written by hand for byte-stable output.

``d = 1``: lower and upper envelopes of ``Y_t`` along scenario paths.
``d = 2``: ``Y_{t_k}`` along the all-up and all-down paths, one outline per level.
"""
from __future__ import annotations

import numpy as np

from .setrv import SetProcess
from .tree import FiltrationTree

W, H, PAD = 640, 400, 48
MAX_PATHS = 32


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    def __init__(self, xlim, ylim):
        (self.x0, self.x1), (self.y0, self.y1) = xlim, ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y1 + 0.5

    def px(self, x, y):
        u = PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2 * PAD)
        v = H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2 * PAD)
        return u, v

    def axes(self, xlabel, ylabel) -> list[str]:
        out = [
            f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" fill="none" stroke="#999"/>',
            f'<text x="{W / 2:.0f}" y="{H - 12}" text-anchor="middle">{xlabel}</text>',
            f'<text x="14" y="{H / 2:.0f}" transform="rotate(-90 14 {H / 2:.0f})" text-anchor="middle">{ylabel}</text>',
        ]
        for x in np.linspace(self.x0, self.x1, 5):
            u, _ = self.px(x, self.y0)
            out.append(f'<text x="{_f(u)}" y="{H - PAD + 16}" text-anchor="middle">{x:.3g}</text>')
        for y in np.linspace(self.y0, self.y1, 5):
            _, v = self.px(self.x0, y)
            out.append(f'<text x="{PAD - 6}" y="{_f(v + 4)}" text-anchor="end">{y:.3g}</text>')
        return out


def _doc(title: str, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif" font-size="11">'
    )
    return "\n".join([head, f'<text x="{PAD}" y="20" font-size="13">{title}</text>', *body, "</svg>"]) + "\n"


def _polyline(frame, xs, ys, colour, width=1.0, opacity=1.0) -> str:
    pts = " ".join(f"{_f(u)},{_f(v)}" for u, v in (frame.px(x, y) for x, y in zip(xs, ys)))
    return (
        f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="{width}" '
        f'stroke-opacity="{opacity}"/>'
    )


def _paths_to_draw(steps: int) -> list[int]:
    n = 1 << steps
    if n <= MAX_PATHS:
        return list(range(n))
    return sorted({int(round(i)) for i in np.linspace(0, n - 1, MAX_PATHS)})


def interval_tubes_svg(tree: FiltrationTree, y: SetProcess, title: str = "Y tubes") -> str:
    N = tree.steps
    times = tree.times()
    bounds = [np.array([b.interval_bounds() for b in s.bodies]) for s in y.slices]
    lo = min(float(b[:, 0].min()) for b in bounds)
    hi = max(float(b[:, 1].max()) for b in bounds)
    frame = _Frame((0.0, tree.horizon), (lo, hi))
    body = frame.axes("t", "Y")
    for a in _paths_to_draw(N):
        nodes = [a >> (N - k) for k in range(N + 1)]
        low = [bounds[k][i, 0] for k, i in enumerate(nodes)]
        up = [bounds[k][i, 1] for k, i in enumerate(nodes)]
        body.append(_polyline(frame, times, low, "#1f77b4", opacity=0.6))
        body.append(_polyline(frame, times, up, "#d62728", opacity=0.6))
    return _doc(title, body)


def polygon_snapshots_svg(tree: FiltrationTree, y: SetProcess, title: str = "Y snapshots") -> str:
    N = tree.steps
    routes = [("#1f77b4", [0] * (N + 1)), ("#d62728", [(1 << k) - 1 for k in range(N + 1)])]
    verts = np.vstack([y[k][i].vertices for _, nodes in routes for k, i in enumerate(nodes)])
    (x0, y0), (x1, y1) = verts.min(axis=0), verts.max(axis=0)
    span = max(x1 - x0, y1 - y0, 1e-9)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    aspect = (W - 2 * PAD) / (H - 2 * PAD)
    frame = _Frame((cx - span * aspect / 2, cx + span * aspect / 2), (cy - span / 2, cy + span / 2))
    body = frame.axes("x1", "x2")
    for colour, nodes in routes:
        for k, i in enumerate(nodes):
            v = y[k][i].vertices
            pts = np.vstack((v, v[:1]))
            op = 0.25 + 0.75 * (k / max(N, 1))
            body.append(_polyline(frame, pts[:, 0], pts[:, 1], colour, width=1.2, opacity=round(op, 3)))
    return _doc(title, body)


def solution_svg(tree: FiltrationTree, y: SetProcess, title: str) -> str:
    if y.dim == 1:
        return interval_tubes_svg(tree, y, title)
    if y.dim == 2:
        return polygon_snapshots_svg(tree, y, title)
    raise ValueError("pictures exist for d = 1 and d = 2 only")
