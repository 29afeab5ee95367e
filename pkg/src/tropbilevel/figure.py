"""Two-panel SVG rendering of a 2-D instance.

Left panel: the x polytope with the partition regions induced by the
diagonal through x*.  Right panel: the y polytope with the regions where a
coordinate of y is pinned to the corresponding coordinate of ymax.  All
geometry is computed in exact rationals; floats appear only when printing
SVG coordinates.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .bilevel import BilevelInstance, x_star
from .errors import UnsupportedInstanceError
from .polytope import greatest_point
from .semiring import TropVector

PANEL_W = 340
PANEL_H = 340
MARGIN = 52
GAP = 70

# region fills (piece by index set), then shared stroke/marker colors
FILL_LO = "#aed6f1"
FILL_HI = "#f9d9a7"
DIAG_COLOR = "#c0392b"
SEG_COLOR = "#7f8c8d"
GEN_COLOR = "#21618c"
MARK_COLOR = "#c0392b"


def _fr(v) -> Fraction:
    return v.value  # TropScalar, known finite


def tropical_segment(p: TropVector, q: TropVector) -> list[tuple[Fraction, Fraction]]:
    """Polyline vertices of the tropical segment from p to q (2-D, finite)."""
    p1, p2 = _fr(p[0]), _fr(p[1])
    q1, q2 = _fr(q[0]), _fr(q[1])
    join = (max(p1, q1), max(p2, q2))

    def half(a1, a2, b1, b2):
        # points max(a, t + b) for t running up to 0: from a to the join
        pts = [(a1, a2)]
        for t in sorted({a1 - b1, a2 - b2}):
            if t < 0:
                pts.append((max(a1, t + b1), max(a2, t + b2)))
        return pts

    forward = half(p1, p2, q1, q2)  # p ... join
    back = half(q1, q2, p1, p2)  # q ... join
    pts = forward + [join] + back[::-1]
    out = [pts[0]]
    for pt in pts[1:]:
        if pt != out[-1]:
            out.append(pt)
    return out


def _clip_halfplane(poly, keep):
    """Sutherland-Hodgman step: keep(pt) true side, exact arithmetic."""
    out = []
    for i, cur in enumerate(poly):
        prev = poly[i - 1]
        cin, pin = keep(cur), keep(prev)
        if cin != pin:
            # edge crosses the boundary keep(pt) == 0 line
            (x1, y1), (x2, y2) = prev, cur
            f1, f2 = keep.margin(prev), keep.margin(cur)
            t = f1 / (f1 - f2)
            out.append((x1 + t * (x2 - x1), y1 + t * (y2 - y1)))
        if cin:
            out.append(cur)
    return out


class _HalfPlane:
    """Signed margin >= 0 means inside; boundary is margin == 0."""

    def __init__(self, fn):
        self.margin = fn

    def __call__(self, pt):
        return self.margin(pt) >= 0


class _Panel:
    def __init__(self, x0, title, points):
        lo1 = min(p[0] for p in points)
        hi1 = max(p[0] for p in points)
        lo2 = min(p[1] for p in points)
        hi2 = max(p[1] for p in points)
        pad = max(Fraction(1), (hi1 - lo1) / 8, (hi2 - lo2) / 8)
        self.lo1, self.hi1 = lo1 - pad, hi1 + pad
        self.lo2, self.hi2 = lo2 - pad, hi2 + pad
        self.x0 = x0
        self.title = title
        self.body: list[str] = []

    def fx(self, v) -> float:
        return self.x0 + float((v - self.lo1) / (self.hi1 - self.lo1)) * PANEL_W

    def fy(self, v) -> float:
        return MARGIN + float((self.hi2 - v) / (self.hi2 - self.lo2)) * PANEL_H

    def corners(self):
        return [
            (self.lo1, self.lo2),
            (self.hi1, self.lo2),
            (self.hi1, self.hi2),
            (self.lo1, self.hi2),
        ]

    def polygon(self, pts, fill, opacity="0.55"):
        if len(pts) < 3:
            return
        coords = " ".join(f"{self.fx(a):.2f},{self.fy(b):.2f}" for a, b in pts)
        self.body.append(
            f'<polygon points="{coords}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>'
        )

    def polyline(self, pts, color, width="2", dash=None):
        coords = " ".join(f"{self.fx(a):.2f},{self.fy(b):.2f}" for a, b in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.body.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"{extra}/>'
        )

    def dot(self, a, b, color, r=4.5):
        self.body.append(
            f'<circle cx="{self.fx(a):.2f}" cy="{self.fy(b):.2f}" r="{r}" fill="{color}"/>'
        )

    def label(self, a, b, text, dx=7, dy=-7, color="#2c3e50", size=12):
        self.body.append(
            f'<text x="{self.fx(a) + dx:.2f}" y="{self.fy(b) + dy:.2f}" '
            f'font-size="{size}" fill="{color}">{text}</text>'
        )

    def frame_and_grid(self):
        parts = []
        # light integer grid when the window is small enough to stay readable
        if self.hi1 - self.lo1 <= 14 and self.hi2 - self.lo2 <= 14:
            v = Fraction(math.ceil(self.lo1))
            while v <= self.hi1:
                x = self.fx(v)
                parts.append(
                    f'<line x1="{x:.2f}" y1="{MARGIN}" x2="{x:.2f}" '
                    f'y2="{MARGIN + PANEL_H}" stroke="#eceff1" stroke-width="1"/>'
                )
                parts.append(
                    f'<text x="{x:.2f}" y="{MARGIN + PANEL_H + 16}" font-size="10" '
                    f'fill="#90a4ae" text-anchor="middle">{v}</text>'
                )
                v += 1
            v = Fraction(math.ceil(self.lo2))
            while v <= self.hi2:
                y = self.fy(v)
                parts.append(
                    f'<line x1="{self.x0}" y1="{y:.2f}" x2="{self.x0 + PANEL_W}" '
                    f'y2="{y:.2f}" stroke="#eceff1" stroke-width="1"/>'
                )
                parts.append(
                    f'<text x="{self.x0 - 6}" y="{y + 3:.2f}" font-size="10" '
                    f'fill="#90a4ae" text-anchor="end">{v}</text>'
                )
                v += 1
        parts.append(
            f'<rect x="{self.x0}" y="{MARGIN}" width="{PANEL_W}" height="{PANEL_H}" '
            f'fill="none" stroke="#455a64" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{self.x0 + PANEL_W / 2:.2f}" y="{MARGIN - 14}" font-size="14" '
            f'fill="#263238" text-anchor="middle">{self.title}</text>'
        )
        return parts

    def render(self) -> str:
        return "\n".join(self.frame_and_grid() + self.body)


def _finite_pairs(P) -> list[tuple[Fraction, Fraction]]:
    return [(_fr(g[0]), _fr(g[1])) for g in P.generators]


def figure_svg(inst: BilevelInstance) -> str:
    """SVG for a 2-D instance; raises UnsupportedInstanceError otherwise."""
    if inst.dim != 2:
        raise UnsupportedInstanceError(
            f"figure rendering needs dim = 2, got {inst.dim}"
        )
    for P in (inst.tp1, inst.tp2):
        for g in P.generators:
            if not g.is_finite():
                raise UnsupportedInstanceError(
                    "figure rendering needs finite generators"
                )
    ymax = greatest_point(inst.tp2)
    xstar = x_star(ymax)
    xs1, xs2 = _fr(xstar[0]), _fr(xstar[1])
    ym1, ym2 = _fr(ymax[0]), _fr(ymax[1])

    left_pts = _finite_pairs(inst.tp1) + [(xs1, xs2)]
    right_pts = _finite_pairs(inst.tp2) + [(ym1, ym2)]
    left = _Panel(MARGIN, "x polytope and x-side pieces", left_pts)
    right = _Panel(MARGIN + PANEL_W + GAP, "y polytope and y-side pieces", right_pts)

    # x panel: the diagonal x_2 - x_1 = xstar_2 - xstar_1 splits the plane into
    # the piece where coordinate 1 attains (below) and where 2 attains (above)
    d = xs2 - xs1
    below = _clip_halfplane(
        left.corners(), _HalfPlane(lambda pt: (pt[0] + d) - pt[1])
    )
    above = _clip_halfplane(
        left.corners(), _HalfPlane(lambda pt: pt[1] - (pt[0] + d))
    )
    left.polygon(below, FILL_LO, opacity="0.35")
    left.polygon(above, FILL_HI, opacity="0.35")
    diag = [
        (left.lo1, left.lo1 + d),
        (left.hi1, left.hi1 + d),
    ]
    left.polyline(diag, DIAG_COLOR, width="2")
    left.label(left.lo1 + Fraction(1, 2), left.lo1 + d, "piece {1,2}", dy=-8, color=DIAG_COLOR)

    # y panel: piece {1} pins y_1 = ymax_1 (vertical), piece {2} pins y_2
    right.polyline([(ym1, right.lo2), (ym1, right.hi2)], "#2e86c1", width="3")
    right.polyline([(right.lo1, ym2), (right.hi1, ym2)], "#ca6f1e", width="3")
    right.label(ym1, right.lo2 + Fraction(1, 2), "piece {1}", color="#2e86c1")
    right.label(right.lo1 + Fraction(1, 2), ym2, "piece {2}", dy=-6, color="#ca6f1e")

    for panel, P in ((left, inst.tp1), (right, inst.tp2)):
        gens = P.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                panel.polyline(tropical_segment(gens[i], gens[j]), SEG_COLOR, width="1.6")
        for g in gens:
            a, b = _fr(g[0]), _fr(g[1])
            panel.dot(a, b, GEN_COLOR)
            panel.label(a, b, f"({a}, {b})", size=11)

    left.dot(xs1, xs2, MARK_COLOR, r=5)
    left.label(xs1, xs2, "x*", dy=14, color=MARK_COLOR)
    right.dot(ym1, ym2, MARK_COLOR, r=5)
    right.label(ym1, ym2, "ymax", dy=14, color=MARK_COLOR)

    width = 2 * PANEL_W + GAP + 2 * MARGIN
    height = PANEL_H + 2 * MARGIN + 10
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
            left.render(),
            right.render(),
            "</svg>",
        ]
    )
