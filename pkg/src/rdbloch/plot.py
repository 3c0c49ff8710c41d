"""Minimal SVG emitter for the (alpha, beta) stability chart."""
from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=80, right=40, top=40, bottom=70)
COLORS = {"THEOREM1": "#1f77b4", "KATO": "#d62728", "SERIES": "#2ca02c"}


def _clip(points, xmax, ymax):
    """Leading run of a curve inside [0, xmax] x [0, ymax], cut at the first exit."""
    out = []
    for i, (x, y) in enumerate(points):
        if x <= xmax and y <= ymax:
            out.append((x, y))
            continue
        if out:
            x0, y0 = out[-1]
            # fraction along the segment where it leaves the box
            fx = (xmax - x0) / (x - x0) if x > xmax else 1.0
            fy = (ymax - y0) / (y - y0) if y > ymax else 1.0
            f = min(fx, fy)
            out.append((x0 + f * (x - x0), y0 + f * (y - y0)))
        break
    return out


def stability_chart(curves, region, kappa: float, alpha_max: float = 2.0, beta_max: float = 4.0,
                    title: str = "Mathieu stability chart") -> str:
    """SVG with one polyline per curve and the numeric stable region shaded.

    ``curves`` and ``region`` hold (alpha, beta) points in absolute units;
    axes are drawn in alpha/kappa^2 and beta/kappa^2 over
    [0, alpha_max] x [0, beta_max].
    """
    k2 = kappa * kappa
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(a):
        return MARGIN["left"] + a / alpha_max * pw

    def py(b):
        return MARGIN["top"] + ph - b / beta_max * ph

    def fmt(pts):
        return " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in pts)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
             f'viewBox="0 0 {WIDTH} {HEIGHT}">',
             f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>']

    # stable side of the numeric boundary: alpha >= alpha_num(beta)
    edge = [(min(a / k2, alpha_max), min(b / k2, beta_max)) for a, b in sorted(region.points, key=lambda p: p[1])]
    edge = [p for p in edge if p[1] <= beta_max]
    poly = edge + [(alpha_max, edge[-1][1]), (alpha_max, 0.0)]
    parts.append(f'<polygon class="region" data-kind="NUMERIC" points="{fmt(poly)}" '
                 f'fill="#bbbbbb" fill-opacity="0.5" stroke="none"/>')

    x0, y0 = px(0), py(0)
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{px(alpha_max)}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{py(beta_max)}" stroke="black"/>')
    for i in range(5):
        a = alpha_max * i / 4
        b = beta_max * i / 4
        parts.append(f'<line x1="{px(a):.2f}" y1="{y0}" x2="{px(a):.2f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(f'<text x="{px(a):.2f}" y="{y0 + 20}" font-size="12" text-anchor="middle">{a:g}</text>')
        parts.append(f'<line x1="{x0 - 5}" y1="{py(b):.2f}" x2="{x0}" y2="{py(b):.2f}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{py(b) + 4:.2f}" font-size="12" text-anchor="end">{b:g}</text>')
    parts.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 20}" font-size="14" '
                 f'text-anchor="middle">α/κ²</text>')
    parts.append(f'<text x="20" y="{MARGIN["top"] + ph / 2}" font-size="14" text-anchor="middle" '
                 f'transform="rotate(-90 20 {MARGIN["top"] + ph / 2})">β/κ²</text>')
    parts.append(f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle">'
                 f'{escape(title)} (κ = {kappa:g})</text>')

    for curve in curves:
        name = curve.kind.value
        pts = _clip([(a / k2, b / k2) for a, b in curve.points], alpha_max, beta_max)
        if len(pts) < 2:
            continue
        color = COLORS.get(name, "black")
        parts.append(f'<polyline class="boundary" data-kind="{name}" points="{fmt(pts)}" '
                     f'fill="none" stroke="{color}" stroke-width="2"/>')
        lx, ly = pts[-1]
        parts.append(f'<text class="label" x="{px(lx) - 4:.2f}" y="{py(ly) - 6:.2f}" font-size="13" '
                     f'text-anchor="end" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
