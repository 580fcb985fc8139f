"""Static SVG pictures of point sets and L-shaped embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .embedder import Embedding
from .geometry import PointSet, staircase_boxes


@dataclass(frozen=True)
class RenderSpec:
    cell: int = 40
    disk: int = 6
    edge_width: int = 3
    box_frames: bool = True
    labels: bool = False

    def __post_init__(self):
        if self.cell <= 0 or self.disk <= 0 or self.edge_width <= 0:
            raise ValueError("render sizes must be positive")


def render_svg(p: PointSet, e: Optional[Embedding] = None, spec: RenderSpec = RenderSpec(),
               boxes: Optional[Sequence[int]] = None) -> str:
    """SVG text; points sit on the integer grid, y grows upwards.

    Dashed frames are drawn around staircase boxes when ``spec.box_frames``
    is set and the point set is a staircase (or ``boxes`` is given).
    """
    n, c = p.n, spec.cell
    if e is not None and len(e.placement) != n:
        raise ValueError(f"embedding has {len(e.placement)} vertices but point set has {n} points")
    size = (n + 1) * c

    def xy(j: int) -> tuple[int, int]:
        x, y = p.point(j)
        return x * c, (n + 1 - y) * c

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    if spec.box_frames:
        sizes = tuple(boxes) if boxes is not None else staircase_boxes(p)
        if sizes is not None:
            pad = c // 3
            start = 0
            for a in sizes:
                xs = [xy(j)[0] for j in range(start, start + a)]
                ys = [xy(j)[1] for j in range(start, start + a)]
                x0, y0 = min(xs) - pad, min(ys) - pad
                w, h = max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad
                out.append(f'<rect class="box" x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" '
                           f'stroke="gray" stroke-width="1" stroke-dasharray="4 3"/>')
                start += a
    if e is not None:
        for (a, b), h in sorted(e.orient.items()):
            ax, ay = xy(e.placement[a])
            bx, by = xy(e.placement[b])
            kx, ky = (bx, ay) if h else (ax, by)
            out.append(f'<polyline class="edge" points="{ax},{ay} {kx},{ky} {bx},{by}" fill="none" '
                       f'stroke="black" stroke-width="{spec.edge_width}" stroke-linejoin="miter"/>')
    for j in range(n):
        x, y = xy(j)
        out.append(f'<circle class="point" cx="{x}" cy="{y}" r="{spec.disk}" fill="black"/>')
    if spec.labels and e is not None:
        for v, j in enumerate(e.placement):
            x, y = xy(j)
            out.append(f'<text x="{x + spec.disk + 2}" y="{y - spec.disk - 2}" font-size="{max(c // 3, 8)}" '
                       f'font-family="sans-serif">{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
