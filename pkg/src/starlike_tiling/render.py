"""SVG slices of a tiling through the origin."""
from __future__ import annotations

import colorsys
import hashlib
from xml.sax.saxutils import quoteattr

import numpy as np


def tile_color(key: str) -> str:
    """Stable colour for a tile key."""
    h = hashlib.sha1(key.encode()).digest()
    hue = h[0] / 255.0
    sat = 0.45 + 0.4 * h[1] / 255.0
    val = 0.7 + 0.3 * h[2] / 255.0
    r, g, b = colorsys.hsv_to_rgb(hue, sat, val)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def slice_ids(locate_many, dim: int, plane: tuple[int, int], lo: float, hi: float, pixels: int):
    """Tile keys on a ``pixels x pixels`` grid of pixel centres in the plane of ``e_i, e_j`` (0-based)."""
    i, j = plane
    step = (hi - lo) / pixels
    ticks = lo + step * (np.arange(pixels) + 0.5)
    X = np.zeros((pixels * pixels, dim))
    X[:, i] = np.tile(ticks, pixels)
    X[:, j] = np.repeat(ticks[::-1], pixels)  # first row is the top of the image
    keys = [t.key() for t in locate_many(X)]
    return [keys[r * pixels:(r + 1) * pixels] for r in range(pixels)]


def render_svg(locate_many, dim: int, plane: tuple[int, int], lo: float, hi: float,
               pixels: int = 200, size: int = 600, title: str | None = None) -> str:
    rows = slice_ids(locate_many, dim, plane, lo, hi, pixels)
    px = size / pixels
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}" shape-rendering="crispEdges">']
    if title:
        out.append(f"<title>{title}</title>")
    for r, row in enumerate(rows):
        start = 0
        for c in range(1, pixels + 1):
            if c == pixels or row[c] != row[start]:
                out.append(f'<rect x="{start * px:.3f}" y="{r * px:.3f}" width="{(c - start) * px:.3f}" '
                           f'height="{px:.3f}" fill="{tile_color(row[start])}" data-tile={quoteattr(row[start])}/>')
                start = c
    # axes through the origin
    if lo < 0 < hi:
        o = (0 - lo) / (hi - lo) * size
        out.append(f'<line x1="{o:.3f}" y1="0" x2="{o:.3f}" y2="{size}" stroke="#000" stroke-width="0.5"/>')
        out.append(f'<line x1="0" y1="{o:.3f}" x2="{size}" y2="{o:.3f}" stroke="#000" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
