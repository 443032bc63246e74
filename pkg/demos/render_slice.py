"""Render a planar slice of the tiling of l_2^3 through the origin to ``slice.svg``.

The picture shows level-0 tiles around the origin (central tile, petals
and strips along e_1) and level-1 and level-2 tiles split by Voronoi cells.
"""
import sys
from pathlib import Path

from starlike_tiling.config import TilingConfig, build_tiling
from starlike_tiling.render import render_svg

cfg = TilingConfig.load(Path(__file__).parent / "configs" / "lp2-3d.json")
tiling = build_tiling(cfg)
out = Path(sys.argv[1] if len(sys.argv) > 1 else "slice.svg")
out.write_text(render_svg(tiling.locate_full_many, 3, (0, 1), -8.0, 8.0, pixels=240,
                          title="l2^3 slice e1:e2"))
print(f"wrote {out}")
