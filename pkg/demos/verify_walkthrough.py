"""Build a tiling, locate a few points and run a small certification pass."""
import numpy as np

from starlike_tiling.config import TilingConfig, build_tiling
from starlike_tiling.verify import run_suite

cfg = TilingConfig.quick(3, p=1, samples=2000)
T = build_tiling(cfg)
print("systems per level:", {k: len(s) for k, s in T.systems.items()})
print("certified constants:", {k: float(v) for k, v in vars(T.derived()).items() if k != "c"})

for x in ([0.0, 0.0, 0.0], [3.2, -1.0, 0.5], [0.4, 7.9, -6.1]):
    x = np.array(x)
    tid = T.locate_full(x)
    c = T.full_center(tid)
    print(f"{x} -> {tid.key():<28} center {np.round(c, 3)}  |x-c|/r = {T.space.norm(x - c) / T.r:.2f}")

rep = run_suite(cfg, T)
for rec in rep.checks:
    extra = f" max ratio {rec.max_ratio:.2f}" if rec.max_ratio is not None else ""
    print(f"{'pass' if rec.passed else 'FAIL'}  {rec.name:<26} {rec.samples:>6} probes{extra}")
print("all checks passed" if rep.passed else f"{len(rep.failures)} checks failed")
