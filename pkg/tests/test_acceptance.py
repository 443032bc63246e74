"""Acceptance criteria, one test per criterion (criterion 3 per space).

Each test prints a ``[PASS]``/``[FAIL] criterion N: ...`` line; the lines are
collected again in the terminal summary.  Run directly with
``python tests/test_acceptance.py`` or through pytest.
"""
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from starlike_tiling import SpaceDescriptor, cli, compute_K_bound, k_projection_bound
from starlike_tiling.errors import Infeasible
from starlike_tiling.config import TilingConfig, build_tiling
from starlike_tiling.planar import TemplateConstants, Variant, admissible_grid, make_template, verify_template
from starlike_tiling.verify import run_suite

from oracles import grid_quotient_norm

POLY3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0.5, -0.5, 1], [0.3, 0.8, -0.6]]


def test_criterion_1_constants(record_criterion):
    t0 = time.perf_counter()
    ka = compute_K_bound(TemplateConstants(Variant.A, Fraction("1.3"), Fraction("0.9"),
                                           Fraction("0.1"), Fraction(5, 9))).Kbound
    kb = compute_K_bound(TemplateConstants(Variant.B, Fraction("1.8"), Fraction("0.8"),
                                           Fraction("0.4") / 3, Fraction("0.5"))).Kbound
    dt = time.perf_counter() - t0
    ok = ka == 177 and kb == Fraction(235, 2) and dt < 1.0
    record_criterion(1, ok, f"K(A)={ka} K(B)={kb} exact, {dt:.3f}s")
    assert ok


def test_criterion_2_template(record_criterion):
    t0 = time.perf_counter()
    named = [make_template("A", Fraction("1.3"), Fraction("0.9")),
             make_template("B", Fraction("1.8"), Fraction("0.8"))]
    bad_named = [c.variant.value for c in named if not verify_template(c).passed]
    grid = admissible_grid(50)
    bad_grid, b_feasible = [], 0
    for a, b in grid:
        for v in ("A", "B"):
            try:
                c = make_template(v, a, b)
            except Infeasible:
                assert v == "B"  # every grid pair admits variant A
                continue
            b_feasible += v == "B"
            if not verify_template(c).passed:
                bad_grid.append((v, a, b))
    corrupt = verify_template(TemplateConstants(Variant.A, Fraction("1.3"), Fraction("0.9"),
                                                Fraction("0.2"), Fraction(5, 9)))
    lc = corrupt["L.c"]
    dt = time.perf_counter() - t0
    ok = (not bad_named and not bad_grid and len(grid) == 2500 and not lc.passed
          and tuple(lc.witness) == (Fraction(3, 2), Fraction(7, 10)) and dt < 5.0)
    record_criterion(2, ok, f"{len(grid)} grid pairs (A) + {b_feasible} B-feasible, {len(bad_grid)} failing; "
                            f"corrupted L.c witness {tuple(float(v) for v in lc.witness)}, {dt:.2f}s")
    assert ok


SPACES = [(p, M) for p in (1.0, 2.0, math.inf) for M in (2, 3, 5)]
FULL_CHECKS = ("full.covering", "full.disjointness", "full.normality", "full.inner_ball", "full.starlike")


@pytest.mark.parametrize("p,M", SPACES, ids=[f"l{p:g}^{M}" for p, M in SPACES])
def test_criterion_3_full_tiling(p, M, record_criterion):
    cfg = TilingConfig.quick(M, p, samples=10_000, box=10.0)
    t0 = time.perf_counter()
    rep = run_suite(cfg)
    dt = time.perf_counter() - t0
    recs = {name: rep[name] for name in FULL_CHECKS}
    ratio = recs["full.normality"].max_ratio
    bad = [n for n, r in recs.items() if not r.passed]
    ok = not bad and ratio <= 177 + 1e-6 and dt < 60.0 and recs["full.covering"].samples == 10_000
    record_criterion(3, ok, f"l_{p:g}^{M}: max ratio {ratio:.2f} <= 177, inner-ball probes "
                            f"{recs['full.inner_ball'].samples}, segment checks {recs['full.starlike'].samples}, "
                            f"failing {bad or 'none'}, {dt:.1f}s")
    assert ok


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf], ids=["l1", "l2", "linf"])
def test_criterion_4_lettered(p, record_criterion):
    cfg = TilingConfig.quick(3, p, samples=10_000)
    t0 = time.perf_counter()
    rep = run_suite(cfg)
    dt = time.perf_counter() - t0
    lettered = [c for c in rep.checks if c.name.startswith(("system[", "quotient["))]
    names = {c.name for c in lettered}
    expected = {f"system[{k}].{s}" for k in (1, 2) for s in ("1a", "1b", "frame")}
    expected |= {f"quotient[{k}].{s}" for k in (0, 1) for s in ("2a_lower", "2a_upper", "2b", "2c", "2d")}
    expected |= {"quotient[2].2a_lower", "quotient[2].2a_upper", "quotient[2].2d", "quotient[2].2c_prime"}
    bad = [c.name for c in lettered if not c.passed]
    frames = [rep[f"system[{k}].frame"] for k in (1, 2)]
    ok = not bad and expected <= names and all(f.samples == 10_000 for f in frames) and dt < 30.0
    floor = min(f.details["min_sup"] - f.details["floor"] for f in frames)
    record_criterion(4, ok, f"l_{p:g}^3: {len(lettered)} lettered checks, failing {bad or 'none'}, "
                            f"frame margin over delta-eps {floor:.3g}, {dt:.1f}s")
    assert ok


def test_criterion_5_quotient_oracle(record_criterion):
    s = SpaceDescriptor.polytope(POLY3)
    F = np.asarray(POLY3, dtype=float)
    oracle = lambda Y: np.max(np.abs(Y @ F.T), axis=1)  # noqa: E731
    t0 = time.perf_counter()
    worst = 0.0
    for k in (1, 2):
        X = np.random.default_rng(100 + k).uniform(-5, 5, (1000, 3))
        worst = max(worst, float(np.max(np.abs(s.quotient_norms(X, k) - grid_quotient_norm(oracle, X, k)))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30.0
    record_criterion(5, ok, f"polytope norm in R^3, 2x1000 inputs, max |diff| {worst:.2e}, {dt:.1f}s")
    assert ok


def test_criterion_6_projection(record_criterion):
    cfg = TilingConfig.quick(5, 2, mode="projection", N=2, samples=10_000)
    t0 = time.perf_counter()
    rep = run_suite(cfg)
    dt = time.perf_counter() - t0
    conv, outer = rep["projection.convexity"], rep["projection.outer"]
    pc = rep.constants["projection"]
    k352 = k_projection_bound(1.0, 0.2, 17.5, 0.1)
    R = float(build_tiling(cfg).derived().R)
    expected_outer = R * (1 + pc["R_N"]) + pc["t_N"]
    ok = (conv.passed and outer.passed and conv.samples >= 1000 * (cfg.N + 1)
          and abs(pc["outer_radius"] - expected_outer) < 1e-12 and k352 == pytest.approx(352, abs=1e-9)
          and dt < 60.0)
    record_criterion(6, ok, f"l_2^5 N=2: convexity {conv.samples} midpoints, outer radius "
                            f"{pc['outer_radius']:.4g} ({outer.samples} members), bound(1,0.2,17.5,0.1)={k352:g}, {dt:.1f}s")
    assert ok


def test_criterion_7_determinism(tmp_path, record_criterion, capsys):
    cfg = TilingConfig.quick(3, 2, samples=2000)
    path = tmp_path / "cfg.json"
    path.write_text(cfg.dumps())
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [cli.main(["verify", "--config", str(path), "--out", str(o)]) for o in outs]
    capsys.readouterr()
    same = outs[0].read_bytes() == outs[1].read_bytes()
    same_log = outs[0].with_suffix(".samples.jsonl").read_bytes() == outs[1].with_suffix(".samples.jsonl").read_bytes()
    ok = codes == [0, 0] and same and same_log and json.loads(outs[0].read_text())["passed"]
    record_criterion(7, ok, f"two verify runs, exit codes {codes}, reports identical={same}, logs identical={same_log}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
