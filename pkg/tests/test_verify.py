import json
from fractions import Fraction

import numpy as np
import pytest

from starlike_tiling import SpaceDescriptor
from starlike_tiling.config import TilingConfig
from starlike_tiling.planar import TemplateConstants, Variant
from starlike_tiling.verify import run_suite, sample_points, write_report


@pytest.fixture(scope="module")
def small_report():
    from conftest import tiling

    cfg = TilingConfig.quick(3, 2, samples=400, trials=2000)
    log = []
    return cfg, run_suite(cfg, tiling(2.0, 3), log=log), log


def test_small_suite_passes(small_report):
    _, rep, log = small_report
    assert rep.passed, [(c.name, c.witnesses[:1]) for c in rep.failures]
    names = rep.names()
    assert names[:3] == ["template.L.a", "template.L.b", "template.L.c"]
    assert "full.normality" in names and "full.starlike" in names
    assert not any(n.startswith("projection.") for n in names)
    assert len(log) == 400


def test_normality_ratio_is_bounded(small_report):
    _, rep, _ = small_report
    assert 0 < rep["full.normality"].max_ratio <= 177 + 1e-6


def test_sample_seeds_replay():
    X = sample_points(7, 5, 3, 10.0)
    for i, x in enumerate(X):
        assert np.array_equal(np.random.default_rng([7, i]).uniform(-10, 10, 3), x)
    assert np.array_equal(sample_points(7, 3, 3, 10.0, start=2), sample_points(7, 5, 3, 10.0)[2:])


def test_reports_are_deterministic(tmp_path):
    from conftest import tiling

    cfg = TilingConfig.quick(2, float("inf"), samples=300, trials=2000)
    paths = []
    for n in range(2):
        log = []
        rep = run_suite(cfg, tiling(float("inf"), 2), log=log)
        path = tmp_path / f"r{n}.json"
        write_report(rep, path, log)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].with_suffix(".samples.jsonl").read_bytes() == paths[1].with_suffix(".samples.jsonl").read_bytes()
    data = json.loads(paths[0].read_text())
    assert data["passed"] and "time" not in json.dumps(data)


def test_corrupted_template_is_reported():
    bad = TemplateConstants(Variant.A, Fraction(13, 10), Fraction(9, 10), Fraction(1, 5), Fraction(5, 9))
    rep = run_suite(TilingConfig(SpaceDescriptor.lp(2, 2), bad, samples=50, trials=500))
    assert not rep.passed
    lc = rep["template.L.c"]
    assert lc.failures >= 1
    assert lc.witnesses[0]["corner"] == [1.5, 0.7]
    assert not rep["geometry"].passed


def test_witnesses_replay(tmp_path):
    """Failures carry the sample seed, so the point regenerates exactly."""
    from conftest import tiling

    T = tiling(2.0, 2)
    cfg = TilingConfig.quick(2, 2, samples=200, trials=2000)
    cfg.tolerances["geometric"] = -1e3  # every outer-radius test now fails on purpose
    rep = run_suite(cfg, T)
    rec = rep["full.outer_radius"]
    assert rec.failures == 200 and len(rec.witnesses) == 5
    for w in rec.witnesses:
        seed, i = w["seed"]
        x = np.random.default_rng([seed, i]).uniform(-10, 10, 2)
        assert np.array_equal(x, w["point"])


def test_template_b_in_linf_plane():
    from conftest import tiling

    cfg = TilingConfig.quick(2, float("inf"), variant="B", a=1.8, b=0.8, samples=1000, trials=2000)
    rep = run_suite(cfg, tiling(float("inf"), 2, "B"))
    assert rep.passed, [c.name for c in rep.failures]
    assert rep["full.normality"].max_ratio <= 117.5 + 1e-6
