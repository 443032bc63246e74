import itertools
import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starlike_tiling import (CylinderTileId, FullTileId, InvalidTile, OutOfHorizon, QuotientTileId,
                             SpaceDescriptor, build_separated_net)
from starlike_tiling.voronoi import SeparatedNet

from oracles import greedy_1d


def test_level_zero_net_is_origin():
    net = build_separated_net(SpaceDescriptor.lp(3, 2), 0, 0.1, 1.0)
    assert net.points().shape == (1, 0) or len(net.points()) == 1


def test_one_dimensional_example():
    net = build_separated_net(SpaceDescriptor.lp(3, 2), 1, 0.1, 1.0)
    got = sorted(np.round(net.points(1.0)[:, 0], 12))
    assert got == pytest.approx([-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert got == pytest.approx(greedy_1d(0.05, 0.2, 1.0))


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_separation_and_grid_maximality(p, k):
    s = SpaceDescriptor.lp(4, p)
    net = SeparatedNet(s, k, 0.1)
    P = net.points(0.8)
    D = s.norms((P[:, None, :] - P[None, :, :]).reshape(-1, 4)).reshape(len(P), len(P))
    np.fill_diagonal(D, np.inf)
    assert D.min() >= 0.2 - 1e-9
    assert net.is_grid_maximal()
    # every grid point of the horizon ball is within 2r of a site
    m = 6
    G = np.array(list(itertools.product(range(-m, m + 1), repeat=k)))
    assert max(net.nearest(net.embed(g[None, :])[0])[1] for g in G) < 0.2


def test_origin_is_first_site():
    net = SeparatedNet(SpaceDescriptor.lp(3, 1), 2, 0.1)
    assert np.allclose(net.points()[0], 0)
    assert net.nearest(np.zeros(3))[0] == (0, 0)


def test_tie_goes_to_first_site():
    net = SeparatedNet(SpaceDescriptor.lp(2, 2), 1, 0.1)
    # 0.1 is equidistant from sites 0 and 0.2; 0 comes first
    assert net.locate_cell(np.array([0.1, 0.0])) == (0,)
    assert net.locate_cell(np.array([-0.1, 0.0])) == (0,)


def test_horizon():
    net = SeparatedNet(SpaceDescriptor.lp(2, 2), 1, 0.1, rho=1.0)
    with pytest.raises(OutOfHorizon):
        net.locate_cell(np.array([0.95, 0.0]))


@settings(max_examples=100, deadline=None)
@given(st.integers(-40, 40), st.integers(-40, 40), st.floats(0, 0.0999), st.floats(0, 2 * math.pi))
def test_inner_ball_of_cells(i, j, rho, theta):
    s = SpaceDescriptor.lp(3, 2)
    net = SeparatedNet(s, 2, 0.1)
    S = net.sites_in_box(np.array([i, j]) * 0.05 - 0.2, np.array([i, j]) * 0.05 + 0.2)
    g = S[0]
    y = net.site_vector(g) + rho * np.array([math.cos(theta), math.sin(theta), 0.0])
    assert net.nearest(y)[0] == tuple(g)


def test_full_tile_id_rules():
    cid0 = CylinderTileId(0, QuotientTileId.central(0))
    with pytest.raises(InvalidTile):
        FullTileId(cid0, (1,))
    t = FullTileId(CylinderTileId(2, QuotientTileId.strip(2, 1)), (4, -8))
    assert FullTileId.from_dict(t.to_dict()) == t


def test_locate_full_examples(l2_3):
    t0 = l2_3.locate_full(np.zeros(3))
    assert t0 == FullTileId(CylinderTileId(0, QuotientTileId.central(0)))
    assert np.allclose(l2_3.full_center(t0), 0)
    rng = np.random.default_rng(0)
    for x in rng.uniform(-10, 10, (200, 3)):
        t = l2_3.locate_full(x)
        assert l2_3.is_member(x, t, 0.0)
        c = l2_3.full_center(t)
        assert l2_3.locate_full(c) == t
        assert np.linalg.norm(x - c) <= float(l2_3.derived().Rprime) + 1e-6


def test_other_centres_are_not_members(l2_3):
    X = np.random.default_rng(1).uniform(-10, 10, (50, 3))
    ids = l2_3.locate_full_many(X)
    for a, b in zip(ids, ids[1:]):
        if a != b:
            assert not l2_3.is_member(l2_3.full_center(b), a, 0.0)


def test_far_point_is_not_member(l2_3):
    t = l2_3.locate_full(np.array([0.3, 5.0, 9.0]))
    c = l2_3.full_center(t)
    far = c + np.array([0, 0, float(l2_3.derived().Rprime) + 1e-5])
    assert not l2_3.is_member(far, t, 1e-6)


def test_invalid_site_rejected(l2_3):
    net = l2_3.net(2)
    bad = next(g for g in itertools.product(range(8), repeat=2) if not net.contains(g))
    with pytest.raises(InvalidTile):
        l2_3.full_center(FullTileId(CylinderTileId(2, QuotientTileId.strip(2, 1)), bad))


def test_strict_memberships_are_unique(linf_2):
    X = np.random.default_rng(2).uniform(-10, 10, (300, 2))
    for x in X:
        hits = linf_2.strict_memberships(x, 1e-3)
        assert len(hits) <= 1
        if hits:
            assert hits[0] == linf_2.locate_full(x)


@pytest.mark.parametrize("fixture", ["l2_3", "linf_2"])
def test_starlike_check(fixture, request):
    T = request.getfixturevalue(fixture)
    X = np.random.default_rng(3).uniform(-10, 10, (6, T.M))
    for x in X:
        rep = T.starlike_check(T.locate_full(x), samples=40, seed=1)
        assert rep["passed"], rep["failures"][:2]


def test_level_zero_tiles_are_starlike(l2_3):
    rep = l2_3.starlike_check(l2_3.locate_full(np.zeros(3)), samples=100)
    assert rep["passed"]


def test_concurrent_net_construction(l1_3):
    l1_3._nets.clear()
    out = []
    threads = [threading.Thread(target=lambda: out.append(l1_3.net(2))) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(n is out[0] for n in out)
