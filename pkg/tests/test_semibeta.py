import math

import numpy as np
import pytest

from starlike_tiling import (DimensionExhausted, EmptyNet, EmptySystem, SemiBiorthogonalSystem,
                             SpaceDescriptor, build_system, frame_bound, greedy_system, sphere_net)
from starlike_tiling.semibeta import SphereNet, miss_limit

from oracles import boundary_walk_linf2


def test_one_dimensional_quotient_has_two_points():
    s = SpaceDescriptor.lp(3, 2)
    net = sphere_net(s, 2, 0.1, seed=3)
    pts = sorted(tuple(np.round(p, 12)) for p in net.points)
    assert pts == [(0.0, 0.0, -1.0), (0.0, 0.0, 1.0)]


def test_linf_square_net_against_boundary_walk():
    s = SpaceDescriptor.lp(2, math.inf)
    net = sphere_net(s, 0, 0.5, seed=0)
    P = net.points
    assert np.allclose(s.norms(P), 1.0)
    gaps = [s.norm(P[i] - P[j]) for i in range(len(P)) for j in range(i)]
    assert min(gaps) >= 0.5 - 1e-12
    B = boundary_walk_linf2()
    cover = max(s.norms(P - b).min() for b in B)
    assert cover <= 0.5


def test_net_is_deterministic_and_unit():
    s = SpaceDescriptor.lp(3, 1)
    a, b = sphere_net(s, 1, 0.3, seed=9), sphere_net(s, 1, 0.3, seed=9)
    assert np.array_equal(a.points, b.points)
    assert np.allclose(s.quotient_norms(a.points, 1), 1.0, atol=1e-8)
    assert np.all(a.points[:, 0] == 0)


def test_net_rejects_trivial_quotient():
    with pytest.raises(DimensionExhausted):
        sphere_net(SpaceDescriptor.lp(2, 2), 2, 0.1)


def test_miss_limit():
    assert miss_limit(0.5, 2) == 360


def test_single_pair_on_a_line():
    s = SpaceDescriptor.lp(3, 2)
    sysm = build_system(s, 2, 0.5, 0.1, seed=0, trials=200)
    assert len(sysm) == 1
    assert sysm.functionals[0] @ sysm.vectors[0] == pytest.approx(1.0)
    assert sysm.empirical_bound == pytest.approx(1.0)


def test_greedy_replay_from_e1():
    s = SpaceDescriptor.lp(2, 2)
    theta = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    net = SphereNet(0, 0.2, np.c_[np.cos(theta), np.sin(theta)], seed=0)
    sysm = greedy_system(s, net, 0.5)
    assert np.allclose(sysm.vectors[0], [1, 0])
    assert abs(sysm.vectors[1] @ [1, 0]) <= 0.5
    again = greedy_system(s, net, 0.5)
    assert again.net_indices == sysm.net_indices


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_lettered_conditions(p):
    s = SpaceDescriptor.lp(4, p)
    sysm = build_system(s, 1, 5 / 9, 0.25, seed=1, trials=2000)
    for v, f in sysm.pairs:
        assert s.quotient_norm(v, 1) == pytest.approx(1.0, abs=1e-8)
        assert s.dual_norm(f) == pytest.approx(1.0, abs=1e-8)
        assert f @ v == pytest.approx(1.0, abs=1e-8)
        assert abs(f[0]) <= 1e-12
    G = sysm.pairing_matrix()
    assert np.all(np.abs(G[np.triu_indices(len(sysm), 1)]) <= sysm.delta + 1e-9)
    assert sysm.certified_bound >= sysm.delta - sysm.epsilon - 1e-12


def test_frame_bound_euclidean_three():
    s = SpaceDescriptor.lp(3, 2)
    sysm = build_system(s, 0, 0.5, 0.05, seed=0, trials=10_000)
    assert sysm.empirical_bound >= 0.45


def test_empty_inputs():
    s = SpaceDescriptor.lp(2, 2)
    with pytest.raises(EmptyNet):
        greedy_system(s, SphereNet(0, 0.2, np.zeros((0, 2)), 0), 0.5)
    with pytest.raises(EmptySystem):
        frame_bound(s, SemiBiorthogonalSystem(0, 0.5, 0.1, np.zeros((0, 2)), np.zeros((0, 2))))


def test_system_roundtrip():
    s = SpaceDescriptor.lp(3, 2)
    sysm = build_system(s, 1, 0.5, 0.3, trials=100)
    back = SemiBiorthogonalSystem.from_dict(sysm.to_dict())
    assert np.array_equal(back.vectors, sysm.vectors)
    assert back.certified_bound == sysm.certified_bound
