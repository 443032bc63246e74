"""Greedy unit systems with small one-sided pairings on each quotient ``Z_k``.

A finite epsilon-net of the unit sphere of ``Z_k`` stands in for a dense
sequence.  Scanning it in extraction order and keeping every point whose
pairings with the functionals already kept are at most ``delta`` gives pairs
``(v_j, v*_j)`` with ``v*_j(v_j) = 1`` and ``|v*_j(v_j')| <= delta`` for
``j < j'``; every unit vector then has some ``|v*_j(v)| >= delta - epsilon``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import DimensionExhausted, EmptyNet, EmptySystem
from .space import SpaceDescriptor

MAX_CANDIDATES = 50_000_000


@dataclass
class SphereNet:
    level: int
    epsilon: float
    points: np.ndarray  # (n, M), zero leading coordinates, unit quotient norm
    seed: int
    candidates: int = 0
    saturated: bool = True  # False when the candidate cap ended the scan

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class SemiBiorthogonalSystem:
    level: int
    delta: float
    epsilon: float
    vectors: np.ndarray  # (m, M)
    functionals: np.ndarray  # (m, M), vanishing on V_level
    net_indices: list[int] = field(default_factory=list)
    empirical_bound: float | None = None
    certified_bound: float | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def pairs(self):
        return list(zip(self.vectors, self.functionals))

    @property
    def delta_eff(self) -> float:
        return self.delta - self.epsilon

    def pairing_matrix(self) -> np.ndarray:
        """Entry ``[j, j']`` is ``v*_j(v_j')``."""
        return self.functionals @ self.vectors.T

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "vectors": self.vectors.tolist(),
            "functionals": self.functionals.tolist(),
            "net_indices": list(self.net_indices),
            "empirical_bound": self.empirical_bound,
            "certified_bound": self.certified_bound,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SemiBiorthogonalSystem":
        return cls(
            level=int(data["level"]),
            delta=float(data["delta"]),
            epsilon=float(data["epsilon"]),
            vectors=np.asarray(data["vectors"], dtype=float),
            functionals=np.asarray(data["functionals"], dtype=float),
            net_indices=list(data.get("net_indices", [])),
            empirical_bound=data.get("empirical_bound"),
            certified_bound=data.get("certified_bound"),
        )


def miss_limit(epsilon: float, dim: int) -> int:
    """Consecutive rejected candidates after which net extraction stops."""
    return int(math.ceil(10 * (3.0 / epsilon) ** dim))


class _QuotientMetric:
    """Distances in ``Z_k`` between vectors with zero leading coordinates."""

    def __init__(self, space: SpaceDescriptor, k: int, cutoff: float = np.inf):
        self.space, self.k, self.cutoff = space, k, cutoff
        self.lp = space.is_lp

    def pairwise_min(self, cands: np.ndarray, pts: np.ndarray, tree) -> np.ndarray:
        if len(pts) == 0:
            return np.full(len(cands), np.inf)
        if self.lp:
            d, _ = tree.query(cands[:, self.k:], k=1, p=self.space.p,
                              distance_upper_bound=self.cutoff)
            return d
        out = np.empty(len(cands))
        for i, c in enumerate(cands):
            out[i] = self.space.quotient_norms(pts - c, self.k).min()
        return out

    def tree(self, pts: np.ndarray):
        if self.lp and len(pts):
            return cKDTree(pts[:, self.k:])
        return None

    def to_many(self, c: np.ndarray, pts: np.ndarray) -> np.ndarray:
        return self.space.quotient_norms(pts - c, self.k)


def sphere_net(space: SpaceDescriptor, k: int, epsilon: float, seed: int = 0,
               batch: int = 4096, max_candidates: int = MAX_CANDIDATES) -> SphereNet:
    """Greedy epsilon-separated net of the unit sphere of ``Z_k``.

    Candidates are scrambled Sobol points pushed through the Gaussian
    quantile and normalized; a candidate joins the net when it is at
    quotient distance ``>= epsilon`` from every point already taken.
    """
    M = space.dim
    if k >= M:
        raise DimensionExhausted(f"Z_{k} is trivial in dimension {M}")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    d = M - k
    limit = miss_limit(epsilon, d)
    metric = _QuotientMetric(space, k, cutoff=epsilon)
    sampler = qmc.Sobol(d, scramble=True, seed=seed)

    net = np.zeros((0, M))
    misses = 0
    seen = 0
    while True:
        U = np.clip(sampler.random(batch), 1e-12, 1 - 1e-12)
        C = np.zeros((batch, M))
        C[:, k:] = ndtri(U)
        C /= space.quotient_norms(C, k)[:, None]

        dist = metric.pairwise_min(C, net, metric.tree(net))
        admitted = []
        fresh = []
        for i in np.flatnonzero(dist >= epsilon):
            if fresh and metric.to_many(C[i], np.asarray(fresh)).min() < epsilon:
                continue
            fresh.append(C[i])
            admitted.append(int(i))

        stop_at = None
        prev = -1
        kept = []
        for i in admitted:
            if misses + (i - prev - 1) >= limit:
                stop_at = prev + limit - misses + 1
                break
            kept.append(i)
            misses = 0
            prev = i
        if stop_at is None and misses + (batch - prev - 1) >= limit:
            stop_at = prev + limit - misses + 1
        if kept:
            net = np.vstack([net, C[kept]])
        if stop_at is not None:
            seen += stop_at
            net = _fill_gaps(space, k, epsilon, net, metric, seed)
            return SphereNet(k, epsilon, net, seed, seen, True)
        misses += batch - prev - 1
        seen += batch
        if seen >= max_candidates:
            return SphereNet(k, epsilon, net, seed, seen, False)
        batch = min(batch * 2, 1 << 16)


def _fill_gaps(space, k, epsilon, net, metric, seed, probes=4096, climbers=32,
               steps=80, rounds=50) -> np.ndarray:
    """Append sphere points still at distance ``>= epsilon`` from the net.

    The stream stops after a run of misses, which can leave thin uncovered
    slivers.  The probes farthest from the net are pushed outward by a
    shrinking random search on the sphere; any that reach ``epsilon`` are
    admitted greedily, and rounds continue until one admits nothing.
    """
    M, d = space.dim, space.dim - k
    rng = np.random.default_rng(np.random.SeedSequence([seed, k, 0x9a95]))
    far = _QuotientMetric(space, k)  # no cutoff: distances must be exact here

    def unit(Y):
        Y = Y.copy()
        Y[:, :k] = 0.0
        return Y / space.quotient_norms(Y, k)[:, None]

    for _ in range(rounds):
        tree = far.tree(net)
        P = np.zeros((probes, M))
        P[:, k:] = rng.standard_normal((probes, d))
        P = unit(P)
        dist = far.pairwise_min(P, net, tree)
        top = np.argsort(-dist, kind="stable")[:climbers]
        X, D = P[top], dist[top]
        for s in np.geomspace(epsilon, epsilon / 200, steps):
            Y = unit(X + s * np.c_[np.zeros((len(X), k)), rng.standard_normal((len(X), d))])
            DY = far.pairwise_min(Y, net, tree)
            up = DY > D
            X[up], D[up] = Y[up], DY[up]
        fresh = []
        for i in np.argsort(-D, kind="stable"):
            if D[i] < epsilon:
                break
            if fresh and metric.to_many(X[i], np.asarray(fresh)).min() < epsilon:
                continue
            fresh.append(X[i])
        if not fresh:
            return net
        net = np.vstack([net, fresh])
    return net


def greedy_system(space: SpaceDescriptor, net: SphereNet, delta: float) -> SemiBiorthogonalSystem:
    """Scan ``net`` in order, keeping points whose pairings stay within ``delta``."""
    if len(net) == 0:
        raise EmptyNet("cannot build a system from an empty net")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    k = net.level
    vecs, funcs, idx = [], [], []
    F = np.zeros((0, space.dim))
    for n, x in enumerate(net.points):
        if len(funcs) and np.max(np.abs(F @ x)) > delta:
            continue
        f = space.quotient_functional(x, k)
        vecs.append(x)
        funcs.append(f)
        idx.append(n)
        F = np.asarray(funcs)
    return SemiBiorthogonalSystem(k, float(delta), float(net.epsilon),
                                  np.asarray(vecs), np.asarray(funcs), idx)


def frame_bound(space: SpaceDescriptor, system: SemiBiorthogonalSystem,
                trials: int = 10_000, seed: int = 0) -> float:
    """Smallest ``max_j |v*_j(v)|`` over ``trials`` random unit vectors of the quotient.

    Also stores ``certified_bound = min(empirical, delta - epsilon)`` on the system.
    """
    if len(system) == 0:
        raise EmptySystem("system has no pairs")
    rng = np.random.default_rng(np.random.SeedSequence([seed, system.level]))
    V = space.random_quotient_units(rng, int(trials), system.level)
    emp = float(np.min(np.max(np.abs(V @ system.functionals.T), axis=1)))
    system.empirical_bound = emp
    system.certified_bound = min(emp, system.delta - system.epsilon)
    return emp


def build_system(space: SpaceDescriptor, k: int, delta: float, epsilon: float,
                 seed: int = 0, trials: int = 10_000) -> SemiBiorthogonalSystem:
    net = sphere_net(space, k, epsilon, seed)
    system = greedy_system(space, net, delta)
    frame_bound(space, system, trials, seed)
    return system
