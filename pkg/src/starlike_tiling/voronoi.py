"""Starlike refinement of the cylinders by first-index Voronoi cells.

Inside each cylinder the sites ``axis + d`` run over a maximal
``2r``-separated set ``{d}`` of ``V_k``; a point belongs to the cell of the
nearest site, and among equally near sites to the one that comes first in the
site order (ambient norm, then lexicographic grid coordinates).

The separated set is built greedily on a periodic grid: grid points of step
``r/2`` in a torus of side ``4r`` are scanned from the origin outward and
kept when their torus distance to every kept point is at least ``2r``.  The
periodic extension is ``2r``-separated in the whole of ``V_k`` because the
ambient norm dominates the coordinate sup-norm in a normalized biorthogonal
basis, and it is maximal among grid points by construction.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

import numpy as np

from .constants import DerivedConstants, compute_K_bound
from .cylinder import CylinderAxis, CylinderTileId, CylinderTiling
from .errors import InvalidTile, OutOfHorizon, SamplingFailed
from .planar import TemplateConstants
from .quotient import QuotientTiling
from .semibeta import SemiBiorthogonalSystem, build_system
from .space import SpaceDescriptor

TIE_TOL = 1e-9
PERIOD_CELLS = 8  # torus side in grid steps: 8 * r/2 = 4r


class SeparatedNet:
    """Periodic maximal ``2r``-separated set of ``V_k`` on the grid ``(r/2) Z^k``.

    Sites are addressed by integer grid coordinates; the real position of
    site ``g`` is ``g * step`` in the coordinates ``e_1..e_k``.
    """

    def __init__(self, space: SpaceDescriptor, k: int, r: float, rho: float | None = None):
        self.space = space
        self.k = int(k)
        self.r = float(r)
        self.step = self.r / 2.0
        self.P = PERIOD_CELLS
        self.rho = float(rho) if rho is not None else 4.0 * self.r
        if self.rho < 2 * self.r:
            raise ValueError("horizon must be at least 2r")
        if self.k == 0:
            self.base = np.zeros((1, 0), dtype=np.int64)
            self.cover = 0.0
            return
        self._shifts = np.array(list(itertools.product((-1, 0, 1), repeat=self.k)), dtype=np.int64)
        self.base = self._greedy()
        grid_cover = self._grid_cover()
        half = np.zeros(space.dim)
        half[: self.k] = self.step / 2.0
        #: bound on the distance from any point of V_k to its nearest site
        self.cover = grid_cover + space.norm(half)
        self.grid_cover = grid_cover

    # -- construction --------------------------------------------------------
    def embed(self, G) -> np.ndarray:
        G = np.atleast_2d(np.asarray(G, dtype=float))
        out = np.zeros((len(G), self.space.dim))
        out[:, : self.k] = G * self.step
        return out

    def vnorms(self, G) -> np.ndarray:
        return self.space.norms(self.embed(G))

    def _torus_dist(self, g: np.ndarray, A: np.ndarray, chunk: int = 1 << 18) -> np.ndarray:
        """Torus distances from grid point(s) ``g`` to the sites ``A``."""
        per = len(A) * len(self._shifts)
        rows = max(1, chunk // per)
        out = np.empty((len(g), len(A)))
        for s in range(0, len(g), rows):
            gg = g[s:s + rows]
            diff = gg[:, None, None, :] - A[None, :, None, :] - self.P * self._shifts[None, None, :, :]
            out[s:s + rows] = self.vnorms(diff.reshape(-1, self.k)).reshape(len(gg), len(A), -1).min(axis=2)
        return out

    def _torus_grid(self) -> np.ndarray:
        half = self.P // 2
        axes = [np.arange(-half, self.P - half)] * self.k
        return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, self.k)

    def _greedy(self) -> np.ndarray:
        G = self._torus_grid()
        order = np.lexsort(tuple(G[:, ::-1].T) + (np.round(self.vnorms(G), 9),))
        sep = 2 * self.r * (1 - 1e-12)
        kept = []
        for g in G[order]:
            if kept and self._torus_dist(g[None, :], np.asarray(kept)).min() < sep:
                continue
            kept.append(g)
        return np.mod(np.asarray(kept), self.P)

    def _grid_cover(self) -> float:
        G = self._torus_grid()
        return float(self._torus_dist(G, self.base).min(axis=1).max())

    def is_grid_maximal(self) -> bool:
        G = self._torus_grid()
        return bool(np.all(self._torus_dist(G, self.base).min(axis=1) < 2 * self.r))

    # -- enumeration ---------------------------------------------------------
    def sites_in_box(self, lo, hi) -> np.ndarray:
        """Grid coordinates of every site in the coordinate box ``[lo, hi]``."""
        if self.k == 0:
            return np.zeros((1, 0), dtype=np.int64)
        glo = np.ceil(np.asarray(lo, dtype=float) / self.step - 1e-9).astype(np.int64)
        ghi = np.floor(np.asarray(hi, dtype=float) / self.step + 1e-9).astype(np.int64)
        if np.any(ghi < glo):
            return np.zeros((0, self.k), dtype=np.int64)
        ranges = [np.arange(a // self.P, b // self.P + 1) for a, b in zip(glo, ghi)]
        cells = np.stack(np.meshgrid(*ranges, indexing="ij"), -1).reshape(-1, self.k)
        S = (self.base[None, :, :] + self.P * cells[:, None, :]).reshape(-1, self.k)
        keep = np.all((S >= glo) & (S <= ghi), axis=1)
        return S[keep]

    def keys(self, S: np.ndarray) -> np.ndarray:
        """Positions of ``S`` sorted by the site order."""
        return np.lexsort(tuple(S[:, ::-1].T) + (np.round(self.vnorms(S) / self.step, 9),))

    def points(self, rho: float | None = None) -> np.ndarray:
        """Sites of norm at most ``rho`` (default: the horizon) in site order, as vectors."""
        rho = self.rho if rho is None else rho
        S = self.sites_in_box(np.full(self.k, -rho), np.full(self.k, rho))
        S = S[self.vnorms(S) <= rho + 1e-12]
        return self.embed(S[self.keys(S)])

    def site_vector(self, g) -> np.ndarray:
        return self.embed(np.asarray(g, dtype=np.int64)[None, :])[0]

    def contains(self, g) -> bool:
        g = np.mod(np.asarray(g, dtype=np.int64), self.P)
        return bool(np.any(np.all(self.base == g, axis=1))) if self.k else True

    # -- queries -------------------------------------------------------------
    def _dists(self, y: np.ndarray, S: np.ndarray) -> np.ndarray:
        return self.space.norms(y[None, :] - self.embed(S))

    def _box(self, y: np.ndarray, w: float) -> np.ndarray:
        yv = y[: self.k]
        return self.sites_in_box(yv - w, yv + w)

    def _first(self, S: np.ndarray) -> np.ndarray:
        return S[self.keys(S)[0]]

    def _min_key_in_box(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """First site (in site order) inside the box, for the sup-norm."""
        c = np.clip(0.0, lo, hi)
        rho = float(np.max(np.abs(c))) if self.k else 0.0
        grow = self.P * self.step
        while True:
            S = self.sites_in_box(np.maximum(lo, -rho), np.minimum(hi, rho))
            if len(S):
                return self._first(S)
            rho += grow

    def nearest(self, y) -> tuple[tuple[int, ...], float]:
        """First nearest site to ``y`` and its distance (ties within ``TIE_TOL``)."""
        y = np.asarray(y, dtype=float)
        if self.k == 0:
            return (), self.space.norm(y)
        S = self._box(y, self.cover)
        d = self._dists(y, S)
        best = float(d.min())
        space = self.space
        if space.is_lp and not np.isinf(space.p):
            ties = S[d <= best + TIE_TOL]
            return tuple(int(v) for v in self._first(ties)), best
        if space.is_lp:
            w = best + TIE_TOL
            if w > self.cover:
                g = self._min_key_in_box(y[: self.k] - w, y[: self.k] + w)
                return tuple(int(v) for v in g), best
            ties = S[d <= w]
            return tuple(int(v) for v in self._first(ties)), best
        if best > self.cover:
            S = self._box(y, best)
            d = self._dists(y, S)
            best = float(d.min())
        ties = S[d <= best + TIE_TOL]
        return tuple(int(v) for v in self._first(ties)), best

    def locate_cell(self, y) -> tuple[int, ...]:
        """Index of the first nearest site; rejects queries beyond the horizon."""
        y = np.asarray(y, dtype=float)
        if self.k and self.space.norm(np.r_[y[: self.k], np.zeros(self.space.dim - self.k)]) > self.rho - 2 * self.r:
            raise OutOfHorizon("query beyond the net horizon; rebuild with a larger rho")
        return self.nearest(y)[0]

    def distance(self, y, g) -> float:
        return self.space.norm(np.asarray(y, dtype=float) - self.site_vector(g))

    def strictly_nearest(self, y, g, margin: float) -> bool:
        """True when site ``g`` beats every other site by more than ``margin``."""
        y = np.asarray(y, dtype=float)
        if self.k == 0:
            return True
        dg = self.distance(y, g)
        w = dg + margin
        p = self.space.p
        if self.space.is_lp and not np.isinf(p):
            # ||y - d||^p = ||y_V - d||^p + ||tail||^p, so only the V_k part matters
            tail = float(np.sum(np.abs(y[self.k:]) ** p))
            S = self._box(y, max(w**p - tail, 0.0) ** (1 / p))
            others = np.any(S != np.asarray(g), axis=1)
            return not np.any(self._dists(y, S[others]) <= w)
        cap = 2 * self.cover + 4 * self.r
        S = self._box(y, min(w, cap))
        d = self._dists(y, S)
        others = np.any(S != np.asarray(g), axis=1)
        if np.any(d[others] <= w):
            return False
        if w <= cap:
            return True
        if self.space.is_lp and np.isinf(self.space.p):
            return True  # a site within the capped box is within w in the sup-norm
        S = self._box(y, w)
        d = self._dists(y, S)
        others = np.any(S != np.asarray(g), axis=1)
        return not np.any(d[others] <= w)


def build_separated_net(space: SpaceDescriptor, k: int, r: float, rho: float) -> SeparatedNet:
    return SeparatedNet(space, k, r, rho)


@dataclass(frozen=True, order=True)
class FullTileId:
    cyl: CylinderTileId
    i: tuple[int, ...] = ()

    def __post_init__(self):
        if self.cyl.level == 0 and self.i:
            raise InvalidTile("level-0 tiles have the single site 0")
        if len(self.i) != self.cyl.level:
            raise InvalidTile("site index must have one coordinate per level")

    @property
    def level(self) -> int:
        return self.cyl.level

    def to_dict(self) -> dict:
        out = self.cyl.to_dict()
        out["i"] = list(self.i)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FullTileId":
        return cls(CylinderTileId.from_dict(data), tuple(int(v) for v in data.get("i", [])))

    def key(self) -> str:
        d = self.to_dict()
        return "/".join(f"{k}={d[k]}" for k in sorted(d))


def system_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(k)]).generate_state(1)[0])


class StarlikeTiling:
    """The full starlike tiling of a finite-dimensional normed space."""

    def __init__(self, space: SpaceDescriptor, template: TemplateConstants,
                 systems: dict[int, SemiBiorthogonalSystem], epsilon: float):
        self.space = space
        self.template = template
        self.systems = systems
        self.epsilon = float(epsilon)
        self.M = space.dim
        self.quotients = QuotientTiling(space, template, systems)
        self.cylinders = CylinderTiling(self.quotients)
        self._nets: dict[int, SeparatedNet] = {}
        self._lock = threading.Lock()

    @classmethod
    def build(cls, space: SpaceDescriptor, template: TemplateConstants,
              epsilon: float, seed: int = 0, trials: int = 10_000) -> "StarlikeTiling":
        systems = {
            k: build_system(space, k, template.deltaf, epsilon, system_seed(seed, k), trials)
            for k in range(1, space.dim)
        }
        return cls(space, template, systems, epsilon)

    # -- constants -----------------------------------------------------------
    @property
    def r(self) -> float:
        return self.template.rf

    @property
    def delta_eff(self) -> float:
        return self.template.deltaf - self.epsilon

    def derived(self, certified: bool = True) -> DerivedConstants:
        """Radii with ``delta - epsilon`` (certified) or the template ``delta``."""
        if certified:
            return compute_K_bound(self.template, self.template.delta - _frac(self.epsilon))
        return compute_K_bound(self.template)

    # -- nets ----------------------------------------------------------------
    def net(self, k: int) -> SeparatedNet:
        with self._lock:
            if k not in self._nets:
                self._nets[k] = SeparatedNet(self.space, k, self.r)
            return self._nets[k]

    # -- location ------------------------------------------------------------
    def axis(self, cid: CylinderTileId) -> CylinderAxis:
        return self.cylinders.cylinder_axis(cid)

    def locate_full_many(self, X) -> list[FullTileId]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        cids = self.cylinders.ids_from_codes(*self.cylinders.locate_many(X))
        return [self._refine(x, cid) for x, cid in zip(X, cids)]

    def locate_full(self, x) -> FullTileId:
        return self.locate_full_many(np.asarray(x, dtype=float)[None, :])[0]

    def _refine(self, x, cid: CylinderTileId) -> FullTileId:
        y = x - self.axis(cid).x
        g, _ = self.net(cid.level).nearest(y)
        return FullTileId(cid, g)

    def full_center(self, tid: FullTileId) -> np.ndarray:
        net = self.net(tid.level)
        if not net.contains(tid.i):
            raise InvalidTile(f"{tid.i} is not a site of the level-{tid.level} net")
        return self.axis(tid.cyl).x + net.site_vector(tid.i) if tid.level else self.axis(tid.cyl).x.copy()

    # -- membership ----------------------------------------------------------
    def is_member(self, x, tid: FullTileId, tol: float = 0.0) -> bool:
        """Closed-tile membership with every inequality relaxed by ``tol``."""
        x = np.asarray(x, dtype=float)
        if self.cylinders.slack(x, tid.cyl)[0] < -tol:
            return False
        if tid.level == 0:
            return True
        y = x - self.axis(tid.cyl).x
        net = self.net(tid.level)
        _, best = net.nearest(y)
        return net.distance(y, tid.i) <= best + tol + TIE_TOL

    def is_strict_member(self, x, tid: FullTileId, margin: float) -> bool:
        """Membership with every defining inequality satisfied by at least ``margin``."""
        x = np.asarray(x, dtype=float)
        if self.cylinders.slack(x, tid.cyl)[0] < margin:
            return False
        if tid.level == 0:
            return True
        return self.net(tid.level).strictly_nearest(x - self.axis(tid.cyl).x, tid.i, margin)

    def strict_memberships(self, x, margin: float) -> list[FullTileId]:
        """Every tile whose interior (shrunk by ``margin``) contains ``x``.

        Candidate cylinders are enumerated from the inequalities directly,
        independently of the locator; within a cylinder only the strictly
        nearest site can qualify.
        """
        x = np.asarray(x, dtype=float)
        out = []
        for cid in self.cylinders.candidate_ids(x):
            try:
                axis = self.axis(cid)
            except InvalidTile:
                continue
            if self.cylinders.slack(x, cid)[0] < margin:
                continue
            net = self.net(cid.level)
            g, _ = net.nearest(x - axis.x)
            tid = FullTileId(cid, g)
            if tid.level == 0 or net.strictly_nearest(x - axis.x, g, margin):
                out.append(tid)
        return out

    def starlike_check(self, tid: FullTileId, samples: int = 100, seed: int = 0,
                       tol: float = 1e-6, max_proposals: int = 10**5) -> dict:
        """Segments from sampled members to the centre stay in the tile."""
        rng = np.random.default_rng(np.random.SeedSequence([seed, samples]))
        center = self.full_center(tid)
        outer = float(self.derived().Rprime)
        scales = [self.r * 2.0**i for i in range(int(np.ceil(np.log2(outer / self.r))) + 1)]
        members, proposals = [], 0
        while len(members) < samples:
            if proposals >= max_proposals:
                if not members:
                    raise SamplingFailed(f"no member of {tid.key()} in {max_proposals} proposals")
                break
            s = scales[proposals % len(scales)]
            cand = center + s * rng.uniform(-1, 1, self.M)
            proposals += 1
            if self.is_member(cand, tid, 0.0):
                members.append(cand)
        failures = []
        ts = np.round(np.arange(1, 10) / 10.0, 1)
        for x in members:
            for t in ts:
                xt = t * center + (1 - t) * x
                if not self.is_member(xt, tid, tol):
                    failures.append({"point": x.tolist(), "t": float(t)})
        return {"tile": tid.to_dict(), "members": len(members), "checks": len(members) * len(ts),
                "failures": failures, "passed": not failures}


def _frac(x: float):
    from .planar import as_fraction

    return as_fraction(x)
