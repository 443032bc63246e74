"""Convex tiles from coordinate projections.

For cylinder levels ``0 < k <= N`` the cylinder is sliced by the coordinate
projection ``P_k`` onto ``V_k`` and a cube tiling of ``V_k`` of side ``2r``;
the result is an intersection of convex sets.  Level 0 and levels above
``N`` keep the Voronoi refinement.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .constants import k_projection_bound as _kpb
from .voronoi import FullTileId, StarlikeTiling

NORM_PROBES = 100_000


@dataclass(frozen=True)
class LatticeCell:
    index: tuple[int, ...]
    center: np.ndarray
    inner: float
    outer: float


@dataclass
class ProjectionConfig:
    N: int
    r: float
    P_norms: dict[int, float] = field(default_factory=dict)
    t_N: float = 0.0
    certified: bool = True  # False when some ||P_k|| is only a sampled lower bound
    inner: dict[int, float] = field(default_factory=dict)
    outer: dict[int, float] = field(default_factory=dict)

    @property
    def side(self) -> float:
        return 2 * self.r

    @property
    def R_N(self) -> float:
        return max(self.P_norms.values(), default=1.0)

    def to_dict(self) -> dict:
        return {"N": self.N, "side": self.side}

    @classmethod
    def build(cls, tiling: StarlikeTiling, N: int, seed: int = 0) -> "ProjectionConfig":
        space = tiling.space
        if not 1 <= N < space.dim:
            raise ValueError(f"N must lie in 1..{space.dim - 1}")
        cfg = cls(int(N), tiling.r)
        rng = np.random.default_rng(np.random.SeedSequence([seed, N]))
        for k in range(1, N + 1):
            inner, outer = cube_radii(space, k, cfg.r)
            cfg.inner[k], cfg.outer[k] = inner, outer
            if space.is_lp:
                cfg.P_norms[k] = 1.0
            else:
                cfg.P_norms[k] = max(1.0, projection_norm_estimate(space, k, rng))
                cfg.certified = False
        cfg.t_N = max(cfg.outer.values())
        return cfg


def cube_radii(space, k: int, r: float) -> tuple[float, float]:
    """Inner and outer ambient-norm radii of the cube ``[-r, r]^k`` in ``V_k``.

    The inner radius is ``r`` because the basis is Auerbach (the ambient
    norm dominates the coordinate sup-norm and equals it on the basis
    vectors); the outer radius is attained at a corner by convexity.
    """
    corners = np.array(list(itertools.product((-r, r), repeat=k)))
    X = np.zeros((len(corners), space.dim))
    X[:, :k] = corners
    return float(r), float(space.norms(X).max())


def projection_norm_estimate(space, k: int, rng, probes: int = NORM_PROBES) -> float:
    """Sampled lower bound for ``||P_k||`` (coordinate projection onto ``V_k``)."""
    X = rng.standard_normal((probes, space.dim))
    PX = X.copy()
    PX[:, k:] = 0.0
    return float(np.max(space.norms(PX) / space.norms(X)))


def lattice_tiling_locate(space, k: int, v, r: float) -> LatticeCell:
    """Cube of side ``2r`` on the lattice ``(2r Z)^k`` holding ``v``; half-integers round down."""
    v = np.asarray(v, dtype=float)
    idx = np.ceil(v[:k] / (2 * r) - 0.5).astype(np.int64)
    center = np.zeros(space.dim)
    center[:k] = 2 * r * idx
    inner, outer = cube_radii(space, k, r)
    return LatticeCell(tuple(int(i) for i in idx), center, inner, outer)


class ProjectionTiling:
    """Starlike tiling with convex projection slices on levels ``1..N``."""

    def __init__(self, tiling: StarlikeTiling, cfg: ProjectionConfig):
        self.tiling = tiling
        self.cfg = cfg
        self.space = tiling.space

    def sliced(self, level: int) -> bool:
        return 0 < level <= self.cfg.N

    def locate_many(self, X) -> list[FullTileId]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        cyl = self.tiling.cylinders
        cids = cyl.ids_from_codes(*cyl.locate_many(X))
        out = []
        for x, cid in zip(X, cids):
            if self.sliced(cid.level):
                idx = np.ceil(x[: cid.level] / self.cfg.side - 0.5).astype(np.int64)
                out.append(FullTileId(cid, tuple(int(i) for i in idx)))
            else:
                out.append(self.tiling._refine(x, cid))
        return out

    def locate(self, x) -> FullTileId:
        return self.locate_many(np.asarray(x, dtype=float)[None, :])[0]

    def center(self, tid: FullTileId) -> np.ndarray:
        if not self.sliced(tid.level):
            return self.tiling.full_center(tid)
        c = self.tiling.axis(tid.cyl).x.copy()
        c[: tid.level] = self.cfg.side * np.asarray(tid.i, dtype=float)
        return c

    def is_member(self, x, tid: FullTileId, tol: float = 0.0) -> bool:
        if not self.sliced(tid.level):
            return self.tiling.is_member(x, tid, tol)
        x = np.asarray(x, dtype=float)
        if self.tiling.cylinders.slack(x, tid.cyl)[0] < -tol:
            return False
        off = x[: tid.level] - self.cfg.side * np.asarray(tid.i, dtype=float)
        return bool(np.all(np.abs(off) <= self.cfg.r + tol))

    def outer_radius(self) -> float:
        """``R (1 + R_N) + t_N`` with the certified tube radius ``R``."""
        R = float(self.tiling.derived().R)
        return R * (1 + self.cfg.R_N) + self.cfg.t_N

    def inner_radius(self, level: int) -> float:
        return self.cfg.r / self.cfg.P_norms[level] if self.sliced(level) else self.cfg.r


def locate_projection(x, ptiling: ProjectionTiling) -> FullTileId:
    return ptiling.locate(x)


def k_projection_bound(cfg: ProjectionConfig, R: float, r: float) -> float:
    return _kpb(cfg.R_N, cfg.t_N, R, r)


__all__ = [
    "LatticeCell", "ProjectionConfig", "ProjectionTiling",
    "cube_radii", "k_projection_bound", "lattice_tiling_locate", "locate_projection",
    "projection_norm_estimate",
]
