"""Tiling of each quotient ``Z_k`` by a central tile, petal tiles and strip tiles.

At level ``k < M-1`` a class ``z`` is mapped to the plane by
``pi_j(z) = (e*_{k+1}(z), v*_{j,k+1}(z))`` for every pair of the level
``k+1`` system; the first ``j`` whose image leaves the central planar region
decides the petal.  Classes with ``|e*_{k+1}(z)| > 2`` fall in translated
strips ``4n e_{k+1} + T_k``.  The top level ``k = M-1`` is one-dimensional
and is cut into intervals of length 4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidTile
from .planar import PETAL_SIGNS, PlanarRegion, TemplateConstants, classify_many, region_slack
from .semibeta import SemiBiorthogonalSystem
from .space import SpaceDescriptor

CENTRAL, PETAL, STRIP = "central", "petal", "strip"


@dataclass(frozen=True, order=True)
class QuotientTileId:
    level: int
    kind: str
    j: int | None = None
    p: int | None = None
    n: int | None = None

    def __post_init__(self):
        if self.kind == PETAL and (self.j is None or self.p not in (1, 2, 3, 4)):
            raise InvalidTile(f"petal tile needs j and p in 1..4: {self}")
        if self.kind == STRIP and not self.n:
            raise InvalidTile("strip tiles need a nonzero n")
        if self.kind not in (CENTRAL, PETAL, STRIP):
            raise InvalidTile(f"unknown tile kind {self.kind!r}")

    @classmethod
    def central(cls, k: int) -> "QuotientTileId":
        return cls(k, CENTRAL)

    @classmethod
    def petal(cls, k: int, j: int, p: int) -> "QuotientTileId":
        return cls(k, PETAL, j=int(j), p=int(p))

    @classmethod
    def strip(cls, k: int, n: int) -> "QuotientTileId":
        return cls(k, STRIP, n=int(n))

    def to_dict(self) -> dict:
        out = {"k": self.level, "kind": self.kind}
        if self.kind == PETAL:
            out.update(j=self.j, p=self.p)
        elif self.kind == STRIP:
            out["n"] = self.n
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "QuotientTileId":
        return cls(int(data["k"]), data["kind"], data.get("j"), data.get("p"), data.get("n"))


@dataclass
class QuotientCenter:
    tile: QuotientTileId
    h: np.ndarray
    lift: np.ndarray | None = None


def strip_index(e: np.ndarray) -> np.ndarray:
    """Integer ``n`` with ``|e - 4n| <= 2``; on ties the smaller ``|n|`` wins."""
    t = np.asarray(e, dtype=float) / 4.0
    return (np.sign(t) * np.ceil(np.abs(t) - 0.5)).astype(np.int64)


class QuotientTiling:
    """Location and per-tile data for the quotient tilings at every level."""

    def __init__(self, space: SpaceDescriptor, template: TemplateConstants,
                 systems: dict[int, SemiBiorthogonalSystem]):
        self.space = space
        self.template = template
        self.systems = systems
        self.M = space.dim
        missing = [k for k in range(1, self.M) if k not in systems]
        if missing:
            raise ValueError(f"systems missing for levels {missing}")

    def system_above(self, k: int) -> SemiBiorthogonalSystem:
        return self.systems[k + 1]

    def m(self, k: int) -> int:
        """Number of petal indices at level ``k`` (0 at the top level)."""
        return 0 if k >= self.M - 1 else len(self.systems[k + 1])

    # -- plane maps ----------------------------------------------------------
    def pi_map(self, j: int, z, k: int) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        f = self.systems[k + 1].functionals[j]
        return np.array([z[k], f @ z])

    def _plane(self, Z: np.ndarray, k: int):
        return Z[:, k], Z @ self.systems[k + 1].functionals.T

    # -- location ------------------------------------------------------------
    def locate_codes(self, Z, k: int):
        """Vectorised location at level ``k``.

        Returns arrays ``(kind, j, p, n)`` with kind 0 = central, 1 = petal,
        2 = strip; unused entries are -1 (0 for ``n``).
        """
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        N = len(Z)
        n = strip_index(Z[:, k])
        kind = np.where(n != 0, 2, 0)
        j = np.full(N, -1)
        p = np.full(N, -1)
        if k >= self.M - 1:
            return kind, j, p, n
        inner = np.flatnonzero(n == 0)
        if len(inner):
            e, Y = self._plane(Z[inner], k)
            m = Y.shape[1]
            pts = np.column_stack([np.repeat(e, m), Y.ravel()])
            labels = classify_many(self.template.variant, pts).reshape(len(inner), m)
            if np.any(labels == PlanarRegion.OUTSIDE):
                raise RuntimeError("planar classification left the strip")
            off = labels != PlanarRegion.U0
            hit = off.any(axis=1)
            first = np.argmax(off, axis=1)
            rows = inner[hit]
            kind[rows] = 1
            j[rows] = first[hit]
            p[rows] = labels[hit, first[hit]]
        return kind, j, p, n

    def locate_quotient(self, z, k: int) -> QuotientTileId:
        kind, j, p, n = self.locate_codes(np.asarray(z, dtype=float)[None, :], k)
        return self.tile_from_codes(k, kind[0], j[0], p[0], n[0])

    @staticmethod
    def tile_from_codes(k, kind, j, p, n) -> QuotientTileId:
        if kind == 0:
            return QuotientTileId.central(k)
        if kind == 1:
            return QuotientTileId.petal(k, j, p)
        return QuotientTileId.strip(k, n)

    # -- membership ----------------------------------------------------------
    def slack(self, Z, tile: QuotientTileId) -> np.ndarray:
        """Smallest slack of the tile's defining inequalities at each row of ``Z``.

        ``slack >= 0`` is membership in the closed tile; ``slack >= -tol`` is
        the tolerance-relaxed membership used by the verifier.
        """
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        k = tile.level
        e = Z[:, k]
        if tile.kind == STRIP:
            return 2.0 - np.abs(e - 4.0 * tile.n)
        if k >= self.M - 1:
            if tile.kind != CENTRAL:
                raise InvalidTile(f"top level has no petal tiles: {tile}")
            return 2.0 - np.abs(e)
        _, Y = self._plane(Z, k)
        variant = self.template.variant
        last = Y.shape[1] if tile.kind == CENTRAL else tile.j
        out = np.full(len(Z), np.inf)
        for jj in range(last):
            out = np.minimum(out, region_slack(variant, 0, np.column_stack([e, Y[:, jj]])))
        if tile.kind == CENTRAL:
            return out
        if tile.j >= Y.shape[1]:
            raise InvalidTile(f"petal index beyond the system: {tile}")
        return np.minimum(out, region_slack(variant, tile.p, np.column_stack([e, Y[:, tile.j]])))

    def candidate_tiles(self, z, k: int) -> list[QuotientTileId]:
        """Every level-``k`` tile that could contain ``z`` up to a small tolerance."""
        e = float(np.asarray(z)[k])
        out = [QuotientTileId.strip(k, n) for n in {int(np.floor((e + 2) / 4)), int(np.ceil((e - 2) / 4))} if n]
        if abs(e) <= 2.5:
            out.append(QuotientTileId.central(k))
            for jj in range(self.m(k)):
                out.extend(QuotientTileId.petal(k, jj, pp) for pp in (1, 2, 3, 4))
        return out

    # -- centres -------------------------------------------------------------
    def quotient_center(self, tile: QuotientTileId) -> QuotientCenter:
        k = tile.level
        if not 0 <= k < self.M:
            raise InvalidTile(f"level out of range: {tile}")
        h = np.zeros(self.M)
        if tile.kind == CENTRAL:
            return QuotientCenter(tile, h)
        if tile.kind == STRIP:
            h[k] = 4.0 * tile.n
            return QuotientCenter(tile, h)
        if k >= self.M - 1 or tile.j >= self.m(k):
            raise InvalidTile(f"no such petal: {tile}")
        lift = self.systems[k + 1].vectors[tile.j].copy()
        lift[: k + 1] = 0.0
        sx, sy = PETAL_SIGNS[tile.p]
        h[k] = sx * self.template.af
        h += sy * self.template.bf * lift
        return QuotientCenter(tile, h, lift)

    def petal_tiles(self, k: int) -> list[QuotientTileId]:
        return [QuotientTileId.petal(k, j, p) for j in range(self.m(k)) for p in (1, 2, 3, 4)]
