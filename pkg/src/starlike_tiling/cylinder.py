"""Cylinder tiles of the whole space built from the quotient tilings.

A point belongs to ``C^k_j`` when its class in ``Z_k`` lies in ``H^k_j`` and
its class in every higher quotient lies in the central tile.  The level of
a point is the smallest ``k`` above which all classes are central.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidTile
from .quotient import CENTRAL, QuotientTileId, QuotientTiling, strip_index


@dataclass(frozen=True, order=True)
class CylinderTileId:
    level: int
    qtile: QuotientTileId

    def __post_init__(self):
        if self.qtile.level != self.level:
            raise InvalidTile("quotient tile level differs from cylinder level")
        if self.level > 0 and self.qtile.kind == CENTRAL:
            raise InvalidTile("only level 0 has a central cylinder")

    def to_dict(self) -> dict:
        return self.qtile.to_dict()

    @classmethod
    def from_dict(cls, data: dict) -> "CylinderTileId":
        q = QuotientTileId.from_dict(data)
        return cls(q.level, q)


@dataclass
class CylinderAxis:
    id: CylinderTileId
    x: np.ndarray


class CylinderTiling:
    def __init__(self, quotients: QuotientTiling):
        self.q = quotients
        self.space = quotients.space
        self.M = quotients.M
        self._axes: dict[CylinderTileId, CylinderAxis] = {}

    def locate_many(self, X):
        """Vectorised cylinder location: returns ``(level, kind, j, p, n)`` arrays."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        N = len(X)
        level = np.zeros(N, dtype=np.int64)
        codes = {}
        for m in range(1, self.M):
            codes[m] = self.q.locate_codes(X, m)
            level[codes[m][0] != 0] = m  # later (higher) levels overwrite
        out = [np.empty(N, dtype=np.int64) for _ in range(4)]
        for m in range(self.M):
            rows = np.flatnonzero(level == m)
            if not len(rows):
                continue
            c = codes[m] if m else self.q.locate_codes(X[rows], 0)
            for arr, src in zip(out, c):
                arr[rows] = src[rows] if m else src
        return (level, *out)

    def locate_cylinder(self, x) -> CylinderTileId:
        level, kind, j, p, n = self.locate_many(np.asarray(x, dtype=float)[None, :])
        k = int(level[0])
        return CylinderTileId(k, self.q.tile_from_codes(k, kind[0], j[0], p[0], n[0]))

    def ids_from_codes(self, level, kind, j, p, n) -> list[CylinderTileId]:
        return [
            CylinderTileId(int(k), self.q.tile_from_codes(int(k), kd, jj, pp, nn))
            for k, kd, jj, pp, nn in zip(level, kind, j, p, n)
        ]

    def cylinder_axis(self, cid: CylinderTileId) -> CylinderAxis:
        """Axis point of the cylinder, chosen with zero leading coordinates."""
        if cid in self._axes:
            return self._axes[cid]
        x = self.q.quotient_center(cid.qtile).h.copy()
        x[: cid.level] = 0.0
        if self.q.locate_quotient(x, cid.level) != cid.qtile:
            raise InvalidTile(f"axis of {cid} does not locate to its tile")
        r = self.q.template.rf
        for m in range(cid.level + 1, self.M):
            if self.space.quotient_norm(x, m) > 1 - r + 1e-8:
                raise InvalidTile(f"axis of {cid} is not central above its level")
        axis = CylinderAxis(cid, x)
        self._axes[cid] = axis
        return axis

    def slack(self, X, cid: CylinderTileId) -> np.ndarray:
        """Smallest slack of every inequality defining the cylinder."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = self.q.slack(X, cid.qtile)
        for m in range(cid.level + 1, self.M):
            out = np.minimum(out, self.q.slack(X, QuotientTileId.central(m)))
        return out

    def candidate_ids(self, x) -> list[CylinderTileId]:
        """Cylinders that could contain ``x`` (a superset, for overlap tests)."""
        out = []
        for k in range(self.M):
            for q in self.q.candidate_tiles(x, k):
                if k > 0 and q.kind == CENTRAL:
                    continue
                out.append(CylinderTileId(k, q))
        return out

    def strict_counts(self, X, margin: float) -> np.ndarray:
        """Number of cylinders whose inequalities hold at each row with slack ``>= margin``.

        Evaluated tile by tile from the defining inequalities, without the
        locator; a count above 1 means two cylinders overlap in interior.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        central = {m: self.q.slack(X, QuotientTileId.central(m)) >= margin for m in range(self.M)}
        counts = np.zeros(len(X), dtype=np.int64)
        above = np.ones(len(X), dtype=bool)
        for k in range(self.M - 1, -1, -1):
            tiles = self.q.petal_tiles(k) + ([QuotientTileId.central(0)] if k == 0 else [])
            for t in tiles:
                counts += above & (self.q.slack(X, t) >= margin)
            e = X[:, k]
            n0 = strip_index(e)
            for d in (-1, 0, 1):
                n = n0 + d
                counts += above & (n != 0) & (2.0 - np.abs(e - 4.0 * n) >= margin)
            above &= central[k]
        return counts
