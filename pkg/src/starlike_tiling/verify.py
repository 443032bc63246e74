"""Monte-Carlo certification suite for a configured tiling.

Every check records the number of probes, the number of failures and a
few witnesses.  A witness names the point and the seed tuple it was drawn
from, so ``numpy.random.default_rng(seed)`` regenerates it.  Nothing in the
report depends on wall-clock time, so equal configs give equal bytes.
"""
from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import TilingConfig, build_tiling
from .constants import compute_K_bound
from .planar import Variant, verify_template
from .projection import ProjectionConfig, ProjectionTiling, k_projection_bound
from .quotient import PETAL, QuotientTileId
from .voronoi import FullTileId, StarlikeTiling

REPORT_VERSION = 1
MAX_WITNESSES = 5

__all__ = ["CheckRecord", "VerificationReport", "compute_K_bound", "run_suite", "sample_points"]


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


@dataclass
class CheckRecord:
    name: str
    samples: int = 0
    failures: int = 0
    witnesses: list = field(default_factory=list)
    max_ratio: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, witness: dict) -> None:
        self.failures += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def tally(self, ok, witness_fn) -> None:
        ok = np.asarray(ok, dtype=bool)
        self.samples += int(ok.size)
        for i in np.flatnonzero(~ok.ravel()):
            self.fail(witness_fn(int(i)))

    def to_dict(self) -> dict:
        out = {"name": self.name, "samples": self.samples, "failures": self.failures,
               "passed": self.passed, "witnesses": self.witnesses}
        if self.max_ratio is not None:
            out["max_ratio"] = self.max_ratio
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class VerificationReport:
    config: dict
    constants: dict
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def to_dict(self) -> dict:
        return {"version": REPORT_VERSION, "config": self.config, "constants": self.constants,
                "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def sample_points(seed: int, count: int, dim: int, box: float, start: int = 0) -> np.ndarray:
    """Sample ``i`` is uniform in ``[-box, box]^dim`` under ``default_rng([seed, i])``."""
    return np.array([np.random.default_rng([seed, i]).uniform(-box, box, dim)
                     for i in range(start, start + count)]).reshape(count, dim)


def unit_vectors(space, rng, n: int, k: int = 0) -> np.ndarray:
    """Random directions normalized in the quotient ``Z_k`` norm (k = 0: ambient)."""
    U = rng.standard_normal((n, space.dim))
    U[:, :k] = 0.0
    return U / space.quotient_norms(U, k)[:, None]


def walk_members(member_many, center, spread: float, scale: float, n: int, rng,
                 walkers: int = 64, max_rounds: int = 2000) -> np.ndarray:
    """Points of a tile gathered by random walks started at its centre.

    Steps are uniform in a coordinate cube of log-uniform size between
    ``scale`` and ``spread``; a step is taken when it lands in the tile.
    """
    dim = len(center)
    X = np.repeat(center[None, :], walkers, axis=0)
    out = []
    lo, hi = np.log(scale), np.log(max(spread, scale * 1.01))
    for _ in range(max_rounds):
        s = np.exp(rng.uniform(lo, hi, walkers))[:, None]
        Y = X + s * rng.uniform(-1, 1, (walkers, dim))
        ok = member_many(Y)
        X[ok] = Y[ok]
        out.extend(X[ok])
        if len(out) >= n:
            break
    return np.asarray(out[:n]).reshape(-1, dim)


class Suite:
    def __init__(self, cfg: TilingConfig, tiling: StarlikeTiling):
        self.cfg = cfg
        self.T = tiling
        self.space = tiling.space
        self.M = self.space.dim
        self.tol = cfg.tolerances
        self.report = VerificationReport(cfg.to_dict(), {})
        c = tiling.template
        self.template_k = compute_K_bound(c)
        self.cert = tiling.derived()
        self.report.constants = {
            "R": float(self.cert.R), "Rprime": float(self.cert.Rprime),
            "Kbound": float(self.cert.Kbound), "delta_eff": float(self.cert.delta_eff),
            "Kbound_template": float(self.template_k.Kbound),
            "r": float(c.r), "delta": float(c.delta), "a": float(c.a), "b": float(c.b),
            "m": {str(k): len(s) for k, s in tiling.systems.items()},
        }
        self.log: list[dict] = []

    def rng(self, *key) -> np.random.Generator:
        return np.random.default_rng([self.cfg.sample_seed, *key])

    def add(self, name: str) -> CheckRecord:
        rec = CheckRecord(name)
        self.report.checks.append(rec)
        return rec

    def sample_witness(self, i: int, **extra) -> dict:
        return {"index": i, "seed": [self.cfg.sample_seed, i], "point": self.X[i].tolist(), **extra}

    # -- template ------------------------------------------------------------
    def template(self):
        rep = verify_template(self.T.template)
        for cond in rep.conditions:
            rec = self.add(f"template.{cond.name}")
            rec.samples = 1
            if not cond.passed:
                rec.fail({"corner": [float(v) for v in cond.witness], "detail": cond.detail})

    # -- systems -------------------------------------------------------------
    def systems(self):
        for k, s in sorted(self.T.systems.items()):
            rec = self.add(f"system[{k}].1a")
            for j, (v, f) in enumerate(s.pairs):
                vals = (self.space.dual_norm(f), self.space.quotient_norm(v, k), float(f @ v))
                lead = float(np.max(np.abs(f[:k]))) if k else 0.0
                rec.samples += 1
                if max(abs(x - 1.0) for x in vals) > self.tol["norm"] or lead > self.tol["norm"]:
                    rec.fail({"j": j, "dual_norm": vals[0], "norm": vals[1], "pairing": vals[2]})
            rec = self.add(f"system[{k}].1b")
            G = s.pairing_matrix()
            iu = np.triu_indices(len(s), 1)
            worst = np.abs(G[iu])
            rec.details = {"max_pairing": float(worst.max(initial=0.0))}
            rec.tally(worst <= s.delta + 1e-9, lambda i: {"j": int(iu[0][i]), "j2": int(iu[1][i]),
                                                          "pairing": float(G[iu][i])})
            rec = self.add(f"system[{k}].frame")
            key = (_tag("frame"), k)
            V = unit_vectors(self.space, self.rng(*key), 10_000, k)
            best = np.max(np.abs(V @ s.functionals.T), axis=1)
            floor = s.delta - s.epsilon - 1e-9
            rec.details = {"min_sup": float(best.min()), "floor": s.delta - s.epsilon}
            rec.tally(best >= floor, lambda i: {"seed": [self.cfg.sample_seed, *key], "row": i,
                                                "sup": float(best[i])})

    # -- quotients -----------------------------------------------------------
    def quotients(self):
        q = self.T.quotients
        X = self.X
        c = self.T.template
        dfac = 4.0 if c.variant is Variant.A else 3.0
        upper = dfac / float(self.cert.delta_eff) + self.tol["geometric"]
        a, b, r = c.af, c.bf, c.rf
        for k in range(self.M):
            top = k == self.M - 1
            kind, j, p, n = q.locate_codes(X, k)
            tiles = [q.tile_from_codes(k, *t) for t in zip(kind, j, p, n)]
            qn = self.space.quotient_norms(X, k)

            rec = self.add(f"quotient[{k}].2a_lower")
            key = (_tag("2a_lower"), k)
            Z = unit_vectors(self.space, self.rng(*key), 1000, k) * (1 - 1e-6)
            got = q.locate_codes(Z, k)[0]
            rec.tally(got == 0, lambda i: {"seed": [self.cfg.sample_seed, *key], "row": i})

            rec = self.add(f"quotient[{k}].2a_upper")
            cen = kind == 0
            rec.details = {"bound": upper, "max_norm": float(qn[cen].max(initial=0.0))}
            rec.tally(qn[cen] <= upper, lambda i: self.sample_witness(int(np.flatnonzero(cen)[i])))

            if not top:
                rec = self.add(f"quotient[{k}].2b")
                petals = q.petal_tiles(k)
                H = np.array([self._qcenter(t) for t in petals]).reshape(-1, self.M)
                hn = self.space.quotient_norms(H, k + 1)
                rec.details = {"max_norm_above": float(hn.max(initial=0.0)), "bound": 1.0 - r}
                rec.tally((hn <= 1.0 - r + self.tol["norm"]) & (np.abs(hn - b) <= self.tol["norm"]),
                          lambda i: {"tile": petals[i].to_dict(), "norm_above": float(hn[i])})

            rec = self.add(f"quotient[{k}].2d")
            H = np.array([self._qcenter(t) for t in tiles])
            lhs = self.space.quotient_norms(X - H, k)
            above = self.space.quotient_norms(X, k + 1) if not top else np.zeros(len(X))
            rhs = a + 2 * b + 2 * above + self.tol["geometric"]
            rec.tally(lhs <= rhs, lambda i: self.sample_witness(i, lhs=float(lhs[i]), rhs=float(rhs[i])))

            if top:
                rec = self.add(f"quotient[{k}].2c_prime")
                e = X[:, k]
                ok = np.abs(e - 4.0 * n) <= 2.0
                # the interval of a tile is exactly the quotient ball of radius 2 about its centre
                key = (_tag("2c_prime"), k)
                g = self.rng(*key)
                nn = g.integers(-5, 6, 1000)
                off = g.uniform(-2, 2, 1000)
                Z = np.zeros((1000, self.M))
                Z[:, k] = 4.0 * nn + off
                Z[:, :k] = g.uniform(-5, 5, (1000, k))
                inside = q.locate_codes(Z, k)[3] == nn
                Z[:, k] -= 4.0 * nn
                length_ok = self.space.quotient_norms(Z, k) <= 2.0 + 1e-12
                rec.samples = len(X)
                for i in np.flatnonzero(~ok):
                    rec.fail(self.sample_witness(int(i)))
                rec.tally(inside & length_ok, lambda i: {"seed": [self.cfg.sample_seed, *key], "row": i})
                rec.details = {"interval_length": 4.0}
                continue

            rec = self.add(f"quotient[{k}].2c")
            hit = sorted({t for t in tiles if t.kind == PETAL})[:100]
            key = (_tag("2c"), k)
            g = self.rng(*key)
            for t in hit:
                h = self._qcenter(t)
                U = unit_vectors(self.space, g, 100, k)
                Z = h + (r - 1e-6) * U * g.uniform(0, 1, (100, 1))
                got = [q.tile_from_codes(k, *c4) for c4 in zip(*q.locate_codes(Z, k))]
                rec.tally(np.array([x == t for x in got]),
                          lambda i, t=t: {"tile": t.to_dict(), "seed": [self.cfg.sample_seed, *key]})
            rec.details = {"petals_hit": len(hit)}

    def _qcenter(self, t: QuotientTileId) -> np.ndarray:
        cache = self.__dict__.setdefault("_qc", {})
        if t not in cache:
            cache[t] = self.T.quotients.quotient_center(t).h
        return cache[t]

    # -- cylinders -----------------------------------------------------------
    def cylinders(self):
        C = self.T.cylinders
        X = self.X
        R = float(self.cert.R)
        rec = self.add("cylinder.tube")
        d = np.empty(len(X))
        for i, (x, cid) in enumerate(zip(X, self.cids)):
            d[i] = self.space.quotient_norm(x - self.T.axis(cid).x, cid.level)
        rec.max_ratio = float(d.max(initial=0.0))
        rec.details = {"R": R}
        rec.tally(d <= R + self.tol["geometric"], lambda i: self.sample_witness(i, dist=float(d[i])))

        rec = self.add("cylinder.inner_tube")
        key = (_tag("inner_tube"),)
        g = self.rng(*key)
        r1 = self.T.r - 1e-6
        for cid in sorted(set(self.cids))[:100]:
            ax = self.T.axis(cid).x
            V = np.zeros((10, self.M))
            if cid.level:
                V[:, : cid.level] = g.standard_normal((10, cid.level))
                V *= (2 * g.uniform(0, 1, (10, 1))) / self.space.norms(V)[:, None]
            P = ax + V + r1 * unit_vectors(self.space, g, 10)
            got = C.ids_from_codes(*C.locate_many(P))
            rec.tally(np.array([x == cid for x in got]),
                      lambda i, cid=cid: {"tile": cid.to_dict(), "seed": [self.cfg.sample_seed, *key]})

        rec = self.add("cylinder.convex_k0")
        key = (_tag("convex_k0"),)
        g = self.rng(*key)
        q0 = [QuotientTileId.central(0)]
        if self.T.quotients.m(0):
            q0 += [QuotientTileId.petal(0, 0, p) for p in (1, 2, 3, 4)]
        q0 += [QuotientTileId.strip(0, 1), QuotientTileId.strip(0, -1)]
        per = -(-1000 // len(q0))
        for qt in q0:
            cid = self._cid(0, qt)
            ax = self.T.axis(cid).x
            P = walk_members(lambda Y, cid=cid: C.slack(Y, cid) >= 0, ax, float(self.cert.R),
                             self.T.r, 2 * per, g)
            if len(P) < 2:
                rec.fail({"tile": cid.to_dict(), "reason": "no members"})
                continue
            i1 = g.integers(0, len(P), per)
            i2 = g.integers(0, len(P), per)
            mids = (P[i1] + P[i2]) / 2
            got = C.ids_from_codes(*C.locate_many(mids))
            rec.tally(np.array([x == cid for x in got]),
                      lambda i, cid=cid: {"tile": cid.to_dict(), "midpoint": mids[i].tolist()})

    @staticmethod
    def _cid(k, qt):
        from .cylinder import CylinderTileId
        return CylinderTileId(k, qt)

    # -- full tiling ---------------------------------------------------------
    def full(self):
        T = self.T
        X = self.X
        r = T.r
        ids = self.ids
        centers = np.array([T.full_center(t) for t in ids])
        dist = self.space.norms(X - centers)
        ratio = dist / r

        rec = self.add("full.covering")
        member = np.array([T.is_member(x, t, 0.0) for x, t in zip(X, ids)])
        rec.tally(member, lambda i: self.sample_witness(i, tile=ids[i].to_dict()))

        rec = self.add("full.disjointness")
        margin = self.tol["margin"]
        counts = T.cylinders.strict_counts(X, margin)
        strict = np.array([T.is_strict_member(x, t, margin) for x, t in zip(X, ids)])
        # a strict member of its located tile must be counted exactly once
        ok = (counts <= 1) & ~(strict & (counts == 0))
        rec.details = {"strict_samples": int(strict.sum())}
        rec.tally(ok, lambda i: self.sample_witness(i, strict_count=int(counts[i])))

        rec = self.add("full.normality")
        kb = float(self.template_k.Kbound)
        rec.max_ratio = float(ratio.max(initial=0.0))
        rec.details = {"Kbound": kb}
        rec.tally(ratio <= kb + 1e-6, lambda i: self.sample_witness(i, ratio=float(ratio[i])))

        rec = self.add("full.outer_radius")
        Rp = float(self.cert.Rprime)
        rec.details = {"Rprime": Rp}
        rec.tally(dist <= Rp + self.tol["geometric"], lambda i: self.sample_witness(i, dist=float(dist[i])))

        rec = self.add("full.inner_ball")
        key = (_tag("inner_ball"),)
        g = self.rng(*key)
        for t in sorted(set(ids))[:100]:
            c = T.full_center(t)
            P = c + (r - 1e-6) * unit_vectors(self.space, g, 100)
            rec.tally(np.array([T.is_member(x, t, 0.0) for x in P]),
                      lambda i, t=t, P=P: {"tile": t.to_dict(), "point": P[i].tolist()})

        rec = self.add("full.voronoi_inner")
        key = (_tag("voronoi_inner"),)
        g = self.rng(*key)
        for k in range(1, self.M):
            net = T.net(k)
            S = net.sites_in_box(np.full(k, -4 * r), np.full(k, 4 * r))
            S = S[net.keys(S)][:100]
            for s in S:
                U = np.zeros((10, self.M))
                U[:, :k] = g.standard_normal((10, k))
                U /= self.space.norms(U)[:, None]
                Y = net.site_vector(s) + (r - 1e-6) * g.uniform(0, 1, (10, 1)) * U
                rec.tally(np.array([net.nearest(y)[0] == tuple(s) for y in Y]),
                          lambda i, k=k, s=s: {"level": k, "site": s.tolist()})

        rec = self.add("full.starlike")
        ts = np.round(np.arange(1, 10) / 10.0, 1)
        pick = range(min(len(X), -(-1000 // len(ts))))
        seg = 0.0
        for i in pick:
            x, t, c = X[i], ids[i], centers[i]
            for tt in ts:
                xt = tt * c + (1 - tt) * x
                gap = abs(self.space.norm(xt - c) - (self.space.norm(x - c) - self.space.norm(x - xt)))
                seg = max(seg, gap)
                ok = T.is_member(xt, t, self.tol["geometric"]) and gap <= 1e-8
                rec.samples += 1
                if not ok:
                    rec.fail(self.sample_witness(i, t=float(tt)))
        rec.details = {"max_segment_gap": seg}

        for i, (x, t) in enumerate(zip(X, ids)):
            self.log.append({"index": i, "point": x.tolist(), "tile": t.to_dict(),
                             "dist": float(dist[i]), "ratio": float(ratio[i]),
                             "flags": {"member": bool(member[i]), "strict": bool(strict[i]),
                                       "strict_count": int(counts[i])}})

    # -- projection mode -----------------------------------------------------
    def projection(self):
        cfg = ProjectionConfig.build(self.T, self.cfg.N, self.cfg.sample_seed)
        PT = ProjectionTiling(self.T, cfg)
        X = self.X
        R = float(self.cert.R)
        bound = PT.outer_radius()
        kb = k_projection_bound(cfg, R, self.T.r)
        self.report.constants["projection"] = {"N": cfg.N, "R_N": cfg.R_N, "t_N": cfg.t_N,
                                               "outer_radius": bound, "Kbound": kb,
                                               "certified": cfg.certified,
                                               # informational only: (R(N + sqrt N) + 2N) / r
                                               "coarse_estimate": (R * (cfg.N + cfg.N ** 0.5) + 2 * cfg.N) / self.T.r}
        rec = self.add("projection.pnorm")
        key = (_tag("pnorm"),)
        g = self.rng(*key)
        for k in range(1, cfg.N + 1):
            Y = g.standard_normal((10_000, self.M))
            Y[:100, k:] = 0.0
            PY = Y.copy()
            PY[:, k:] = 0.0
            est = float(np.max(self.space.norms(PY) / self.space.norms(Y)))
            rec.samples += 1
            if abs(est - cfg.P_norms[k]) > 1e-8 and self.space.is_lp:
                rec.fail({"level": k, "estimate": est, "stored": cfg.P_norms[k]})
        rec.details = {"P_norms": {str(k): v for k, v in cfg.P_norms.items()}, "certified": cfg.certified}

        pids = PT.locate_many(X)
        rec = self.add("projection.fallback")
        other = [i for i, t in enumerate(pids) if not PT.sliced(t.level)]
        rec.tally(np.array([pids[i] == self.ids[i] for i in other], dtype=bool),
                  lambda j: self.sample_witness(other[j]))

        sliced = sorted({t for t in pids if PT.sliced(t.level)})[:4]
        for k in range(1, cfg.N + 1):
            cid = self._cid(k, QuotientTileId.strip(k, 1))
            sliced.append(FullTileId(cid, (0,) * k))
        rec_c = self.add("projection.convexity")
        rec_o = self.add("projection.outer")
        rec_i = self.add("projection.inner_ball")
        key = (_tag("projection_walk"),)
        g = self.rng(*key)
        C = self.T.cylinders
        for t in dict.fromkeys(sliced):
            c = PT.center(t)
            lead = t.level

            def member(Y, t=t, tol=0.0):
                off = Y[:, :lead] - cfg.side * np.asarray(t.i, dtype=float)
                return (C.slack(Y, t.cyl) >= -tol) & np.all(np.abs(off) <= cfg.r + tol, axis=1)

            P = walk_members(member, c, R, self.T.r, 2000, g)
            i1 = g.integers(0, len(P), 1000)
            i2 = g.integers(0, len(P), 1000)
            mids = (P[i1] + P[i2]) / 2
            rec_c.tally(member(mids, tol=1e-9),
                        lambda i, t=t, mids=mids: {"tile": t.to_dict(), "midpoint": mids[i].tolist()})
            d = self.space.norms(P - c)
            rec_o.tally(d <= bound + 1e-6, lambda i, t=t, P=P: {"tile": t.to_dict(), "point": P[i].tolist()})
            U = unit_vectors(self.space, g, 100)
            probe = c + (PT.inner_radius(t.level) - 1e-6) * U
            rec_i.tally(member(probe), lambda i, t=t, probe=probe: {"tile": t.to_dict(),
                                                                     "point": probe[i].tolist()})
        rec_o.details = {"outer_radius": bound}

        rec = self.add("projection.normality")
        centers = np.array([PT.center(t) for t in pids])
        ratio = self.space.norms(X - centers) / self.T.r
        rec.max_ratio = float(ratio.max(initial=0.0))
        rec.details = {"Kbound": kb}
        rec.tally(ratio <= kb + 1e-6, lambda i: self.sample_witness(i, ratio=float(ratio[i])))

    # -- driver --------------------------------------------------------------
    def run(self) -> VerificationReport:
        self.template()
        if not self.report.passed:
            # the geometry is built from the template; with a broken template there is nothing to sample
            self.add("geometry").fail({"reason": "not checked: template conditions failed"})
            return self.report
        self.X = sample_points(self.cfg.sample_seed, self.cfg.samples, self.M, self.cfg.box)
        self.ids = self.T.locate_full_many(self.X) if len(self.X) else []
        self.cids = [t.cyl for t in self.ids]
        self.systems()
        self.quotients()
        self.cylinders()
        self.full()
        if self.cfg.mode == "projection":
            self.projection()
        return self.report


def run_suite(cfg: TilingConfig, tiling: StarlikeTiling | None = None, use_cache: bool = True,
              log: list | None = None) -> VerificationReport:
    """Run every check for ``cfg`` in order; failures are recorded, never raised."""
    suite = Suite(cfg, tiling or build_tiling(cfg, use_cache))
    report = suite.run()
    if log is not None:
        log.extend(suite.log)
    return report


def write_report(report: VerificationReport, path, log: list | None = None) -> None:
    path = Path(path)
    path.write_text(report.dumps())
    if log is not None:
        with open(path.with_suffix(".samples.jsonl"), "w") as fh:
            for row in log:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
