"""Finite-dimensional normed spaces with a normalized biorthogonal basis.

Vectors are plain float arrays of coordinates in the basis ``e_1..e_M``;
functionals are coefficient arrays, so ``f(x) = f @ x`` and ``e*_i`` is the
``i``-th unit coefficient vector.  Level ``k`` refers to the quotient
``Z_k = X / span(e_1..e_k)``; any vector represents its class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .errors import ConfigError, IterationCapExceeded, ZeroVector

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SOLVER_TOL = 1e-8
SOLVER_MAX_ITER = 10**5


@dataclass
class SpaceDescriptor:
    """Ambient space ``R^dim`` with an lp norm, a polytope norm or an oracle norm.

    ``family`` is one of ``"lp"``, ``"polytope"`` (``norm(x) = max_i |f_i(x)|``
    for the rows of ``functionals``) or ``"oracle"`` (in-library callables).
    """

    dim: int
    family: str = "lp"
    p: float = 2.0
    functionals: np.ndarray | None = None
    norm_oracle: Callable[[np.ndarray], float] | None = None
    subgradient_oracle: Callable[[np.ndarray], np.ndarray] | None = None
    _quotient_facets: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.dim = int(self.dim)
        if self.dim < 1:
            raise ConfigError("dimension must be positive")
        if self.family == "lp":
            self.p = float(self.p)
            if not self.p >= 1:
                raise ConfigError(f"lp exponent must be >= 1, got {self.p}")
        elif self.family == "polytope":
            F = np.atleast_2d(np.asarray(self.functionals, dtype=float))
            if F.shape[1] != self.dim or np.linalg.matrix_rank(F) < self.dim:
                raise ConfigError("polytope functionals must span the dual space")
            self.functionals = F
        elif self.family == "oracle":
            if self.norm_oracle is None or self.subgradient_oracle is None:
                raise ConfigError("oracle spaces need both a norm and a subgradient oracle")
        else:
            raise ConfigError(f"unknown norm family {self.family!r}")

    # -- constructors --------------------------------------------------------
    @classmethod
    def lp(cls, dim: int, p: float) -> "SpaceDescriptor":
        return cls(dim, "lp", p=p)

    @classmethod
    def polytope(cls, functionals) -> "SpaceDescriptor":
        F = np.atleast_2d(np.asarray(functionals, dtype=float))
        return cls(F.shape[1], "polytope", functionals=F)

    @property
    def is_lp(self) -> bool:
        return self.family == "lp"

    @property
    def label(self) -> str:
        if self.is_lp:
            p = "inf" if math.isinf(self.p) else f"{self.p:g}"
            return f"l{p}^{self.dim}"
        return f"{self.family}^{self.dim}"

    # -- norms ---------------------------------------------------------------
    def norms(self, X) -> np.ndarray:
        """Norms of the rows of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.family == "lp":
            return _lp(X, self.p)
        if self.family == "polytope":
            return np.max(np.abs(X @ self.functionals.T), axis=1)
        return np.array([float(self.norm_oracle(x)) for x in X])

    def norm(self, x) -> float:
        return float(self.norms(np.asarray(x, dtype=float)[None, :])[0])

    def dual_norm(self, f) -> float:
        """Operator norm of the functional ``f``.

        Exact for lp and polytope norms; for oracle norms a sampled lower bound.
        """
        f = np.asarray(f, dtype=float)
        if self.family == "lp":
            return float(_lp(f[None, :], _conjugate(self.p))[0])
        if self.family == "polytope":
            return _polytope_dual_norm(self.functionals, f)
        rng = np.random.default_rng(0)
        X = rng.standard_normal((20000, self.dim))
        return float(np.max(np.abs(X @ f) / self.norms(X)))

    def norming_functional(self, x) -> np.ndarray:
        """Functional of dual norm one attaining ``f(x) = ||x||``."""
        x = np.asarray(x, dtype=float)
        if not np.any(x):
            raise ZeroVector("the zero vector has no norming functional")
        if self.family == "lp":
            return _duality_map(x, self.p)
        if self.family == "polytope":
            vals = self.functionals @ x
            i = int(np.argmax(np.abs(vals)))
            return np.sign(vals[i]) * self.functionals[i]
        g = np.asarray(self.subgradient_oracle(x), dtype=float)
        return g * (self.norm(x) / float(g @ x))

    # -- quotients -----------------------------------------------------------
    def quotient_norms(self, X, k: int) -> np.ndarray:
        """``dist(x, V_k)`` for each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        k = int(k)
        if k <= 0:
            return self.norms(X)
        if k >= self.dim:
            return np.zeros(len(X))
        if self.family == "lp":
            return _lp(X[:, k:], self.p)
        if self.family == "polytope":
            A = self._facets(k)
            return np.maximum(np.max(X[:, k:] @ A.T, axis=1), 0.0)
        return np.array([self._descend(x, k)[0] for x in X])

    def quotient_norm(self, x, k: int) -> float:
        return float(self.quotient_norms(np.asarray(x, dtype=float)[None, :], k)[0])

    def quotient_functional(self, x, k: int) -> np.ndarray:
        """Norming functional of the class of ``x`` in ``Z_k``, vanishing on ``V_k``."""
        x = np.asarray(x, dtype=float)
        k = int(k)
        if k == 0:
            return self.norming_functional(x)
        tail = np.zeros_like(x)
        tail[k:] = x[k:]
        if not np.any(tail):
            raise ZeroVector("class is zero in the quotient")
        if self.family == "lp":
            return _duality_map(tail, self.p)
        if self.family == "polytope":
            A = self._facets(k)
            i = int(np.argmax(A @ x[k:]))
            out = np.zeros(self.dim)
            out[k:] = A[i]
            return out
        value, lam = self._descend(x, k)
        y = x.copy()
        y[:k] -= lam
        g = np.asarray(self.subgradient_oracle(y), dtype=float).copy()
        g[:k] = 0.0
        return g * (value / float(g @ x))

    def minimal_representative(self, x, k: int) -> np.ndarray:
        """Representative of the class of ``x`` in ``Z_k`` of least norm."""
        x = np.asarray(x, dtype=float).copy()
        if k <= 0:
            return x
        if self.family == "lp":
            x[:k] = 0.0
            return x
        if self.family == "polytope":
            F = self.functionals
            n = len(F)
            # minimise t subject to |F (x - V lam)| <= t
            c = np.zeros(k + 1)
            c[-1] = 1.0
            Fv = F[:, :k]
            A = np.block([[-Fv, -np.ones((n, 1))], [Fv, -np.ones((n, 1))]])
            b = np.concatenate([-F @ x, F @ x])
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * (k + 1), method="highs")
            x[:k] -= res.x[:k]
            return x
        _, lam = self._descend(x, k)
        x[:k] -= lam
        return x

    def _facets(self, k: int) -> np.ndarray:
        """Rows ``a`` with ``||w||_{Z_k} = max a.w`` on tail coordinates (polytope norms)."""
        if k not in self._quotient_facets:
            self._quotient_facets[k] = _projected_facets(self.functionals, k)
        return self._quotient_facets[k]

    def _descend(self, x, k: int):
        """Coordinate descent with golden-section line search over ``V_k``."""
        x = np.asarray(x, dtype=float)
        lam = x[:k].copy()

        def phi(l):
            y = x.copy()
            y[:k] -= l
            return float(self.norm_oracle(y))

        value = phi(lam)
        for _ in range(SOLVER_MAX_ITER):
            before = value
            for i in range(k):
                span = max(value, SOLVER_TOL)
                lo, hi = lam[i] - span, lam[i] + span

                def line(t, i=i):
                    trial = lam.copy()
                    trial[i] = t
                    return phi(trial)

                lam[i] = _golden(line, lo, hi, SOLVER_TOL * 1e-2)
                value = phi(lam)
            if before - value <= SOLVER_TOL * 1e-2:
                return value, lam
        raise IterationCapExceeded(f"quotient solver did not settle within {SOLVER_MAX_ITER} sweeps")

    # -- sampling ------------------------------------------------------------
    def random_quotient_units(self, rng: np.random.Generator, n: int, k: int = 0) -> np.ndarray:
        """``n`` vectors with zero leading coordinates and unit ``Z_k`` norm."""
        X = np.zeros((n, self.dim))
        X[:, k:] = rng.standard_normal((n, self.dim - k))
        return X / self.quotient_norms(X, k)[:, None]

    def validate(self, samples: int = 2000, seed: int = 0) -> list[str]:
        """Spot-check the norm axioms and the normalized-basis assumption."""
        problems = []
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((samples, self.dim))
        Y = rng.standard_normal((samples, self.dim))
        nx, ny, nxy = self.norms(X), self.norms(Y), self.norms(X + Y)
        if np.any(nxy > nx + ny + 1e-9 * (nx + ny)):
            problems.append("triangle inequality fails on samples")
        if not np.allclose(self.norms(-2.5 * X), 2.5 * nx, rtol=1e-9):
            problems.append("norm not absolutely homogeneous")
        E = np.eye(self.dim)
        if not np.allclose(self.norms(E), 1.0, atol=1e-9):
            problems.append("basis vectors are not normalized")
        if self.family != "oracle":
            duals = [self.dual_norm(e) for e in E]
            if not np.allclose(duals, 1.0, atol=1e-8):
                problems.append("coordinate functionals are not normalized")
        return problems

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        if self.family == "lp":
            return {"dim": self.dim, "family": "lp", "p": "inf" if math.isinf(self.p) else self.p}
        if self.family == "polytope":
            return {"dim": self.dim, "family": "polytope", "functionals": self.functionals.tolist()}
        raise ConfigError("oracle norms cannot be serialized")

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceDescriptor":
        family = data.get("family", "lp")
        if family == "lp":
            p = data.get("p", 2)
            p = math.inf if p in ("inf", "infinity", None) else float(p)
            return cls(int(data["dim"]), "lp", p=p)
        if family in ("polytope", "custom"):
            space = cls.polytope(data["functionals"])
            if "dim" in data and int(data["dim"]) != space.dim:
                raise ConfigError("space dim does not match functionals")
            return space
        raise ConfigError(f"unknown norm family {family!r}")


def _conjugate(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _lp(X: np.ndarray, p: float) -> np.ndarray:
    if X.shape[1] == 0:
        return np.zeros(len(X))
    A = np.abs(X)
    if math.isinf(p):
        return A.max(axis=1)
    if p == 1:
        return A.sum(axis=1)
    if p == 2:
        return np.sqrt(np.einsum("ij,ij->i", X, X))
    m = A.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((A / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def _duality_map(x: np.ndarray, p: float) -> np.ndarray:
    if math.isinf(p):
        i = int(np.argmax(np.abs(x)))  # first index of maximal modulus
        f = np.zeros_like(x)
        f[i] = np.sign(x[i])
        return f
    if p == 1:
        return np.sign(x)
    n = float(_lp(x[None, :], p)[0])
    return np.sign(x) * (np.abs(x) / n) ** (p - 1.0)


def _golden(fun, lo: float, hi: float, tol: float) -> float:
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = fun(d)
    return 0.5 * (lo + hi)


def _polytope_dual_norm(F: np.ndarray, f: np.ndarray) -> float:
    # min sum|mu| s.t. F^T mu = f, split mu = mu+ - mu-
    n = len(F)
    res = linprog(
        np.ones(2 * n),
        A_eq=np.hstack([F.T, -F.T]),
        b_eq=f,
        bounds=[(0, None)] * (2 * n),
        method="highs",
    )
    return float(res.fun)


def _projected_facets(F: np.ndarray, k: int) -> np.ndarray:
    """Facets of the projection of ``{|F x| <= 1}`` onto coordinates ``k+1..M``."""
    n, M = F.shape
    if k == 0:
        return np.vstack([F, -F])
    hs = np.vstack([np.hstack([F, -np.ones((n, 1))]), np.hstack([-F, -np.ones((n, 1))])])
    verts = HalfspaceIntersection(hs, np.zeros(M)).intersections
    proj = verts[:, k:]
    if proj.shape[1] == 1:
        c = float(np.max(np.abs(proj)))
        return np.array([[1.0 / c], [-1.0 / c]])
    hull = ConvexHull(proj)
    normals, offsets = hull.equations[:, :-1], hull.equations[:, -1]
    A = normals / (-offsets)[:, None]
    return np.unique(np.round(A, 12), axis=0)


def norm_eval(space: SpaceDescriptor, x) -> float:
    return space.norm(x)


def norming_functional(space: SpaceDescriptor, x) -> np.ndarray:
    return space.norming_functional(x)


def quotient_norm(space: SpaceDescriptor, x, k: int) -> float:
    return space.quotient_norm(x, k)
