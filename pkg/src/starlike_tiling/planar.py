"""Planar template tiling of the strip ``|x| <= 2`` and its feasibility constants.

Two templates are supported.  Variant ``A`` uses the diamond ``|x|+|y| <= 2``
as the central region, variant ``B`` the flattened hexagon
``|x|+2|y| <= 3, |x| <= 2``.  Every region is an intersection of closed
half-planes, so membership, slack and corner checks are all linear.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import HypothesisViolated, Infeasible

#: relative retreat applied to strict upper bounds in :func:`make_template`
STRICT_MARGIN = Fraction(1, 10**12)


class Variant(str, enum.Enum):
    A = "A"
    B = "B"


class PlanarRegion(enum.IntEnum):
    U0 = 0
    U1 = 1
    U2 = 2
    U3 = 3
    U4 = 4
    OUTSIDE = 5


def as_fraction(value) -> Fraction:
    """Exact rational for ``value``; floats are read through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"non-finite constant {value!r}")
    return Fraction(repr(value))


# Half-planes are rows (ax, ay, c) meaning ax*x + ay*y <= c.
_U1_A = ((-1, 0, 0), (1, 0, 2), (0, -1, 0), (-1, -1, -2))
_U0_A = ((1, 1, 2), (1, -1, 2), (-1, 1, 2), (-1, -1, 2))
_U1_B = ((-1, 0, 0), (1, 0, 2), (0, -1, 0), (-1, -2, -3))
_U0_B = ((1, 2, 3), (1, -2, 3), (-1, 2, 3), (-1, -2, 3), (1, 0, 2), (-1, 0, 2))


def _reflect(rows, sx, sy):
    return tuple((ax * sx, ay * sy, c) for ax, ay, c in rows)


def _regions(u0, u1):
    # U2 mirrors U1 in the x-axis, U3 = -U1, U4 = -U2.
    return (u0, u1, _reflect(u1, 1, -1), _reflect(u1, -1, -1), _reflect(u1, -1, 1))


HALF_PLANES = {
    Variant.A: _regions(_U0_A, _U1_A),
    Variant.B: _regions(_U0_B, _U1_B),
}
_HP_ARRAYS = {v: [np.array(rows, dtype=float) for rows in regs] for v, regs in HALF_PLANES.items()}

#: sign pattern (sx, sy) mapping the U1 petal to petal p
PETAL_SIGNS = {1: (1, 1), 2: (1, -1), 3: (-1, -1), 4: (-1, 1)}


@dataclass(frozen=True)
class TemplateConstants:
    variant: Variant
    a: Fraction
    b: Fraction
    r: Fraction
    delta: Fraction
    # float copies for the numeric hot paths
    af: float = field(init=False, repr=False, compare=False)
    bf: float = field(init=False, repr=False, compare=False)
    rf: float = field(init=False, repr=False, compare=False)
    deltaf: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("a", "b", "r", "delta"):
            exact = as_fraction(getattr(self, name))
            object.__setattr__(self, name, exact)
            object.__setattr__(self, name + "f", float(exact))

    @property
    def central_radius_factor(self) -> int:
        """Numerator c in the central-tile radius bound c/delta."""
        return 4 if self.variant is Variant.A else 3

    def violations(self) -> list[str]:
        """Invariants of the constants that fail, as readable inequalities."""
        a, b, r, d = self.a, self.b, self.r, self.delta
        out = check_hypotheses(a, b, raise_=False)
        if not 0 < r < 1:
            out.append("0<r<1")
        if not 0 < d < 1:
            out.append("0<delta<1")
        if self.variant is Variant.A:
            conds = {
                "r<=1-b": r <= 1 - b,
                "r<=(a+b)/2-1": r <= (a + b) / 2 - 1,
                "r<=2-a": r <= 2 - a,
                "r<1-a/2": r < 1 - a / 2,
                "delta<=(2-2r-a)/b": d <= (2 - 2 * r - a) / b,
            }
        else:
            conds = {
                "a+3r+2*delta*b<=3": a + 3 * r + 2 * d * b <= 3,
                "b+r<=1": b + r <= 1,
                "a+r<=2": a + r <= 2,
                "a-r+2(b-r)>=3": a - r + 2 * (b - r) >= 3,
                "a-r>=0": a - r >= 0,
                "b-r>=0": b - r >= 0,
            }
        out.extend(k for k, ok in conds.items() if not ok)
        return out

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "a": str(self.a),
            "b": str(self.b),
            "r": str(self.r),
            "delta": str(self.delta),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TemplateConstants":
        variant = Variant(data["variant"])
        if "r" not in data or "delta" not in data:
            return make_template(variant, _parse_number(data["a"]), _parse_number(data["b"]))
        return cls(
            variant,
            _parse_number(data["a"]),
            _parse_number(data["b"]),
            _parse_number(data["r"]),
            _parse_number(data["delta"]),
        )


def _parse_number(value):
    if isinstance(value, str):
        return Fraction(value)
    return as_fraction(value)


def check_hypotheses(a, b, raise_: bool = True) -> list[str]:
    a, b = as_fraction(a), as_fraction(b)
    bad = []
    if not 1 < a < 2:
        bad.append("hypothesis 1<a<2 violated")
    if not 0 < b < 1:
        bad.append("hypothesis 0<b<1 violated")
    if not a + b > 2:
        bad.append("hypothesis a+b>2 violated")
    if bad and raise_:
        raise HypothesisViolated("; ".join(bad))
    return bad


def _below(bound: Fraction) -> Fraction:
    return bound * (1 - STRICT_MARGIN)


def make_template(variant, a, b) -> TemplateConstants:
    """Largest feasible ``r`` and, for that ``r``, the largest ``delta``.

    Strict constraints are met by retreating :data:`STRICT_MARGIN`
    (relative) from the bound.  Arithmetic is exact.
    """
    variant = Variant(variant)
    a, b = as_fraction(a), as_fraction(b)
    check_hypotheses(a, b)
    if variant is Variant.A:
        closed = min(1 - b, (a + b) / 2 - 1, 2 - a)
        strict = 1 - a / 2
    else:
        closed = min(1 - b, 2 - a, (a + 2 * b - 3) / 3, a, b)
        strict = (3 - a) / 3  # delta > 0 in a + 3r + 2*delta*b <= 3
    r = closed if closed < strict else _below(strict)
    r = min(r, _below(Fraction(1)))
    if r <= 0:
        raise Infeasible(f"no positive r for variant {variant.value} with a={a}, b={b}")
    if variant is Variant.A:
        delta = (2 - 2 * r - a) / b
    else:
        delta = (3 - a - 3 * r) / (2 * b)
    if delta <= 0:
        raise Infeasible(f"no positive delta for variant {variant.value} with a={a}, b={b}")
    if delta >= 1:
        delta = _below(Fraction(1))
    return TemplateConstants(variant, a, b, r, delta)


def region_slack(variant, label: int, points: np.ndarray) -> np.ndarray:
    """Minimum over the region's half-planes of ``c - A.p`` for an ``(n, 2)`` array.

    Nonnegative slack means membership in the closed region.
    """
    hp = _HP_ARRAYS[Variant(variant)][int(label)]
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.min(hp[:, 2][None, :] - pts @ hp[:, :2].T, axis=1)


def classify_many(variant, points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`classify_planar`; returns integer labels (5 = outside)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.full(len(pts), int(PlanarRegion.OUTSIDE))
    for lab in range(4, -1, -1):
        labels[region_slack(variant, lab, pts) >= 0] = lab
    return labels


def classify_planar(c: TemplateConstants, p) -> PlanarRegion:
    """Lowest-indexed region containing ``p`` (ties resolve towards U0)."""
    return PlanarRegion(int(classify_many(c.variant, np.asarray(p, dtype=float)[None, :])[0]))


def _contains_exact(variant, label, point) -> bool:
    x, y = point
    return all(ax * x + ay * y <= c for ax, ay, c in HALF_PLANES[variant][label])


def _corners(cx, cy, half):
    return [(cx + sx * half, cy + sy * half) for sx in (1, -1) for sy in (1, -1)]


@dataclass
class ConditionResult:
    name: str
    passed: bool
    witness: tuple | None = None
    detail: str = ""


@dataclass
class TemplateReport:
    constants: TemplateConstants
    conditions: list[ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> ConditionResult:
        for cond in self.conditions:
            if cond.name == name:
                return cond
        raise KeyError(name)


def verify_template(c: TemplateConstants) -> TemplateReport:
    """Exact corner check of the three square-containment conditions.

    Each region is convex, so a square lies in it iff its four corners do.
    For the family of squares centred at ``(a, t)``, ``|t| <= delta*b``, the
    union is a rectangle whose corners are corners of the two extreme squares.
    """
    v, a, b, r, d = c.variant, c.a, c.b, c.r, c.delta
    results = []

    def run(name, tests):
        for corner, label, extra in tests:
            ok = _contains_exact(v, label, corner) and (extra is None or extra(corner))
            if not ok:
                results.append(ConditionResult(name, False, corner, f"corner outside U{label}"))
                return
        results.append(ConditionResult(name, True))

    run("L.a", [(p, 0, None) for p in _corners(0, 0, 1)])
    run("L.b", [(p, 1, lambda q: abs(q[1]) <= 1) for p in _corners(a, b, r)])
    run("L.c", [(p, 0, None) for t in (d * b, -d * b) for p in _corners(a, t, r)])
    return TemplateReport(c, results)


def admissible_grid(n: int = 50):
    """``n*n`` pairs strictly inside ``1<a<2, 0<b<1, a+b>2`` (exact rationals)."""
    out = []
    for i in range(n):
        s = Fraction(2 * i + 1, 2 * n)
        for j in range(n):
            u = Fraction(2 * j + 1, 2 * n)
            out.append((1 + s, 1 - s + s * u))
    return out
