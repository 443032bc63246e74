"""Radii and normality bounds derived from the template constants."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .planar import TemplateConstants, Variant, as_fraction


@dataclass(frozen=True)
class DerivedConstants:
    R: Fraction | float  # outer radius of the cylinder tubes
    Rprime: Fraction | float  # outer radius of the final tiles
    Kbound: Fraction | float  # Rprime / r
    delta_eff: Fraction | float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def compute_K_bound(c: TemplateConstants, delta_eff=None) -> DerivedConstants:
    """``R = a + 2b + 2C/delta`` with ``C = 4`` (variant A) or ``3`` (variant B).

    Exact when ``delta_eff`` is rational (floats are read as decimals);
    ``Kbound * r == R + 2r`` holds identically.
    """
    d = c.delta if delta_eff is None else as_fraction(delta_eff)
    if d <= 0:
        raise ValueError("effective delta must be positive")
    twice_c = 8 if c.variant is Variant.A else 6
    R = c.a + 2 * c.b + Fraction(twice_c) / d
    Rp = R + 2 * c.r
    return DerivedConstants(R, Rp, Rp / c.r, d)


def k_projection_bound(R_N, t_N, R, r) -> float:
    """Normality bound ``(R_N / r) * (R * (1 + R_N) + t_N)`` for projection slicing."""
    return R_N / r * (R * (1 + R_N) + t_N)
