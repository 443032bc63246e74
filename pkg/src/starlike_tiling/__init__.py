"""Starlike normal tilings of finite-dimensional normed spaces.

Build a tiling with :meth:`StarlikeTiling.build` (or from a config with
:func:`build_tiling`), locate points with ``locate_full`` and certify the
construction with :func:`run_suite`.
"""

__version__ = "0.1.0"

from .constants import DerivedConstants, compute_K_bound, k_projection_bound
from .config import TilingConfig, build_tiling
from .cylinder import CylinderAxis, CylinderTileId, CylinderTiling
from .errors import (ConfigError, ConstructionFailed, DimensionExhausted, EmptyNet, EmptySystem,
                     HypothesisViolated, Infeasible, InvalidTile, IterationCapExceeded,
                     OutOfHorizon, SamplingFailed, TilingError, ZeroVector)
from .planar import (PlanarRegion, TemplateConstants, Variant, classify_planar, make_template,
                     verify_template)
from .projection import ProjectionConfig, ProjectionTiling, lattice_tiling_locate, locate_projection
from .quotient import QuotientCenter, QuotientTileId, QuotientTiling
from .semibeta import SemiBiorthogonalSystem, SphereNet, build_system, frame_bound, greedy_system, sphere_net
from .space import SpaceDescriptor, norm_eval, norming_functional, quotient_norm
from .verify import VerificationReport, run_suite
from .voronoi import FullTileId, SeparatedNet, StarlikeTiling, build_separated_net

__all__ = [name for name in dir() if not name.startswith("_")]
