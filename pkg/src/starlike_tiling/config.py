"""Versioned JSON configuration and the on-disk system cache."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .planar import TemplateConstants, make_template
from .semibeta import SemiBiorthogonalSystem, build_system
from .space import SpaceDescriptor

SCHEMA_VERSION = 1
CACHE_ENV = "STARTILE_CACHE_DIR"

DEFAULT_TOLERANCES = {"geometric": 1e-6, "norm": 1e-8, "solver": 1e-8, "margin": 1e-3}
_TOP_KEYS = {"version", "space", "template", "net", "mode", "projection", "sampling"}


@dataclass
class TilingConfig:
    space: SpaceDescriptor
    template: TemplateConstants
    epsilon: float = 0.2
    seed: int = 0
    trials: int = 10_000
    mode: str = "starlike"
    N: int | None = None
    samples: int = 10_000
    box: float = 10.0
    sample_seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if self.mode not in ("starlike", "projection"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "projection" and not self.N:
            raise ConfigError("projection mode needs N")
        if not 0 < self.epsilon < self.template.deltaf:
            raise ConfigError("net epsilon must lie in (0, delta)")
        if self.samples < 0 or self.box <= 0:
            raise ConfigError("sampling needs count >= 0 and box > 0")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerances {sorted(unknown)}")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}

    def to_dict(self) -> dict:
        out = {
            "version": SCHEMA_VERSION,
            "space": self.space.to_dict(),
            "template": self.template.to_dict(),
            "net": {"epsilon": self.epsilon, "seed": self.seed, "trials": self.trials},
            "mode": self.mode,
            "sampling": {"count": self.samples, "box": self.box, "seed": self.sample_seed,
                         "tolerances": dict(self.tolerances)},
        }
        if self.mode == "projection":
            out["projection"] = {"N": self.N, "side": float(2 * self.template.r)}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "TilingConfig":
        if data.get("version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config version {data.get('version')!r}")
        extra = set(data) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            space = SpaceDescriptor.from_dict(data["space"])
            template = TemplateConstants.from_dict(data["template"])
            net = data.get("net", {})
            sampling = data.get("sampling", {})
            proj = data.get("projection") or {}
            mode = data.get("mode", "starlike")
            if proj and "side" in proj and abs(float(proj["side"]) - 2 * template.rf) > 1e-12:
                raise ConfigError("projection side must equal 2r")
            return cls(
                space, template,
                epsilon=float(net.get("epsilon", 0.2)),
                seed=int(net.get("seed", 0)),
                trials=int(net.get("trials", 10_000)),
                mode=mode,
                N=int(proj["N"]) if "N" in proj else None,
                samples=int(sampling.get("count", 10_000)),
                box=float(sampling.get("box", 10.0)),
                sample_seed=int(sampling.get("seed", 0)),
                tolerances=dict(sampling.get("tolerances", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path) -> "TilingConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def quick(cls, dim: int, p=2, variant="A", a=1.3, b=0.9, **kw) -> "TilingConfig":
        return cls(SpaceDescriptor.lp(dim, p), make_template(variant, a, b), **kw)


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    if root:
        return Path(root)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "starlike_tiling"


def _cache_key(space: SpaceDescriptor, k: int, delta: float, epsilon: float, seed: int, trials: int) -> str:
    blob = json.dumps([space.to_dict(), k, repr(delta), repr(epsilon), seed, trials], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def cached_system(space: SpaceDescriptor, k: int, delta: float, epsilon: float,
                  seed: int, trials: int, use_cache: bool = True) -> SemiBiorthogonalSystem:
    """Build the level-``k`` system, reusing a cached copy when one exists.

    Unwritable cache directories are ignored; the system is then rebuilt
    on every call.
    """
    if not use_cache or space.family == "oracle":
        return build_system(space, k, delta, epsilon, seed, trials)
    path = cache_dir() / f"system-{_cache_key(space, k, delta, epsilon, seed, trials)}.json"
    try:
        return SemiBiorthogonalSystem.from_dict(json.loads(path.read_text()))
    except (OSError, ValueError, KeyError):
        pass
    system = build_system(space, k, delta, epsilon, seed, trials)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(system.to_dict()))
        tmp.replace(path)
    except OSError:
        pass
    return system


def build_tiling(cfg: TilingConfig, use_cache: bool = True):
    """Starlike tiling for ``cfg``, with systems drawn from the cache when possible."""
    from .voronoi import StarlikeTiling, system_seed

    systems = {
        k: cached_system(cfg.space, k, cfg.template.deltaf, cfg.epsilon,
                         system_seed(cfg.seed, k), cfg.trials, use_cache)
        for k in range(1, cfg.space.dim)
    }
    return StarlikeTiling(cfg.space, cfg.template, systems, cfg.epsilon)
