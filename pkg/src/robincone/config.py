"""Declarative run configuration.

Configs are TOML files; every pipeline option lives in one of four tables:

    [domain]      geometry, truncation, alpha (or alpha_sweep)
    [pipeline]    which stages to run (classify / solve / certify / quasimode)
    [numerics]    mesh size, counting margin, modes, certificate sizes
    [output]      directory and formats

CLI flags are sugar that expands into the same structure, so a sweep is
reproducible from its config file alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .expr import compile_profile
from .geometry import ConeSpec, Interval2D, LatitudeCircle, SphericalGraph
from .meshing import DomainSpec, RadialBump, SmoothedVertex


@dataclass
class RunConfig:
    domain: dict
    pipeline: dict
    numerics: dict
    output: dict

    # resolved objects
    cone: ConeSpec = None
    alphas: list = field(default_factory=list)
    truncation_radii: list = field(default_factory=list)
    perturbation: object = None

    @property
    def dimension(self) -> int:
        return self.cone.dimension

    def domain_spec(self, alpha: float, R_T: float) -> DomainSpec:
        return DomainSpec(
            cone=self.cone,
            truncation_radius=R_T,
            alpha=alpha,
            artificial_bc=self.domain.get("artificial_bc", "dirichlet"),
            perturbation=self.perturbation,
        )


def _build_cross_section(dom: dict):
    kind = dom.get("kind")
    samples = int(dom.get("samples", 512))
    if kind in ("latitude", "latitude_circle"):
        return LatitudeCircle(float(dom["theta0"]), samples)
    if kind in ("sector", "interval"):
        return Interval2D(float(dom["theta"]))
    if kind == "quadrant":
        return Interval2D(math.pi / 4.0)
    if kind == "graph":
        rho_text = dom["rho"]
        return SphericalGraph(compile_profile(rho_text), samples, source=rho_text)
    if kind is None and dom.get("nu") == 2 and "theta" in dom:
        return Interval2D(float(dom["theta"]))
    raise ConfigError(f"unknown or incomplete cross-section kind {kind!r}")


def _build_perturbation(dom: dict):
    p = dom.get("perturbation")
    if p is None:
        return None
    kind = p.get("kind")
    if kind in ("smoothed_vertex", "smoothed"):
        return SmoothedVertex(float(p["radius"]))
    if kind in ("radial_bump", "bump"):
        return RadialBump(float(p["amplitude"]), float(p["center"]), float(p["width"]))
    raise ConfigError(f"unknown perturbation kind {kind!r}")


def _sweep_values(spec, what: str) -> list:
    if isinstance(spec, dict):
        lo, hi = float(spec["from"]), float(spec["to"])
        steps = int(spec["steps"])
        if steps < 2:
            raise ConfigError(f"{what} sweep needs at least 2 steps")
        scale = spec.get("scale", "lin")
        if scale == "log":
            if lo <= 0 or hi <= 0:
                raise ConfigError(f"log-scale {what} sweep needs positive bounds")
            return [
                lo * (hi / lo) ** (i / (steps - 1)) for i in range(steps)
            ]
        if scale != "lin":
            raise ConfigError(f"{what} sweep scale must be 'lin' or 'log'")
        return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]
    if isinstance(spec, list):
        if len(spec) < 2:
            raise ConfigError(f"{what} sweep needs at least 2 values")
        return [float(v) for v in spec]
    raise ConfigError(f"malformed {what} sweep")


def parse_config(data: dict) -> RunConfig:
    dom = dict(data.get("domain", {}))
    pipeline = dict(data.get("pipeline", {}))
    numerics = dict(data.get("numerics", {}))
    output = dict(data.get("output", {}))

    if not any(
        pipeline.get(k) for k in ("classify", "solve", "certify", "quasimode")
    ):
        raise ConfigError(
            "at least one pipeline stage (classify/solve/certify/quasimode) "
            "must be enabled"
        )

    cfg = RunConfig(dom, pipeline, numerics, output)
    cfg.cone = ConeSpec(_build_cross_section(dom))
    cfg.perturbation = _build_perturbation(dom)

    if "alpha_sweep" in dom:
        cfg.alphas = _sweep_values(dom["alpha_sweep"], "alpha")
    else:
        cfg.alphas = [float(dom.get("alpha", 1.0))]
    if any(a <= 0 for a in cfg.alphas):
        raise ConfigError("alpha values must be positive")

    if "R_T_sweep" in dom:
        cfg.truncation_radii = _sweep_values(dom["R_T_sweep"], "R_T")
    else:
        cfg.truncation_radii = [float(dom.get("R_T", 10.0))]
    if any(r <= 0 for r in cfg.truncation_radii):
        raise ConfigError("truncation radii must be positive")

    h = numerics.get("h", 0.1)
    if h <= 0:
        raise ConfigError("mesh size h must be positive")
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, "rb") as f:
        data = tomllib.load(f)
    return parse_config(data)
