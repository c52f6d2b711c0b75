"""Run configuration: JSON loading, schema checks, object construction.

Configs are plain JSON.  A surface is either a named builtin with
keyword parameters or a single-tip cone chart given by a sympy
expression for sqrt(h) in the metric dx^2 + x^2 h(x, y) dy^2.  Links
are circles given by their circumference.
"""

from __future__ import annotations

import json

from . import surfaces
from .errors import ConfigError
from .links import LinkSpectrum, SummationPolicy

__all__ = [
    "load_config",
    "surface_from_config",
    "link_from_config",
    "policy_from_config",
    "grid_from_config",
]

_BUILTINS = {
    "plane": surfaces.plane,
    "flat_cone": surfaces.flat_cone,
    "sphere_band": surfaces.sphere_band,
    "perturbed_spindle": surfaces.perturbed_spindle,
    "symmetric_spindle": surfaces.symmetric_spindle,
    "teardrop": surfaces.teardrop,
}


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    return cfg


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing key {key!r} in {where}")
    return cfg[key]


def surface_from_config(spec) -> surfaces.Surface:
    if not isinstance(spec, dict):
        raise ConfigError("surface spec must be an object")
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in _BUILTINS:
            raise ConfigError(
                f"unknown builtin surface {name!r}; "
                f"choose from {sorted(_BUILTINS)}"
            )
        params = spec.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("surface params must be an object")
        try:
            return _BUILTINS[name](**params)
        except TypeError as exc:
            raise ConfigError(f"bad params for surface {name!r}: {exc}") from exc
    if "cone_chart" in spec:
        sub = spec["cone_chart"]
        expr = _require(sub, "sqrt_h", "cone_chart surface")
        try:
            return surfaces.cone_chart_surface(
                expr, sub.get("rho", 2 * 3.141592653589793),
                r_max=sub.get("r_max", 10.0))
        except Exception as exc:
            raise ConfigError(f"bad cone_chart surface: {exc}") from exc
    raise ConfigError("surface spec needs 'builtin' or 'cone_chart'")


def link_from_config(spec) -> LinkSpectrum:
    if not isinstance(spec, dict) or "circumference" not in spec:
        raise ConfigError("link spec needs a 'circumference' entry")
    rho = spec["circumference"]
    if not isinstance(rho, (int, float)) or rho <= 0:
        raise ConfigError("link circumference must be a positive number")
    return LinkSpectrum.circle(float(rho))


def policy_from_config(spec) -> SummationPolicy:
    if spec is None:
        return SummationPolicy.closed_form()
    if not isinstance(spec, dict):
        raise ConfigError("policy spec must be an object")
    kind = spec.get("kind", "closed_form")
    try:
        if kind == "closed_form":
            return SummationPolicy.closed_form()
        if kind == "abel":
            return SummationPolicy.abel(
                r=spec.get("r", 1.0 - 1e-4),
                mode_cutoff=spec.get("mode_cutoff", 100_000))
        if kind == "gaussian":
            return SummationPolicy.gaussian(
                sigma=_require(spec, "sigma", "gaussian policy"),
                mode_cutoff=spec.get("mode_cutoff", 100_000))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"bad policy spec: {exc}") from exc
    raise ConfigError(f"unknown policy kind {kind!r}")


def grid_from_config(spec, where: str = "grid"):
    import numpy as np

    if not isinstance(spec, dict):
        raise ConfigError(f"{where} spec must be an object")
    lo = _require(spec, "min", where)
    hi = _require(spec, "max", where)
    count = _require(spec, "count", where)
    if not isinstance(count, int) or count < 2:
        raise ConfigError(f"{where} count must be an integer >= 2")
    if not hi > lo:
        raise ConfigError(f"{where} needs max > min")
    return np.linspace(float(lo), float(hi), count)
