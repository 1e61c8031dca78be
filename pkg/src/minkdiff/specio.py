"""JSON norm and surface specs: parsing, validation and sanity probes."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from . import charts
from .errors import InvalidArgument, MinkdiffError, SpecError
from .norm import FAMILIES, Norm, NormSpec, make_norm
from .rng import SplitMix64

PROBE_RAYS = 100
PROBE_TOL = 1e-9

_NORM_PARAMS = {"euclidean": (), "ellipsoid": ("a", "b", "c"), "l2-l4-blend": ("t",),
                "custom": ("expression",)}
_SURFACE_PARAMS = {"plane": (), "sphere": ("r",), "ellipsoid": ("a", "b", "c"),
                   "torus": ("R", "rho"), "helicoid": ("pitch",), "graph": ("coeffs",),
                   "cylinder": ("r",), "unit-sphere": (), "custom": ("x", "y", "z")}


def load_json(path_or_text):
    """Parse JSON from a file path or a literal string; errors carry line/column."""
    text = path_or_text
    name = "<string>"
    if not str(path_or_text).lstrip().startswith("{"):
        p = Path(path_or_text)
        if not p.exists():
            raise SpecError(f"spec file not found: {p}")
        text, name = p.read_text(), str(p)
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise SpecError(f"{name}: malformed JSON at line {err.lineno}, column {err.colno}: "
                        f"{err.msg}") from err


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"{where}: missing required field {key!r}")
    return obj[key]


def _positive(params, keys, where):
    for k in keys:
        try:
            val = float(params[k])
        except (TypeError, ValueError) as err:
            raise SpecError(f"{where}: params.{k} must be a number") from err
        if not val > 0:
            raise SpecError(f"{where}: params.{k} must be positive")


def parse_norm(obj, seed=0):
    """NormSpec and Norm from a decoded JSON object; probes custom gauges."""
    where = "norm spec"
    family = _require(obj, "family", where)
    if family not in FAMILIES:
        raise SpecError(f"{where}: unknown family {family!r}; expected one of {FAMILIES}")
    params = _require(obj, "params", where)
    if not isinstance(params, dict):
        raise SpecError(f"{where}: params must be an object")
    for k in _NORM_PARAMS[family]:
        _require(params, k, f"{where} params")
    if family == "ellipsoid":
        _positive(params, ("a", "b", "c"), where)
    if family == "l2-l4-blend":
        t = float(params["t"])
        if not 0.0 <= t <= 1.0:
            raise SpecError(f"{where}: params.t must lie in [0, 1]")
    try:
        spec = NormSpec(family, dict(params), obj.get("derivative_mode", "analytic"),
                        float(obj.get("fd_step", 1e-5)))
        norm = make_norm(spec)
    except InvalidArgument as err:
        raise SpecError(f"{where}: {err}") from err
    if family == "custom":
        probe_gauge(norm, seed=seed)
    return spec, norm


def probe_gauge(norm, n_rays=PROBE_RAYS, seed=0, tol=PROBE_TOL):
    """Positivity, symmetry and 1-homogeneity of the gauge on random rays.

    Raises SpecError naming the first witness ray.
    """
    rng = SplitMix64(seed)
    X = rng.unit_vectors(n_rays) * rng.uniform(0.2, 3.0, (n_rays, 1))
    s = rng.uniform(0.1, 10.0, n_rays)
    with np.errstate(all="ignore"):
        g, gm = norm.gauge(X), norm.gauge(-X)
        gs = norm.gauge(s[:, None] * X)
    for i in range(n_rays):
        x = X[i].tolist()
        if not np.isfinite(g[i]) or g[i] <= 0:
            raise SpecError(f"custom gauge not positive at x = {x}")
        if abs(gm[i] - g[i]) > tol * max(1.0, abs(g[i])):
            raise SpecError(f"custom gauge not symmetric: gauge(x) != gauge(-x) at x = {x}")
        if abs(gs[i] - s[i] * g[i]) > tol * max(1.0, abs(gs[i])):
            raise SpecError(f"custom gauge not 1-homogeneous at x = {x}, s = {s[i]:.6g}")


def parse_surface(obj, norm=None):
    """SurfaceChart from a decoded JSON object; probes immersion on a grid."""
    where = "surface spec"
    family = _require(obj, "family", where)
    if family not in _SURFACE_PARAMS:
        raise SpecError(f"{where}: unknown family {family!r}")
    params = obj.get("params", {})
    if _SURFACE_PARAMS[family]:
        params = _require(obj, "params", where)
    for k in _SURFACE_PARAMS[family]:
        _require(params, k, f"{where} params")
    orientation = obj.get("orientation")
    kw = {} if orientation is None else {"orientation": orientation}
    domain = obj.get("domain")
    try:
        if family == "plane":
            chart = charts.plane(**kw)
        elif family == "sphere":
            chart = charts.sphere(float(params["r"]), **kw)
        elif family == "ellipsoid":
            chart = charts.ellipsoid(*(float(params[k]) for k in "abc"), **kw)
        elif family == "torus":
            chart = charts.torus(float(params["R"]), float(params["rho"]), **kw)
        elif family == "helicoid":
            chart = charts.helicoid(float(params["pitch"]), **kw)
        elif family == "graph":
            chart = charts.graph(params["coeffs"], **kw)
        elif family == "cylinder":
            chart = charts.cylinder(float(params.get("r", 1.0)), **kw)
        elif family == "unit-sphere":
            if norm is None:
                raise SpecError(f"{where}: unit-sphere needs a norm")
            chart = charts.unit_sphere(norm, float(params.get("r", 1.0)), **kw)
        else:
            if domain is None:
                raise SpecError(f"{where}: custom surface needs 'domain'")
            chart = charts.from_expressions(params, domain, **kw)
    except SpecError:
        raise
    except (InvalidArgument, ValueError, TypeError) as err:
        raise SpecError(f"{where}: {err}") from err
    if domain is not None:
        try:
            (a, b), (c, d) = domain
            dom = ((float(a), float(b)), (float(c), float(d)))
        except (TypeError, ValueError) as err:
            raise SpecError(f"{where}: domain must be [[u0, u1], [v0, v1]]") from err
        if not (dom[0][0] < dom[0][1] and dom[1][0] < dom[1][1]):
            raise SpecError(f"{where}: empty domain")
        chart = dataclasses.replace(chart, domain=dom)
    probe_immersion(chart)
    return chart


def probe_immersion(chart, n=12):
    U, V = chart.sample_grid(n, n, margin=0.02)
    try:
        with np.errstate(all="ignore"):
            chart.unit_normal(U, V)
    except InvalidArgument as err:
        raise SpecError(f"surface spec: {err}") from err
    except MinkdiffError as err:
        raise SpecError(f"surface spec: chart is not immersed on its domain ({err})") from err


def parse_specs(norm_path=None, surface_path=None, seed=0):
    """(NormSpec, Norm, SurfaceChart) from spec files or inline JSON strings.

    Built-in norm names ('euclidean') are accepted in place of a file.
    """
    spec, norm = (None, None)
    if norm_path is not None:
        if norm_path == "euclidean":
            spec, norm = NormSpec("euclidean"), Norm.euclidean()
        else:
            spec, norm = parse_norm(load_json(norm_path), seed=seed)
    chart = None
    if surface_path is not None:
        chart = parse_surface(load_json(surface_path), norm)
    return spec, norm, chart
