"""Command-line front end.

Every command parses its inputs, calls one library routine and serializes the
result. Exit codes: 0 all checks pass, 2 a check failed, 3 numeric failure,
4 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, geodesy, surface, variation, width
from .errors import InvalidArgument, MinkdiffError
from .norm import admissibility_scan
from .specio import parse_specs

EXIT_OK, EXIT_CHECK, EXIT_NUMERIC, EXIT_INPUT = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    norm: str | None = None
    surface: str | None = None
    options: dict = field(default_factory=dict)
    tol: float | None = None
    seed: int = 0
    out: str | None = None
    format: str | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise InvalidArgument("--tol must be positive")


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict
    passed: bool | None = None
    table: dict | None = None
    version: str = __version__

    def exit_code(self):
        return EXIT_CHECK if self.passed is False else EXIT_OK

    def to_json(self):
        body = {"command": self.command, "version": self.version, "inputs": self.inputs,
                **self.results}
        if self.passed is not None:
            body["pass"] = self.passed
        return json.dumps(_plain(body), indent=2, sort_keys=False) + "\n"

    def to_csv(self):
        if self.table is None:
            raise InvalidArgument(f"command {self.command!r} has no tabular output")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = list(self.table)
        w.writerow(cols)
        for row in zip(*(np.asarray(self.table[c]) for c in cols)):
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()


def _fmt(x):
    x = x.item() if hasattr(x, "item") else x
    return repr(float(x)) if isinstance(x, float) else str(x)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _pair(text, what):
    try:
        a, b = (float(s) for s in text.split(","))
    except ValueError as err:
        raise InvalidArgument(f"{what} must be 'u,v'") from err
    return np.array([a, b])


def _samples(text):
    try:
        n, m = (int(s) for s in text.lower().split("x"))
    except ValueError as err:
        raise InvalidArgument("--samples must be NxM") from err
    if n < 1 or m < 1:
        raise InvalidArgument("--samples must be positive")
    return n, m


def _need(cfg, *names):
    for n in names:
        if getattr(cfg, n) is None:
            raise InvalidArgument(f"--{n} is required for {cfg.command}")


# ---------------------------------------------------------------------------
# commands


def cmd_norm_check(cfg):
    _need(cfg, "norm")
    spec, norm, _ = parse_specs(cfg.norm, seed=cfg.seed)
    kw = {"grid_resolution": cfg.options["grid"]}
    if cfg.tol is not None:
        kw["threshold"] = cfg.tol
    rep = admissibility_scan(norm, **kw)
    res = {"m": rep.m, "m_bar": rep.m_bar, "admissible": rep.admissible,
           "min_location": rep.min_location, "max_location": rep.max_location,
           "grid_size": rep.grid_size}
    return Report(cfg.command, {"norm": spec.family, "params": spec.params}, res, rep.admissible)


def cmd_surface_curvature(cfg):
    _need(cfg, "norm", "surface")
    _, norm, chart = parse_specs(cfg.norm, cfg.surface, seed=cfg.seed)
    n, m = _samples(cfg.options["samples"])
    tab = surface.curvature_table(chart, norm, n, m)
    agree = bool(np.all(tab["sign_agree"] == 1))
    res = {"samples": n * m, "K_range": [float(tab["K"].min()), float(tab["K"].max())],
           "H_range": [float(tab["H"].min()), float(tab["H"].max())],
           "sign_agreement": agree, "rows": [dict(zip(tab, r)) for r in zip(*tab.values())]}
    return Report(cfg.command, {"chart": chart.family, "samples": [n, m]}, res, agree, tab)


def cmd_surface_minimal(cfg):
    _need(cfg, "norm", "surface")
    _, norm, chart = parse_specs(cfg.norm, cfg.surface, seed=cfg.seed)
    n, m = _samples(cfg.options["samples"])
    res = variation.minimal_scan(chart, norm, n, m)
    tol = cfg.tol if cfg.tol is not None else 1e-6
    res["minimal"] = res["max_abs_H"] <= tol
    return Report(cfg.command, {"chart": chart.family, "samples": [n, m], "tol": tol}, res,
                  res["minimal"])


def cmd_surface_variation(cfg):
    _need(cfg, "norm", "surface")
    _, norm, chart = parse_specs(cfg.norm, cfg.surface, seed=cfg.seed)
    g = variation.expression(cfg.options["g"])
    res = variation.variation_check(chart, norm, g, cfg.options.get("tstep"))
    tol = cfg.tol if cfg.tol is not None else 1e-4
    return Report(cfg.command, {"chart": chart.family, "g": cfg.options["g"], "tol": tol}, res,
                  res["rel_gap"] <= tol)


def cmd_geodesic(cfg):
    _need(cfg, "norm", "surface")
    _, norm, chart = parse_specs(cfg.norm, cfg.surface, seed=cfg.seed)
    p, q = _pair(cfg.options["from"], "--from"), _pair(cfg.options["to"], "--to")
    r = geodesy.distance(chart, norm, p, q, resolution=cfg.options["res"])
    pts = r.path.points
    res = {"length": r.d, "gap": r.certified_gap, "graph_bound": r.graph_bound,
           "d_euclidean": r.d_euclidean, "path": pts}
    tab = {"x": pts[:, 0], "y": pts[:, 1], "z": pts[:, 2]}
    return Report(cfg.command, {"chart": chart.family, "from": p, "to": q,
                                "res": cfg.options["res"]}, res, None, tab)


def cmd_diameter(cfg):
    _need(cfg, "norm", "surface")
    _, norm, chart = parse_specs(cfg.norm, cfg.surface, seed=cfg.seed)
    r = geodesy.diameter(chart, norm, n_samples=cfg.options["samples"],
                         resolution=cfg.options["res"], seed=cfg.seed)
    res = {"diameter": r["diameter"], "graph_diameter": r["graph_diameter"],
           "witness": r["witness"], "lower_bound": r["lower_bound"]}
    return Report(cfg.command, {"chart": chart.family, "res": cfg.options["res"],
                                "samples": cfg.options["samples"], "seed": cfg.seed}, res)


def cmd_perimeter(cfg):
    _need(cfg, "norm")
    spec, norm, _ = parse_specs(cfg.norm, seed=cfg.seed)
    r = geodesy.perimeter(norm, resolution=cfg.options["res"], n_samples=cfg.options["samples"])
    return Report(cfg.command, {"norm": spec.family, "params": spec.params,
                                "res": cfg.options["res"], "samples": cfg.options["samples"]},
                  {k: r[k] for k in ("rho", "bound", "girth", "m", "inradius")}, r["pass"])


def cmd_width_verify(cfg):
    _need(cfg, "norm")
    spec, norm, _ = parse_specs(cfg.norm, seed=cfg.seed)
    body = width.make_width_body(norm, cfg.options["width"], cfg.options["epsilon"])
    res = width.verify_body(body, grid=cfg.options["grid"])
    tol = cfg.tol if cfg.tol is not None else 1e-8
    ok = (res["width_deviation_max"] <= tol and res["identity_residual_max"] <= 1e-4
          and res["convex"] and res["all_paired"])
    return Report(cfg.command, {"norm": spec.family, "params": spec.params,
                                "width": cfg.options["width"],
                                "epsilon": cfg.options["epsilon"], "grid": cfg.options["grid"]},
                  res, ok)


def cmd_acceptance(cfg):
    from .acceptance import CRITERIA, run_acceptance

    suite = cfg.options["suite"]
    if suite == "all":
        which = sorted(CRITERIA)
    else:
        try:
            which = [int(s) for s in suite.split(",")]
        except ValueError as err:
            raise InvalidArgument("--suite must be 'all' or a comma list of numbers") from err
        if any(k not in CRITERIA for k in which):
            raise InvalidArgument(f"criteria are numbered 1..{len(CRITERIA)}")
    results = run_acceptance(which)
    rows = [{"criterion": r.number, "name": r.name, "pass": r.passed, "details": r.details}
            for r in results]
    tab = {"criterion": [r.number for r in results], "name": [r.name for r in results],
           "pass": [r.passed for r in results]}
    for r in results:
        print(r.line(), file=sys.stderr)
    return Report(cfg.command, {"suite": suite}, {"criteria": rows},
                  all(r.passed for r in results), tab)


COMMANDS = {"norm check": cmd_norm_check, "surface curvature": cmd_surface_curvature,
            "surface minimal-check": cmd_surface_minimal,
            "surface variation": cmd_surface_variation, "geodesic": cmd_geodesic,
            "diameter": cmd_diameter, "perimeter": cmd_perimeter,
            "width verify": cmd_width_verify, "acceptance": cmd_acceptance}
TABLE_DEFAULT = {"surface curvature"}


# ---------------------------------------------------------------------------
# argument parsing


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS)
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    return p


def _specs(p, surface=True):
    p.add_argument("--norm", help="norm spec JSON file, inline JSON, or 'euclidean'")
    if surface:
        p.add_argument("--surface", help="surface spec JSON file or inline JSON")


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="minkdiff", parents=[common],
                                     description="Surfaces in normed 3-spaces.")
    parser.add_argument("--version", action="version", version=f"minkdiff {__version__}")
    sub = parser.add_subparsers(dest="group", required=True)

    g = sub.add_parser("norm").add_subparsers(dest="action", required=True)
    p = g.add_parser("check", parents=[common])
    _specs(p, surface=False)
    p.add_argument("--grid", type=int, default=16, help="directions per octant edge")

    g = sub.add_parser("surface").add_subparsers(dest="action", required=True)
    for name in ("curvature", "minimal-check"):
        p = g.add_parser(name, parents=[common])
        _specs(p)
        p.add_argument("--samples", default="17x17")
    p = g.add_parser("variation", parents=[common])
    _specs(p)
    p.add_argument("--g", required=True, help="sympy expression in u, v")
    p.add_argument("--tstep", type=float, default=None)

    p = sub.add_parser("geodesic", parents=[common])
    _specs(p)
    p.add_argument("--from", required=True, dest="from_")
    p.add_argument("--to", required=True)
    p.add_argument("--res", type=int, default=64)

    p = sub.add_parser("diameter", parents=[common])
    _specs(p)
    p.add_argument("--res", type=int, default=48)
    p.add_argument("--samples", type=int, default=16)

    p = sub.add_parser("perimeter", parents=[common])
    _specs(p, surface=False)
    p.add_argument("--res", type=int, default=48)
    p.add_argument("--samples", type=int, default=24)

    g = sub.add_parser("width").add_subparsers(dest="action", required=True)
    p = g.add_parser("verify", parents=[common])
    _specs(p, surface=False)
    p.add_argument("--width", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=2000)

    p = sub.add_parser("acceptance", parents=[common])
    p.add_argument("--suite", default="all")
    return parser


def config_from_args(ns):
    d = vars(ns).copy()
    command = d.pop("group") + (f" {d.pop('action')}" if "action" in d else "")
    if "from_" in d:
        d["from"] = d.pop("from_")
    kw = {k: d.pop(k) for k in ("norm", "surface", "tol", "seed", "out", "format") if k in d}
    return RunConfig(command, options=d, **kw)


def run(cfg):
    """Report for a RunConfig; library errors propagate."""
    return COMMANDS[cfg.command](cfg)


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INPUT if err.code not in (0, None) else EXIT_OK
    try:
        cfg = config_from_args(ns)
        report = run(cfg)
        fmt = cfg.format or ("csv" if cfg.command in TABLE_DEFAULT else "json")
        text = report.to_csv() if fmt == "csv" else report.to_json()
    except MinkdiffError as err:
        print(f"minkdiff: error: {err}", file=sys.stderr)
        return err.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"minkdiff: numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
