"""The ten acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult` with the
measured quantities in ``details``. Thresholds are the ones stated for each
criterion; nothing is tuned after the fact.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.stats import spearmanr

from . import charts, geodesy, surface, variation, width
from .norm import Norm, admissibility_scan, equivalence_constant, fibonacci_sphere
from .rng import SplitMix64


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.name} ({self.seconds:.1f}s)"


def builtin_norms():
    """Admissible built-in norms exercised by the suite."""
    return {"euclidean": Norm.euclidean(), "ellipsoid(2,1,1)": Norm.ellipsoid(2, 1, 1),
            "blend(0.3)": Norm.blend(0.3), "blend(0.6)": Norm.blend(0.6)}


def builtin_charts():
    return {"sphere": charts.sphere(1.0), "ellipsoid": charts.ellipsoid(1.5, 1.0, 0.7),
            "torus": charts.torus(2.0, 0.5), "helicoid": charts.helicoid(1.0),
            "saddle": charts.graph({"20": 1.0, "02": -2.0}),
            "bowl": charts.graph({"20": 1.0, "02": 0.5}),
            "cylinder": charts.cylinder(1.0), "plane": charts.plane()}


def _margin(chart):
    return 0.02 if chart.direction_map is not None else 0.0


def _rel(a, b, floor=1e-300):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), floor)))


# ---------------------------------------------------------------------------
# 1. Euclidean regression

def _sphere_oracle(r, U, V):
    n = charts.sphere_param(U, V)[0]
    s = np.sin(U)
    G = np.zeros(U.shape + (2, 2))
    G[..., 0, 0], G[..., 1, 1] = r**2, r**2 * s**2
    II = -G / r
    return {"xi": n, "deta": np.broadcast_to(np.eye(2) / r, U.shape + (2, 2)),
            "K": np.full(U.shape, 1 / r**2), "H": np.full(U.shape, 1 / r), "h": II,
            "G": G}


def _torus_oracle(R, rho, U, V):
    w = R + rho * np.cos(V)
    xi = np.stack([np.cos(V) * np.cos(U), np.cos(V) * np.sin(U), np.sin(V)], -1)
    k1, k2 = np.cos(V) / w, np.full(U.shape, 1 / rho)
    D = np.zeros(U.shape + (2, 2))
    D[..., 0, 0], D[..., 1, 1] = k1, k2
    G = np.zeros(U.shape + (2, 2))
    G[..., 0, 0], G[..., 1, 1] = w**2, rho**2
    II = np.zeros(U.shape + (2, 2))
    II[..., 0, 0], II[..., 1, 1] = -w * np.cos(V), -rho
    return {"xi": xi, "deta": D, "K": k1 * k2, "H": 0.5 * (k1 + k2), "h": II, "G": G}


def _helicoid_oracle(c, U, V):
    s = np.sqrt(c**2 + V**2)
    xi = np.stack([-c * np.sin(U), c * np.cos(U), -V], -1) / s[..., None]
    G = np.zeros(U.shape + (2, 2))
    G[..., 0, 0], G[..., 1, 1] = s**2, 1.0
    II = np.zeros(U.shape + (2, 2))
    II[..., 0, 1] = II[..., 1, 0] = c / s
    D = -np.linalg.solve(G, II)
    return {"xi": xi, "deta": D, "K": -c**2 / s**4, "H": np.zeros(U.shape), "h": II, "G": G}


def criterion_1():
    E = Norm.euclidean()
    errs = {}
    cases = {"sphere": (charts.sphere(1.3), lambda U, V: _sphere_oracle(1.3, U, V)),
             "torus": (charts.torus(2.0, 0.5), lambda U, V: _torus_oracle(2.0, 0.5, U, V)),
             "helicoid": (charts.helicoid(1.0), lambda U, V: _helicoid_oracle(1.0, U, V))}
    for name, (ch, oracle) in cases.items():
        U, V = ch.sample_grid(9, 9, margin=_margin(ch))
        rep = surface.curvature_field(ch, E, U, V)
        o = oracle(U, V)
        scale = ch.scale
        e = {"eta": float(np.max(np.abs(rep.eta - o["xi"]))),
             "deta": float(np.max(np.abs(rep.deta - o["deta"]))) * scale,
             "K": float(np.max(np.abs(rep.K - o["K"]))) * scale**2,
             "H": float(np.max(np.abs(rep.H - o["H"]))) * scale,
             "h": float(np.max(np.abs(rep.h - o["h"]))) / scale,
             "dupin": float(np.max(np.abs(rep.dupin - o["G"]))) / scale**2,
             "weighted_dupin": float(np.max(np.abs(rep.weighted_dupin - o["G"]))) / scale**2}
        errs[name] = e
    ch = charts.plane()
    rep = surface.curvature_field(ch, E, *ch.sample_grid(5, 5))
    errs["plane"] = {"K": float(np.max(np.abs(rep.K))), "H": float(np.max(np.abs(rep.H))),
                     "h": float(np.max(np.abs(rep.h))),
                     "eta": float(np.max(np.abs(rep.eta - [0, 0, 1])))}
    # areas
    areas = {
        "sphere": (variation.area(variation.DomainPatch(charts.sphere(1.3), ((0, np.pi), (0, 2 * np.pi))), E),
                   4 * np.pi * 1.3**2),
        "torus": (variation.area(variation.DomainPatch(charts.torus(2.0, 0.5),
                                                       ((0, 2 * np.pi), (0, 2 * np.pi))), E),
                  4 * np.pi**2 * 2.0 * 0.5),
        "helicoid": (variation.area(variation.DomainPatch(charts.helicoid(1.0),
                                                          ((-np.pi, np.pi), (-2, 2)), order=40), E),
                     2 * np.pi * (2 * np.sqrt(5) + np.arcsinh(2.0))),
        "plane": (variation.area(variation.DomainPatch(charts.plane(), ((0, 1), (0, 1))), E), 1.0),
    }
    errs["area"] = {k: abs(a - b) / b for k, (a, b) in areas.items()}
    # b-Laplacian of the position: -2 H xi for the Euclidean norm
    lap = {}
    for name, (ch, oracle) in cases.items():
        pts = np.stack(ch.sample_grid(3, 3, margin=0.1), -1).reshape(-1, 2)
        L = variation.position_laplacian(ch, E, pts)
        o = oracle(pts[:, 0], pts[:, 1])
        lap[name] = float(np.max(np.abs(L + 2 * o["H"][:, None] * o["xi"]))) * ch.scale
    errs["laplacian"] = lap
    # geodesic distances with closed forms
    geo = {}
    s = charts.sphere(1.0)
    a, b = np.array([1.0, 0.2]), np.array([2.5, 2.0])
    na, nb = charts.sphere_param(*a)[0], charts.sphere_param(*b)[0]
    d = geodesy.distance(s, E, a, b, resolution=48, segments=1024).d
    geo["sphere"] = abs(d - np.arccos(na @ nb)) / np.arccos(na @ nb)
    pl = charts.plane()
    d = geodesy.distance(pl, E, np.array([-0.8, -0.5]), np.array([0.7, 0.6]), resolution=33).d
    geo["plane"] = abs(d - np.hypot(1.5, 1.1)) / np.hypot(1.5, 1.1)
    hel = charts.helicoid(1.0)
    d = geodesy.distance(hel, E, np.array([0.3, -1.0]), np.array([0.3, 1.5]), resolution=40).d
    geo["helicoid_ruling"] = abs(d - 2.5) / 2.5
    errs["geodesic"] = geo
    flat = [v for grp in errs.values() for v in grp.values()]
    worst = float(max(flat))
    return CriterionResult(1, "Euclidean regression", worst <= 1e-6,
                           {"max_error": worst, "errors": errs})


# ---------------------------------------------------------------------------
# 2. unit sphere self-curvature

def _random_sphere_params(rng, n):
    out = []
    while len(out) < n:
        d = rng.unit_vectors(1)[0]
        if abs(d[2]) < 0.98:
            t, p = charts.direction_to_spherical(d)
            out.append((float(t), float(p)))
    return np.array(out)


def criterion_2(seed=2):
    rng = SplitMix64(seed)
    res = {}
    for name, N in builtin_norms().items():
        ch = charts.unit_sphere(N)
        P = _random_sphere_params(rng, 200)
        rep = surface.curvature_field(ch, N, P[:, 0], P[:, 1])
        res[name] = {"K": float(np.max(np.abs(rep.K - 1))), "H": float(np.max(np.abs(rep.H - 1)))}
    worst = max(max(v.values()) for v in res.values())
    return CriterionResult(2, "unit-sphere self-curvature", worst <= 1e-5,
                           {"max_error": worst, "per_norm": res})


# ---------------------------------------------------------------------------
# 3. curvature sandwich

def criterion_3():
    out, worst_ineq, worst_id = {}, 0.0, 0.0
    for nname, N in builtin_norms().items():
        adm = admissibility_scan(N)
        chs = dict(builtin_charts())
        chs["unit-sphere"] = charts.unit_sphere(N)
        for cname, ch in chs.items():
            U, V = ch.sample_grid(17, 17, margin=_margin(ch))
            rep = surface.curvature_field(ch, N, U.ravel(), V.ravel())
            K, Ke = rep.K, rep.Ke
            lo = np.minimum(adm.m * K, adm.m_bar * K)
            hi = np.maximum(adm.m * K, adm.m_bar * K)
            slack = 1e-9 * (np.abs(Ke) + adm.m_bar * np.abs(K)) + 1e-14 / ch.scale**2
            viol = np.maximum(lo - Ke, Ke - hi)
            v = float(np.max(viol / slack))
            floor = 1e-12 / ch.scale**2
            ident = float(np.max(np.abs(Ke - rep.sphere_curvature * K)
                                 / np.maximum(np.abs(Ke), floor)))
            out[f"{nname}/{cname}"] = {"ineq_violation_over_slack": v, "identity_rel": ident}
            worst_ineq, worst_id = max(worst_ineq, v), max(worst_id, ident)
    ok = worst_ineq <= 1.0 and worst_id <= 1e-6
    return CriterionResult(3, "curvature sandwich", ok,
                           {"worst_inequality": worst_ineq, "worst_identity": worst_id,
                            "pairs": out})


# ---------------------------------------------------------------------------
# 4. first variation

def _variation_case(rng, k):
    norms = list(builtin_norms().values())
    N = norms[k % len(norms)]
    pool = [charts.sphere(1.0), charts.ellipsoid(1.5, 1.0, 0.7), charts.torus(2.0, 0.5),
            charts.helicoid(1.0), charts.graph({"20": 1.0, "02": -2.0, "11": 0.3}),
            charts.unit_sphere(N)]
    ch = pool[rng.integers(0, len(pool))]
    (u0, u1), (v0, v1) = ch.domain
    if ch.direction_map is not None:
        u0, u1 = 0.3, np.pi - 0.3
    du, dv = u1 - u0, v1 - v0
    wu, wv = rng.uniform(0.25, 0.6) * du, rng.uniform(0.25, 0.6) * dv
    a, c = u0 + rng.uniform(0, du - wu), v0 + rng.uniform(0, dv - wv)
    rect = ((a, a + wu), (c, c + wv))
    kind = rng.integers(0, 3)
    if kind == 0:
        g = variation.constant(rng.uniform(0.5, 2.0))
    elif kind == 1:
        g = variation.bump((a + wu / 2, c + wv / 2), (wu / 2, wv / 2), rng.uniform(0.5, 2.0))
    else:
        g = variation.polynomial({"00": 1.0, "10": rng.uniform(-1, 1), "01": rng.uniform(-1, 1),
                                  "11": rng.uniform(-0.5, 0.5)})
    return ch, N, variation.DomainPatch(ch, rect, order=24), g


def criterion_4(seed=4, n_cases=20):
    rng = SplitMix64(seed)
    rows, worst = [], 0.0
    for k in range(n_cases):
        ch, N, patch, g = _variation_case(rng, k)
        num = variation.first_variation_numeric(patch, N, variation.VariationSpec(g))
        form = variation.first_variation_formula(patch, N, g)
        A = variation.area(patch, N)
        tol = 1e-4 * max(abs(num), A / ch.scale)
        r = abs(num - form) / tol
        worst = max(worst, r)
        rows.append({"chart": ch.family, "norm": repr(N), "numeric": num, "formula": form,
                     "ratio_to_tol": r})
    E = Norm.euclidean()
    hel = charts.helicoid(1.0)
    patch = variation.DomainPatch(hel, ((-2.0, 1.5), (-1.5, 1.8)), order=24)
    g = variation.bump((0.0, 0.0), (1.5, 1.2), 1.0)
    A = variation.area(patch, E)
    hz_num = variation.first_variation_numeric(patch, E, variation.VariationSpec(g))
    hz_form = variation.first_variation_formula(patch, E, g)
    zero_ok = abs(hz_form) <= 1e-12 * A and abs(hz_num) <= 1e-4 * A
    return CriterionResult(4, "first variation", worst <= 1.0 and zero_ok,
                           {"worst_ratio_to_tol": worst, "cases": rows,
                            "helicoid_numeric": hz_num, "helicoid_formula": hz_form})


# ---------------------------------------------------------------------------
# 5. minimality equivalences

def _residual_fn(ch, N, u, which):
    def f(v):
        r = variation.minimal_residuals(ch, N, np.array([u, v]))
        return {"H": r.H, "r_H": r.r_H, "r_affine": r.r_affine, "r_conf": r.r_conf}[which]
    return f


def criterion_5(n_grid=41):
    out = {}
    ok = True
    for nname, N in (("blend(0.3)", Norm.blend(0.3)), ("ellipsoid(2,1,1)", Norm.ellipsoid(2, 1, 1))):
        ch = charts.graph({"20": 1.0, "02": -2.0})
        uu = np.linspace(-1, 1, n_grid)
        cell = uu[1] - uu[0]
        U, V = np.meshgrid(uu, uu, indexing="ij")
        rep = surface.curvature_field(ch, N, U, V)
        if np.any(rep.K >= 0):
            return CriterionResult(5, "minimality equivalences", False, {"error": "K >= 0"})
        zH, z2, z3, worst = [], [], [], 0.0
        for i, u in enumerate(uu):
            H = rep.H[i]
            for j in np.flatnonzero(np.sign(H[:-1]) != np.sign(H[1:])):
                a, b = uu[j], uu[j + 1]
                vH = brentq(_residual_fn(ch, N, u, "H"), a, b, xtol=1e-14)
                r = variation.minimal_residuals(ch, N, np.array([u, vH]))
                worst = max(worst, r.r_affine, r.r_conf)
                mins = []
                for key in ("r_affine", "r_conf"):
                    m = minimize_scalar(_residual_fn(ch, N, u, key), bounds=(a - cell, b + cell),
                                        method="bounded", options={"xatol": 1e-13})
                    rr = variation.minimal_residuals(ch, N, np.array([u, m.x]))
                    others = [rr.r_H, rr.r_conf] if key == "r_affine" else [rr.r_H, rr.r_affine]
                    worst = max(worst, *others)
                    mins.append(m.x)
                zH.append(vH)
                z2.append(mins[0])
                z3.append(mins[1])
        zH, z2, z3 = map(np.array, (zH, z2, z3))
        cells = float(max(np.max(np.abs(zH - z2)), np.max(np.abs(zH - z3)))) / cell
        rho2 = float(spearmanr(zH, z2).statistic)
        rho3 = float(spearmanr(zH, z3).statistic)
        away = np.abs(rep.H) > 0.1
        rp = np.array([[variation.minimal_residuals(ch, N, np.array([U[i, j], V[i, j]]),
                                                    report=rep[i, j]).r_affine
                        for j in range(0, n_grid, 4)] for i in range(0, n_grid, 4)])
        floor = float(np.min(rp[away[::4, ::4]]))
        good = len(zH) > 0 and cells <= 1.0 and min(rho2, rho3) >= 0.99 and worst <= 1e-5 \
            and floor > 1e-3
        ok = ok and good
        out[nname] = {"zero_crossings": len(zH), "max_offset_cells": cells,
                      "spearman": [rho2, rho3], "max_residual_at_zeros": worst,
                      "min_r_affine_where_H_large": floor, "pass": good}
    return CriterionResult(5, "minimality equivalences", ok, out)


# ---------------------------------------------------------------------------
# 6. b-Laplacian

def criterion_6():
    E = Norm.euclidean()
    hel = charts.helicoid(1.0)
    pts = np.stack(hel.sample_grid(5, 5, margin=0.05), -1).reshape(-1, 2)
    hel_max = float(np.max(np.abs(variation.position_laplacian(hel, E, pts))))
    vec = {}
    info = {}
    for nname, N in builtin_norms().items():
        for cname, ch in (("sphere", charts.sphere(1.0)), ("torus", charts.torus(2.0, 0.5))):
            pts = np.stack(ch.sample_grid(4, 4, margin=0.05), -1).reshape(-1, 2)
            L = variation.position_laplacian(ch, N, pts)
            rep = surface.curvature_field(ch, N, pts[:, 0], pts[:, 1])
            target = -2 * rep.H[:, None] * rep.eta
            rel = float(np.max(np.linalg.norm(L - target, axis=1)
                               / np.linalg.norm(target, axis=1)))
            normal = float(np.max(np.abs(np.sum(L * rep.xi, -1) / rep.eta_xi + 2 * rep.H)
                                  / np.abs(2 * rep.H)))
            entry = {"vector_rel": rel, "eta_component_rel": normal}
            # the vector identity is expected for quadratic norms only
            if N.spec.family in ("euclidean", "ellipsoid"):
                vec[f"{nname}/{cname}"] = entry
            else:
                info[f"{nname}/{cname}"] = entry
    worst = max(v["vector_rel"] for v in vec.values())
    ok = hel_max <= 1e-5 and worst <= 1e-3
    return CriterionResult(6, "b-Laplacian", ok,
                           {"helicoid_max": hel_max, "vector_identity_worst": worst,
                            "quadratic_norms": vec, "non_quadratic_norms": info})


# ---------------------------------------------------------------------------
# 7. sign agreement and null directions

def criterion_7():
    total, disagree = 0, 0
    for N in builtin_norms().values():
        chs = dict(builtin_charts())
        chs["unit-sphere"] = charts.unit_sphere(N)
        for ch in chs.values():
            U, V = ch.sample_grid(17, 17, margin=_margin(ch))
            rep = surface.curvature_field(ch, N, U.ravel(), V.ravel())
            tol = surface.ZERO_CURVATURE / ch.scale**2

            def sgn(x):
                return np.where(np.abs(x) <= tol, 0, np.sign(x))

            disagree += int(np.sum(sgn(rep.K) != sgn(rep.Ke)))
            total += len(rep.K)
    cyl = charts.cylinder(1.0)
    null_res, found = 0.0, True
    for N in builtin_norms().values():
        for p in np.stack(cyl.sample_grid(5, 3), -1).reshape(-1, 2):
            fl = surface.flat_directions(cyl, N, p)
            if len(fl) != 1 or abs(abs(fl[0][0][2]) - 1) > 1e-6:
                found = False
            null_res = max([null_res] + [float(r) for _, r in fl])
    ok = total >= 10_000 and disagree == 0 and found and null_res <= 1e-6
    return CriterionResult(7, "sign agreement", ok,
                           {"points": total, "disagreements": disagree,
                            "cylinder_axis_found": found, "max_dxi_residual": null_res})


# ---------------------------------------------------------------------------
# 8. constant width

def criterion_8():
    bodies = {"euclidean": (Norm.euclidean(), 2.0, 0.05),
              "ellipsoid(2,1,1)": (Norm.ellipsoid(2, 1, 1), 2.0, 0.03),
              "blend(0.3)": (Norm.blend(0.3), 1.5, 0.02)}
    out, ok = {}, True
    for name, (N, c, eps) in bodies.items():
        body = width.make_width_body(N, c, eps)
        d500 = fibonacci_sphere(500)
        dev = float(np.max(np.abs(width.width_in_direction(body, d500) - c)))
        dev2 = float(np.max(np.abs(width.width_from_support_points(body, d500) - c)))
        ident = width.width_curvature_identity(body, fibonacci_sphere(200))
        inv = float(np.max(width.involution_residual(body, fibonacci_sphere(40))))
        r = {"width_deviation": max(dev, dev2),
             "identity_residual": float(np.max(ident["residual"])),
             "identity_symmetric": float(np.max(ident["symmetric_residual"])),
             "antipodal": float(np.max(ident["antipodal_residual"])),
             "opposite_on_boundary": float(np.max(ident["boundary_residual"])),
             "involution": inv}
        good = (r["width_deviation"] <= 1e-8 and r["identity_residual"] <= 1e-4
                and r["identity_symmetric"] <= 1e-4 and r["antipodal"] <= 1e-6
                and r["involution"] <= 1e-6 and r["opposite_on_boundary"] <= 1e-6)
        r["pass"] = good
        ok = ok and good
        out[name] = r
    # scaled unit spheres: 1/lambda(p) + 1/lambda(-p) = 2r
    ball = {}
    for name, N in builtin_norms().items():
        rad = 1.5
        ch = charts.unit_sphere(N, rad)
        P = _random_sphere_params(SplitMix64(8), 50)
        rp = surface.curvature_field(ch, N, P[:, 0], P[:, 1])
        Q = np.stack(charts.direction_to_spherical(-charts.sphere_param(P[:, 0], P[:, 1])[0]), -1)
        rq = surface.curvature_field(ch, N, Q[:, 0], Q[:, 1])
        ball[name] = float(np.max(np.abs(1 / rp.lambda1 + 1 / rq.lambda2 - 2 * rad)) / (2 * rad))
    ok = ok and max(ball.values()) <= 1e-8
    out["scaled_unit_sphere"] = ball
    return CriterionResult(8, "constant width", ok, out)


# ---------------------------------------------------------------------------
# 9. metric and geodesics

def _distinct_triple(rng, n):
    while True:
        t = (rng.integers(0, n), rng.integers(0, n), rng.integers(0, n))
        if len(set(t)) == 3:
            return t


def criterion_9(seed=9, pool_size=12, n_triples=100):
    E = Norm.euclidean()
    sph = charts.sphere(1.0)
    p = np.array([0.7, 0.4])
    q = np.stack(charts.direction_to_spherical(-charts.sphere_param(*p)[0]))
    d_anti = geodesy.distance(sph, E, p, q, resolution=200).d
    anti_err = abs(d_anti - np.pi) / np.pi

    N = Norm.blend(0.3)
    ch = charts.unit_sphere(N)
    rng = SplitMix64(seed)
    pts = rng.unit_vectors(pool_size)
    mesh = geodesy.build_mesh(ch, N, 24)
    mesh_e = geodesy.build_mesh(ch, E, 24)
    D = np.zeros((pool_size, pool_size))
    G = np.zeros_like(D)
    De = np.zeros_like(D)
    for i in range(pool_size):
        for j in range(i + 1, pool_size):
            r = geodesy.distance(ch, N, pts[i], pts[j], mesh=mesh, segments=64)
            D[i, j] = D[j, i] = r.d
            G[i, j] = G[j, i] = r.certified_gap * r.d
            De[i, j] = De[j, i] = geodesy.distance(ch, E, pts[i], pts[j], mesh=mesh_e,
                                                   segments=64).d
    tri_viol = 0
    worst_tri = -np.inf
    for _ in range(n_triples):
        i, j, k = _distinct_triple(rng, pool_size)
        slack = D[i, j] + D[j, k] + 2 * max(G[i, j], G[j, k], G[i, k]) - D[i, k]
        worst_tri = max(worst_tri, -slack)
        tri_viol += int(slack < -1e-12)
    c = equivalence_constant(N)
    iu = np.triu_indices(pool_size, 1)
    d, de = D[iu], De[iu]
    sand_viol = int(np.sum((de / c > d * (1 + 1e-9)) | (d > c * de * (1 + 1e-9))))

    El = Norm.ellipsoid(2, 1, 1)
    loop = geodesy.closed_geodesic(El, [1.0, 0.4, 0.2])
    P = loop["path"].points
    t0 = P[len(P) // 8] - P[0]
    sec = geodesy.section_length(El, P[0], t0)
    loop_err = abs(loop["length"] - sec) / sec
    ok = anti_err <= 5e-3 and tri_viol == 0 and sand_viol == 0 and loop_err <= 5e-3
    return CriterionResult(9, "metric and geodesics", ok,
                           {"antipodal_distance": d_anti, "antipodal_rel_error": anti_err,
                            "triangle_violations": tri_viol, "triples": n_triples,
                            "worst_triangle_excess": float(worst_tri),
                            "sandwich_c": c, "sandwich_pairs": int(len(d)),
                            "sandwich_violations": sand_viol,
                            "loop_length": loop["length"], "section_length": sec,
                            "loop_rel_error": loop_err,
                            "junction_defect": loop["junction_defect"]})


# ---------------------------------------------------------------------------
# 10. bounds

def criterion_10():
    E = Norm.euclidean()
    b = geodesy.bonnet_check(charts.sphere(1.0), E, 1.0)
    bonnet_eq = abs(b["diam_estimate"] - np.pi) / np.pi
    per = geodesy.perimeter(E)
    per_eq = abs(per["rho"] - 2 * np.pi) / (2 * np.pi)
    bound_eq = abs(per["bound"] - 2 * np.pi) / (2 * np.pi)
    rows, all_pass = {}, b["pass"] and per["pass"]
    for name, N in builtin_norms().items():
        adm = admissibility_scan(N)
        pr = geodesy.perimeter(N, admissibility=adm)
        bc = geodesy.bonnet_check(charts.unit_sphere(N), N, 1.0, admissibility=adm)
        rows[name] = {"rho": pr["rho"], "rho_bound": pr["bound"], "girth": pr["girth"],
                      "diam": bc["diam_estimate"], "diam_bound": bc["bound"],
                      "pass": bool(pr["pass"] and bc["pass"])}
        all_pass = all_pass and rows[name]["pass"]
    ok = all_pass and bonnet_eq <= 1e-2 and per_eq <= 1e-2 and bound_eq <= 1e-6
    return CriterionResult(10, "bounds", ok,
                           {"bonnet_sphere": b["diam_estimate"], "bonnet_bound": b["bound"],
                            "bonnet_rel_gap": bonnet_eq, "perimeter_euclidean": per["rho"],
                            "perimeter_rel_gap": per_eq, "norms": rows})


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_criterion(k):
    t = time.perf_counter()
    try:
        res = CRITERIA[k]()
    except Exception as err:  # a crash is a failed criterion, reported as such
        res = CriterionResult(k, CRITERIA[k].__name__, False,
                              {"error": f"{type(err).__name__}: {err}"})
    res.seconds = time.perf_counter() - t
    return res


def run_acceptance(which=None):
    keys = sorted(CRITERIA) if which is None else list(which)
    return [run_criterion(k) for k in keys]
