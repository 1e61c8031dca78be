"""Bodies of constant width in a normed space.

A body is described by its support function
    sigma_K(x) = (c/2) sigma_B(x) + eps * P(x),
with sigma_B the support function of the unit ball and P an odd,
1-homogeneous perturbation. Then sigma_K(n) + sigma_K(-n) = c sigma_B(n) for
every n, which is constant width c by construction. The boundary is
parametrized by its outward normal: n -> grad sigma_K(n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import least_squares

from .charts import direction_to_spherical, sphere_param, spherical_chart
from .errors import EpsilonTooLarge, HypothesisViolated, InvalidArgument, NumericFailure
from .norm import NormSpec, fibonacci_sphere, normalize, tangent_basis
from .surface import curvature_field

DEFAULT_PERTURBATION = "z**3 - 3*z*(x**2 + y**2 + z**2)/5"
UMBILIC_TOL = 1e-4
EPS_RESOLUTION = 1e-3
CONVEXITY_MARGIN = 1e-9
# directions with |n_z| above this are evaluated in the tilted chart
POLAR_CAP = 0.8
# rotation taking the pole e_z of the tilted chart to e_x (x->y->z->x)
_TILT = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class WidthBodySpec:
    norm: NormSpec
    c: float
    perturbation: str = DEFAULT_PERTURBATION
    epsilon: float = 0.0


@dataclass
class OppositePair:
    p: np.ndarray
    q: np.ndarray
    q_direction: np.ndarray
    boundary_residual: float  # |q - grad sigma_K(-xi(p))| / c
    support_residual: float  # <q, -xi(p)> - sigma_K(-xi(p)), over c
    parallel_residual: float  # |xi(q) + xi(p)|
    antipodal_residual: float  # |eta(q) + eta(p)|


@dataclass
class WidthBody:
    spec: WidthBodySpec
    norm: object
    sigma: Callable  # support function of the body
    S: Callable  # outward normal -> boundary point
    DS: Callable
    D2S: Optional[Callable]
    chart: object = None
    tilted_chart: object = field(default=None, repr=False)
    convexity_margin: float = 0.0

    @property
    def c(self):
        return self.spec.c

    @property
    def epsilon(self):
        return self.spec.epsilon


# ---------------------------------------------------------------------------
# symbolic pieces

def _symbols():
    import sympy as sp
    return sp, sp.symbols("x y z", real=True)


def _homogenized(expr):
    """|x| P(x/|x|) for a polynomial P in x, y, z; checks oddness."""
    sp, (x, y, z) = _symbols()
    try:
        P = sp.sympify(expr, locals={"x": x, "y": y, "z": z})
    except (sp.SympifyError, SyntaxError, TypeError) as err:
        raise InvalidArgument(f"cannot parse perturbation: {err}") from err
    if P.free_symbols - {x, y, z}:
        raise InvalidArgument("perturbation may only use x, y, z")
    odd = sp.expand(P + P.subs({x: -x, y: -y, z: -z}, simultaneous=True))
    if odd != 0:
        raise InvalidArgument("perturbation must be odd: P(-n) = -P(n)")
    r = sp.sqrt(x**2 + y**2 + z**2)
    return sp.simplify(r * P.subs({x: x / r, y: y / r, z: z / r}, simultaneous=True))


def _support_expression(norm):
    """Closed-form support function of the unit ball, when one exists."""
    sp, (x, y, z) = _symbols()
    fam, p = norm.spec.family, norm.spec.params
    if fam == "euclidean":
        return sp.sqrt(x**2 + y**2 + z**2)
    if fam == "ellipsoid":
        a, b, c = (sp.nsimplify(float(p[k])) for k in ("a", "b", "c"))
        return sp.sqrt(a**2 * x**2 + b**2 * y**2 + c**2 * z**2)
    return None


def _lambdify_jets(expr):
    """Value, gradient, Hessian and third-derivative tensor of expr."""
    sp, vs = _symbols()
    g = [sp.diff(expr, v) for v in vs]
    H = [[sp.diff(gi, v) for v in vs] for gi in g]
    T = [[[sp.diff(Hij, v) for v in vs] for Hij in row] for row in H]
    f0 = sp.lambdify(vs, expr, "numpy")
    f1 = sp.lambdify(vs, g, "numpy")
    f2 = sp.lambdify(vs, H, "numpy")
    f3 = sp.lambdify(vs, T, "numpy")

    def ev(fn, X, rank):
        X = np.asarray(X, dtype=float)
        raw = fn(X[..., 0], X[..., 1], X[..., 2])
        shp = X.shape[:-1]
        out = np.empty(shp + (3,) * rank)
        for idx in np.ndindex(*((3,) * rank)):
            v = raw
            for i in idx:
                v = v[i]
            out[(Ellipsis,) + idx] = np.broadcast_to(np.asarray(v, float), shp)
        return out

    return (lambda X: ev(f0, X, 0), lambda X: ev(f1, X, 1),
            lambda X: ev(f2, X, 2), lambda X: ev(f3, X, 3))


# ---------------------------------------------------------------------------
# construction

def _body_maps(norm, c, epsilon, perturbation):
    sp, _ = _symbols()
    Pt = _homogenized(perturbation)
    sb = _support_expression(norm)
    if sb is not None:
        sig, grad, hess, third = _lambdify_jets(sp.Rational(1, 2) * sp.nsimplify(c) * sb
                                                + sp.nsimplify(epsilon) * Pt)

        def D2S(n, a, b):
            return np.einsum("...ijk,...j,...k->...i", third(n), a, b)

        return sig, grad, hess, D2S
    p0, p1, p2, _ = _lambdify_jets(Pt)
    half = 0.5 * c

    def sig(n):
        return half * norm.support_function(n) + epsilon * p0(n)

    def S(n):
        q, _, _ = norm.support_points(n, tol=norm.geometry_tol)
        return half * q + epsilon * p1(n)

    def DS(n):
        nn = normalize(n)
        q, _, _ = norm.support_points(nn, tol=norm.geometry_tol)
        W, E = norm.sphere_shape(q, nn)
        du = np.einsum("...ia,...ab,...jb->...ij", E, np.linalg.inv(W), E)
        r = np.linalg.norm(n, axis=-1)[..., None, None]
        return half * du / r + epsilon * p2(n)

    return sig, S, DS, None


def _tangential_hessian(body, dirs):
    """Radii-of-curvature matrix of the body: Hessian of sigma_K on T_n S^2."""
    E = tangent_basis(dirs)
    return np.einsum("...ia,...ij,...jb->...ab", E, body.DS(dirs), E)


def _convexity_margin(body, dirs):
    Hs = _tangential_hessian(body, dirs)
    Hs = 0.5 * (Hs + np.swapaxes(Hs, -1, -2))
    return float(np.min(np.linalg.eigvalsh(Hs)[..., 0]))


def _scan_directions(k):
    return np.vstack([np.eye(3), -np.eye(3), fibonacci_sphere(k)])


def _assemble(norm, c, epsilon, perturbation):
    sig, S, DS, D2S = _body_maps(norm, c, epsilon, perturbation)
    spec = WidthBodySpec(norm.spec, float(c), perturbation, float(epsilon))
    body = WidthBody(spec, norm, sig, S, DS, D2S)
    body.chart = spherical_chart("width-body", S, DS, D2S,
                                 params={"c": float(c), "epsilon": float(epsilon)},
                                 scale=float(c))

    def S_t(n):
        return S(n @ _TILT.T)

    def DS_t(n):
        return DS(n @ _TILT.T) @ _TILT

    D2S_t = None
    if D2S is not None:
        def D2S_t(n, a, b):
            return D2S(n @ _TILT.T, a @ _TILT.T, b @ _TILT.T)

    body.tilted_chart = spherical_chart("width-body", S_t, DS_t, D2S_t, scale=float(c))
    return body


def make_width_body(norm, c, epsilon=0.0, perturbation=DEFAULT_PERTURBATION, grid=2000):
    """Constant-width body with outward-normal boundary chart.

    Convexity is checked by the smallest eigenvalue of the tangential Hessian
    of sigma_K over a direction grid; on failure the largest admissible
    epsilon is estimated by bisection.
    """
    if not c > 0:
        raise InvalidArgument("width c must be positive")
    dirs = _scan_directions(grid)
    body = _assemble(norm, c, epsilon, perturbation)
    margin = _convexity_margin(body, dirs)
    if margin <= CONVEXITY_MARGIN * c:
        lo, hi = 0.0, abs(float(epsilon))
        sgn = np.sign(epsilon) or 1.0
        while hi - lo > EPS_RESOLUTION:
            mid = 0.5 * (lo + hi)
            ok = _convexity_margin(_assemble(norm, c, sgn * mid, perturbation),
                                   dirs) > CONVEXITY_MARGIN * c
            lo, hi = (mid, hi) if ok else (lo, mid)
        raise EpsilonTooLarge(f"epsilon = {epsilon:g} breaks convexity; "
                              f"largest admissible is about {lo:.3g}", max_epsilon=lo)
    body.convexity_margin = margin
    return body


def width_in_direction(body, n):
    """Norm distance between the two supporting planes with normal +-n."""
    n = np.asarray(n, dtype=float)
    if np.any(np.linalg.norm(n, axis=-1) == 0):
        raise InvalidArgument("width_in_direction: zero direction")
    return (body.sigma(n) + body.sigma(-n)) / body.norm.support_function(n)


def width_from_support_points(body, n):
    """Same width through the supporting points grad sigma_K(+-n)."""
    n = normalize(np.asarray(n, dtype=float))
    gap = np.sum((body.S(n) - body.S(-n)) * n, axis=-1)
    return gap / body.norm.support_function(n)


# ---------------------------------------------------------------------------
# curvature at directions

def direction_report(body, dirs):
    """Curvature reports at boundary points with outward normals ``dirs``.

    Points near the poles of the standard chart are evaluated in a tilted
    copy of it, so no direction hits a coordinate singularity.
    """
    dirs = normalize(np.atleast_2d(np.asarray(dirs, dtype=float)))
    polar = np.abs(dirs[:, 2]) > POLAR_CAP
    out = {}
    for mask, chart, D in ((~polar, body.chart, dirs), (polar, body.tilted_chart, dirs @ _TILT)):
        if not np.any(mask):
            continue
        t, p = direction_to_spherical(D[mask])
        rep = curvature_field(chart, body.norm, t, p)
        for k in rep.__dataclass_fields__:
            if k in ("params", "tangent", "deta", "dxi", "directions", "h", "dupin",
                     "weighted_dupin", "first_form"):
                continue
            a = np.asarray(getattr(rep, k))
            if k not in out:
                out[k] = np.zeros((len(dirs),) + a.shape[1:])
            out[k][mask] = a
    return out


def _locate(body, q, guess):
    """Outward normal of the boundary point nearest to q (Gauss-Newton)."""
    d0 = normalize(guess)
    E = tangent_basis(d0)

    def res(a):
        return body.S(normalize(d0 + E @ a)[None])[0] - q

    r = least_squares(res, np.zeros(2), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return normalize(d0 + E @ r.x)


def opposite_point(body, p, tol=1e-6):
    """q = p - c eta(p) for the boundary point p with outward normal ``p``.

    ``p`` is a direction, or chart parameters (theta, phi). The residuals
    check that q is the boundary point with normal -xi(p), and that tangent
    planes and Birkhoff normals at p and q are opposite.
    """
    p = np.asarray(p, dtype=float)
    n = sphere_param(p[0], p[1])[0] if p.shape == (2,) else normalize(p)
    rp = direction_report(body, n)
    P, eta_p, xi_p = rp["point"][0], rp["eta"][0], rp["xi"][0]
    c = body.c
    q = P - c * eta_p
    dq = _locate(body, q, -xi_p)
    rq = direction_report(body, dq)
    target = body.S(-xi_p[None])[0]
    sup = float(q @ (-xi_p) - body.sigma(-xi_p[None])[0]) / c
    pair = OppositePair(p=P, q=q, q_direction=dq,
                        boundary_residual=float(np.linalg.norm(q - target)) / c,
                        support_residual=abs(sup),
                        parallel_residual=float(np.linalg.norm(rq["xi"][0] + xi_p)),
                        antipodal_residual=float(np.linalg.norm(rq["eta"][0] + eta_p)))
    worst = max(pair.boundary_residual, pair.parallel_residual, pair.antipodal_residual)
    if worst > tol:
        raise NumericFailure("opposite point check failed: body is not of constant width "
                             "to tolerance", residual=worst)
    return pair


def width_curvature_identity(body, dirs):
    """Relative residuals of 1/lambda1(p) + 1/lambda2(q) = c at q = p - c eta(p).

    Returns a dict with the primary residual (max curvature at p, min at q),
    the swapped form, and the opposite-point residuals. Raises when K <= 0 at
    a sampled p or q.
    """
    dirs = normalize(np.atleast_2d(np.asarray(dirs, dtype=float)))
    c = body.c
    rp = direction_report(body, dirs)
    q = rp["point"] - c * rp["eta"]
    rq = direction_report(body, -rp["xi"])
    if np.any(rp["K"] <= 0) or np.any(rq["K"] <= 0):
        raise HypothesisViolated("Minkowski Gaussian curvature not positive at a sampled point")
    res = np.abs(1 / rp["lambda1"] + 1 / rq["lambda2"] - c) / c
    sym = np.abs(1 / rp["lambda2"] + 1 / rq["lambda1"] - c) / c
    return {
        "residual": res, "symmetric_residual": sym,
        "boundary_residual": np.linalg.norm(q - rq["point"], axis=-1) / c,
        "antipodal_residual": np.linalg.norm(rp["eta"] + rq["eta"], axis=-1),
        "parallel_residual": np.linalg.norm(rp["xi"] + rq["xi"], axis=-1),
        "p": rp["point"], "q": q,
    }


def involution_residual(body, dirs):
    """|g(g(p)) - p| / c with g(p) = p - c eta(p), over directions."""
    dirs = normalize(np.atleast_2d(np.asarray(dirs, dtype=float)))
    c = body.c
    rp = direction_report(body, dirs)
    q = rp["point"] - c * rp["eta"]
    dq = np.array([_locate(body, qi, -x) for qi, x in zip(q, rp["xi"])])
    rq = direction_report(body, dq)
    back = rq["point"] - c * rq["eta"]
    return np.linalg.norm(back - rp["point"], axis=-1) / c


def umbilic_scan(body, grid=400, tol=UMBILIC_TOL):
    """Umbilics among sampled directions and their opposite partners.

    A point is umbilic when (lambda1 - lambda2) <= tol (lambda1 + lambda2).
    Axis directions are always sampled.
    """
    dirs = _scan_directions(grid)
    rep = direction_report(body, dirs)
    l1, l2 = rep["lambda1"], rep["lambda2"]
    gap = (l1 - l2) / np.abs(l1 + l2)
    flagged = np.flatnonzero(gap <= tol)
    opp = direction_report(body, -rep["xi"][flagged]) if len(flagged) else None
    pairs = []
    for k, i in enumerate(flagged):
        g_q = float((opp["lambda1"][k] - opp["lambda2"][k]) / abs(opp["lambda1"][k]
                                                                   + opp["lambda2"][k]))
        pairs.append({"direction": dirs[i].tolist(), "gap_p": float(gap[i]), "gap_q": g_q,
                      "paired": bool(g_q <= tol)})
    imax = int(np.argmax(l1))
    max_at_umbilic = bool(gap[imax] <= tol)
    all_umbilic = bool(np.all(gap <= tol))
    spread = float((l1.max() - l2.min()) / abs(l1.max()))
    return {"n_points": len(dirs), "umbilics": len(flagged), "pairs": pairs,
            "all_paired": bool(all(p["paired"] for p in pairs)),
            "max_lambda1_at_umbilic": max_at_umbilic,
            "sphere_signature": bool(max_at_umbilic and all_umbilic and spread <= tol),
            "max_gap": float(gap.max())}


def verify_body(body, grid=2000, n_pairs=200):
    """Width deviation, curvature-identity residual and umbilic pairing summary."""
    dirs = fibonacci_sphere(grid)
    dev = float(np.max(np.abs(width_in_direction(body, dirs) - body.c)))
    ident = width_curvature_identity(body, fibonacci_sphere(n_pairs))
    umb = umbilic_scan(body, grid=min(grid, 400))
    return {"width_deviation_max": dev,
            "identity_residual_max": float(np.max(ident["residual"])),
            "umbilic_pairs": sum(p["paired"] for p in umb["pairs"]),
            "umbilics": umb["umbilics"], "all_paired": umb["all_paired"],
            "convex": bool(body.convexity_margin > CONVEXITY_MARGIN),
            "convexity_margin": float(body.convexity_margin)}
