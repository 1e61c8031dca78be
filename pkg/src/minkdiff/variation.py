"""Area, Birkhoff normal variations and calculus of the weighted Dupin metric b."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, NotAdmissible, NotImmersed, NumericFailure, OrientationError
from .surface import _inv2, curvature_field, curvatures

B_FD_STEP = 1e-4


# ---------------------------------------------------------------------------
# scalar fields on a chart


@dataclass
class ScalarField:
    """g(u, v) with optional analytic derivatives (vectorized callables)."""

    f: Callable
    grad: Optional[Callable] = None  # -> (g_u, g_v)
    hess: Optional[Callable] = None  # -> (g_uu, g_uv, g_vv)
    name: str = "field"
    fd_step: float = 1e-4

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.asarray(self.f(u, v), float) + 0 * u

    def gradient(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        if self.grad is not None:
            gu, gv = self.grad(u, v)
            return gu + 0 * u, gv + 0 * u
        h = self.fd_step
        return ((self(u + h, v) - self(u - h, v)) / (2 * h),
                (self(u, v + h) - self(u, v - h)) / (2 * h))

    def hessian(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        if self.hess is not None:
            a, b, c = self.hess(u, v)
            return a + 0 * u, b + 0 * u, c + 0 * u
        if self.grad is not None:
            h = self.fd_step
            gu_p, gv_p = self.gradient(u + h, v)
            gu_m, gv_m = self.gradient(u - h, v)
            gu_q, gv_q = self.gradient(u, v + h)
            gu_r, gv_r = self.gradient(u, v - h)
            return ((gu_p - gu_m) / (2 * h),
                    0.25 * ((gv_p - gv_m) + (gu_q - gu_r)) / h,
                    (gv_q - gv_r) / (2 * h))
        h = 1.2e-4
        g0 = self(u, v)
        return ((self(u + h, v) - 2 * g0 + self(u - h, v)) / h**2,
                (self(u + h, v + h) - self(u + h, v - h) - self(u - h, v + h)
                 + self(u - h, v - h)) / (4 * h**2),
                (self(u, v + h) - 2 * g0 + self(u, v - h)) / h**2)

    def __add__(self, other):
        return linear_combination([(1.0, self), (1.0, other)])

    def __rmul__(self, c):
        return linear_combination([(float(c), self)])


def linear_combination(terms):
    def f(u, v):
        return sum(c * g(u, v) for c, g in terms)

    def grad(u, v):
        gs = [g.gradient(u, v) for _, g in terms]
        return (sum(c * d[0] for (c, _), d in zip(terms, gs)),
                sum(c * d[1] for (c, _), d in zip(terms, gs)))

    def hess(u, v):
        hs = [g.hessian(u, v) for _, g in terms]
        return tuple(sum(c * d[k] for (c, _), d in zip(terms, hs)) for k in range(3))

    return ScalarField(f, grad, hess, name="combination")


def constant(c=1.0):
    z = lambda u, v: 0 * u  # noqa: E731
    return ScalarField(lambda u, v: c + 0 * u, lambda u, v: (z(u, v), z(u, v)),
                       lambda u, v: (z(u, v), z(u, v), z(u, v)), name=f"constant({c})")


def polynomial(coeffs):
    """sum c_ij u^i v^j with keys 'ij'."""
    terms = [(int(k[0]), int(k[1]), float(c)) for k, c in dict(coeffs).items()]

    def mono(x, i, d):
        if d > i:
            return 0 * x
        k = 1.0
        for j in range(d):
            k *= i - j
        return k * x ** (i - d)

    def P(u, v, du=0, dv=0):
        return sum(c * mono(u, i, du) * mono(v, j, dv) for i, j, c in terms) + 0 * u

    return ScalarField(lambda u, v: P(u, v), lambda u, v: (P(u, v, 1, 0), P(u, v, 0, 1)),
                       lambda u, v: (P(u, v, 2, 0), P(u, v, 1, 1), P(u, v, 0, 2)),
                       name="polynomial")


def bump(center, radii, amplitude=1.0):
    """Smooth bump amplitude*exp(1 - 1/(1 - s)) with s = |(p - c)/radii|^2 < 1."""
    cu, cv = map(float, center)
    ru, rv = map(float, radii)

    def parts(u, v):
        x, y = (u - cu) / ru, (v - cv) / rv
        s = x * x + y * y
        inside = s < 1
        w = np.where(inside, 1 - s, 1.0)
        e = np.where(inside, amplitude * np.exp(1 - 1 / w), 0.0)
        return x, y, s, w, e, inside

    def f(u, v):
        return parts(u, v)[4]

    def grad(u, v):
        x, y, s, w, e, inside = parts(u, v)
        # de/ds = -e / w^2
        dsdu, dsdv = 2 * x / ru, 2 * y / rv
        k = -e / w**2
        return k * dsdu, k * dsdv

    def hess(u, v):
        x, y, s, w, e, inside = parts(u, v)
        k1 = -e / w**2
        # d2e/ds2 = e/w^4 - 2e/w^3
        k2 = e / w**4 - 2 * e / w**3
        su, sv = 2 * x / ru, 2 * y / rv
        return (k2 * su * su + k1 * 2 / ru**2, k2 * su * sv, k2 * sv * sv + k1 * 2 / rv**2)

    return ScalarField(f, grad, hess, name="bump")


def expression(expr):
    import sympy as sp

    u, v = sp.symbols("u v", real=True)
    try:
        e = sp.sympify(expr, locals={"u": u, "v": v})
    except (sp.SympifyError, SyntaxError, TypeError) as err:
        raise InvalidArgument(f"cannot parse field expression: {err}") from err
    if e.free_symbols - {u, v}:
        raise InvalidArgument("field expression may only use u and v")
    lam = lambda ex: sp.lambdify((u, v), ex, "numpy")  # noqa: E731
    f = lam(e)
    fu, fv = lam(sp.diff(e, u)), lam(sp.diff(e, v))
    fuu, fuv, fvv = lam(sp.diff(e, u, 2)), lam(sp.diff(e, u, v)), lam(sp.diff(e, v, 2))
    return ScalarField(f, lambda a, b: (fu(a, b), fv(a, b)),
                       lambda a, b: (fuu(a, b), fuv(a, b), fvv(a, b)), name=str(expr))


def coordinate_field(chart, i):
    """i-th ambient coordinate of the immersion, with chart derivatives."""
    return ScalarField(lambda u, v: chart.point(u, v)[..., i],
                       lambda u, v: tuple(d[..., i] for d in chart.first(u, v)),
                       lambda u, v: tuple(d[..., i] for d in chart.second(u, v)),
                       name=f"f{i + 1}")


def height_function(chart, norm, p):
    """Height over the tangent plane at p, measured along η(p):
    g = <f - f(p), xi(p)> / <eta(p), xi(p)>."""
    rep = curvatures(chart, norm, p)
    xi, c, P0 = rep.xi, rep.eta_xi, rep.point

    def f(u, v):
        return np.sum((chart.point(u, v) - P0) * xi, axis=-1) / c

    def grad(u, v):
        fu, fv = chart.first(u, v)
        return np.sum(fu * xi, -1) / c, np.sum(fv * xi, -1) / c

    def hess(u, v):
        return tuple(np.sum(d * xi, -1) / c for d in chart.second(u, v))

    return ScalarField(f, grad, hess, name="height")


# ---------------------------------------------------------------------------
# area


@dataclass
class DomainPatch:
    chart: object
    rect: tuple
    order: int = 16

    def __post_init__(self):
        (a, b), (c, d) = self.rect
        (u0, u1), (v0, v1) = self.chart.domain
        if not (a < b and c < d):
            raise InvalidArgument("empty parameter rectangle")
        if a < u0 - 1e-12 or b > u1 + 1e-12 or c < v0 - 1e-12 or d > v1 + 1e-12:
            raise InvalidArgument("patch rectangle must lie inside the chart domain")
        if self.order < 1:
            raise InvalidArgument("quadrature order must be positive")

    def nodes(self):
        x, w = np.polynomial.legendre.leggauss(self.order)
        (a, b), (c, d) = self.rect
        u = 0.5 * (a + b) + 0.5 * (b - a) * x
        v = 0.5 * (c + d) + 0.5 * (d - c) * x
        U, V = np.meshgrid(u, v, indexing="ij")
        Wt = np.outer(w, w) * 0.25 * (b - a) * (d - c)
        return U, V, Wt

    def refined(self, extra=4):
        return DomainPatch(self.chart, self.rect, self.order + extra)

    def diameter(self):
        (a, b), (c, d) = self.rect
        U, V = np.meshgrid(np.linspace(a, b, 9), np.linspace(c, d, 9), indexing="ij")
        P = self.chart.point(U, V).reshape(-1, 3)
        return float(np.max(np.linalg.norm(P[:, None] - P[None], axis=-1)))


def _sum(vals, weights):
    # fixed summation order so reports reproduce bit-for-bit
    return float(np.add.reduce((vals * weights).ravel()))


def area_element(chart, norm, p, X, Y):
    """omega(X, Y) = det[X, Y, eta(p)]."""
    rep = curvatures(chart, norm, p)
    return float(np.linalg.det(np.column_stack([X, Y, rep.eta])))


def area(patch, norm):
    U, V, Wt = patch.nodes()
    rep = curvature_field(patch.chart, norm, U, V)
    fu, fv = rep.tangent[..., 0], rep.tangent[..., 1]
    omega = np.einsum("...i,...i->...", np.cross(fu, fv), rep.eta)
    if np.any(omega <= 0):
        raise OrientationError("negative area element; chart is negatively oriented")
    return _sum(omega, Wt)


@dataclass
class VariationSpec:
    g: ScalarField
    t_step: Optional[float] = None


def _deformed_area(patch, norm, g, t, rep=None):
    U, V, Wt = patch.nodes()
    rep = rep if rep is not None else curvature_field(patch.chart, norm, U, V)
    J = rep.tangent
    fu, fv = J[..., 0], J[..., 1]
    eta = rep.eta
    eta_u = np.einsum("...ia,...a->...i", J, rep.deta[..., :, 0])
    eta_v = np.einsum("...ia,...a->...i", J, rep.deta[..., :, 1])
    gv = g(U, V)[..., None]
    gu_, gv_ = (d[..., None] for d in g.gradient(U, V))
    Fu = fu + t * (gu_ * eta + gv * eta_u)
    Fv = fv + t * (gv_ * eta + gv * eta_v)
    N = np.cross(Fu, Fv)
    r = np.linalg.norm(N, axis=-1)
    if np.any(r <= 1e-14 * np.linalg.norm(Fu, axis=-1) * np.linalg.norm(Fv, axis=-1)):
        raise NotImmersed("deformed patch is not immersed")
    xi_t = patch.chart.orientation_sign() * N / r[..., None]
    eta_t, _, _ = norm.support_points(xi_t, tol=norm.geometry_tol)
    omega = np.einsum("...i,...i->...", N, eta_t)
    if np.any(omega <= 0):
        raise NotImmersed("deformed patch folded over")
    return _sum(omega, Wt)


def deformed_area(patch, norm, g, t):
    """A(t): area of the patch pushed by p -> p + t g(p) eta(p)."""
    return _deformed_area(patch, norm, g, t)


def first_variation_numeric(patch, norm, var, retries=4):
    """(A(+t) - A(-t)) / 2t for the Birkhoff normal variation."""
    g = var.g if isinstance(var, VariationSpec) else var
    t = (var.t_step if isinstance(var, VariationSpec) and var.t_step else None) \
        or 1e-4 * patch.diameter()
    U, V, _ = patch.nodes()
    rep = curvature_field(patch.chart, norm, U, V)
    last = None
    for _ in range(retries + 1):
        try:
            return (_deformed_area(patch, norm, g, t, rep)
                    - _deformed_area(patch, norm, g, -t, rep)) / (2 * t)
        except NotImmersed as err:
            last = err
            t *= 0.1
    raise NumericFailure(f"first_variation_numeric: immersion breaks for all steps ({last})")


def first_variation_formula(patch, norm, g):
    """Integral of 2 g H omega over the patch."""
    U, V, Wt = patch.nodes()
    rep = curvature_field(patch.chart, norm, U, V)
    J = rep.tangent
    omega = np.einsum("...i,...i->...", np.cross(J[..., 0], J[..., 1]), rep.eta)
    return _sum(2 * g(U, V) * rep.H * omega, Wt)


# ---------------------------------------------------------------------------
# b-calculus


@dataclass
class BMetricConnection:
    params: np.ndarray
    b: np.ndarray  # (..., 2, 2)
    christoffel: np.ndarray  # (..., k, i, j) = Gamma^k_ij
    db: np.ndarray  # (..., l, i, j) = d_l b_ij
    det: np.ndarray = field(default=None)

    def compatibility_residual(self):
        """max |d_k b_ij - Gamma^l_ki b_lj - Gamma^l_kj b_il|."""
        G, b = self.christoffel, self.b
        rhs = np.einsum("...lki,...lj->...kij", G, b) + np.einsum("...lkj,...il->...kij", G, b)
        return float(np.max(np.abs(self.db - rhs)))


def weighted_dupin(chart, norm, u, v):
    rep = curvature_field(chart, norm, u, v)
    if np.any(np.linalg.eigvalsh(rep.weighted_dupin)[..., 0] <= 0):
        raise NotAdmissible("weighted Dupin metric not positive definite")
    return rep.weighted_dupin


def b_connection(chart, norm, points, step=B_FD_STEP):
    """Levi-Civita connection of b at chart parameters ``points`` (..., 2)."""
    if isinstance(chart, DomainPatch):
        U, V, _ = chart.nodes()
        chart, points = chart.chart, np.stack([U, V], -1)
    P = np.asarray(points, float)
    u, v = P[..., 0], P[..., 1]
    b = weighted_dupin(chart, norm, u, v)
    db_u = (weighted_dupin(chart, norm, u + step, v) - weighted_dupin(chart, norm, u - step, v)) / (2 * step)
    db_v = (weighted_dupin(chart, norm, u, v + step) - weighted_dupin(chart, norm, u, v - step)) / (2 * step)
    db = np.stack([db_u, db_v], axis=-3)  # (..., l, i, j)
    binv = _inv2(b)
    # T_lij = d_i b_jl + d_j b_il - d_l b_ij
    T = (np.einsum("...ijl->...lij", db) + np.einsum("...jil->...lij", db) - db)
    G = 0.5 * np.einsum("...kl,...lij->...kij", binv, T)
    return BMetricConnection(params=P, b=b, christoffel=G, db=db,
                             det=b[..., 0, 0] * b[..., 1, 1] - b[..., 0, 1] ** 2)


def b_hessian(chart, norm, f, p, conn=None):
    """hess_b f = coordinate Hessian minus Gamma-contracted gradient, 2x2."""
    p = np.asarray(p, float)
    conn = conn if conn is not None else b_connection(chart, norm, p)
    fu, fv = f.gradient(p[..., 0], p[..., 1])
    fuu, fuv, fvv = f.hessian(p[..., 0], p[..., 1])
    Hc = np.stack([np.stack([fuu, fuv], -1), np.stack([fuv, fvv], -1)], -2)
    grad = np.stack([fu, fv], -1)
    Hb = Hc - np.einsum("...kij,...k->...ij", conn.christoffel, grad)
    return 0.5 * (Hb + np.swapaxes(Hb, -1, -2)), Hb


def b_laplacian(chart, norm, f, p, conn=None):
    """Trace of hess_b f with respect to b."""
    p = np.asarray(p, float)
    conn = conn if conn is not None else b_connection(chart, norm, p)
    _, Hb = b_hessian(chart, norm, f, p, conn)
    return np.einsum("...ij,...ji->...", _inv2(conn.b), Hb)


def position_laplacian(chart, norm, p):
    """(Delta_b f_1, Delta_b f_2, Delta_b f_3) at p."""
    p = np.asarray(p, float)
    conn = b_connection(chart, norm, p)
    return np.stack([b_laplacian(chart, norm, coordinate_field(chart, i), p, conn)
                     for i in range(3)], axis=-1)


# ---------------------------------------------------------------------------
# minimality residuals


@dataclass
class MinimalResiduals:
    H: float
    r_H: float
    r_affine: float
    r_conf: float
    applicable: bool


def minimal_residuals(chart, norm, p, report=None):
    """Normalized residuals of the three minimality characterizations.

    r_H = |l1 + l2| / (|l1| + |l2|); r_affine measures
    h(dη., dη.) + K h(., .) relative to |K| |h|; r_conf measures
    b(dη., dη.) + K b(., .) relative to |K|. Norms are spectral norms in a
    b-orthonormal frame. The last two need K < 0.
    """
    rep = report if report is not None else curvatures(chart, norm, p)
    l1, l2, K = float(rep.lambda1), float(rep.lambda2), float(rep.K)
    den = abs(l1) + abs(l2)
    r_H = abs(l1 + l2) / den if den > 0 else 0.0
    if not K < 0:
        return MinimalResiduals(float(rep.H), r_H, float("nan"), float("nan"), False)
    b, h, D = rep.weighted_dupin, rep.h, rep.deta
    C = np.linalg.inv(np.linalg.cholesky(b).T)

    def snorm(M):
        return float(np.linalg.norm(C.T @ M @ C, 2))

    R = D.T @ h @ D + K * h
    Q = D.T @ b @ D + K * b
    return MinimalResiduals(float(rep.H), r_H, snorm(R) / (snorm(h) * abs(K)),
                            snorm(Q) / abs(K), True)


def _stats(x):
    x = np.asarray(x, float)
    if x.size == 0:
        return None
    return {"min": float(x.min()), "median": float(np.median(x)), "max": float(x.max())}


def minimal_scan(chart, norm, nu, nv):
    """max |H| (scaled) and residual statistics over a sample grid."""
    U, V = chart.sample_grid(nu, nv, margin=0.02 if chart.direction_map is not None else 0.0)
    rep = curvature_field(chart, norm, U.ravel(), V.ravel())
    res = [minimal_residuals(chart, norm, None, report=rep[i]) for i in range(len(rep.K))]
    ok = [r for r in res if r.applicable]
    return {"max_abs_H": float(np.max(np.abs(rep.H))) * chart.scale,
            "r_H_stats": _stats([r.r_H for r in res]),
            "r_affine_stats": _stats([r.r_affine for r in ok]),
            "r_conf_stats": _stats([r.r_conf for r in ok]),
            "samples": len(res), "negative_K_samples": len(ok)}


def variation_check(chart, norm, g, t_step=None, rect=None, order=16):
    """Numeric and formula first variation on ``rect`` (default: the whole chart)."""
    if rect is None:
        (u0, u1), (v0, v1) = chart.domain
        if chart.direction_map is not None:
            u0, u1 = u0 + 0.02 * (u1 - u0), u1 - 0.02 * (u1 - u0)
        rect = ((u0, u1), (v0, v1))
    patch = DomainPatch(chart, rect, order=order)
    num = first_variation_numeric(patch, norm, VariationSpec(g, t_step))
    form = first_variation_formula(patch, norm, g)
    A = area(patch, norm)
    gap = abs(num - form) / max(abs(num), A / chart.scale)
    return {"numeric": float(num), "formula": float(form), "rel_gap": float(gap),
            "area": float(A), "rect": [list(map(float, r)) for r in rect]}
