"""Admissible norms on R^3 and the geometry of their unit spheres.

A norm is given by its gauge (Minkowski functional). Everything else, the
support map ``u`` (inverse Euclidean Gauss map of the unit sphere), its
differential and the Euclidean curvature of the unit sphere, is derived from
the gauge and its first two derivatives.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidArgument, NotAdmissible, NumericFailure

FAMILIES = ("euclidean", "ellipsoid", "l2-l4-blend", "custom")
DERIVATIVE_MODES = ("analytic", "finite-difference")

SUPPORT_TOL = 1e-10
# internal geometry pipelines converge further so that downstream finite
# differences stay clean; finite-difference gauges cannot go below ~1e-11
GEOMETRY_TOL = 1e-13
FD_GEOMETRY_TOL = 1e-9
ADMISSIBLE_THRESHOLD = 1e-8
# fourth root of machine epsilon, balances truncation and roundoff for
# second differences
HESSIAN_STEP = 1.2e-4


@dataclass(frozen=True)
class NormSpec:
    family: str
    params: dict = field(default_factory=dict)
    derivative_mode: str = "analytic"
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgument(f"unknown norm family {self.family!r}")
        if self.derivative_mode not in DERIVATIVE_MODES:
            raise InvalidArgument(f"unknown derivative_mode {self.derivative_mode!r}")
        if not (self.fd_step > 0):
            raise InvalidArgument("fd_step must be positive")


@dataclass
class SupportData:
    normal: np.ndarray
    point: np.ndarray
    differential: np.ndarray  # du on normal-perp, in `basis`
    sphere_curvature: float
    basis: np.ndarray  # 3x2, columns span normal-perp
    residual: float = 0.0
    angle_residual: float = 0.0


@dataclass
class AdmissibilityReport:
    m: float
    m_bar: float
    admissible: bool
    grid_size: int
    min_location: np.ndarray
    max_location: np.ndarray = None
    failures: int = 0

    def to_dict(self):
        return {
            "m": float(self.m),
            "m_bar": float(self.m_bar),
            "admissible": bool(self.admissible),
            "grid_size": int(self.grid_size),
            "min_location": [float(v) for v in self.min_location],
            "max_location": None if self.max_location is None
            else [float(v) for v in self.max_location],
            "failures": int(self.failures),
        }


# ---------------------------------------------------------------------------
# small vector helpers shared across modules

def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def tangent_basis(n):
    """Orthonormal basis (3x2 columns) of the plane perpendicular to ``n``.

    Uses the coordinate axis least aligned with n, Gram-Schmidt, and
    e2 = n x e1 so that (e1, e2, n) is right-handed. Works on stacks.
    """
    n = normalize(n)
    idx = np.argmin(np.abs(n), axis=-1)
    a = np.zeros_like(n)
    np.put_along_axis(a, idx[..., None], 1.0, axis=-1)
    e1 = a - np.sum(a * n, axis=-1, keepdims=True) * n
    e1 = normalize(e1)
    e2 = np.cross(n, e1)
    return np.stack([e1, e2], axis=-1)


def fibonacci_sphere(k):
    """k quasi-uniform unit vectors."""
    i = np.arange(k) + 0.5
    z = 1.0 - 2.0 * i / k
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (1.0 + 5**0.5) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


# ---------------------------------------------------------------------------


class Norm:
    """Gauge with derivatives plus unit-sphere geometry.

    Construct through :func:`make_norm` or the classmethods. Every array
    method broadcasts over leading axes of ``x`` (shape ``(..., 3)``).
    """

    def __init__(self, spec, gauge, gradient=None, hessian=None):
        self.spec = spec
        self._gauge = gauge
        if spec.derivative_mode == "finite-difference":
            gradient = hessian = None
        self._gradient = gradient
        self._hessian = hessian

    def __repr__(self):
        return f"Norm({self.spec.family}, {self.spec.params})"

    @property
    def geometry_tol(self):
        return GEOMETRY_TOL if self._gradient is not None else FD_GEOMETRY_TOL

    # -- constructors -------------------------------------------------------
    @classmethod
    def euclidean(cls, **kw):
        return make_norm(NormSpec("euclidean", {}, **kw))

    @classmethod
    def ellipsoid(cls, a, b, c, **kw):
        return make_norm(NormSpec("ellipsoid", {"a": a, "b": b, "c": c}, **kw))

    @classmethod
    def blend(cls, t, **kw):
        return make_norm(NormSpec("l2-l4-blend", {"t": t}, **kw))

    @classmethod
    def from_callable(cls, gauge, gradient=None, hessian=None, **kw):
        mode = "analytic" if (gradient is not None and hessian is not None) \
            else "finite-difference"
        spec = NormSpec("custom", {"callable": True}, derivative_mode=mode, **kw)
        return cls(spec, gauge, gradient, hessian)

    # -- gauge and derivatives ---------------------------------------------
    def gauge(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise InvalidArgument("gauge: non-finite input")
        return self._gauge(x)

    def __call__(self, x):
        return self.gauge(x)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self._gradient is not None:
            return self._gradient(x)
        h = self.spec.fd_step * np.maximum(np.linalg.norm(x, axis=-1), 1e-300)
        out = np.empty(x.shape)
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            d = h[..., None] * e
            out[..., i] = (self._gauge(x + d) - self._gauge(x - d)) / (2 * h)
        return out

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        if self._hessian is not None:
            return self._hessian(x)
        h = HESSIAN_STEP * np.maximum(np.linalg.norm(x, axis=-1), 1e-300)
        g = self._gauge
        out = np.empty(x.shape + (3,))
        eye = np.eye(3)
        g0 = g(x)
        for i in range(3):
            di = h[..., None] * eye[i]
            out[..., i, i] = (g(x + di) - 2 * g0 + g(x - di)) / h**2
            for j in range(i + 1, 3):
                dj = h[..., None] * eye[j]
                v = (g(x + di + dj) - g(x + di - dj) - g(x - di + dj)
                     + g(x - di - dj)) / (4 * h**2)
                out[..., i, j] = out[..., j, i] = v
        return out

    # -- unit sphere --------------------------------------------------------
    def radial_point(self, n):
        """Point of the unit sphere on the ray through n."""
        n = np.asarray(n, dtype=float)
        return n / self.gauge(n)[..., None]

    def support_points(self, n, tol=SUPPORT_TOL, maxiter=80, raise_on_fail=True):
        """Batched support map u(n) via projected Newton on the bordered system.

        Solves mu * grad(x) = n, gauge(x) = 1. Returns ``(q, converged,
        residual)``; q has the shape of n.
        """
        n = normalize(np.asarray(n, dtype=float))
        shape = n.shape
        n = n.reshape(-1, 3)
        x = self.radial_point(n)
        g = self.gradient(x)
        mu = 1.0 / np.linalg.norm(g, axis=-1)

        def residual(x, mu):
            g = self.gradient(x)
            return np.linalg.norm(mu[:, None] * g - n, axis=-1), g

        res, g = residual(x, mu)
        for _ in range(maxiter):
            active = res > tol
            if not np.any(active):
                break
            xa, ga, ma, na = x[active], g[active], mu[active], n[active]
            H = self.hessian(xa)
            J = np.zeros((len(xa), 4, 4))
            J[:, :3, :3] = ma[:, None, None] * H
            J[:, :3, 3] = ga
            J[:, 3, :3] = ga
            F = np.concatenate([ma[:, None] * ga - na,
                                (self.gauge(xa) - 1.0)[:, None]], axis=1)
            try:
                step = np.linalg.solve(J, -F[..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = -np.einsum("kij,kj->ki", np.linalg.pinv(J), F)
            alpha = np.ones(len(xa))
            ra = res[active]
            xn, mn, rn = xa.copy(), ma.copy(), ra.copy()
            pending = np.ones(len(xa), bool)
            for _ in range(40):
                if not np.any(pending):
                    break
                xt = xa[pending] + alpha[pending, None] * step[pending, :3]
                xt = xt / self.gauge(xt)[:, None]
                mt = ma[pending] + alpha[pending] * step[pending, 3]
                rt = np.linalg.norm(mt[:, None] * self.gradient(xt) - na[pending], axis=-1)
                ok = np.isfinite(rt) & (rt < ra[pending]) & (mt > 0)
                idx = np.flatnonzero(pending)
                xn[idx[ok]], mn[idx[ok]], rn[idx[ok]] = xt[ok], mt[ok], rt[ok]
                pending[idx[ok]] = False
                alpha[pending] *= 0.5
            x[active], mu[active] = xn, mn
            res, g = residual(x, mu)
            if np.all(rn >= ra):
                break  # stalled everywhere
        converged = res <= tol
        if raise_on_fail and not np.all(converged):
            raise NumericFailure("support_point: Newton did not converge",
                                 residual=float(np.max(res)))
        return x.reshape(shape), converged.reshape(shape[:-1]), res.reshape(shape[:-1])

    def support_function(self, n):
        """sigma_B(n) = max of <x, n> over the unit ball, 1-homogeneous."""
        n = np.asarray(n, dtype=float)
        if np.any(np.linalg.norm(n, axis=-1) == 0):
            raise InvalidArgument("support_function: zero direction")
        q, _, _ = self.support_points(n)
        return np.sum(q * n, axis=-1)

    def sphere_shape(self, q, n):
        """Weingarten map of the unit sphere at q (outer normal n), as a 2x2
        matrix in ``tangent_basis(n)``. This is the differential of u^{-1}."""
        E = tangent_basis(n)
        g = self.gradient(q)
        A = self.hessian(q) / np.linalg.norm(g, axis=-1)[..., None, None]
        return np.einsum("...ia,...ij,...jb->...ab", E, A, E), E

    def support_point(self, n, tol=SUPPORT_TOL):
        n = np.asarray(n, dtype=float)
        if n.shape != (3,):
            raise InvalidArgument("support_point expects a single 3-vector")
        r = np.linalg.norm(n)
        if r == 0:
            raise InvalidArgument("support_point: zero direction")
        if abs(r - 1.0) > 1e-12:
            warnings.warn("support_point: normalizing non-unit direction", stacklevel=2)
            n = n / r
        q, _, res = self.support_points(n, tol=tol)
        W, E = self.sphere_shape(q, n)
        W = 0.5 * (W + W.T)
        evals = np.linalg.eigvalsh(W)
        if evals[0] <= 1e-12 * max(1.0, abs(evals[1])):
            raise NotAdmissible("support_point: tangential Hessian not positive definite",
                                location=n, residual=float(evals[0]))
        g = self.gradient(q)
        ang = _angle(g, n)
        return SupportData(normal=n, point=q, differential=np.linalg.inv(W),
                           sphere_curvature=float(np.linalg.det(W)), basis=E,
                           residual=float(res), angle_residual=float(ang))

    def support_differential_fd(self, n, step=1e-5):
        """du_n by central differences of n -> u(n), in tangent_basis(n)."""
        n = normalize(n)
        E = tangent_basis(n)
        cols = []
        for j in range(2):
            qp, _, _ = self.support_points(n + step * E[:, j], tol=1e-14)
            qm, _, _ = self.support_points(n - step * E[:, j], tol=1e-14)
            cols.append(E.T @ (qp - qm) / (2 * step))
        return np.stack(cols, axis=1)

    def sphere_curvature(self, n):
        """Euclidean Gaussian curvature of the unit sphere at u(n), batched."""
        q, _, _ = self.support_points(n)
        W, _ = self.sphere_shape(q, normalize(n))
        return np.linalg.det(W)


def _angle(a, b):
    a = normalize(a)
    b = normalize(b)
    c = np.linalg.norm(np.cross(a, b), axis=-1)
    d = np.sum(a * b, axis=-1)
    return np.arctan2(c, d)


# ---------------------------------------------------------------------------
# families

def _euclidean():
    def gauge(x):
        return np.linalg.norm(x, axis=-1)

    def grad(x):
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        return np.divide(x, r, out=np.zeros_like(x), where=r > 0)

    def hess(x):
        r = np.linalg.norm(x, axis=-1)[..., None, None]
        xh = x[..., :, None] * x[..., None, :]
        return (np.eye(3) - xh / r**2) / r

    return gauge, grad, hess


def _ellipsoid(a, b, c):
    if min(a, b, c) <= 0:
        raise InvalidArgument("ellipsoid semi-axes must be positive")
    D = np.array([1 / a**2, 1 / b**2, 1 / c**2])

    def gauge(x):
        return np.sqrt(np.sum(D * x * x, axis=-1))

    def grad(x):
        return D * x / gauge(x)[..., None]

    def hess(x):
        g = gauge(x)[..., None, None]
        Dx = D * x
        return np.diag(D) / g - Dx[..., :, None] * Dx[..., None, :] / g**3

    return gauge, grad, hess


def _blend(t):
    if not (0 <= t <= 1):
        raise InvalidArgument("blend weight t must lie in [0, 1]")
    e_gauge, e_grad, e_hess = _euclidean()

    def n4(x):
        return np.sum(x**4, axis=-1) ** 0.25

    def gauge(x):
        return (1 - t) * e_gauge(x) + t * n4(x)

    def grad(x):
        r = n4(x)[..., None]
        return (1 - t) * e_grad(x) + t * x**3 / r**3

    def hess(x):
        r = n4(x)[..., None, None]
        x3 = x**3
        h4 = 3 * (x[..., :, None] ** 2 * np.eye(3)) / r**3 \
            - 3 * x3[..., :, None] * x3[..., None, :] / r**7
        return (1 - t) * e_hess(x) + t * h4

    return gauge, grad, hess


def _expression(expr):
    import sympy as sp

    x, y, z = sp.symbols("x y z", real=True)
    try:
        e = sp.sympify(expr, locals={"x": x, "y": y, "z": z})
    except (sp.SympifyError, SyntaxError, TypeError) as err:
        raise InvalidArgument(f"cannot parse gauge expression: {err}") from err
    free = e.free_symbols - {x, y, z}
    if free:
        raise InvalidArgument(f"gauge expression has unknown symbols {sorted(map(str, free))}")
    vs = (x, y, z)
    grad_e = [sp.diff(e, v) for v in vs]
    hess_e = [[sp.diff(gi, v) for v in vs] for gi in grad_e]
    f = sp.lambdify(vs, e, "numpy")
    fg = [sp.lambdify(vs, gi, "numpy") for gi in grad_e]
    fh = [[sp.lambdify(vs, hij, "numpy") for hij in row] for row in hess_e]

    def call(fn, X):
        return np.broadcast_to(np.asarray(fn(X[..., 0], X[..., 1], X[..., 2]), float),
                               X.shape[:-1])

    def gauge(X):
        return call(f, X)

    def grad(X):
        return np.stack([call(fi, X) for fi in fg], axis=-1)

    def hess(X):
        return np.stack([np.stack([call(fij, X) for fij in row], axis=-1)
                         for row in fh], axis=-2)

    return gauge, grad, hess


def make_norm(spec):
    if isinstance(spec, Norm):
        return spec
    p = spec.params
    try:
        if spec.family == "euclidean":
            fns = _euclidean()
        elif spec.family == "ellipsoid":
            fns = _ellipsoid(float(p["a"]), float(p["b"]), float(p["c"]))
        elif spec.family == "l2-l4-blend":
            fns = _blend(float(p["t"]))
        else:
            if "expression" not in p:
                raise InvalidArgument("custom norm needs params.expression")
            fns = _expression(p["expression"])
    except KeyError as err:
        raise InvalidArgument(f"norm params missing field {err.args[0]!r}") from err
    return Norm(spec, *fns)


# ---------------------------------------------------------------------------
# operations


def birkhoff_orthogonal(norm, v, plane, tol=1e-9):
    """Is v Birkhoff orthogonal to the plane spanned by ``plane``?

    True iff the gauge gradient at v/||v|| annihilates both (unit) spanning
    vectors. Returns ``(flag, residual)``.
    """
    v = np.asarray(v, dtype=float)
    w1, w2 = (np.asarray(w, dtype=float) for w in plane)
    if np.linalg.norm(v) == 0:
        raise InvalidArgument("birkhoff_orthogonal: v must be non-zero")
    cr = np.linalg.norm(np.cross(w1, w2))
    if cr <= 1e-12 * np.linalg.norm(w1) * np.linalg.norm(w2) or cr == 0:
        raise InvalidArgument("birkhoff_orthogonal: degenerate spanning vectors")
    g = norm.gradient(v / norm.gauge(v))
    res = max(abs(g @ normalize(w1)), abs(g @ normalize(w2)))
    return bool(res <= tol), float(res)


def birkhoff_plane(norm, v):
    """Spanning vectors of the unique plane v is Birkhoff orthogonal to."""
    v = np.asarray(v, dtype=float)
    g = norm.gradient(v / norm.gauge(v))
    E = tangent_basis(g)
    return E[:, 0], E[:, 1]


def _sphere_grid(grid_resolution):
    pts = fibonacci_sphere(2 * grid_resolution**2)
    axes = np.vstack([np.eye(3), -np.eye(3)])
    return np.vstack([axes, pts])


def _polish(fun, n0, sign):
    """Local extremum of fun on the sphere near n0 (sign=+1 min, -1 max)."""
    E = tangent_basis(n0)

    def obj(s):
        n = normalize(n0 + E @ s)
        return sign * float(fun(n))

    r = minimize(obj, np.zeros(2), method="Nelder-Mead",
                 options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400,
                          "initial_simplex": np.array([[0, 0], [0.02, 0], [0, 0.02]])})
    n = normalize(n0 + E @ r.x)
    return sign * r.fun, n


def admissibility_scan(norm, grid_resolution=16, threshold=ADMISSIBLE_THRESHOLD, polish=True):
    """Scan K of the unit sphere over a direction grid; m = inf, m_bar = sup."""
    if grid_resolution < 8:
        raise InvalidArgument("grid_resolution must be >= 8")
    dirs = _sphere_grid(grid_resolution)
    q, conv, res = norm.support_points(dirs, raise_on_fail=False)
    W, _ = norm.sphere_shape(q, dirs)
    K = np.linalg.det(W)
    ev = np.linalg.eigvalsh(0.5 * (W + np.swapaxes(W, -1, -2)))
    bad = ~conv | ~np.isfinite(K) | (ev[:, 0] <= threshold)
    i_min = int(np.argmin(np.where(np.isfinite(K), K, -np.inf)))
    i_max = int(np.argmax(np.where(np.isfinite(K), K, -np.inf)))
    m, m_bar = float(K[i_min]), float(K[i_max])
    n_min, n_max = dirs[i_min], dirs[i_max]
    if np.any(bad):
        bad_idx = np.flatnonzero(bad)
        nonconv = bad_idx[~conv[bad_idx]]
        j = int(nonconv[0]) if len(nonconv) else int(bad_idx[np.argmin(K[bad_idx])])
        m_rep = min(m, float(K[j])) if np.isfinite(K[j]) else 0.0
        return AdmissibilityReport(m=m_rep, m_bar=m_bar, admissible=False,
                                   grid_size=len(dirs), min_location=dirs[j],
                                   max_location=n_max, failures=int(np.sum(bad)))
    if polish:
        m_p, n_p = _polish(norm.sphere_curvature, n_min, +1)
        if m_p < m:
            m, n_min = m_p, n_p
        M_p, N_p = _polish(norm.sphere_curvature, n_max, -1)
        if M_p > m_bar:
            m_bar, n_max = M_p, N_p
    return AdmissibilityReport(m=m, m_bar=m_bar, admissible=bool(m > threshold),
                               grid_size=len(dirs), min_location=n_min, max_location=n_max)


def radial_extremes(norm, grid_resolution=16):
    """(min, max) of the gauge on Euclidean unit vectors.

    1/max is the inradius of B, i.e. min of |x| over the unit sphere; 1/min
    is the circumradius.
    """
    dirs = _sphere_grid(grid_resolution)
    g = norm.gauge(dirs)
    lo, n_lo = _polish(norm.gauge, dirs[np.argmin(g)], +1)
    hi, n_hi = _polish(norm.gauge, dirs[np.argmax(g)], -1)
    return min(lo, g.min()), max(hi, g.max())


def inradius(norm, grid_resolution=16):
    return 1.0 / radial_extremes(norm, grid_resolution)[1]


def equivalence_constant(norm, grid_resolution=16):
    """Smallest c with |x|/c <= ||x|| <= c|x|."""
    lo, hi = radial_extremes(norm, grid_resolution)
    return max(hi, 1.0 / lo)
