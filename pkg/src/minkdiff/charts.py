"""Parametrized surface patches with first and second derivatives.

All chart maps are vectorized: ``chart.point(U, V)`` takes broadcastable
arrays and returns an array of shape ``U.shape + (3,)``. Missing analytic
derivatives fall back to central differences.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, NotImmersed
from .norm import normalize

CHART_FAMILIES = ("plane", "sphere", "ellipsoid", "torus", "helicoid", "graph",
                  "cylinder", "unit-sphere", "custom")
ORIENTATIONS = ("outward", "inward", "as-parametrized", "reversed")


@dataclass
class SurfaceChart:
    family: str
    f: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    domain: tuple = ((-1.0, 1.0), (-1.0, 1.0))
    orientation: str = "as-parametrized"
    closed: bool = False
    periodic: tuple = (False, False)
    outward_sign: Optional[int] = 1
    params: dict = field(default_factory=dict)
    fd_step: float = 1e-5
    # sphere-type closed surfaces: unit direction -> surface point, and back
    direction_map: Optional[Callable] = None
    params_of_direction: Optional[Callable] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise InvalidArgument(f"unknown orientation {self.orientation!r}")

    # -- evaluation ---------------------------------------------------------
    def point(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return self.f(u, v)

    def first(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        if self.d1 is not None:
            return self.d1(u, v)
        h = self.fd_step
        fu = (self.f(u + h, v) - self.f(u - h, v)) / (2 * h)
        fv = (self.f(u, v + h) - self.f(u, v - h)) / (2 * h)
        return fu, fv

    def second(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        if self.d2 is not None:
            return self.d2(u, v)
        if self.d1 is not None:
            h = 1e-4
            fu_p, fv_p = self.d1(u + h, v)
            fu_m, fv_m = self.d1(u - h, v)
            fu_q, fv_q = self.d1(u, v + h)
            fu_r, fv_r = self.d1(u, v - h)
            fuu = (fu_p - fu_m) / (2 * h)
            fvv = (fv_q - fv_r) / (2 * h)
            fuv = 0.5 * ((fv_p - fv_m) + (fu_q - fu_r)) / (2 * h)
            return fuu, fuv, fvv
        h = 1.2e-4
        f = self.f
        f0 = f(u, v)
        fuu = (f(u + h, v) - 2 * f0 + f(u - h, v)) / h**2
        fvv = (f(u, v + h) - 2 * f0 + f(u, v - h)) / h**2
        fuv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h)
               + f(u - h, v - h)) / (4 * h**2)
        return fuu, fuv, fvv

    def jet(self, u, v):
        fu, fv = self.first(u, v)
        fuu, fuv, fvv = self.second(u, v)
        return self.point(u, v), fu, fv, fuu, fuv, fvv

    # -- orientation --------------------------------------------------------
    def orientation_sign(self):
        """Sign applied to f_u x f_v to get the chosen Euclidean normal."""
        if self.orientation == "as-parametrized":
            return 1
        if self.orientation == "reversed":
            return -1
        s = self.outward_sign if self.outward_sign is not None else self._probe_outward()
        return s if self.orientation == "outward" else -s

    def _probe_outward(self):
        (u0, u1), (v0, v1) = self.domain
        U, V = np.meshgrid(np.linspace(u0, u1, 12)[1:-1], np.linspace(v0, v1, 12)[1:-1])
        P = self.point(U, V)
        c = P.reshape(-1, 3).mean(axis=0)
        fu, fv = self.first(U, V)
        N = np.cross(fu, fv)
        s = np.sum(N * (P - c), axis=-1)
        return 1 if np.sum(np.sign(s)) >= 0 else -1

    def flipped(self):
        swap = {"outward": "inward", "inward": "outward",
                "as-parametrized": "reversed", "reversed": "as-parametrized"}
        return dataclasses.replace(self, orientation=swap[self.orientation])

    def with_orientation(self, orientation):
        return dataclasses.replace(self, orientation=orientation)

    def unit_normal(self, u, v):
        fu, fv = self.first(u, v)
        N = np.cross(fu, fv)
        r = np.linalg.norm(N, axis=-1)
        if np.any(r <= 1e-14 * np.linalg.norm(fu, axis=-1) * np.linalg.norm(fv, axis=-1)):
            raise NotImmersed("degenerate tangent vectors: f_u x f_v = 0")
        return self.orientation_sign() * N / r[..., None]

    def sample_grid(self, nu, nv, margin=0.0):
        """Cell-centred parameter grid (avoids chart seams and poles)."""
        (u0, u1), (v0, v1) = self.domain
        du, dv = (u1 - u0), (v1 - v0)
        uu = u0 + margin * du + (np.arange(nu) + 0.5) / nu * du * (1 - 2 * margin)
        vv = v0 + margin * dv + (np.arange(nv) + 0.5) / nv * dv * (1 - 2 * margin)
        return np.meshgrid(uu, vv, indexing="ij")


# ---------------------------------------------------------------------------
# helpers

def _stack(*c):
    c = np.broadcast_arrays(*[np.asarray(a, float) for a in c])
    return np.stack(c, axis=-1)


def _zeros(u):
    return np.zeros(np.shape(u) + (3,))


def sphere_param(t, p):
    """Unit vector n(theta, phi) and its derivatives up to order two."""
    st, ct, sp_, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
    n = _stack(st * cp, st * sp_, ct)
    nt = _stack(ct * cp, ct * sp_, -st)
    npp = _stack(-st * sp_, st * cp, 0 * t)
    ntt = -n
    ntp = _stack(-ct * sp_, ct * cp, 0 * t)
    nff = _stack(-st * cp, -st * sp_, 0 * t)
    return n, nt, npp, ntt, ntp, nff


def direction_to_spherical(n):
    n = normalize(n)
    t = np.arccos(np.clip(n[..., 2], -1.0, 1.0))
    p = np.mod(np.arctan2(n[..., 1], n[..., 0]), 2 * np.pi)
    return t, p


def spherical_chart(family, S, DS, D2S=None, params=None, scale=1.0, orientation="outward"):
    """Closed sphere-type chart f(theta, phi) = S(n(theta, phi)).

    ``S`` maps unit directions to surface points, ``DS`` returns its 3x3
    derivative and ``D2S(n, a, b)`` the second derivative applied to a, b.
    Without D2S the second chart derivatives are central differences of
    the analytic first ones.
    """

    def f(t, p):
        return S(sphere_param(t, p)[0])

    def d1(t, p):
        n, nt, np_, *_ = sphere_param(t, p)
        J = DS(n)
        return np.einsum("...ij,...j->...i", J, nt), np.einsum("...ij,...j->...i", J, np_)

    d2 = None
    if D2S is not None:
        def d2(t, p):
            n, nt, np_, ntt, ntp, npp = sphere_param(t, p)
            J = DS(n)

            def lin(a):
                return np.einsum("...ij,...j->...i", J, a)

            return (D2S(n, nt, nt) + lin(ntt), D2S(n, nt, np_) + lin(ntp),
                    D2S(n, np_, np_) + lin(npp))

    def pod(n):
        return direction_to_spherical(n)

    return SurfaceChart(family=family, f=f, d1=d1, d2=d2,
                        domain=((0.0, np.pi), (0.0, 2 * np.pi)), orientation=orientation,
                        closed=True, periodic=(False, True), outward_sign=1,
                        params=dict(params or {}), direction_map=S,
                        params_of_direction=pod, scale=scale)


# ---------------------------------------------------------------------------
# families

def plane(orientation="as-parametrized", domain=((-1.0, 1.0), (-1.0, 1.0))):
    return SurfaceChart(
        "plane", f=lambda u, v: _stack(u, v, 0 * u),
        d1=lambda u, v: (_stack(1 + 0 * u, 0 * u, 0 * u), _stack(0 * u, 1 + 0 * u, 0 * u)),
        d2=lambda u, v: (_zeros(u), _zeros(u), _zeros(u)),
        domain=domain, orientation=orientation, outward_sign=1)


def sphere(r=1.0, orientation="outward"):
    r = float(r)
    lin = lambda n: r * n  # noqa: E731
    return spherical_chart("sphere", lin,
                           lambda n: r * np.broadcast_to(np.eye(3), n.shape + (3,)),
                           lambda n, a, b: _zeros(n[..., 0]),
                           params={"r": r}, scale=r, orientation=orientation)


def ellipsoid(a, b, c, orientation="outward"):
    A = np.array([a, b, c], float)
    if np.any(A <= 0):
        raise InvalidArgument("ellipsoid semi-axes must be positive")
    return spherical_chart("ellipsoid", lambda n: A * n,
                           lambda n: np.broadcast_to(np.diag(A), n.shape + (3,)),
                           lambda n, x, y: _zeros(n[..., 0]),
                           params={"a": a, "b": b, "c": c}, scale=float(A.max()),
                           orientation=orientation)


def torus(R, rho, orientation="outward"):
    R, rho = float(R), float(rho)
    if not (R > rho > 0):
        raise InvalidArgument("torus needs R > rho > 0")

    def f(u, v):
        w = R + rho * np.cos(v)
        return _stack(w * np.cos(u), w * np.sin(u), rho * np.sin(v))

    def d1(u, v):
        w = R + rho * np.cos(v)
        fu = _stack(-w * np.sin(u), w * np.cos(u), 0 * u)
        fv = _stack(-rho * np.sin(v) * np.cos(u), -rho * np.sin(v) * np.sin(u), rho * np.cos(v))
        return fu, fv

    def d2(u, v):
        w = R + rho * np.cos(v)
        fuu = _stack(-w * np.cos(u), -w * np.sin(u), 0 * u)
        fuv = _stack(rho * np.sin(v) * np.sin(u), -rho * np.sin(v) * np.cos(u), 0 * u)
        fvv = _stack(-rho * np.cos(v) * np.cos(u), -rho * np.cos(v) * np.sin(u), -rho * np.sin(v))
        return fuu, fuv, fvv

    return SurfaceChart("torus", f, d1, d2, domain=((0.0, 2 * np.pi), (0.0, 2 * np.pi)),
                        orientation=orientation, closed=True, periodic=(True, True),
                        outward_sign=1, params={"R": R, "rho": rho}, scale=R + rho)


def helicoid(pitch=1.0, orientation="as-parametrized", domain=((-np.pi, np.pi), (-2.0, 2.0))):
    c = float(pitch)

    def f(u, v):
        return _stack(v * np.cos(u), v * np.sin(u), c * u)

    def d1(u, v):
        return _stack(-v * np.sin(u), v * np.cos(u), c + 0 * u), \
            _stack(np.cos(u), np.sin(u), 0 * u)

    def d2(u, v):
        return _stack(-v * np.cos(u), -v * np.sin(u), 0 * u), \
            _stack(-np.sin(u), np.cos(u), 0 * u), _zeros(u)

    return SurfaceChart("helicoid", f, d1, d2, domain=domain, orientation=orientation,
                        params={"pitch": c}, outward_sign=None)


def cylinder(r=1.0, orientation="outward", height=(-1.0, 1.0)):
    r = float(r)

    def f(u, v):
        return _stack(r * np.cos(u), r * np.sin(u), v)

    def d1(u, v):
        return _stack(-r * np.sin(u), r * np.cos(u), 0 * u), _stack(0 * u, 0 * u, 1 + 0 * u)

    def d2(u, v):
        return _stack(-r * np.cos(u), -r * np.sin(u), 0 * u), _zeros(u), _zeros(u)

    return SurfaceChart("cylinder", f, d1, d2, domain=((0.0, 2 * np.pi), tuple(height)),
                        orientation=orientation, periodic=(True, False), outward_sign=1,
                        params={"r": r}, scale=r)


def _parse_coeffs(coeffs):
    out = []
    for k, c in dict(coeffs).items():
        k = str(k)
        if len(k) != 2 or not k.isdigit():
            raise InvalidArgument(f"graph coefficient key {k!r} must be two digits 'ij'")
        out.append((int(k[0]), int(k[1]), float(c)))
    return out


def graph(coeffs, orientation="as-parametrized", domain=((-1.0, 1.0), (-1.0, 1.0))):
    """Graph z = sum c_ij x^i y^j; keys of ``coeffs`` are strings like '20'."""
    terms = _parse_coeffs(coeffs)

    def mono(x, i, d):
        # d-th derivative of x**i
        if d > i:
            return 0 * x
        k = 1.0
        for j in range(d):
            k *= i - j
        return k * x ** (i - d)

    def P(u, v, du=0, dv=0):
        return sum(c * mono(u, i, du) * mono(v, j, dv) for i, j, c in terms) + 0 * u

    def f(u, v):
        return _stack(u, v, P(u, v))

    def d1(u, v):
        return _stack(1 + 0 * u, 0 * u, P(u, v, 1, 0)), _stack(0 * u, 1 + 0 * u, P(u, v, 0, 1))

    def d2(u, v):
        z = 0 * u
        return _stack(z, z, P(u, v, 2, 0)), _stack(z, z, P(u, v, 1, 1)), _stack(z, z, P(u, v, 0, 2))

    return SurfaceChart("graph", f, d1, d2, domain=domain, orientation=orientation,
                        params={"coeffs": dict(coeffs)}, outward_sign=None)


def unit_sphere(norm, r=1.0, orientation="outward"):
    """r times the unit sphere of ``norm``, radially parametrized."""
    r = float(r)

    def S(n):
        return r * n / norm.gauge(n)[..., None]

    def DS(n):
        g = norm.gauge(n)[..., None, None]
        gr = norm.gradient(n)
        return r * (np.eye(3) / g - n[..., :, None] * gr[..., None, :] / g**2)

    def D2S(n, a, b):
        g = norm.gauge(n)[..., None]
        gr = norm.gradient(n)
        H = norm.hessian(n)
        ga = np.sum(gr * a, axis=-1)[..., None]
        gb = np.sum(gr * b, axis=-1)[..., None]
        Hab = np.einsum("...i,...ij,...j->...", a, H, b)[..., None]
        return r * (-(a * gb + b * ga) / g**2 - n * Hab / g**2 + 2 * n * ga * gb / g**3)

    return spherical_chart("unit-sphere", S, DS, D2S, params={"r": r}, scale=r,
                           orientation=orientation)


def from_function(f, domain, orientation="as-parametrized", closed=False,
                  periodic=(False, False), fd_step=1e-5, vectorized=True):
    """Chart from a python map with finite-difference derivatives."""
    if not vectorized:
        scalar_f = f

        def f(u, v):
            u, v = np.broadcast_arrays(u, v)
            out = np.array([scalar_f(a, b) for a, b in zip(u.ravel(), v.ravel())], float)
            return out.reshape(u.shape + (3,))

    return SurfaceChart("custom", f, domain=tuple(map(tuple, domain)), orientation=orientation,
                        closed=closed, periodic=tuple(periodic), outward_sign=None,
                        fd_step=fd_step)


def from_expressions(exprs, domain, orientation="as-parametrized", closed=False,
                     periodic=(False, False)):
    """Chart from sympy-parsable coordinate expressions in u, v."""
    import sympy as sp

    u, v = sp.symbols("u v", real=True)
    try:
        E = [sp.sympify(exprs[k], locals={"u": u, "v": v}) for k in ("x", "y", "z")]
    except KeyError as err:
        raise InvalidArgument(f"custom surface needs expression {err.args[0]!r}") from err
    except (sp.SympifyError, SyntaxError, TypeError) as err:
        raise InvalidArgument(f"cannot parse surface expression: {err}") from err
    for e in E:
        if e.free_symbols - {u, v}:
            raise InvalidArgument("surface expressions may only use u and v")

    def lam(exprs_):
        fns = [sp.lambdify((u, v), e, "numpy") for e in exprs_]

        def call(U, V):
            return np.stack([np.broadcast_to(np.asarray(fn(U, V), float), np.shape(U))
                             for fn in fns], axis=-1)
        return call

    f = lam(E)
    fu, fv = lam([sp.diff(e, u) for e in E]), lam([sp.diff(e, v) for e in E])
    fuu = lam([sp.diff(e, u, 2) for e in E])
    fuv = lam([sp.diff(e, u, v) for e in E])
    fvv = lam([sp.diff(e, v, 2) for e in E])
    return SurfaceChart("custom", f, lambda a, b: (fu(a, b), fv(a, b)),
                        lambda a, b: (fuu(a, b), fuv(a, b), fvv(a, b)),
                        domain=tuple(map(tuple, domain)), orientation=orientation,
                        closed=closed, periodic=tuple(periodic), outward_sign=None,
                        params={k: str(exprs[k]) for k in ("x", "y", "z")})
