"""Pointwise curvature of immersed surfaces in a normed space.

The Birkhoff normal is eta = u(xi), with xi the Euclidean unit normal and u the
support map of the norm's unit ball. Its differential is assembled by the
chain rule d(eta) = du o d(xi) and expressed in the chart basis {f_u, f_v};
all 2x2 arrays below use that basis, with columns holding the coordinates of
the image of f_u and f_v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NotAdmissible, NotImmersed, NumericFailure, OrientationError

ZERO_CURVATURE = 1e-9
IMAG_TOL = 1e-7


@dataclass
class CurvatureReport:
    """Curvature data at one point, or stacked over a sample grid."""

    params: np.ndarray
    point: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    deta: np.ndarray
    dxi: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    directions: np.ndarray  # columns: principal directions in chart coords
    K: np.ndarray
    H: np.ndarray
    Ke: np.ndarray  # Euclidean Gaussian curvature, classical formula
    He: np.ndarray  # Euclidean mean curvature, tr(d xi)/2
    h: np.ndarray
    dupin: np.ndarray
    weighted_dupin: np.ndarray
    first_form: np.ndarray
    eta_xi: np.ndarray  # <eta, xi>
    sphere_curvature: np.ndarray  # Euclidean K of the unit sphere at eta
    tangent: np.ndarray  # (..., 3, 2) columns f_u, f_v

    def __getitem__(self, idx):
        return CurvatureReport(**{k: np.asarray(getattr(self, k))[idx]
                                  for k in self.__dataclass_fields__})


def _cross(a, b):
    return np.cross(a, b)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _inv2(M):
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1]
    out[..., 1, 1] = M[..., 0, 0]
    out[..., 0, 1] = -M[..., 0, 1]
    out[..., 1, 0] = -M[..., 1, 0]
    return out / det[..., None, None]


def _det2(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def real_eigenvalues(M, imag_tol=IMAG_TOL):
    """Eigenvalues (descending) of 2x2 arrays via the trace/det quadratic.

    Small negative discriminants are rounding noise and are clipped; an
    imaginary part above ``imag_tol`` times the spectral radius raises.
    """
    half_tr = 0.5 * (M[..., 0, 0] + M[..., 1, 1])
    # ((a - d)/2)^2 + bc avoids the cancellation in tr^2/4 - det at umbilics
    disc = (0.5 * (M[..., 0, 0] - M[..., 1, 1]))**2 + M[..., 0, 1] * M[..., 1, 0]
    rad = np.abs(half_tr) + np.sqrt(np.abs(disc))
    bad = disc < -(imag_tol * np.maximum(rad, 1e-300)) ** 2
    if np.any(bad):
        raise NumericFailure("complex principal curvatures: dη has non-real spectrum",
                             residual=float(np.max(np.sqrt(-disc[bad]))))
    s = np.sqrt(np.maximum(disc, 0.0))
    return half_tr + s, half_tr - s


def _eigvecs(M, lam):
    """Unit (Euclidean in chart coords) eigenvectors for eigenvalues lam."""
    a = M[..., 0, 0] - lam
    b = M[..., 0, 1]
    c = M[..., 1, 0]
    d = M[..., 1, 1] - lam
    v1 = np.stack([b, -a], axis=-1)
    v2 = np.stack([d, -c], axis=-1)
    use2 = np.linalg.norm(v2, axis=-1) > np.linalg.norm(v1, axis=-1)
    v = np.where(use2[..., None], v2, v1)
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    # umbilic: any direction
    fallback = np.zeros_like(v)
    fallback[..., 0] = 1.0
    return np.where(nv > 1e-14, v / np.where(nv > 0, nv, 1), fallback)


def curvature_field(chart, norm, u, v):
    """Full curvature data on arrays of parameters (vectorized)."""
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    P, fu, fv, fuu, fuv, fvv = chart.jet(u, v)
    N = _cross(fu, fv)
    r = np.linalg.norm(N, axis=-1)
    if np.any(r <= 1e-14 * np.linalg.norm(fu, axis=-1) * np.linalg.norm(fv, axis=-1)):
        raise NotImmersed("chart is not immersed at a sampled point (f_u x f_v = 0)")
    s = chart.orientation_sign()
    nhat = N / r[..., None]
    xi = s * nhat
    Nu = _cross(fuu, fv) + _cross(fu, fuv)
    Nv = _cross(fuv, fv) + _cross(fu, fvv)
    xi_u = s * (Nu - nhat * _dot(nhat, Nu)[..., None]) / r[..., None]
    xi_v = s * (Nv - nhat * _dot(nhat, Nv)[..., None]) / r[..., None]

    eta, _, _ = norm.support_points(xi, tol=norm.geometry_tol)
    W, E = norm.sphere_shape(eta, xi)
    W = 0.5 * (W + np.swapaxes(W, -1, -2))
    evW = np.linalg.eigvalsh(W)
    if np.any(evW[..., 0] <= 0):
        raise NotAdmissible("unit sphere not strictly convex at a Birkhoff normal")
    du3 = np.einsum("...ia,...ab,...jb->...ij", E, _inv2(W), E)
    dinv3 = np.einsum("...ia,...ab,...jb->...ij", E, W, E)
    eta_u = np.einsum("...ij,...j->...i", du3, xi_u)
    eta_v = np.einsum("...ij,...j->...i", du3, xi_v)

    J = np.stack([fu, fv], axis=-1)
    G = np.einsum("...ia,...ib->...ab", J, J)
    Ginv = _inv2(G)

    def coords(w):
        return np.einsum("...ab,...ib,...i->...a", Ginv, J, w)

    deta = np.stack([coords(eta_u), coords(eta_v)], axis=-1)
    dxi = np.stack([coords(xi_u), coords(xi_v)], axis=-1)
    K = _det2(deta)
    H = 0.5 * (deta[..., 0, 0] + deta[..., 1, 1])
    lam1, lam2 = real_eigenvalues(deta)
    dirs = np.stack([_eigvecs(deta, lam1), _eigvecs(deta, lam2)], axis=-1)

    II = np.stack([np.stack([_dot(fuu, xi), _dot(fuv, xi)], -1),
                   np.stack([_dot(fuv, xi), _dot(fvv, xi)], -1)], -2)
    Ke = _det2(II) / _det2(G)
    He = 0.5 * (dxi[..., 0, 0] + dxi[..., 1, 1])
    eta_xi = _dot(eta, xi)
    h = II / eta_xi[..., None, None]
    dupin = np.einsum("...ia,...ij,...jb->...ab", J, dinv3, J)
    dupin = 0.5 * (dupin + np.swapaxes(dupin, -1, -2))
    return CurvatureReport(
        params=np.stack([u, v], axis=-1), point=P, xi=xi, eta=eta, deta=deta, dxi=dxi,
        lambda1=lam1, lambda2=lam2, directions=dirs, K=K, H=H, Ke=Ke, He=He, h=h,
        dupin=dupin, weighted_dupin=dupin / eta_xi[..., None, None], first_form=G,
        eta_xi=eta_xi, sphere_curvature=_det2(W), tangent=J)


def _pt(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise InvalidArgument("point must be chart parameters (u, v)")
    return p


def curvatures(chart, norm, p):
    """CurvatureReport at chart parameters p = (u, v)."""
    u, v = _pt(p)
    return curvature_field(chart, norm, np.array([u]), np.array([v]))[0]


def euclid_normal(chart, p):
    u, v = _pt(p)
    return chart.unit_normal(np.array(u), np.array(v))


def birkhoff_normal(chart, norm, p):
    xi = euclid_normal(chart, p)
    q, _, _ = norm.support_points(xi, tol=norm.geometry_tol)
    return q


def shape_operator(chart, norm, p):
    """dη at p as a 2x2 array in the chart basis."""
    return curvatures(chart, norm, p).deta


def _tangent_coords(rep, V):
    V = np.asarray(V, dtype=float)
    if V.shape == (2,):
        a = V
    elif V.shape == (3,):
        J = rep.tangent
        a = np.linalg.solve(J.T @ J, J.T @ V)
    else:
        raise InvalidArgument("tangent vector must have 2 (chart) or 3 (ambient) components")
    if np.linalg.norm(a) == 0:
        raise InvalidArgument("normal_curvature: V must be non-zero")
    return a


def normal_curvature(chart, norm, p, V, report=None):
    """<du^{-1} V, dη V> / <du^{-1} V, V>; V in chart coords or ambient."""
    rep = report if report is not None else curvatures(chart, norm, p)
    a = _tangent_coords(rep, V)
    D = rep.dupin
    return float(a @ D @ (rep.deta @ a) / (a @ D @ a))


def affine_fundamental_form(chart, norm, p):
    rep = curvatures(chart, norm, p)
    if rep.eta_xi <= 0:
        raise OrientationError("<eta, xi> <= 0; flip the orientation")
    return rep.h


def dupin_metrics(chart, norm, p):
    rep = curvatures(chart, norm, p)
    for M in (rep.dupin, rep.weighted_dupin):
        if np.linalg.eigvalsh(M)[0] <= 0:
            raise NotAdmissible("Dupin metric not positive definite", location=p)
    return rep.dupin, rep.weighted_dupin


def _sign(x, tol):
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def sign_agreement(chart, norm, p, zero_tol=ZERO_CURVATURE):
    """(sign K, sign K_e, agree) with |.| <= zero_tol*scale^-2 counted as zero."""
    rep = curvatures(chart, norm, p)
    tol = zero_tol / chart.scale**2
    sk, se = _sign(float(rep.K), tol), _sign(float(rep.Ke), tol)
    return sk, se, sk == se


def flat_directions(chart, norm, p, tol=1e-7):
    """Kernel of dη at p with the matching |dξ X| residuals.

    Returns a list of (X, residual) with X an ambient unit tangent vector and
    residual = |dξ X|. Empty when dη is invertible.
    """
    rep = curvatures(chart, norm, p)
    scale = max(1.0 / chart.scale, 1e-300)
    # singular values measured in an orthonormal tangent frame
    J = rep.tangent
    Q, R = np.linalg.qr(J)
    A = R @ rep.deta @ np.linalg.inv(R)
    _, sv, Vt = np.linalg.svd(A)
    out = []
    for k in range(2):
        if sv[k] <= tol * scale:
            X = Q @ Vt[k]
            a = np.linalg.solve(R, Vt[k])
            dxiX = J @ (rep.dxi @ a)
            out.append((X, float(np.linalg.norm(dxiX))))
    return out


def curvature_table(chart, norm, nu, nv, zero_tol=ZERO_CURVATURE):
    """Per-sample columns u, v, x, y, z, K, H, lambda1, lambda2, Ke, sign_agree."""
    U, V = chart.sample_grid(nu, nv, margin=0.02 if chart.direction_map is not None else 0.0)
    rep = curvature_field(chart, norm, U.ravel(), V.ravel())
    tol = zero_tol / chart.scale**2

    def sgn(x):
        return np.where(np.abs(x) <= tol, 0, np.sign(x))

    return {"u": U.ravel(), "v": V.ravel(), "x": rep.point[:, 0], "y": rep.point[:, 1],
            "z": rep.point[:, 2], "K": rep.K, "H": rep.H, "lambda1": rep.lambda1,
            "lambda2": rep.lambda2, "Ke": rep.Ke,
            "sign_agree": (sgn(rep.K) == sgn(rep.Ke)).astype(int)}
