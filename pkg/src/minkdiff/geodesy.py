"""Induced length metric on a surface: distances, geodesics and global bounds.

A geodesic is found in two stages. Dijkstra on a mesh graph whose edges are
weighted by the norm of the chord gives an initial polyline and an upper
bound. The polyline is then relaxed by minimizing the discrete energy
sum ||P_{i+1} - P_i||^2 with fixed endpoints, coarse to fine, with vertices
constrained to the surface through chart coordinates. Energy minimizers of
a polyline are constant-speed length minimizers, and the energy is smooth
where the length is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.integrate import quad
from scipy.optimize import minimize
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from . import charts
from .errors import HypothesisViolated, InvalidArgument, NoPath, NumericFailure
from .norm import Norm, admissibility_scan, equivalence_constant, fibonacci_sphere, inradius, normalize, tangent_basis
from .rng import SplitMix64
from .surface import curvature_field

GRID_STENCIL = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2))
SPHERE_NEIGHBOURS = 16
ATTACH_NEIGHBOURS = 8
REFINE_SEGMENTS = 128
BOUND_SLACK = 1e-6


@dataclass
class Path:
    points: np.ndarray  # (n, 3) ambient polyline
    params: np.ndarray  # (n, 2) chart parameters (or (n, 3) unit directions)
    minkowski_length: float
    euclidean_length: float
    refined: bool = False
    iterations: int = 0
    step_norm: float = 0.0

    def reversed(self):
        return Path(self.points[::-1].copy(), self.params[::-1].copy(), self.minkowski_length,
                    self.euclidean_length, self.refined, self.iterations, self.step_norm)


@dataclass
class DistanceResult:
    d: float
    path: Path
    d_euclidean: float
    graph_bound: float
    certified_gap: float


@dataclass
class MeshGraph:
    """Surface samples with norm-weighted chord edges.

    ``coords`` are chart parameters for grid meshes and unit directions for
    sphere-type charts; ``weights`` are directed norm lengths of the edges.
    """

    chart: object
    norm: Norm
    coords: np.ndarray
    points: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    euclidean: np.ndarray
    spherical: bool
    resolution: int
    shape: tuple = ()
    _tree: object = field(default=None, repr=False)

    @property
    def n_vertices(self):
        return len(self.points)

    def matrix(self, extra_rows=(), extra_cols=(), extra_w=(), n=None):
        n = self.n_vertices if n is None else n
        r = np.concatenate([self.rows, np.asarray(extra_rows, dtype=int)])
        c = np.concatenate([self.cols, np.asarray(extra_cols, dtype=int)])
        w = np.concatenate([self.weights, np.asarray(extra_w, dtype=float)])
        return sparse.csr_matrix((w, (r, c)), shape=(n, n))

    def edge_ratio_bounds(self):
        """(min, max) of norm length over Euclidean length on the edges."""
        q = self.weights / self.euclidean
        return float(q.min()), float(q.max())

    def nearest(self, coord, k=ATTACH_NEIGHBOURS):
        """Indices of mesh vertices near a chart coordinate."""
        if self.spherical:
            _, idx = self._tree.query(normalize(coord), k=k)
            return np.atleast_1d(idx)
        nu, nv = self.shape
        (u0, u1), (v0, v1) = self.chart.domain
        pu, pv = self.chart.periodic
        su = (u1 - u0) / (nu if pu else nu - 1)
        sv = (v1 - v0) / (nv if pv else nv - 1)
        iu = int(np.floor((coord[0] - u0) / su))
        iv = int(np.floor((coord[1] - v0) / sv))
        out = []
        for a in range(iu - 1, iu + 3):
            for b in range(iv - 1, iv + 3):
                a2 = a % nu if pu else a
                b2 = b % nv if pv else b
                if 0 <= a2 < nu and 0 <= b2 < nv:
                    out.append(a2 * nv + b2)
        return np.unique(np.array(out, dtype=int))


def _edge_lengths(norm, P, rows, cols):
    D = P[cols] - P[rows]
    return norm.gauge(D), np.linalg.norm(D, axis=1)


def build_mesh(chart, norm, resolution=64, neighbours=SPHERE_NEIGHBOURS):
    """Mesh graph of a chart.

    Sphere-type charts get ``resolution**2`` Fibonacci directions joined to
    their nearest neighbours; other charts get a ``resolution x resolution``
    parameter grid with a 16-neighbour stencil, wrapped on periodic axes.
    """
    if resolution < 4:
        raise InvalidArgument("mesh resolution must be >= 4")
    if chart.direction_map is not None:
        dirs = fibonacci_sphere(resolution**2)
        P = chart.direction_map(dirs)
        tree = cKDTree(dirs)
        _, nb = tree.query(dirs, k=neighbours + 1)
        rows = np.repeat(np.arange(len(dirs)), neighbours)
        cols = nb[:, 1:].ravel()
        pairs = np.unique(np.sort(np.stack([rows, cols], 1), axis=1), axis=0)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        w, e = _edge_lengths(norm, P, rows, cols)
        return MeshGraph(chart, norm, dirs, P, rows, cols, w, e, True, resolution,
                         _tree=tree)
    (u0, u1), (v0, v1) = chart.domain
    pu, pv = chart.periodic
    uu = np.linspace(u0, u1, resolution, endpoint=not pu)
    vv = np.linspace(v0, v1, resolution, endpoint=not pv)
    U, V = np.meshgrid(uu, vv, indexing="ij")
    P = chart.point(U, V).reshape(-1, 3)
    nu, nv = U.shape
    ia, ib = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    rows, cols = [], []
    for da, db in GRID_STENCIL:
        a, b = ia + da, ib + db
        if pu:
            a = a % nu
        if pv:
            b = b % nv
        ok = (a >= 0) & (a < nu) & (b >= 0) & (b < nv)
        src = (ia * nv + ib)[ok]
        dst = (a * nv + b)[ok]
        rows += [src, dst]
        cols += [dst, src]
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    w, e = _edge_lengths(norm, P, rows, cols)
    coords = np.stack([U.ravel(), V.ravel()], 1)
    return MeshGraph(chart, norm, coords, P, rows, cols, w, e, False, resolution,
                     shape=(nu, nv))


# ---------------------------------------------------------------------------
# polylines

def path_length(points, norm):
    """Sum of norm lengths of consecutive chords."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < 2:
        raise InvalidArgument("path needs at least two 3D points")
    return float(np.sum(norm.gauge(np.diff(P, axis=0)))) if np.any(np.diff(P, axis=0)) \
        else 0.0


def _euclid_length(P):
    return float(np.sum(np.linalg.norm(np.diff(P, axis=0), axis=1)))


def _make_path(points, coords, norm, refined=False, iterations=0, step=0.0):
    P = np.asarray(points, dtype=float)
    if len(P) > 1:
        keep = np.ones(len(P), bool)
        keep[1:] = np.any(P[1:] != P[:-1], axis=1)
        P, coords = P[keep], np.asarray(coords)[keep]
    L = path_length(P, norm) if len(P) > 1 else 0.0
    E = _euclid_length(P) if len(P) > 1 else 0.0
    return Path(P, np.asarray(coords, dtype=float), L, E, refined, iterations, step)


class _Carrier:
    """Maps free vertex coordinates to surface points, with Jacobians."""

    def __init__(self, chart):
        self.chart = chart
        self.spherical = chart.direction_map is not None

    # sphere-type charts: vertex i sits at S(normalize(d_i + E_i a_i))
    def setup(self, coords):
        self.anchor = np.asarray(coords, dtype=float)
        if self.spherical:
            self.anchor = normalize(self.anchor)
            self.E = tangent_basis(self.anchor)
            return np.zeros((len(coords), 2))
        return self.anchor.copy()

    def coords(self, x):
        if self.spherical:
            return normalize(self.anchor + np.einsum("nij,nj->ni", self.E, x))
        return x

    def points(self, x):
        c = self.coords(x)
        if self.spherical:
            return self.chart.direction_map(c)
        return self.chart.point(c[:, 0], c[:, 1])

    def jacobian(self, x):
        """(n, 3, 2) derivative of the vertex points in x."""
        if not self.spherical:
            fu, fv = self.chart.first(x[:, 0], x[:, 1])
            return np.stack([fu, fv], axis=-1)
        h = 1e-6
        cols = []
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            cols.append((self.points(x + e) - self.points(x - e)) / (2 * h))
        return np.stack(cols, axis=-1)


def _unwrap(chart, coords):
    if chart.direction_map is not None:
        return coords
    c = np.array(coords, dtype=float)
    for k in range(2):
        if chart.periodic[k]:
            lo, hi = chart.domain[k]
            c[:, k] = np.unwrap(c[:, k], period=hi - lo)
    return c


def _midpoints(chart, coords):
    mid = 0.5 * (coords[1:] + coords[:-1])
    if chart.direction_map is not None:
        mid = normalize(mid)
    out = np.empty((2 * len(coords) - 1, coords.shape[1]))
    out[0::2] = coords
    out[1::2] = mid
    return out


def _resample(coords, points, norm, segments):
    """Pick graph vertices at evenly spaced arc length (keeps endpoints)."""
    if len(coords) - 1 <= segments:
        return coords
    s = np.concatenate([[0.0], np.cumsum(norm.gauge(np.diff(points, axis=0)))])
    targets = np.linspace(0.0, s[-1], segments + 1)
    idx = np.unique(np.searchsorted(s, targets).clip(0, len(s) - 1))
    idx[0], idx[-1] = 0, len(s) - 1
    return coords[np.unique(idx)]


def _relax(chart, norm, coords, maxiter=4000, gtol=1e-12):
    """Minimize the discrete energy over the interior vertices."""
    coords = np.asarray(coords, dtype=float)
    if len(coords) < 3:
        P = _carrier_points(chart, coords)
        return coords, P, 0, 0.0
    car = _Carrier(chart)
    x0 = car.setup(coords[1:-1])
    P0 = _carrier_points(chart, coords[:1])
    P1 = _carrier_points(chart, coords[-1:])
    shape = x0.shape

    def fun(xf):
        x = xf.reshape(shape)
        P = np.vstack([P0, car.points(x), P1])
        D = np.diff(P, axis=0)
        g = norm.gauge(D)
        nz = g > 0
        G = np.zeros_like(D)
        if np.any(nz):
            G[nz] = g[nz, None] * norm.gradient(D[nz])
        dP = 2.0 * (G[:-1] - G[1:])
        J = car.jacobian(x)
        grad = np.einsum("nik,ni->nk", J, dP)
        return float(np.sum(g**2)), grad.ravel()

    r = minimize(fun, x0.ravel(), jac=True, method="L-BFGS-B",
                 options={"maxiter": maxiter, "gtol": gtol, "ftol": 1e-15, "maxcor": 30})
    x = r.x.reshape(shape)
    new = np.vstack([coords[:1], car.coords(x), coords[-1:]])
    step = float(np.linalg.norm(r.x - x0.ravel()))
    return new, np.vstack([P0, car.points(x), P1]), int(r.nit), step


def _carrier_points(chart, coords):
    if chart.direction_map is not None:
        return chart.direction_map(normalize(coords))
    return chart.point(coords[:, 0], coords[:, 1])


def refine_path(chart, norm, coords, segments=REFINE_SEGMENTS, coarse=8):
    """Coarse-to-fine energy relaxation of a polyline with fixed ends."""
    coords = _unwrap(chart, np.asarray(coords, dtype=float))
    P = _carrier_points(chart, coords)
    c = _resample(coords, P, norm, coarse)
    while len(c) - 1 < coarse:
        c = _midpoints(chart, c)
    its, step = 0, 0.0
    while True:
        c, P, n_it, st = _relax(chart, norm, c)
        its += n_it
        step = st
        if len(c) - 1 >= segments:
            break
        c = _midpoints(chart, c)
    return _make_path(P, c, norm, refined=True, iterations=its, step=step)


# ---------------------------------------------------------------------------
# distance

def _coord_of(chart, p):
    """Mesh coordinate of chart parameters p (unit direction for spheres)."""
    p = np.asarray(p, dtype=float)
    if chart.direction_map is not None:
        if p.shape == (3,):
            return normalize(p)
        return charts.sphere_param(p[0], p[1])[0]
    if p.shape != (2,):
        raise InvalidArgument("surface point must be given as chart parameters (u, v)")
    return p


def graph_path(mesh, p, q):
    """Shortest mesh polyline between chart points p and q.

    Returns (coords, points, length). Endpoints are attached to nearby
    vertices by chords.
    """
    chart, norm = mesh.chart, mesh.norm
    cp, cq = _coord_of(chart, p), _coord_of(chart, q)
    Pp, Pq = _carrier_points(chart, cp[None])[0], _carrier_points(chart, cq[None])[0]
    n = mesh.n_vertices
    ap, aq = mesh.nearest(cp), mesh.nearest(cq)
    wp = norm.gauge(mesh.points[ap] - Pp)
    wq = norm.gauge(Pq - mesh.points[aq])
    direct = float(norm.gauge((Pq - Pp)[None])[0])
    rows = [np.full(len(ap), n), aq, [n]]
    cols = [ap, np.full(len(aq), n + 1), [n + 1]]
    # the direct chord is only used when the two points share attachments
    use_direct = len(np.intersect1d(ap, aq)) > 0
    ws = [wp, wq, [direct if use_direct else np.inf]]
    if not use_direct:
        rows, cols, ws = rows[:2], cols[:2], ws[:2]
    M = mesh.matrix(np.concatenate(rows), np.concatenate(cols), np.concatenate(ws), n=n + 2)
    dist, pred = dijkstra(M, directed=True, indices=n, return_predecessors=True)
    if not np.isfinite(dist[n + 1]):
        raise NoPath("target not reachable on the mesh graph")
    seq = [n + 1]
    while seq[-1] != n:
        seq.append(int(pred[seq[-1]]))
    seq = seq[::-1][1:-1]
    coords = np.vstack([cp[None], mesh.coords[seq], cq[None]]) if seq else np.vstack([cp, cq])
    points = np.vstack([Pp[None], mesh.points[seq], Pq[None]]) if seq else np.vstack([Pp, Pq])
    return coords, points, float(dist[n + 1])


def distance(chart, norm, p, q, resolution=64, mesh=None, segments=REFINE_SEGMENTS):
    """Induced distance between chart points p and q.

    The result never exceeds the mesh bound: the refined polyline is kept
    only when it is shorter.
    """
    mesh = mesh if mesh is not None else build_mesh(chart, norm, resolution)
    cp, cq = _coord_of(chart, p), _coord_of(chart, q)
    Pp = _carrier_points(chart, cp[None])[0]
    Pq = _carrier_points(chart, cq[None])[0]
    if np.array_equal(Pp, Pq):
        path = Path(Pp[None], cp[None], 0.0, 0.0, refined=True)
        return DistanceResult(0.0, path, 0.0, 0.0, 0.0)
    coords, points, bound = graph_path(mesh, p, q)
    gpath = _make_path(points, coords, norm)
    try:
        rpath = refine_path(chart, norm, coords, segments=segments)
    except (NumericFailure, FloatingPointError):
        rpath = None
    best = rpath if rpath is not None and rpath.minkowski_length <= gpath.minkowski_length \
        else gpath
    d = best.minkowski_length
    gap = (gpath.minkowski_length - d) / d if d > 0 else 0.0
    return DistanceResult(d, best, best.euclidean_length, gpath.minkowski_length, gap)


def metric_sandwich_check(chart, norm, pairs, resolution=48, c=None, rtol=1e-3):
    """Check |.|_e-distance / c <= d <= c |.|_e-distance for each pair.

    ``rtol`` absorbs the discretization of both distances.
    """
    c = equivalence_constant(norm) if c is None else float(c)
    euc = Norm.euclidean()
    mesh = build_mesh(chart, norm, resolution)
    mesh_e = build_mesh(chart, euc, resolution)
    rows = []
    for p, q in pairs:
        d = distance(chart, norm, p, q, mesh=mesh).d
        de = distance(chart, euc, p, q, mesh=mesh_e).d
        lo_ok = de / c <= d * (1 + rtol) + 1e-12
        hi_ok = d <= c * de * (1 + rtol) + 1e-12
        rows.append({"p": list(map(float, p)), "q": list(map(float, q)), "d": d, "d_e": de,
                     "lower": de / c, "upper": c * de, "ok": bool(lo_ok and hi_ok)})
    return {"c": c, "pairs": rows, "violations": sum(not r["ok"] for r in rows)}


# ---------------------------------------------------------------------------
# diameter and bounds

def _farthest(mesh, sources):
    D = dijkstra(mesh.matrix(), directed=True, indices=sources)
    return np.atleast_2d(D)


def diameter(chart, norm, n_samples=16, resolution=48, seed=0, mesh=None, refine_top=3):
    """Sampled lower estimate of sup d(p, q), with the witness pair.

    Seeded sample vertices start a double sweep (farthest vertex, then the
    farthest from that); the best few graph pairs are refined.
    """
    mesh = mesh if mesh is not None else build_mesh(chart, norm, resolution)
    rng = SplitMix64(seed)
    n = mesh.n_vertices
    starts = np.array(sorted({rng.integers(0, n) for _ in range(n_samples)}))
    D = _farthest(mesh, starts)
    far = np.argmax(np.where(np.isfinite(D), D, -1), axis=1)
    D2 = _farthest(mesh, far)
    far2 = np.argmax(np.where(np.isfinite(D2), D2, -1), axis=1)
    gvals = D2[np.arange(len(far)), far2]
    cand = []
    for k in np.argsort(-gvals, kind="stable"):
        pair = (int(far[k]), int(far2[k]))
        if pair not in cand and pair[::-1] not in cand:
            cand.append(pair)
        if len(cand) >= refine_top:
            break
    best = None
    for a, b in cand:
        r = distance(chart, norm, _mesh_param(mesh, a), _mesh_param(mesh, b), mesh=mesh)
        if best is None or r.d > best[0].d:
            best = (r, a, b)
    r, a, b = best
    return {"diameter": r.d, "witness": (mesh.points[a].tolist(), mesh.points[b].tolist()),
            "graph_diameter": float(gvals.max()), "lower_bound": True, "result": r}


def _mesh_param(mesh, i):
    return mesh.coords[i]


def curvature_scan(chart, norm, n=(24, 48), margin=0.0):
    U, V = chart.sample_grid(n[0], n[1], margin=margin)
    rep = curvature_field(chart, norm, U.ravel(), V.ravel())
    return rep


def bonnet_check(chart, norm, epsilon, resolution=48, n_samples=16, seed=0,
                 scan=(24, 48), admissibility=None, rtol=1e-6):
    """Sampled diameter against the curvature-based upper bound.

    The hypothesis K >= epsilon is verified on a parameter grid first; the
    bound is pi / (c sqrt(m epsilon)) with c the inradius of the unit ball
    and m the minimum curvature of its boundary.
    """
    if epsilon <= 0:
        raise InvalidArgument("epsilon must be positive")
    rep = curvature_scan(chart, norm, scan)
    kmin = float(np.min(rep.K))
    if kmin < epsilon * (1 - rtol):
        raise HypothesisViolated(f"curvature scan found K = {kmin:.6g} < epsilon = {epsilon:g}")
    adm = admissibility if admissibility is not None else admissibility_scan(norm)
    c = inradius(norm)
    bound = np.pi / (c * np.sqrt(adm.m * epsilon))
    dia = diameter(chart, norm, n_samples=n_samples, resolution=resolution, seed=seed)
    est = dia["diameter"]
    return {"diam_estimate": est, "bound": float(bound), "pass": bool(est <= bound * (1 + BOUND_SLACK)),
            "K_min": kmin, "m": adm.m, "c": c, "witness": dia["witness"]}


def _antipodal_candidates(norm, n_samples):
    dirs = fibonacci_sphere(2 * n_samples)
    return dirs[dirs[:, 2] >= 0][:n_samples] if n_samples > 0 else dirs


def perimeter(norm, resolution=48, n_samples=24, refine_top=3, admissibility=None):
    """Twice the largest sampled distance between antipodal points of the unit sphere.

    The bound 2 pi / sqrt(m) assumes the Euclidean structure is rescaled so
    the inradius is 1; without rescaling it reads 2 pi / (r_in sqrt(m)).
    Twice the smallest sampled antipodal distance is reported as ``girth``.
    """
    chart = charts.unit_sphere(norm)
    mesh = build_mesh(chart, norm, resolution)
    dirs = _antipodal_candidates(norm, n_samples)
    src = np.array([mesh.nearest(d, k=1)[0] for d in dirs])
    # antipodal vertex of a Fibonacci vertex is the nearest vertex to -d
    D = dijkstra(mesh.matrix(), directed=True, indices=src)
    tgt = np.array([mesh.nearest(-mesh.coords[s], k=1)[0] for s in src])
    g = D[np.arange(len(src)), tgt]
    order = np.argsort(-g, kind="stable")
    picks = list(order[:refine_top]) + [int(order[-1])]
    vals = {}
    for k in dict.fromkeys(int(i) for i in picks):
        d = mesh.coords[src[k]]
        vals[k] = distance(chart, norm, d, -d, mesh=mesh).d
    # refinement can reorder the graph ranking, so both ends use all refined values
    dmax, dmin = max(vals.values()), min(vals.values())
    adm = admissibility if admissibility is not None else admissibility_scan(norm)
    r_in = inradius(norm)
    bound = 2 * np.pi / (r_in * np.sqrt(adm.m))
    rho = 2 * dmax
    return {"rho": rho, "bound": float(bound), "pass": bool(rho <= bound * (1 + BOUND_SLACK)),
            "girth": 2 * dmin, "m": adm.m, "inradius": r_in, "rescaled_m": adm.m * r_in**2}


# ---------------------------------------------------------------------------
# closed geodesics on the unit sphere

def _end_tangent(P, at_start):
    """Second-order one-sided tangent of a uniformly sampled polyline."""
    if at_start:
        return -3 * P[0] + 4 * P[1] - P[2]
    return 3 * P[-1] - 4 * P[-2] + P[-3]


def dupin_angle(norm, q, a, b):
    """Angle between tangent vectors a, b at q on the unit sphere, in the Dupin metric."""
    n = normalize(norm.gradient(q))
    W, E = norm.sphere_shape(q, n)
    A, B = E.T @ a, E.T @ b
    W = 0.5 * (W + W.T)
    c = A @ W @ B / np.sqrt((A @ W @ A) * (B @ W @ B))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def closed_geodesic(norm, p, resolution=48, segments=REFINE_SEGMENTS, tol=1e-2):
    """Geodesic from p to -p on the unit sphere closed up by its antipodal image.

    ``p`` is a direction; the loop starts at the unit-sphere point in that
    direction. The junction defect is the Dupin-metric angle between the
    incoming and outgoing tangents at -p and at p.
    """
    chart = charts.unit_sphere(norm)
    d = normalize(np.asarray(p, dtype=float))
    res = distance(chart, norm, d, -d, resolution=resolution, segments=segments)
    arc = res.path
    P = arc.points
    loop = np.vstack([P, -P[1:]])
    coords = np.vstack([arc.params, -arc.params[1:]])
    path = _make_path(loop, coords, norm, refined=arc.refined, iterations=arc.iterations)
    t_start, t_end = _end_tangent(P, True), _end_tangent(P, False)
    defect_q = dupin_angle(norm, P[-1], t_end, -t_start)
    defect_p = dupin_angle(norm, P[0], -t_end, t_start)
    defect = max(defect_p, defect_q)
    return {"path": path, "length": path.minkowski_length, "junction_defect": defect,
            "smooth": bool(defect <= tol), "half_length": arc.minkowski_length}


def section_length(norm, a, b, n=None):
    """Norm length of the central section of the unit sphere in span(a, b)."""
    e1 = normalize(np.asarray(a, float))
    e2 = np.asarray(b, float) - (np.asarray(b, float) @ e1) * e1
    e2 = normalize(e2)

    def speed(t):
        w = np.cos(t) * e1 + np.sin(t) * e2
        g = norm.gauge(w[None])[0]
        dg = norm.gradient(w[None])[0]
        dw = -np.sin(t) * e1 + np.cos(t) * e2
        vel = dw / g - w * (dg @ dw) / g**2
        return norm.gauge(vel[None])[0]

    val, _ = quad(speed, 0.0, 2 * np.pi, limit=200, epsabs=1e-12, epsrel=1e-12)
    return float(val)


def pullback_length(norm, points):
    """Loop length measured on the round sphere through the Finsler pullback.

    Points of the unit sphere are sent to their Euclidean normals n; a
    displacement w on the round sphere has length ||du_n w||, with du the
    differential of the inverse Gauss map of the unit sphere.
    """
    P = np.asarray(points, dtype=float)
    n = normalize(norm.gradient(P))
    total = 0.0
    for i in range(len(P) - 1):
        m = normalize(n[i] + n[i + 1])
        w = n[i + 1] - n[i]
        w = w - (w @ m) * m
        q, _, _ = norm.support_points(m[None], tol=norm.geometry_tol)
        W, E = norm.sphere_shape(q, m[None])
        du = E[0] @ np.linalg.solve(W[0], E[0].T @ w)
        total += float(norm.gauge(du[None])[0])
    return total
