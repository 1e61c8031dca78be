import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkdiff import charts, geodesy
from minkdiff.errors import HypothesisViolated, InvalidArgument
from minkdiff.norm import Norm, equivalence_constant

E = Norm.euclidean()


@pytest.fixture(scope="module")
def sphere_mesh():
    return geodesy.build_mesh(charts.sphere(1.0), E, 32)


@pytest.fixture(scope="module")
def blend_sphere():
    N = Norm.blend(0.3)
    ch = charts.unit_sphere(N)
    return ch, N, geodesy.build_mesh(ch, N, 24)


# path length


def test_segment_lengths():
    seg = np.array([[0.0, 0, 0], [3.0, 4, 0]])
    assert geodesy.path_length(seg, E) == pytest.approx(5.0)
    assert geodesy.path_length(seg, Norm.blend(0.5)) == pytest.approx(2.5 + 0.5 * 337**0.25)


def test_great_circle_quarter_polygon():
    t = np.linspace(0, np.pi / 2, 1001)
    P = np.stack([np.cos(t), np.sin(t), 0 * t], -1)
    assert geodesy.path_length(P, E) == pytest.approx(np.pi / 2, abs=1e-5)


@given(st.integers(2, 200))
@settings(max_examples=25, deadline=None)
def test_polyline_length_increases_to_arc_length(k):
    # inscribed polygons of a convex arc: refining never shortens the polyline
    N = Norm.ellipsoid(2, 1, 1)

    def poly(m):
        t = np.linspace(0, 2.0, m + 1)
        return np.stack([np.cos(t), np.sin(t), 0.3 * t], -1)

    assert geodesy.path_length(poly(k), N) <= geodesy.path_length(poly(2 * k), N) + 1e-14


# mesh


def test_mesh_edges_respect_norm_equivalence():
    N = Norm.ellipsoid(2, 1, 1)
    mesh = geodesy.build_mesh(charts.torus(2.0, 0.5), N, 20)
    lo, hi = mesh.edge_ratio_bounds()
    c = equivalence_constant(N)
    assert 1 / c - 1e-12 <= lo <= hi <= c + 1e-12


# distance


def test_sphere_antipodal_distance(sphere_mesh):
    p = np.array([0.7, 0.4])
    q = np.array(charts.direction_to_spherical(-charts.sphere_param(*p)[0]))
    r = geodesy.distance(charts.sphere(1.0), E, p, q, mesh=sphere_mesh)
    assert r.d == pytest.approx(np.pi, rel=5e-3)
    assert r.d <= r.graph_bound
    assert r.d_euclidean == pytest.approx(r.d)


def test_distance_to_self_is_zero(sphere_mesh):
    r = geodesy.distance(charts.sphere(1.0), E, np.array([1.0, 2.0]), np.array([1.0, 2.0]),
                         mesh=sphere_mesh)
    assert r.d == 0.0


def test_great_circle_distance_converges(sphere_mesh):
    a, b = np.array([1.0, 0.2]), np.array([2.5, 2.0])
    na, nb = charts.sphere_param(*a)[0], charts.sphere_param(*b)[0]
    exact = np.arccos(na @ nb)
    d128 = geodesy.distance(charts.sphere(1.0), E, a, b, mesh=sphere_mesh).d
    d512 = geodesy.distance(charts.sphere(1.0), E, a, b, mesh=sphere_mesh, segments=512).d
    assert abs(d512 - exact) < abs(d128 - exact) < 1e-4 * exact


def test_plane_and_helicoid_rulings_are_straight():
    d = geodesy.distance(charts.plane(), E, np.array([-0.8, -0.5]), np.array([0.7, 0.6]),
                         resolution=17).d
    assert d == pytest.approx(np.hypot(1.5, 1.1), rel=1e-9)
    d = geodesy.distance(charts.helicoid(1.0), E, np.array([0.3, -1.0]), np.array([0.3, 1.5]),
                         resolution=24).d
    assert d == pytest.approx(2.5, rel=1e-9)


def test_distance_symmetric(blend_sphere):
    ch, N, mesh = blend_sphere
    p, q = np.array([0.3, 0.8, -0.5]), np.array([-0.6, 0.1, 0.7])
    a = geodesy.distance(ch, N, p, q, mesh=mesh, segments=64).d
    b = geodesy.distance(ch, N, q, p, mesh=mesh, segments=64).d
    assert a == pytest.approx(b, rel=1e-6)


def test_resolution_change_within_certified_gap():
    N = Norm.blend(0.3)
    ch = charts.unit_sphere(N)
    p, q = np.array([0.3, 0.8, -0.5]), np.array([-0.6, 0.1, 0.7])
    r1 = geodesy.distance(ch, N, p, q, resolution=16, segments=64)
    r2 = geodesy.distance(ch, N, p, q, resolution=32, segments=64)
    assert abs(r1.d - r2.d) <= max(r1.certified_gap, r2.certified_gap) * r1.d


def test_ellipsoid_norm_axis_antipodes_sandwich():
    N = Norm.ellipsoid(2, 1, 1)
    ch = charts.unit_sphere(N)
    p, q = np.array([0.0, 1.0, 0.0]), np.array([0.0, -1.0, 0.0])
    r = geodesy.distance(ch, N, p, q, resolution=24)
    re = geodesy.distance(ch, E, p, q, resolution=24)
    c = 2.0
    assert r.d <= r.graph_bound
    assert re.d / c <= r.d <= c * re.d


def test_metric_sandwich_report():
    N = Norm.ellipsoid(2, 1, 1)
    ch = charts.unit_sphere(N)
    pts = [np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0.3, 0.3, 0.9])]
    rep = geodesy.metric_sandwich_check(ch, N, [(pts[0], pts[1]), (pts[1], pts[2]),
                                                (pts[2], pts[2])], resolution=24)
    assert rep["c"] == pytest.approx(2.0) and rep["violations"] == 0
    assert rep["pairs"][2]["d"] == 0.0
    rep = geodesy.metric_sandwich_check(charts.sphere(1.0), E, [(np.array([1.0, 1.0]),
                                                                 np.array([2.0, 3.0]))],
                                        resolution=24)
    row = rep["pairs"][0]
    assert rep["c"] == pytest.approx(1.0) and row["d"] == pytest.approx(row["d_e"])


def test_triangle_inequality(blend_sphere):
    ch, N, mesh = blend_sphere
    pts = np.array([[0.3, 0.8, -0.5], [-0.6, 0.1, 0.7], [0.9, -0.2, 0.1], [-0.1, -0.9, -0.3]])
    D, G = np.zeros((4, 4)), np.zeros((4, 4))
    for i in range(4):
        for j in range(i + 1, 4):
            r = geodesy.distance(ch, N, pts[i], pts[j], mesh=mesh, segments=64)
            D[i, j] = D[j, i] = r.d
            G[i, j] = G[j, i] = r.certified_gap * r.d
    for i in range(4):
        for j in range(4):
            for k in range(4):
                if len({i, j, k}) == 3:
                    assert D[i, k] <= D[i, j] + D[j, k] + 2 * max(G[i, j], G[j, k], G[i, k])


# diameter and bounds


@pytest.mark.slow
def test_sphere_diameter_scaling():
    d1 = geodesy.diameter(charts.sphere(1.0), E, resolution=32)["diameter"]
    d2 = geodesy.diameter(charts.sphere(2.0), E, resolution=32)["diameter"]
    assert d1 == pytest.approx(np.pi, rel=1e-2)
    assert d2 == pytest.approx(2 * d1, rel=1e-6)


@pytest.mark.slow
def test_bonnet_equality_and_scaling():
    res = geodesy.bonnet_check(charts.sphere(1.0), E, 1.0, resolution=32)
    assert res["bound"] == pytest.approx(np.pi) and res["pass"]
    assert res["diam_estimate"] == pytest.approx(np.pi, rel=1e-2)
    res = geodesy.bonnet_check(charts.sphere(2.0), E, 0.25, resolution=32)
    assert res["bound"] == pytest.approx(2 * np.pi) and res["pass"]


@pytest.mark.slow
def test_bonnet_on_blend_unit_sphere():
    N = Norm.blend(0.3)
    res = geodesy.bonnet_check(charts.unit_sphere(N), N, 1.0, resolution=32)
    assert res["pass"] and res["diam_estimate"] <= res["bound"]


def test_bonnet_hypothesis_gate():
    with pytest.raises(HypothesisViolated):
        geodesy.bonnet_check(charts.torus(2.0, 0.5), E, 0.1)
    with pytest.raises(HypothesisViolated):
        geodesy.bonnet_check(charts.sphere(1.0), E, 2.0)
    with pytest.raises(InvalidArgument):
        geodesy.bonnet_check(charts.sphere(1.0), E, 0.0)


@pytest.mark.slow
def test_perimeter_euclidean_equality():
    res = geodesy.perimeter(E, resolution=32, n_samples=12)
    assert res["bound"] == pytest.approx(2 * np.pi)
    assert res["rho"] == pytest.approx(2 * np.pi, rel=1e-2) and res["pass"]


@pytest.mark.slow
@pytest.mark.parametrize("N", [Norm.ellipsoid(2, 1, 1), Norm.blend(0.6)], ids=["ellipsoid", "blend6"])
def test_perimeter_bound_holds(N):
    res = geodesy.perimeter(N, resolution=32, n_samples=12)
    assert res["pass"] and res["girth"] <= res["rho"]


# closed geodesics


def test_euclidean_closed_geodesic_is_great_circle():
    loop = geodesy.closed_geodesic(E, [0.2, 0.5, 0.8], resolution=32)
    assert loop["length"] == pytest.approx(2 * np.pi, rel=1e-2)
    assert loop["smooth"]


def test_ellipsoid_norm_loop_matches_section_and_pullback():
    N = Norm.ellipsoid(2, 1, 1)
    loop = geodesy.closed_geodesic(N, [1.0, 0.4, 0.2], resolution=32)
    P = loop["path"].points
    sec = geodesy.section_length(N, P[0], P[len(P) // 8] - P[0])
    assert loop["length"] == pytest.approx(sec, rel=5e-3)
    assert geodesy.pullback_length(N, P) == pytest.approx(loop["length"], rel=1e-4)
    # the antipodal image closes the loop
    assert np.allclose(P[0], -P[len(P) // 2], atol=1e-9)
