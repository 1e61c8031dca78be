import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkdiff import charts
from minkdiff.errors import InvalidArgument, NotImmersed
from minkdiff.norm import Norm, fibonacci_sphere

from conftest import grid_points

ANALYTIC = {
    "sphere": charts.sphere(1.3), "ellipsoid": charts.ellipsoid(1.5, 1.0, 0.7),
    "torus": charts.torus(2.0, 0.5), "helicoid": charts.helicoid(0.8),
    "graph": charts.graph({"20": 1.0, "02": -2.0, "11": 0.3, "30": 0.2}),
    "cylinder": charts.cylinder(1.2), "plane": charts.plane(),
    "unit-sphere": charts.unit_sphere(Norm.blend(0.3), 1.5),
}


@pytest.mark.parametrize("name", sorted(ANALYTIC))
def test_first_derivatives_match_central_differences(name):
    ch = ANALYTIC[name]
    P = grid_points(ch, 4)
    u, v = P[:, 0], P[:, 1]
    h = 1e-6
    fu, fv = ch.first(u, v)
    assert np.allclose(fu, (ch.point(u + h, v) - ch.point(u - h, v)) / (2 * h), atol=1e-7)
    assert np.allclose(fv, (ch.point(u, v + h) - ch.point(u, v - h)) / (2 * h), atol=1e-7)


@pytest.mark.parametrize("name", sorted(ANALYTIC))
def test_second_derivatives_match_central_differences(name):
    ch = ANALYTIC[name]
    P = grid_points(ch, 4)
    u, v = P[:, 0], P[:, 1]
    h = 1e-5
    fuu, fuv, fvv = ch.second(u, v)
    fu_p, fv_p = ch.first(u + h, v)
    fu_m, fv_m = ch.first(u - h, v)
    _, fv_q = ch.first(u, v + h)
    _, fv_r = ch.first(u, v - h)
    assert np.allclose(fuu, (fu_p - fu_m) / (2 * h), atol=1e-6)
    assert np.allclose(fuv, (fv_p - fv_m) / (2 * h), atol=1e-6)
    assert np.allclose(fvv, (fv_q - fv_r) / (2 * h), atol=1e-6)


def test_custom_expression_chart_matches_builtin_torus():
    ex = {"x": "(2 + 0.5*cos(v))*cos(u)", "y": "(2 + 0.5*cos(v))*sin(u)", "z": "0.5*sin(v)"}
    c = charts.from_expressions(ex, ((0, 2 * np.pi), (0, 2 * np.pi)), orientation="outward")
    t = charts.torus(2.0, 0.5)
    P = grid_points(t, 5)
    for a, b in zip(c.jet(P[:, 0], P[:, 1]), t.jet(P[:, 0], P[:, 1])):
        assert np.allclose(a, b, atol=1e-12)
    # the orientation probe agrees with the built-in outward normal
    assert np.allclose(c.unit_normal(P[:, 0], P[:, 1]), t.unit_normal(P[:, 0], P[:, 1]))


def test_function_chart_finite_differences():
    c = charts.from_function(lambda u, v: np.stack([u, v, u * u - v * v], -1),
                             ((-1, 1), (-1, 1)))
    fuu, fuv, fvv = c.second(np.array([0.2]), np.array([0.1]))
    assert np.allclose(fuu, [[0, 0, 2]], atol=1e-5)
    assert np.allclose(fvv, [[0, 0, -2]], atol=1e-5)
    assert np.allclose(fuv, 0, atol=1e-5)


def test_expression_errors():
    with pytest.raises(InvalidArgument):
        charts.from_expressions({"x": "u", "y": "v"}, ((0, 1), (0, 1)))
    with pytest.raises(InvalidArgument):
        charts.from_expressions({"x": "u", "y": "v", "z": "w"}, ((0, 1), (0, 1)))


def test_sphere_outward_normal_and_pole_degeneracy():
    s = charts.sphere(2.0)
    assert np.allclose(s.unit_normal(np.array(0.4), np.array(1.0)),
                       s.point(np.array(0.4), np.array(1.0)) / 2)
    with pytest.raises(NotImmersed):
        s.unit_normal(np.array(0.0), np.array(0.0))


def test_helicoid_normal_cross_product():
    h = charts.helicoid(1.0)
    n = h.unit_normal(np.array(0.0), np.array(1.0))
    assert np.allclose(n, np.array([0.0, 1.0, -1.0]) / np.sqrt(2))


def test_plane_normal_and_flip():
    p = charts.plane()
    assert np.allclose(p.unit_normal(np.array(0.1), np.array(0.2)), [0, 0, 1])
    assert np.allclose(p.flipped().unit_normal(np.array(0.1), np.array(0.2)), [0, 0, -1])
    with pytest.raises(InvalidArgument):
        p.with_orientation("sideways")


@given(st.integers(0, 199))
@settings(max_examples=40, deadline=None)
def test_direction_map_round_trip(k):
    N = Norm.ellipsoid(2, 1, 1)
    ch = charts.unit_sphere(N)
    n = fibonacci_sphere(200)[k]
    t, p = charts.direction_to_spherical(n)
    assert np.allclose(charts.sphere_param(t, p)[0], n, atol=1e-12)
    x = ch.point(t, p)
    assert N.gauge(x) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(ch.direction_map(n), x, atol=1e-12)


def test_unit_sphere_radius_scales_points():
    N = Norm.blend(0.6)
    a, b = charts.unit_sphere(N), charts.unit_sphere(N, 2.5)
    P = grid_points(a, 3)
    assert np.allclose(b.point(P[:, 0], P[:, 1]), 2.5 * a.point(P[:, 0], P[:, 1]))
    assert b.scale == 2.5


def test_sample_grid_is_cell_centred():
    U, V = charts.plane().sample_grid(4, 2)
    assert np.allclose(U[:, 0], [-0.75, -0.25, 0.25, 0.75])
    assert np.allclose(V[0], [-0.5, 0.5])
