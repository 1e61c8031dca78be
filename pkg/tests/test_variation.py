import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkdiff import charts, surface, variation
from minkdiff.errors import InvalidArgument, OrientationError
from minkdiff.norm import Norm
from minkdiff.rng import SplitMix64

E = Norm.euclidean()
NORMS = [Norm.euclidean(), Norm.ellipsoid(2, 1, 1), Norm.blend(0.3), Norm.blend(0.6)]
FULL_SPHERE = ((0.0, np.pi), (0.0, 2 * np.pi))


# area


def test_area_element_examples():
    X, Y = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    p = np.array([0.0, 0.0])
    assert variation.area_element(charts.plane(), E, p, X, Y) == pytest.approx(1.0)
    assert variation.area_element(charts.plane(), E, p, X, X) == 0.0
    assert variation.area_element(charts.plane(), E, p, Y, X) == pytest.approx(-1.0)
    # ellipsoid norm: eta on the plane is u(e3) = (0, 0, c)
    N = Norm.ellipsoid(2.0, 1.0, 0.5)
    assert variation.area_element(charts.plane(), N, p, X, Y) == pytest.approx(0.5)


def test_area_classical():
    assert variation.area(variation.DomainPatch(charts.sphere(1.0), FULL_SPHERE), E) == \
        pytest.approx(4 * np.pi, rel=1e-12)
    assert variation.area(variation.DomainPatch(charts.plane(), ((0, 1), (0, 1))), E) == \
        pytest.approx(1.0)


def test_area_self_convergence_ellipsoid_norm():
    patch = variation.DomainPatch(charts.sphere(1.0), ((0.3, 2.0), (0.5, 3.5)))
    N = Norm.ellipsoid(2, 1, 1)
    a, b = variation.area(patch, N), variation.area(patch.refined(4), N)
    assert a == pytest.approx(b, rel=1e-6)


def test_area_orientation_error():
    patch = variation.DomainPatch(charts.sphere(1.0).flipped(), ((0.3, 2.0), (0.5, 3.5)))
    with pytest.raises(OrientationError):
        variation.area(patch, E)


def test_patch_validation():
    with pytest.raises(InvalidArgument):
        variation.DomainPatch(charts.plane(), ((0, 2), (0, 1)))
    with pytest.raises(InvalidArgument):
        variation.DomainPatch(charts.plane(), ((0.5, 0.5), (0, 1)))


# first variation


def test_first_variation_unit_sphere():
    patch = variation.DomainPatch(charts.sphere(1.0), FULL_SPHERE)
    one = variation.constant(1.0)
    assert variation.first_variation_numeric(patch, E, variation.VariationSpec(one)) == \
        pytest.approx(8 * np.pi, rel=1e-7)
    assert variation.first_variation_formula(patch, E, one) == pytest.approx(8 * np.pi, rel=1e-12)


def test_first_variation_zero_field():
    patch = variation.DomainPatch(charts.torus(2.0, 0.5), ((0, 1), (0, 1)))
    zero = variation.constant(0.0)
    N = Norm.blend(0.3)
    assert variation.first_variation_numeric(patch, N, variation.VariationSpec(zero)) == 0.0
    assert variation.first_variation_formula(patch, N, zero) == 0.0


def test_first_variation_torus_ellipsoid_norm_bump():
    patch = variation.DomainPatch(charts.torus(2.0, 0.5), ((0.5, 2.5), (1.0, 3.5)), order=24)
    g = variation.bump((1.5, 2.25), (1.0, 1.25), 1.5)
    N = Norm.ellipsoid(2, 1, 1)
    num = variation.first_variation_numeric(patch, N, variation.VariationSpec(g))
    assert num == pytest.approx(variation.first_variation_formula(patch, N, g), rel=1e-4)


def test_first_variation_vanishes_on_helicoid():
    patch = variation.DomainPatch(charts.helicoid(1.0), ((-2.0, 1.5), (-1.5, 1.8)), order=24)
    g = variation.bump((0.0, 0.0), (1.5, 1.2))
    A = variation.area(patch, E)
    assert abs(variation.first_variation_formula(patch, E, g)) <= 1e-12 * A
    assert abs(variation.first_variation_numeric(patch, E, variation.VariationSpec(g))) <= 1e-6 * A


@given(st.integers(0, 10_000))
@settings(max_examples=12, deadline=None)
def test_first_variation_identity_random_triples(seed):
    rng = SplitMix64(seed)
    N = NORMS[rng.integers(0, len(NORMS))]
    ch = [charts.ellipsoid(1.5, 1.0, 0.7), charts.torus(2.0, 0.5),
          charts.graph({"20": 1.0, "02": -2.0, "11": 0.3}), charts.unit_sphere(N)][rng.integers(0, 4)]
    (u0, u1), (v0, v1) = ch.domain
    if ch.direction_map is not None:
        u0, u1 = 0.3, np.pi - 0.3
    a, c = rng.uniform(u0, u0 + 0.5 * (u1 - u0)), rng.uniform(v0, v0 + 0.5 * (v1 - v0))
    rect = ((a, a + 0.4 * (u1 - u0)), (c, c + 0.4 * (v1 - v0)))
    g = variation.polynomial({"00": 1.0, "10": rng.uniform(-1, 1), "01": rng.uniform(-1, 1)})
    patch = variation.DomainPatch(ch, rect, order=20)
    num = variation.first_variation_numeric(patch, N, variation.VariationSpec(g))
    form = variation.first_variation_formula(patch, N, g)
    A = variation.area(patch, N)
    assert abs(num - form) <= 1e-4 * max(abs(num), A / ch.scale)


def test_variation_check_expression_field():
    res = variation.variation_check(charts.torus(2.0, 0.5), Norm.blend(0.3),
                                    variation.expression("1 + 0.3*sin(u)*cos(v)"))
    assert res["rel_gap"] < 1e-4


def test_expression_rejects_unknown_symbols():
    with pytest.raises(InvalidArgument):
        variation.expression("u + w")


# b-calculus


def test_flat_chart_connection_vanishes():
    pts = np.array([[0.1, 0.2], [-0.5, 0.4]])
    conn = variation.b_connection(charts.plane(), E, pts)
    assert np.allclose(conn.christoffel, 0, atol=1e-12)


def test_sphere_christoffel_symbols_classical():
    t, p = 1.1, 0.4
    conn = variation.b_connection(charts.sphere(1.0), E, np.array([t, p]))
    G = conn.christoffel  # G[k, i, j]
    expected = np.zeros((2, 2, 2))
    expected[0, 1, 1] = -np.sin(t) * np.cos(t)
    expected[1, 0, 1] = expected[1, 1, 0] = np.cos(t) / np.sin(t)
    assert np.allclose(G, expected, atol=1e-5)


@pytest.mark.parametrize("N", NORMS, ids=["euclidean", "ellipsoid", "blend3", "blend6"])
def test_connection_compatibility_and_symmetry(N):
    pts = np.array([[0.7, 0.3], [1.4, 2.0], [2.2, 5.0]])
    conn = variation.b_connection(charts.torus(2.0, 0.5), N, pts)
    assert conn.compatibility_residual() <= 1e-5
    assert np.allclose(conn.christoffel, np.swapaxes(conn.christoffel, -1, -2))


def test_b_hessian_flat_examples():
    p = np.array([0.3, -0.2])
    affine = variation.polynomial({"00": 2.0, "10": 1.0, "01": -3.0})
    sym, _ = variation.b_hessian(charts.plane(), E, affine, p)
    assert np.allclose(sym, 0, atol=1e-12)
    sym, _ = variation.b_hessian(charts.plane(), E, variation.polynomial({"20": 1.0}), p)
    assert np.allclose(sym, [[2, 0], [0, 0]], atol=1e-12)
    harm = variation.polynomial({"20": 1.0, "02": -1.0})
    assert variation.b_laplacian(charts.plane(), E, harm, p) == pytest.approx(0, abs=1e-12)


@given(st.floats(0.2, 2.9), st.floats(0, 6.2), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=25, deadline=None)
def test_b_laplacian_linear_and_kills_constants(u, v, a, c):
    ch, N, p = charts.sphere(1.0), Norm.blend(0.3), np.array([u, v])
    conn = variation.b_connection(ch, N, p)
    f1, f2 = variation.coordinate_field(ch, 0), variation.coordinate_field(ch, 2)
    lap = variation.b_laplacian
    combo = lap(ch, N, a * f1 + c * f2, p, conn)
    assert combo == pytest.approx(a * lap(ch, N, f1, p, conn) + c * lap(ch, N, f2, p, conn),
                                  abs=1e-10)
    assert lap(ch, N, variation.constant(3.0), p, conn) == 0.0
    _, raw = variation.b_hessian(ch, N, f1, p, conn)
    assert np.linalg.norm(raw - raw.T) <= 1e-8 * np.linalg.norm(raw) + 1e-12


@pytest.mark.parametrize("N", NORMS, ids=["euclidean", "ellipsoid", "blend3", "blend6"])
def test_height_function_hessian_is_affine_form(N):
    # height measured along +eta, so hess_b(height) = +h at the base point
    ch = charts.ellipsoid(1.5, 1.0, 0.7)
    p = np.array([1.0, 2.0])
    g = variation.height_function(ch, N, p)
    sym, _ = variation.b_hessian(ch, N, g, p)
    h = surface.curvatures(ch, N, p).h
    assert np.allclose(sym, h, atol=1e-4)


def test_laplace_beltrami_euclidean_sphere_and_helicoid():
    s = charts.sphere(1.0)
    p = np.array([0.9, 0.3])
    f = variation.polynomial({"01": 0.0, "00": 0.0})  # zero field
    assert variation.b_laplacian(s, E, f, p) == 0.0
    # z = cos(theta) is an l = 1 spherical harmonic: Delta z = -2 z
    z = variation.coordinate_field(s, 2)
    assert variation.b_laplacian(s, E, z, p) == pytest.approx(-2 * np.cos(0.9), abs=1e-5)
    hel = charts.helicoid(1.0)
    for q in ([0.3, 0.5], [-1.0, 1.7], [2.0, -1.2]):
        assert np.allclose(variation.position_laplacian(hel, E, np.array(q)), 0, atol=1e-5)


@pytest.mark.parametrize("N", NORMS[:2], ids=["euclidean", "ellipsoid"])
@pytest.mark.parametrize("ch", [charts.sphere(1.0), charts.torus(2.0, 0.5)], ids=["sphere", "torus"])
def test_position_laplacian_vector_identity_quadratic_norms(N, ch):
    pts = np.array([[0.7, 1.0], [1.9, 4.0], [2.5, 2.2]])
    L = variation.position_laplacian(ch, N, pts)
    rep = surface.curvature_field(ch, N, pts[:, 0], pts[:, 1])
    target = -2 * rep.H[:, None] * rep.eta
    assert np.all(np.linalg.norm(L - target, axis=1) <= 1e-3 * np.linalg.norm(target, axis=1))


@pytest.mark.parametrize("N", NORMS, ids=["euclidean", "ellipsoid", "blend3", "blend6"])
def test_position_laplacian_eta_component_all_norms(N):
    ch = charts.torus(2.0, 0.5)
    pts = np.array([[0.7, 1.0], [1.9, 4.0], [2.5, 2.2]])
    L = variation.position_laplacian(ch, N, pts)
    rep = surface.curvature_field(ch, N, pts[:, 0], pts[:, 1])
    comp = np.sum(L * rep.xi, axis=1) / rep.eta_xi
    assert np.allclose(comp, -2 * rep.H, rtol=1e-6)


def _divergence_laplacian(ch, N, i, p, h=1e-3):
    """(1/sqrt det b) d_k (sqrt det b b^kj d_j f_i) by nested central differences."""

    def flux(q):
        rep = surface.curvatures(ch, N, q)
        b = rep.weighted_dupin
        grad = rep.tangent[i]
        return np.sqrt(np.linalg.det(b)) * np.linalg.solve(b, grad)

    e = np.eye(2)
    div = sum((flux(p + h * e[k])[k] - flux(p - h * e[k])[k]) / (2 * h) for k in range(2))
    b = surface.curvatures(ch, N, p).weighted_dupin
    return div / np.sqrt(np.linalg.det(b))


@pytest.mark.parametrize("N", [Norm.ellipsoid(2, 1, 1), Norm.blend(0.3)], ids=["ellipsoid", "blend3"])
def test_laplacian_matches_divergence_form(N):
    # independent route for non-quadratic norms, where the vector identity fails
    ch = charts.torus(2.0, 0.5)
    p = np.array([0.8, 1.3])
    L = variation.position_laplacian(ch, N, p)
    for i in range(3):
        assert L[i] == pytest.approx(_divergence_laplacian(ch, N, i, p), abs=1e-5)


# minimality


def test_minimal_residuals_helicoid():
    for q in ([0.3, 0.5], [-1.0, 1.7]):
        r = variation.minimal_residuals(charts.helicoid(1.0), E, np.array(q))
        assert r.applicable and max(r.r_H, r.r_affine, r.r_conf) <= 1e-6


def test_minimal_residuals_sphere_not_applicable():
    r = variation.minimal_residuals(charts.sphere(1.0), Norm.blend(0.3), np.array([1.0, 1.0]))
    assert r.r_H == pytest.approx(1.0) and not r.applicable
    assert np.isnan(r.r_affine) and np.isnan(r.r_conf)


def test_saddle_residuals_vanish_with_mean_curvature():
    from scipy.optimize import brentq

    ch, N = charts.graph({"20": 1.0, "02": -2.0}), Norm.blend(0.3)
    u = 0.4

    def H(v):
        return variation.minimal_residuals(ch, N, np.array([u, v])).H

    v0 = brentq(H, 0.05, 0.9, xtol=1e-14)
    r = variation.minimal_residuals(ch, N, np.array([u, v0]))
    assert r.applicable and r.r_affine <= 1e-5 and r.r_conf <= 1e-5
    far = variation.minimal_residuals(ch, N, np.array([0.0, 0.0]))
    assert abs(far.H) > 0.1 and far.r_affine > 1e-2 and far.r_conf > 1e-2


def test_minimal_scan_summary():
    res = variation.minimal_scan(charts.helicoid(1.0), E, 4, 4)
    assert res["max_abs_H"] <= 1e-12 and res["negative_K_samples"] == 16
    assert res["r_conf_stats"]["max"] <= 1e-6
