import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minkdiff import width
from minkdiff.errors import EpsilonTooLarge, InvalidArgument, NumericFailure
from minkdiff.norm import Norm, fibonacci_sphere, normalize

directions = st.lists(st.floats(-1, 1), min_size=3, max_size=3).map(np.array).filter(
    lambda v: np.linalg.norm(v) > 1e-2).map(normalize)


@pytest.fixture(scope="module")
def euclid_body():
    return width.make_width_body(Norm.euclidean(), 2.0, 0.05)


@pytest.fixture(scope="module")
def blend_body():
    return width.make_width_body(Norm.blend(0.3), 1.5, 0.02)


@pytest.fixture(scope="module")
def blend_ball():
    return width.make_width_body(Norm.blend(0.3), 3.0, 0.0)


def test_zero_epsilon_gives_scaled_ball(blend_ball):
    N = Norm.blend(0.3)
    n = fibonacci_sphere(40)
    assert np.allclose(blend_ball.S(n), 1.5 * N.support_points(n)[0], atol=1e-9)


def test_ball_has_width_two():
    body = width.make_width_body(Norm.ellipsoid(2, 1, 1), 2.0, 0.0)
    assert np.allclose(width.width_in_direction(body, fibonacci_sphere(100)), 2.0, atol=1e-12)


def test_width_constant_over_500_directions(euclid_body):
    n = fibonacci_sphere(500)
    assert np.max(np.abs(width.width_in_direction(euclid_body, n) - 2.0)) <= 1e-8
    assert np.max(np.abs(width.width_from_support_points(euclid_body, n) - 2.0)) <= 1e-8


def test_body_is_not_a_ball(euclid_body):
    r = np.linalg.norm(euclid_body.S(fibonacci_sphere(200)), axis=1)
    assert r.max() - r.min() > 1e-2


_BODY = width.make_width_body(Norm.euclidean(), 2.0, 0.05)


@given(directions)
@settings(max_examples=50, deadline=None)
def test_support_identity_machine_precision(n):
    s = _BODY.sigma(n[None]) + _BODY.sigma(-n[None])
    assert s[0] == pytest.approx(2.0 * Norm.euclidean().support_function(n), abs=1e-14)


def test_blend_width_constant(blend_body):
    n = fibonacci_sphere(300)
    assert np.max(np.abs(width.width_in_direction(blend_body, n) - 1.5)) <= 1e-8
    assert np.max(np.abs(width.width_from_support_points(blend_body, n) - 1.5)) <= 1e-8


def test_epsilon_too_large_reports_threshold():
    with pytest.raises(EpsilonTooLarge) as err:
        width.make_width_body(Norm.euclidean(), 2.0, 2.0)
    eps = err.value.max_epsilon
    assert 0.3 < eps < 2.0
    width.make_width_body(Norm.euclidean(), 2.0, 0.9 * eps)


def test_rejects_even_perturbation_and_bad_width():
    with pytest.raises(InvalidArgument):
        width.make_width_body(Norm.euclidean(), 2.0, 0.05, perturbation="z**2")
    with pytest.raises(InvalidArgument):
        width.make_width_body(Norm.euclidean(), -1.0)


def test_opposite_point_of_ball_is_antipode(blend_ball):
    for n in fibonacci_sphere(6):
        pair = width.opposite_point(blend_ball, n)
        assert np.allclose(pair.q, -pair.p, atol=1e-9)


def test_opposite_point_residuals(euclid_body):
    for n in (np.array([0, 0, 1.0]), np.array([1.0, 0, 0]), normalize(np.array([1, 2, -1.0]))):
        pair = width.opposite_point(euclid_body, n)
        assert pair.parallel_residual <= 1e-6 and pair.boundary_residual <= 1e-6
        assert pair.antipodal_residual <= 1e-6
        # oracle: q is the supporting point with normal -n
        assert np.allclose(pair.q, euclid_body.S(-n[None])[0], atol=1e-9)


def test_opposite_point_negative_control(euclid_body):
    # declaring the wrong width breaks the opposite-point relation
    wrong = dataclasses.replace(euclid_body,
                                spec=dataclasses.replace(euclid_body.spec, c=2.2))
    with pytest.raises(NumericFailure):
        width.opposite_point(wrong, np.array([1.0, 0, 0]))


def test_involution(euclid_body, blend_body):
    for body in (euclid_body, blend_body):
        assert np.max(width.involution_residual(body, fibonacci_sphere(20))) <= 1e-6


def test_curvature_identity_euclidean_body(euclid_body):
    res = width.width_curvature_identity(euclid_body, fibonacci_sphere(200))
    assert np.max(res["residual"]) <= 1e-4
    assert np.max(res["symmetric_residual"]) <= 1e-4
    assert np.max(res["antipodal_residual"]) <= 1e-6
    assert np.max(res["parallel_residual"]) <= 1e-6


def test_curvature_identity_blend_body(blend_body):
    res = width.width_curvature_identity(blend_body, fibonacci_sphere(60))
    assert np.max(res["residual"]) <= 1e-4


def test_scaled_ball_curvatures(blend_ball):
    rep = width.direction_report(blend_ball, fibonacci_sphere(30))
    assert np.allclose(1 / rep["lambda1"], 1.5, rtol=1e-7)
    assert np.allclose(1 / rep["lambda2"], 1.5, rtol=1e-7)


def test_umbilic_scan_ball_signature(blend_ball):
    rep = width.umbilic_scan(blend_ball, grid=100)
    assert rep["umbilics"] == rep["n_points"] and rep["sphere_signature"]


def test_umbilic_scan_perturbed_pairs(euclid_body):
    rep = width.umbilic_scan(euclid_body, grid=200)
    assert not rep["sphere_signature"]
    assert rep["all_paired"]


def test_verify_body_summary(euclid_body):
    res = width.verify_body(euclid_body, grid=300, n_pairs=50)
    assert res["convex"] and res["width_deviation_max"] <= 1e-8
    assert res["identity_residual_max"] <= 1e-4
    assert res["umbilic_pairs"] == res["umbilics"]
