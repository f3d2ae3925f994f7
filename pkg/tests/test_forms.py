import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geovol.checks import RandomFormSpec, random_polynomial_form
from geovol.forms import (ChartDomain, ChartError, DegreeError, KForm, Point, ScalarField, SmoothMap,
                          TopDegreeWarning, VectorFieldRepr, central_difference, constant_form,
                          coordinate_form, evaluate_pairing, ext_d, identity_map, interior,
                          lie_derivative, multi_indices, permutation_sign, pullback, wedge, wedge_power)

from helpers import CUBE3

CUBE4 = ChartDomain("cube4", ("a", "b", "c", "d"), ((-1.0, 1.0),) * 4)
PTS3 = CUBE3.sample(25, seed=11)


def poly(dim, degree, seed, chart=None):
    return random_polynomial_form(RandomFormSpec(dim, degree, 2, seed=seed), chart or CUBE3)


coeff_vectors = st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3)


def test_multi_indices_and_signs():
    assert multi_indices(4, 2) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    assert multi_indices(3, 0) == ((),)
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([2, 0, 1]) == 1
    assert permutation_sign([0, 0, 1]) == 0


def test_chart_validation_and_points():
    with pytest.raises(ValueError):
        ChartDomain("bad", ("x",), ((1.0, 0.0),))
    with pytest.raises(ValueError):
        ChartDomain("bad", ("x", "y"), ((0.0, 1.0),))
    p = CUBE3.point(0.1, 0.2, 0.3)
    assert np.allclose(np.asarray(p), [0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        Point(CUBE3, (2.0, 0.0, 0.0))
    s = CUBE3.sample(100, seed=1)
    assert s.shape == (100, 3) and np.all(CUBE3.contains(s))
    assert np.array_equal(s, CUBE3.sample(100, seed=1))


def test_degree_bounds():
    with pytest.raises(DegreeError):
        constant_form(CUBE3, 4, [])
    z = KForm.zero(CUBE3, 5)
    assert z(PTS3).shape == (25, 0)


def test_coordinate_form_sign():
    dydx = coordinate_form(CUBE3, "y", "x")
    assert dydx.components(np.zeros(3)) == {("x", "y"): -1.0, ("x", "z"): 0.0, ("y", "z"): 0.0}


@given(coeff_vectors, coeff_vectors)
def test_wedge_of_one_forms_is_antisymmetric(u, v):
    a, b = constant_form(CUBE3, 1, u), constant_form(CUBE3, 1, v)
    x = np.zeros(3)
    assert np.allclose(wedge(a, b)(x), -wedge(b, a)(x), atol=1e-12)
    assert np.allclose(wedge(a, a)(x), 0.0, atol=1e-12)
    # components of u ^ v are the 2x2 minors of the cross product, in index order
    cross = np.cross(u, v)
    assert np.allclose(wedge(a, b)(x), [cross[2], -cross[1], cross[0]], atol=1e-9)


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_wedge_associative(seed):
    a, b, c = (poly(4, 1, seed + i, CUBE4) for i in range(3))
    x = CUBE4.sample(5, seed=seed)
    assert np.allclose(wedge(wedge(a, b), c)(x), wedge(a, wedge(b, c))(x), atol=1e-9)


@given(st.integers(0, 10_000), st.integers(0, 2))
@settings(max_examples=25, deadline=None)
def test_d_squared_vanishes(seed, k):
    w = poly(4, k, seed, CUBE4)
    x = CUBE4.sample(6, seed=seed)
    # analytic gradients: d(d w) uses the Hessian exactly
    assert np.max(np.abs(ext_d(ext_d(w))(x))) < 1e-9


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_leibniz_rule(seed):
    a, b = poly(3, 1, seed), poly(3, 1, seed + 7)
    lhs = ext_d(wedge(a, b))
    rhs = wedge(ext_d(a), b) - wedge(a, ext_d(b))
    assert np.allclose(lhs(PTS3), rhs(PTS3), atol=1e-9)


def test_d_of_function_is_gradient():
    f = ScalarField(CUBE3, lambda x: np.sin(x[..., 0]) * x[..., 1] ** 2)
    df = ext_d(f)
    x = PTS3
    want = np.stack([np.cos(x[:, 0]) * x[:, 1] ** 2, 2 * np.sin(x[:, 0]) * x[:, 1], 0 * x[:, 0]], axis=-1)
    assert np.allclose(df(x), want, atol=1e-8)


def test_top_degree_d_warns_and_is_zero():
    vol = constant_form(CUBE3, 3, [2.0])
    with pytest.warns(TopDegreeWarning):
        dv = ext_d(vol)
    assert dv.degree == 4 and dv(PTS3).shape == (25, 0)


def test_wedge_beyond_dimension_raises():
    with pytest.raises(DegreeError):
        wedge(constant_form(CUBE3, 2, [1, 0, 0]), constant_form(CUBE3, 2, [1, 0, 0]))


def test_chart_mismatch_raises():
    other = ChartDomain("other", ("x", "y", "z"), ((-1.0, 1.0),) * 3)
    with pytest.raises(ChartError):
        wedge(constant_form(CUBE3, 1, [1, 0, 0]), constant_form(other, 1, [1, 0, 0]))


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_interior_is_antiderivation(seed):
    a, b = poly(3, 1, seed), poly(3, 1, seed + 3)
    v = np.array([0.3, -1.2, 0.7])
    X = VectorFieldRepr(CUBE3, lambda x: np.broadcast_to(v, x.shape))
    lhs = interior(X, wedge(a, b))(PTS3)
    aX, bX = interior(X, a).scalar(PTS3), interior(X, b).scalar(PTS3)
    rhs = aX[:, None] * b(PTS3) - bX[:, None] * a(PTS3)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_pairing_of_basis_forms():
    e = [VectorFieldRepr(CUBE3, lambda x, i=i: np.broadcast_to(np.eye(3)[i], x.shape)) for i in range(3)]
    dxdy = coordinate_form(CUBE3, "x", "y")
    assert evaluate_pairing(dxdy, [e[0], e[1]], np.zeros(3)) == 1.0
    assert evaluate_pairing(dxdy, [e[1], e[0]], np.zeros(3)) == -1.0
    vol = coordinate_form(CUBE3, "x", "y", "z")
    assert evaluate_pairing(vol, e, np.zeros(3)) == 1.0


@given(st.integers(0, 10_000), st.integers(0, 2))
@settings(max_examples=20, deadline=None)
def test_lie_derivative_along_coordinate_field(seed, axis):
    # the flow of d/dx_i is translation, so L_X w differentiates coefficients in x_i
    w = poly(3, 1, seed)
    X = VectorFieldRepr(CUBE3, lambda x: np.broadcast_to(np.eye(3)[axis], x.shape),
                        lambda x: np.zeros(x.shape + (3,)))
    assert np.allclose(lie_derivative(X, w)(PTS3), w.jacobian(PTS3)[..., axis], atol=1e-9)


def test_lie_derivative_of_function_and_top_form():
    X = VectorFieldRepr(CUBE3, lambda x: x, lambda x: np.broadcast_to(np.eye(3), x.shape + (3,)))
    f = ScalarField(CUBE3, lambda x: x[..., 0] * x[..., 1], lambda x: np.stack([x[..., 1], x[..., 0], 0 * x[..., 0]], -1))
    assert np.allclose(lie_derivative(X, f).scalar(PTS3), 2 * PTS3[:, 0] * PTS3[:, 1])
    vol = coordinate_form(CUBE3, "x", "y", "z")
    # radial field has divergence 3
    assert np.allclose(lie_derivative(X, vol)(PTS3), 3.0)


def _polar():
    plane = ChartDomain("polar", ("r", "t"), ((0.1, 2.0), (0.0, 2 * math.pi)))
    xy = ChartDomain("xy", ("x", "y"), ((-3.0, 3.0),) * 2)

    def F(u):
        return np.stack([u[..., 0] * np.cos(u[..., 1]), u[..., 0] * np.sin(u[..., 1])], -1)

    def J(u):
        r, t = u[..., 0], u[..., 1]
        return np.stack([np.stack([np.cos(t), -r * np.sin(t)], -1), np.stack([np.sin(t), r * np.cos(t)], -1)], -2)

    def H(u):
        r, t = u[..., 0], u[..., 1]
        out = np.zeros(u.shape[:-1] + (2, 2, 2))
        out[..., 0, 0, 1] = out[..., 0, 1, 0] = -np.sin(t)
        out[..., 0, 1, 1] = -r * np.cos(t)
        out[..., 1, 0, 1] = out[..., 1, 1, 0] = np.cos(t)
        out[..., 1, 1, 1] = -r * np.sin(t)
        return out

    return plane, xy, SmoothMap(plane, xy, F, J, H)


def test_pullback_polar_area_form():
    plane, xy, F = _polar()
    area = pullback(F, coordinate_form(xy, "x", "y"))
    u = plane.sample(20, seed=2)
    assert np.allclose(area(u)[:, 0], u[:, 0])


def test_pullback_commutes_with_d_and_has_exact_gradient():
    plane, xy, F = _polar()
    w = random_polynomial_form(RandomFormSpec(2, 1, 3, seed=5), xy)
    u = plane.sample(20, seed=3)
    lhs = pullback(F, ext_d(w))(u)
    rhs = ext_d(pullback(F, w))(u)
    assert np.allclose(lhs, rhs, atol=1e-9)
    pw = pullback(F, w)
    assert pw.has_grad
    assert np.allclose(pw.jacobian(u), central_difference(pw, u), atol=1e-7)


def test_pullback_of_two_form_gradient_matches_fd():
    chart = CUBE3
    F = SmoothMap(chart, chart, lambda x: np.stack([x[..., 0] * x[..., 1], np.sin(x[..., 2]), x[..., 0] + x[..., 2] ** 2], -1))
    w = poly(3, 2, 9)
    # no analytic Jacobian on F: the pullback falls back to finite differences
    assert not pullback(F, w).has_grad
    vals = pullback(F, w)(PTS3)
    assert vals.shape == (25, 3)


def test_pullback_identity_and_degree_above_source():
    w = poly(3, 2, 4)
    assert np.allclose(pullback(identity_map(CUBE3), w)(PTS3), w(PTS3))
    line = ChartDomain("line", ("s",), ((0.0, 1.0),))
    curve = SmoothMap(line, CUBE3, lambda s: np.concatenate([s, s ** 2, s ** 3], -1))
    assert pullback(curve, w).degree == 2
    assert pullback(curve, w)(np.array([[0.5]])).shape == (1, 0)


def test_wedge_power_and_scalars():
    w = poly(4, 2, 1, CUBE4)
    x = CUBE4.sample(4, seed=0)
    assert np.allclose(wedge_power(w, 0).scalar(x), 1.0)
    assert np.allclose(wedge_power(w, 2)(x), wedge(w, w)(x))
    assert np.allclose((2.0 * w - w)(x), w(x))
    assert np.allclose((-w)(x), -w(x))


def test_central_difference_accuracy():
    x = np.linspace(-2, 2, 11)[:, None]
    d = central_difference(lambda y: np.sin(y[..., 0]), x)
    assert np.max(np.abs(d[:, 0] - np.cos(x[:, 0]))) < 1e-9


def test_smooth_map_nonfinite_jacobian_raises():
    F = SmoothMap(CUBE3, CUBE3, lambda x: x, lambda x: np.full(x.shape + (3,), np.nan))
    with pytest.raises(ValueError):
        F.jacobian(PTS3)
