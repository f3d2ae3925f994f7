import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geovol.forms import (ChartDomain, ChartError, DegreeError, KForm, ScalarField, SmoothMap,
                          constant_form, coordinate_form)
from geovol.integrate import (IntegrationError, ParametrizedChain, QuadratureSpec, chart_chain,
                              integrate_form, integrate_scalar, integrate_truncated)

from helpers import CUBE3

SQUARE = ChartDomain("square", ("x", "y"), ((0.0, 1.0), (0.0, 2.0)))


def test_gauss_legendre_exact_on_polynomials():
    res = integrate_scalar(lambda x: x[..., 0] ** 5 * x[..., 1] ** 3, SQUARE.bounds,
                           QuadratureSpec.gauss_legendre(8))
    assert res.value == pytest.approx((1 / 6) * (2 ** 4 / 4), rel=1e-14)
    assert res.provenance == "quadrature"
    assert res.error_estimate < 1e-13


def test_zero_form_integration_uses_chart_bounds():
    f = ScalarField(SQUARE, lambda x: np.ones(x.shape[:-1]))
    assert integrate_scalar(f).value == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(DegreeError):
        integrate_scalar(constant_form(SQUARE, 1, [1, 0]))


def test_volume_form_over_chart_and_orientation():
    vol = coordinate_form(CUBE3, "x", "y", "z")
    res = integrate_form(vol, chart_chain(CUBE3))
    assert res.value == pytest.approx(8.0, rel=1e-14)
    assert integrate_form(vol, chart_chain(CUBE3).reversed()).value == pytest.approx(-8.0, rel=1e-14)
    # swapping two coordinates in the parametrisation also reverses orientation
    swap = SmoothMap(CUBE3, CUBE3, lambda x: x[..., [1, 0, 2]],
                     lambda x: np.broadcast_to(np.eye(3)[[1, 0, 2]], x.shape + (3,)))
    assert integrate_form(vol, ParametrizedChain(swap)).value == pytest.approx(-8.0, rel=1e-14)


@given(st.floats(-0.9, 0.9), st.integers(0, 2))
@settings(max_examples=20, deadline=None)
def test_split_is_additive(at, axis):
    w = KForm(CUBE3, 3, lambda x: (np.exp(x[..., 0]) * np.cos(x[..., 1] + x[..., 2]))[..., None])
    chain = chart_chain(CUBE3)
    left, right = chain.split(axis, at)
    whole = integrate_form(w, chain).value
    parts = integrate_form(w, left).value + integrate_form(w, right).value
    assert parts == pytest.approx(whole, abs=1e-12)


def test_degree_and_chart_mismatch():
    with pytest.raises(DegreeError):
        integrate_form(coordinate_form(CUBE3, "x"), chart_chain(CUBE3))
    with pytest.raises(ChartError):
        integrate_form(coordinate_form(SQUARE, "x", "y"), chart_chain(ChartDomain("q", ("a", "b"), ((0, 1), (0, 1)))))


def test_nonfinite_integrand_reports_node():
    with pytest.raises(IntegrationError) as info, np.errstate(divide="ignore"):
        integrate_scalar(lambda x: 1.0 / (x[..., 0] - x[..., 0]), SQUARE.bounds)
    assert info.value.node is not None and len(info.value.node) == 2


def test_worker_count_does_not_change_results():
    f = lambda x: np.sin(3 * x[..., 0]) * np.exp(x[..., 1]) + x[..., 2] ** 2
    box = CUBE3.bounds
    a = integrate_scalar(f, box, QuadratureSpec.gauss_legendre(24, workers=1))
    b = integrate_scalar(f, box, QuadratureSpec.gauss_legendre(24, workers=4))
    assert a == b
    mc1 = integrate_scalar(f, box, QuadratureSpec.monte_carlo(20_000, seed=5, workers=1))
    mc4 = integrate_scalar(f, box, QuadratureSpec.monte_carlo(20_000, seed=5, workers=3))
    assert mc1 == mc4


def test_monte_carlo_seeded_and_within_error():
    f = lambda x: x[..., 0] ** 2 + x[..., 1] ** 2
    spec = QuadratureSpec.monte_carlo(50_000, seed=3)
    a = integrate_scalar(f, SQUARE.bounds, spec)
    assert a == integrate_scalar(f, SQUARE.bounds, spec)
    assert a != integrate_scalar(f, SQUARE.bounds, QuadratureSpec.monte_carlo(50_000, seed=4))
    exact = 2 / 3 + 8 / 3
    assert abs(a.value - exact) < 5 * a.error_estimate
    assert a.provenance == "monte_carlo" and a.evaluations == 50_000


def test_monte_carlo_samples_depend_only_on_index():
    # the first 4096 samples of a longer run coincide with a shorter run
    f = lambda x: x[..., 0]
    short = integrate_scalar(f, ((0, 1),), QuadratureSpec.monte_carlo(4096, seed=9))
    long = integrate_scalar(f, ((0, 1),), QuadratureSpec.monte_carlo(8192, seed=9))
    assert short.value != long.value
    from geovol.integrate import _uniform_block
    assert np.array_equal(_uniform_block(9, 4096, 10, 5), _uniform_block(9, 0, 4106, 5)[4096:])


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec.gauss_legendre(1)
    with pytest.raises(ValueError):
        QuadratureSpec.monte_carlo(0)
    with pytest.raises(ValueError):
        QuadratureSpec("simpson")
    with pytest.raises(ValueError):
        QuadratureSpec.gauss_legendre((8, 8)).orders(3)
    assert QuadratureSpec.gauss_legendre((4, 6)).orders(2) == (4, 6)


def test_truncated_integration_tail_bound_and_doubling():
    line = lambda R: ChartDomain("ray", ("r",), ((0.0, R),))

    def omega_on(R):
        chart = line(R)
        return KForm(chart, 1, lambda x: np.exp(-x)), chart_chain(chart)

    spec = QuadratureSpec.gauss_legendre(48)
    res = integrate_truncated(omega_on, 20.0, spec, tail_bound=lambda R: math.exp(-R))
    assert res.value == pytest.approx(1 - math.exp(-20), abs=1e-12)
    assert res.truncation_error == pytest.approx(math.exp(-20))
    res2 = integrate_truncated(omega_on, 20.0, spec)
    assert res2.truncation_error == pytest.approx(math.exp(-20), rel=1e-3)
    assert res2.to_dict()["truncation_error"] == res2.truncation_error
