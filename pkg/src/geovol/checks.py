"""Verification engines for identities and invariants of geodesible fields.

Every engine returns a :class:`~geovol.report.CheckReport` (or a plain
residual / integration result) so that suites can be serialised uniformly.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .forms import (ChartDomain, DegreeError, KForm, Point, TopDegreeWarning, VectorFieldRepr,
                    _as_coords, _wedge_table, ext_d, interior, multi_indices, wedge, wedge_power)
from .integrate import (DEFAULT_SPEC, IntegrationResult, ParametrizedChain, QuadratureSpec,
                        integrate_form)
from .report import CheckReport

__all__ = [
    "RandomFormSpec",
    "random_polynomial_form",
    "abbondandolo_sides",
    "abbondandolo_residual",
    "volume_invariance",
    "basic_form_check",
    "pairing_invariance",
    "geodesibility_residual",
    "cartan_residual",
    "CartanError",
    "cartan_solve_alpha",
    "cartan_alpha_form",
    "common_kernel_field",
    "bott_relation",
    "return_time_volume",
    "PRECONDITION_TOL",
    "PRECONDITION_POINTS",
]

PRECONDITION_TOL = 1e-8
PRECONDITION_POINTS = 200
ANALYTIC_TOL = 1e-8
FD_TOL = 1e-5


def _points_array(points, chart: ChartDomain) -> np.ndarray:
    if isinstance(points, Point):
        points = [points]
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], Point):
        for p in points:
            if p.chart != chart:
                raise ValueError(f"point on {p.chart}, expected {chart}")
        points = [p.coords for p in points]
    return _as_coords(np.asarray(points, dtype=float), chart.dim).reshape(-1, chart.dim)


def _d(omega: KForm) -> KForm:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TopDegreeWarning)
        return ext_d(omega)


# ---------------------------------------------------------------------------
# random polynomial forms


@dataclass(frozen=True)
class RandomFormSpec:
    """Recipe for a random form with polynomial coefficients.

    Coefficients of each monomial are integers drawn uniformly from
    ``coefficient_range`` (inclusive), so gradients are exact.
    """

    dim: int
    degree: int
    polynomial_degree: int = 2
    coefficient_range: tuple = (-5, 5)
    seed: int = 0

    def chart(self) -> ChartDomain:
        names = tuple(f"x{i + 1}" for i in range(self.dim))
        return ChartDomain(f"cube{self.dim}", names, ((-1.0, 1.0),) * self.dim)


def _monomials(dim: int, p: int) -> np.ndarray:
    return np.array([e for e in itertools.product(range(p + 1), repeat=dim) if sum(e) <= p], dtype=int)


def _monomial_values(x: np.ndarray, E: np.ndarray) -> np.ndarray:
    # x (..., dim), E (M, dim) -> (..., M); negative exponents give zero
    safe = np.where(E >= 0, E, 0)
    vals = np.prod(x[..., None, :] ** safe, axis=-1)
    return np.where(np.all(E >= 0, axis=-1), vals, 0.0)


def random_polynomial_form(spec: RandomFormSpec, chart: ChartDomain = None) -> KForm:
    """A ``spec.degree``-form whose coefficients are integer polynomials."""
    chart = chart or spec.chart()
    if chart.dim != spec.dim:
        raise ValueError("chart dimension does not match RandomFormSpec.dim")
    rng = np.random.default_rng(spec.seed)
    E = _monomials(spec.dim, spec.polynomial_degree)
    lo, hi = spec.coefficient_range
    n = len(multi_indices(spec.dim, spec.degree))
    C = rng.integers(int(lo), int(hi) + 1, size=(n, len(E))).astype(float)
    d = spec.dim
    eye = np.eye(d, dtype=int)

    def coeffs(x):
        return _monomial_values(x, E) @ C.T

    def grad(x):
        out = np.empty(x.shape[:-1] + (n, d))
        for m in range(d):
            out[..., m] = _monomial_values(x, E - eye[m]) @ (C * E[:, m]).T
        return out

    def hess(x):
        out = np.empty(x.shape[:-1] + (n, d, d))
        for m in range(d):
            for l in range(d):
                factor = E[:, m] * (E[:, l] - (1 if l == m else 0))
                out[..., m, l] = _monomial_values(x, E - eye[m] - eye[l]) @ (C * factor).T
        return out

    return KForm(chart, spec.degree, coeffs, grad, hess, label=f"poly(seed={spec.seed})")


# ---------------------------------------------------------------------------
# the difference identity for alpha ^ (d alpha)^n


def abbondandolo_sides(alpha: KForm, beta: KForm, n: int) -> tuple:
    """Left and right sides of the difference identity as separate forms.

    Left: ``alpha ^ (d alpha)^n - beta ^ (d beta)^n``.  Right:
    ``(alpha - beta) ^ sum_{j=0}^{n} (d alpha)^j ^ (d beta)^{n-j}``
    ``+ d(alpha ^ beta ^ sum_{j=0}^{n-1} (d alpha)^j ^ (d beta)^{n-1-j})``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    chart = alpha.chart
    if chart.dim < 2 * n + 1:
        raise DegreeError(f"degree {2 * n + 1} forms need dimension >= {2 * n + 1}, chart has {chart.dim}")
    if alpha.degree != 1 or beta.degree != 1:
        raise DegreeError("alpha and beta must be 1-forms")
    A, B = ext_d(alpha), ext_d(beta)
    lhs = wedge(alpha, wedge_power(A, n)) - wedge(beta, wedge_power(B, n))

    def mixed(m):
        total = KForm.zero(chart, 2 * m)
        for j in range(m + 1):
            total = total + wedge(wedge_power(A, j), wedge_power(B, m - j))
        return total

    rhs = wedge(alpha - beta, mixed(n))
    if n >= 1:
        rhs = rhs + _d(wedge(wedge(alpha, beta), mixed(n - 1)))
    return lhs, rhs


def abbondandolo_residual(alpha: KForm, beta: KForm, n: int, points, relative: bool = False) -> float:
    """Max coefficient difference between the two sides of the identity.

    With ``relative=True`` the residual is divided by the largest coefficient
    magnitude of either side at the same points (0 if both vanish).
    """
    lhs, rhs = abbondandolo_sides(alpha, beta, n)
    x = _points_array(points, alpha.chart)
    L, R = lhs(x), rhs(x)
    res = float(np.max(np.abs(L - R), initial=0.0))
    if relative:
        scale = max(float(np.max(np.abs(L), initial=0.0)), float(np.max(np.abs(R), initial=0.0)))
        return res / scale if scale > 0 else res
    return res


# ---------------------------------------------------------------------------
# volume, basic forms and pairings


def _char_defects(alpha: KForm, X: VectorFieldRepr, x: np.ndarray) -> tuple:
    unit = float(np.max(np.abs(interior(X, alpha).scalar(x) - 1.0)))
    kernel = float(np.max(np.abs(interior(X, ext_d(alpha))(x))))
    return unit, kernel


def volume_invariance(alpha: KForm, beta: KForm, X: VectorFieldRepr, chain: ParametrizedChain,
                      n: int = 1, spec: QuadratureSpec = DEFAULT_SPEC,
                      precondition_tol: float = PRECONDITION_TOL) -> CheckReport:
    """Compare ``int alpha ^ (d alpha)^n`` with ``int beta ^ (d beta)^n``.

    Raises
    ------
    ValueError
        Naming the violated hypothesis if ``alpha(X) = beta(X) = 1`` or
        ``i_X d alpha = i_X d beta = 0`` fails at the sample points.
    """
    x = chain.target.sample(PRECONDITION_POINTS, seed=0)
    for name, form in (("alpha", alpha), ("beta", beta)):
        unit, kernel = _char_defects(form, X, x)
        if unit > precondition_tol:
            raise ValueError(f"hypothesis {name}(X) = 1 fails (max deviation {unit:.3g})")
        if kernel > precondition_tol:
            raise ValueError(f"hypothesis i_X d{name} = 0 fails (max |i_X d{name}| = {kernel:.3g})")
    ra = integrate_form(wedge(alpha, wedge_power(ext_d(alpha), n)), chain, spec)
    rb = integrate_form(wedge(beta, wedge_power(ext_d(beta), n)), chain, spec)
    return CheckReport(
        "volume_invariance", ra.value, rb.value, ra.error_estimate + rb.error_estimate,
        detail=f"n = {n}; error estimates {ra.error_estimate:.3g}, {rb.error_estimate:.3g}",
        provenance=ra.provenance,
    )


def basic_form_check(gamma: KForm, X: VectorFieldRepr, points, tolerance: float = None) -> CheckReport:
    """``max(|i_X gamma|, |i_X d gamma|)`` over ``points``.

    The default tolerance is 1e-8 when ``gamma`` has an analytic gradient and
    1e-5 otherwise.
    """
    if gamma.chart != X.chart:
        raise ValueError(f"form on {gamma.chart}, field on {X.chart}")
    if tolerance is None:
        tolerance = ANALYTIC_TOL if gamma.has_grad else FD_TOL
    x = _points_array(points, gamma.chart)
    ig = 0.0 if gamma.degree == 0 else float(np.max(np.abs(interior(X, gamma)(x)), initial=0.0))
    dgamma = _d(gamma)
    idg = 0.0 if dgamma.degree > gamma.chart.dim else float(np.max(np.abs(interior(X, dgamma)(x)), initial=0.0))
    return CheckReport("basic_form", max(ig, idg), 0.0, tolerance,
                       detail=f"max |i_X gamma| = {ig:.3g}, max |i_X d gamma| = {idg:.3g}",
                       provenance="pointwise")


def pairing_invariance(alpha: KForm, sigma: KForm, tau: KForm, X: VectorFieldRepr,
                       chain: ParametrizedChain, spec: QuadratureSpec = DEFAULT_SPEC) -> CheckReport:
    """``int alpha ^ sigma`` against ``int alpha ^ (sigma + d tau)`` for basic ``sigma, tau``.

    Raises
    ------
    ValueError
        If ``tau`` or ``sigma`` is not basic for ``X`` at the sample points.
    """
    x = chain.target.sample(PRECONDITION_POINTS, seed=0)
    for name, form in (("tau", tau), ("sigma", sigma)):
        rep = basic_form_check(form, X, x)
        if not rep.passed:
            raise ValueError(f"{name} is not basic: {rep.detail}")
    r1 = integrate_form(wedge(alpha, sigma), chain, spec)
    r2 = integrate_form(wedge(alpha, sigma + ext_d(tau)), chain, spec)
    return CheckReport("pairing_invariance", r1.value, r2.value, r1.error_estimate + r2.error_estimate,
                       detail=f"error estimates {r1.error_estimate:.3g}, {r2.error_estimate:.3g}",
                       provenance=r1.provenance)


def geodesibility_residual(alpha: KForm, X: VectorFieldRepr, points, tolerance: float = None) -> CheckReport:
    """``max(|alpha(X) - 1|, |i_X d alpha|)`` over ``points``.

    Default tolerance: 1e-8 with an analytic gradient of ``alpha``, else 1e-5.
    """
    if alpha.chart != X.chart:
        raise ValueError(f"form on {alpha.chart}, field on {X.chart}")
    if tolerance is None:
        tolerance = ANALYTIC_TOL if alpha.has_grad else FD_TOL
    x = _points_array(points, alpha.chart)
    unit, kernel = _char_defects(alpha, X, x)
    return CheckReport("geodesibility", max(unit, kernel), 0.0, tolerance,
                       detail=f"max |alpha(X) - 1| = {unit:.3g}, max |i_X d alpha| = {kernel:.3g}",
                       provenance="pointwise")


# ---------------------------------------------------------------------------
# Cartan structures


class CartanError(ValueError):
    pass


def cartan_residual(omega1: KForm, omega2: KForm, points, tolerance: float = 1e-8,
                    witness_floor: float = 1e-12) -> CheckReport:
    """Structure-equation defect of a pair of 1-forms on a 3-chart.

    ``computed`` is the max over points of
    ``|w1 ^ dw1 - w2 ^ dw2| + |w1 ^ dw2| + |w2 ^ dw1|``.  If the witness
    ``min |w1 ^ dw1|`` does not exceed ``witness_floor`` the pair is not
    contact and ``computed`` is set to infinity.
    """
    if omega1.chart.dim != 3:
        raise DegreeError("Cartan structures live on 3-dimensional charts")
    x = _points_array(points, omega1.chart)
    d1, d2 = ext_d(omega1), ext_d(omega2)
    v11 = wedge(omega1, d1)(x)[..., 0]
    v22 = wedge(omega2, d2)(x)[..., 0]
    v12 = wedge(omega1, d2)(x)[..., 0]
    v21 = wedge(omega2, d1)(x)[..., 0]
    defect = float(np.max(np.abs(v11 - v22) + np.abs(v12) + np.abs(v21)))
    witness = float(np.min(np.abs(v11)))
    detail = f"structure defect {defect:.3g}; nonvanishing witness min|w1 ^ dw1| = {witness:.3g}"
    computed = defect
    if not witness > witness_floor:
        computed = float("inf")
        detail += f" (not above floor {witness_floor:g}: pair is not contact)"
    return CheckReport("cartan_residual", computed, 0.0, tolerance, detail=detail, provenance="pointwise")


def _cartan_system(w1: np.ndarray, w2: np.ndarray, dw1: np.ndarray, dw2: np.ndarray):
    # d w1 = w2 ^ a and d w2 = a ^ w1, linear in the covector a
    T = _wedge_table(3, 1, 1)                       # (3, 3, 3): i, j -> K
    A1 = np.einsum("...i,ijK->...Kj", w2, T)
    A2 = np.einsum("...j,ijK->...Ki", w1, T)
    A = np.concatenate([A1, A2], axis=-2)           # (..., 6, 3)
    b = np.concatenate([dw1, dw2], axis=-1)         # (..., 6)
    return A, b


def cartan_solve_alpha(omega1: KForm, omega2: KForm, p, tol: float = 1e-8, cond_limit: float = 1e10) -> np.ndarray:
    """Least-squares covector ``a`` with ``d w1 = w2 ^ a`` and ``d w2 = a ^ w1``.

    Solves the normal equations per point; falls back to an SVD solve where
    they are ill-conditioned.  ``p`` may be a :class:`Point` or an array of
    coordinates ``(..., 3)``.

    Raises
    ------
    CartanError
        On rank deficiency (message lists the singular values) or when the
        solved system leaves a residual above ``tol`` (pass ``tol=None`` to
        skip that test).
    """
    if omega1.chart.dim != 3:
        raise DegreeError("Cartan structures live on 3-dimensional charts")
    x = np.asarray(p, dtype=float)
    x = _as_coords(x, 3)
    A, b = _cartan_system(omega1(x), omega2(x), ext_d(omega1)(x), ext_d(omega2)(x))
    sv = np.linalg.svd(A, compute_uv=False)
    bad = sv[..., -1] <= 1e-12 * np.maximum(sv[..., 0], 1e-300)
    if np.any(bad):
        i = np.unravel_index(int(np.argmax(bad)), bad.shape) if bad.ndim else ()
        raise CartanError(f"rank-deficient Cartan system; singular values {np.round(sv[i], 15).tolist()}")
    N = np.einsum("...ki,...kj->...ij", A, A)
    rhs = np.einsum("...ki,...k->...i", A, b)
    cond = (sv[..., 0] / sv[..., -1]) ** 2
    sol = np.empty(x.shape)
    good = cond <= cond_limit
    if np.any(good):
        sol[good] = np.linalg.solve(N[good], rhs[good][..., None])[..., 0]
    if np.any(~good):
        Ab, bb = A[~good], b[~good]
        sol[~good] = np.stack([np.linalg.lstsq(Ai, bi, rcond=None)[0] for Ai, bi in zip(Ab, bb)])
    if tol is not None:
        res = np.abs(np.einsum("...ki,...i->...k", A, sol) - b)
        worst = float(np.max(res, initial=0.0))
        if worst > tol:
            raise CartanError(f"solved Cartan system leaves residual {worst:.3g} > {tol:g}")
    return sol


def cartan_alpha_form(omega1: KForm, omega2: KForm, tol: float = 1e-8) -> KForm:
    """The solved ``alpha`` as a form (derivatives by finite differences)."""
    return KForm(omega1.chart, 1, lambda x: cartan_solve_alpha(omega1, omega2, x, tol=tol), label="alpha_cartan")


def common_kernel_field(omega1: KForm, omega2: KForm, alpha: KForm) -> VectorFieldRepr:
    """The field spanning ``ker w1 ∩ ker w2``, normalised by ``alpha(X) = 1``."""

    def comp(x):
        v = np.cross(omega1(x), omega2(x))
        return v / np.einsum("...i,...i->...", alpha(x), v)[..., None]

    return VectorFieldRepr(omega1.chart, comp, label="common_kernel")


def bott_relation(omega1: KForm, omega2: KForm, X: VectorFieldRepr, chain: ParametrizedChain,
                  spec: QuadratureSpec = DEFAULT_SPEC, tolerance: float = 1e-8,
                  precondition_tol: float = 1e-6) -> CheckReport:
    """Bott invariant of ``alpha_c = i alpha`` against ``-vol_X``.

    The complex form is carried as a pair of real forms ``(re, im) = (0, alpha)``;
    ``alpha_c ^ d alpha_c`` has real part ``re ^ d re - im ^ d im`` and imaginary
    part ``re ^ d im + im ^ d re``.  ``vol_X`` comes from a separate
    integration of ``alpha ^ d alpha``.
    """
    x = chain.target.sample(PRECONDITION_POINTS, seed=1)
    alpha = cartan_alpha_form(omega1, omega2)
    for name, form in (("w1", omega1), ("w2", omega2)):
        worst = float(np.max(np.abs(interior(X, form).scalar(x))))
        if worst > precondition_tol:
            raise ValueError(f"X is not in the kernel of {name} (max |{name}(X)| = {worst:.3g})")
    unit = float(np.max(np.abs(interior(X, alpha).scalar(x) - 1.0)))
    if unit > precondition_tol:
        raise ValueError(f"X is not normalised: max |alpha(X) - 1| = {unit:.3g}")

    vol = integrate_form(wedge(alpha, ext_d(alpha)), chain, spec)
    re = KForm.zero(alpha.chart, 1)
    im = alpha
    real_part = wedge(re, ext_d(re)) - wedge(im, ext_d(im))
    imag_part = wedge(re, ext_d(im)) + wedge(im, ext_d(re))
    r_re = integrate_form(real_part, chain, spec)
    r_im = integrate_form(imag_part, chain, spec)
    return CheckReport(
        "bott_relation", complex(r_re.value, r_im.value + 0.0), complex(-vol.value, 0.0), tolerance,
        detail=f"vol_X = {vol.value:.15g} (error estimate {vol.error_estimate:.3g})",
        provenance=vol.provenance,
    )


def return_time_volume(tau: KForm, sigma: KForm, disc_chain: ParametrizedChain,
                       spec: QuadratureSpec = DEFAULT_SPEC) -> IntegrationResult:
    """``int tau * sigma`` over a 2-chain (a surface of section)."""
    if sigma.degree != 2:
        raise DegreeError(f"sigma must be a 2-form, got degree {sigma.degree}")
    if disc_chain.k != 2:
        raise DegreeError(f"surface of section must be a 2-chain, got a {disc_chain.k}-chain")
    if tau.degree != 0:
        raise DegreeError("tau must be a function")
    return integrate_form(wedge(tau, sigma), disc_chain, spec)
