"""Named worked examples: the Hopf fibration, a contact form on the solid
torus, the Beltrami family of projectively equivalent metrics on S^3, the
quaternionic coframe of S^3, and surfaces of revolution with cone points.

Conventions
-----------
S^3 is charted by Hopf coordinates ``(eta, phi1, phi2)`` with
``z1 = cos(eta) e^{i phi1}``, ``z2 = sin(eta) e^{i phi2}``.  The embedding in
R^4 uses coordinates ``(x1, y1, x2, y2) = (Re z1, Im z1, Re z2, Im z2)``.
The standard orientation of S^3 (as the boundary of the unit ball) is the
*negative* of the coordinate orientation ``d eta ^ d phi1 ^ d phi2``, so
:func:`hopf_chain` carries orientation -1.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional

import numpy as np

from .forms import (ChartDomain, KForm, ScalarField, SmoothMap, VectorFieldRepr,
                    ext_d, pullback, wedge)
from .integrate import (DEFAULT_SPEC, IntegrationResult, ParametrizedChain, QuadratureSpec,
                        chart_chain, integrate_form, integrate_scalar, integrate_truncated)
from .report import CheckReport
from .riemannian import MetricField
from .seifert import Orbifold2D, chi_orb

__all__ = [
    "HOPF_CHART",
    "PLANE_CHART",
    "R3_CHART",
    "R4_CHART",
    "DISC_CHART",
    "DISC_SLICE_CHART",
    "CATALOG_NAMES",
    "HopfBundle",
    "hopf_bundle",
    "hopf_chain",
    "hopf_section",
    "hopf_curvature_integral",
    "SECTION_SPEC",
    "hopf_projection",
    "hopf_embedding",
    "hopf_perturbation",
    "linear_form",
    "HProfile",
    "DiscContact",
    "disc_contact",
    "disc_volume",
    "round_metric",
    "beltrami_map",
    "BeltramiFamily",
    "beltrami_family",
    "QuaternionicCoframe",
    "quaternionic_coframe",
    "RevolutionProfile",
    "gauss_bonnet_revolution",
]

TWO_PI = 2.0 * math.pi

HOPF_CHART = ChartDomain(
    "hopf", ("eta", "phi1", "phi2"), ((0.0, math.pi / 2), (0.0, TWO_PI), (0.0, TWO_PI)),
    excluded_sets="eta = 0 and eta = pi/2 (the circles z2 = 0 and z1 = 0)",
)
PLANE_CHART = ChartDomain("plane", ("r", "phi"), ((0.0, 1.0e3), (0.0, TWO_PI)),
                          excluded_sets="r = 0")
R3_CHART = ChartDomain("R3", ("x", "y", "z"), ((-1.5, 1.5),) * 3)
R4_CHART = ChartDomain("R4", ("x1", "y1", "x2", "y2"), ((-1.5, 1.5),) * 4)
DISC_CHART = ChartDomain("solid_torus", ("r", "phi", "theta"),
                         ((0.0, 1.0), (0.0, TWO_PI), (0.0, 1.0)), excluded_sets="r = 0")
DISC_SLICE_CHART = ChartDomain("disc", ("r", "phi"), ((0.0, 1.0), (0.0, TWO_PI)),
                               excluded_sets="r = 0")

CATALOG_NAMES = ("hopf", "disc", "beltrami", "cartan-su2", "revolution")


def _stack_last(*arrays):
    return np.stack(np.broadcast_arrays(*arrays), axis=-1)


def linear_form(chart: ChartDomain, M) -> KForm:
    """The 1-form with coefficients ``M @ x`` (exact gradient ``M``)."""
    M = np.asarray(M, dtype=float)
    d = chart.dim
    return KForm(
        chart, 1,
        lambda x: x @ M.T,
        lambda x: np.broadcast_to(M, x.shape[:-1] + (d, d)),
        lambda x: np.zeros(x.shape[:-1] + (d, d, d)),
    )


# ---------------------------------------------------------------------------
# Hopf fibration


class HopfBundle(NamedTuple):
    chart: ChartDomain
    X: VectorFieldRepr
    alpha: KForm


def hopf_bundle() -> HopfBundle:
    """Connection form and period-1 generator of the Hopf fibration.

    ``alpha = (cos^2 eta dphi1 + sin^2 eta dphi2) / 2 pi`` and
    ``X = 2 pi (d/dphi1 + d/dphi2)``, so ``alpha(X) = 1``.
    """
    c = 1.0 / TWO_PI

    def coeffs(x):
        eta = x[..., 0]
        return _stack_last(0.0 * eta, c * np.cos(eta) ** 2, c * np.sin(eta) ** 2)

    def grad(x):
        eta = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 3))
        s2 = np.sin(2 * eta)
        out[..., 1, 0] = -c * s2
        out[..., 2, 0] = c * s2
        return out

    def hess(x):
        eta = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 3, 3))
        c2 = np.cos(2 * eta)
        out[..., 1, 0, 0] = -2 * c * c2
        out[..., 2, 0, 0] = 2 * c * c2
        return out

    alpha = KForm(HOPF_CHART, 1, coeffs, grad, hess, label="alpha_hopf")
    v = np.array([0.0, TWO_PI, TWO_PI])
    X = VectorFieldRepr(HOPF_CHART, lambda x: np.broadcast_to(v, x.shape),
                        lambda x: np.zeros(x.shape + (3,)), label="X_hopf")
    return HopfBundle(HOPF_CHART, X, alpha)


def hopf_chain() -> ParametrizedChain:
    """S^3 with its standard orientation."""
    return chart_chain(HOPF_CHART, orientation=-1)


def hopf_section() -> SmoothMap:
    """``(r, phi) -> (1, r e^{i phi}) / sqrt(1 + r^2)`` in Hopf coordinates.

    That is ``eta = arctan r``, ``phi1 = 0``, ``phi2 = phi``.
    """

    def F(x):
        r, phi = x[..., 0], x[..., 1]
        return _stack_last(np.arctan(r), 0.0 * r, phi)

    def J(x):
        r = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 2))
        out[..., 0, 0] = 1.0 / (1.0 + r * r)
        out[..., 2, 1] = 1.0
        return out

    def H(x):
        r = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 2, 2))
        out[..., 0, 0, 0] = -2.0 * r / (1.0 + r * r) ** 2
        return out

    return SmoothMap(PLANE_CHART, HOPF_CHART, F, J, H, label="hopf_section")


def _log_radial_section(r_max: float) -> SmoothMap:
    # the section in the radial variable t = log(1 + r), which spreads the
    # slowly decaying tail over a short interval
    src = ChartDomain("log_plane", ("t", "phi"), ((0.0, math.log1p(r_max)), (0.0, TWO_PI)))

    def F(x):
        t, phi = x[..., 0], x[..., 1]
        return _stack_last(np.arctan(np.expm1(t)), 0.0 * t, phi)

    def J(x):
        r = np.expm1(x[..., 0])
        out = np.zeros(x.shape[:-1] + (3, 2))
        out[..., 0, 0] = (1.0 + r) / (1.0 + r * r)
        out[..., 2, 1] = 1.0
        return out

    def H(x):
        r = np.expm1(x[..., 0])
        out = np.zeros(x.shape[:-1] + (3, 2, 2))
        out[..., 0, 0, 0] = (1.0 + r) * (1.0 - 2.0 * r - r * r) / (1.0 + r * r) ** 2
        return out

    return SmoothMap(src, HOPF_CHART, F, J, H, label="hopf_section_log")


SECTION_SPEC = QuadratureSpec.gauss_legendre(64)


def hopf_curvature_integral(r_max: float = 1.0e3, spec: QuadratureSpec = SECTION_SPEC) -> IntegrationResult:
    """Integral of ``d alpha`` over the section restricted to ``|z| <= r_max``.

    The default rule has order 64: the radial integrand is smooth but not
    resolved well enough at order 16 for the half-order error estimate to be
    informative.

    The exact value on the disc of radius ``R`` is ``1 - 1/(1 + R^2)``, so the
    reported truncation error is the closed-form tail ``1/(1 + R^2)``.
    """
    dalpha = ext_d(hopf_bundle().alpha)

    def omega_on(R):
        return dalpha, ParametrizedChain(_log_radial_section(R))

    return integrate_truncated(omega_on, r_max, spec, tail_bound=lambda R: 1.0 / (1.0 + R * R))


def hopf_projection() -> SmoothMap:
    """Bundle projection S^3 -> S^2 in R^3.

    ``(sin 2eta cos psi, sin 2eta sin psi, cos 2eta)`` with ``psi = phi1 - phi2``;
    it is constant along the Hopf circles.
    """

    def F(x):
        eta, psi = x[..., 0], x[..., 1] - x[..., 2]
        s = np.sin(2 * eta)
        return _stack_last(s * np.cos(psi), s * np.sin(psi), np.cos(2 * eta))

    def J(x):
        eta, psi = x[..., 0], x[..., 1] - x[..., 2]
        s, c = np.sin(2 * eta), np.cos(2 * eta)
        out = np.zeros(x.shape[:-1] + (3, 3))
        out[..., 0, 0] = 2 * c * np.cos(psi)
        out[..., 1, 0] = 2 * c * np.sin(psi)
        out[..., 2, 0] = -2 * s
        out[..., 0, 1] = -s * np.sin(psi)
        out[..., 1, 1] = s * np.cos(psi)
        out[..., :2, 2] = -out[..., :2, 1]
        return out

    def H(x):
        eta, psi = x[..., 0], x[..., 1] - x[..., 2]
        s, c = np.sin(2 * eta), np.cos(2 * eta)
        out = np.zeros(x.shape[:-1] + (3, 3, 3))
        ee = _stack_last(-4 * s * np.cos(psi), -4 * s * np.sin(psi), -4 * c)
        ep = _stack_last(-2 * c * np.sin(psi), 2 * c * np.cos(psi), 0.0 * s)
        pp = _stack_last(-s * np.cos(psi), -s * np.sin(psi), 0.0 * s)
        out[..., 0, 0] = ee
        out[..., 0, 1] = out[..., 1, 0] = ep
        out[..., 0, 2] = out[..., 2, 0] = -ep
        out[..., 1, 1] = out[..., 2, 2] = pp
        out[..., 1, 2] = out[..., 2, 1] = -pp
        return out

    return SmoothMap(HOPF_CHART, R3_CHART, F, J, H, label="hopf_projection")


def hopf_perturbation(M=((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)), scale: float = 1.0) -> KForm:
    """``alpha + scale * pi^* gamma`` for the linear base form ``gamma = M p . dp``.

    The default ``M`` gives ``gamma = z dx``.  Since ``pi^* gamma`` vanishes on
    the fibres and so does its differential, the result is again a
    characteristic form of the Hopf generator.
    """
    gamma = linear_form(R3_CHART, scale * np.asarray(M, dtype=float))
    return hopf_bundle().alpha + pullback(hopf_projection(), gamma)


def hopf_embedding() -> SmoothMap:
    """Hopf coordinates to ``(x1, y1, x2, y2)`` in R^4."""

    def F(x):
        eta, p1, p2 = x[..., 0], x[..., 1], x[..., 2]
        ce, se = np.cos(eta), np.sin(eta)
        return _stack_last(ce * np.cos(p1), ce * np.sin(p1), se * np.cos(p2), se * np.sin(p2))

    def J(x):
        eta, p1, p2 = x[..., 0], x[..., 1], x[..., 2]
        ce, se = np.cos(eta), np.sin(eta)
        c1, s1, c2, s2 = np.cos(p1), np.sin(p1), np.cos(p2), np.sin(p2)
        out = np.zeros(x.shape[:-1] + (4, 3))
        out[..., 0, 0], out[..., 0, 1] = -se * c1, -ce * s1
        out[..., 1, 0], out[..., 1, 1] = -se * s1, ce * c1
        out[..., 2, 0], out[..., 2, 2] = ce * c2, -se * s2
        out[..., 3, 0], out[..., 3, 2] = ce * s2, se * c2
        return out

    def H(x):
        eta, p1, p2 = x[..., 0], x[..., 1], x[..., 2]
        ce, se = np.cos(eta), np.sin(eta)
        c1, s1, c2, s2 = np.cos(p1), np.sin(p1), np.cos(p2), np.sin(p2)
        out = np.zeros(x.shape[:-1] + (4, 3, 3))
        out[..., 0, 0, 0] = out[..., 0, 1, 1] = -ce * c1
        out[..., 0, 0, 1] = out[..., 0, 1, 0] = se * s1
        out[..., 1, 0, 0] = out[..., 1, 1, 1] = -ce * s1
        out[..., 1, 0, 1] = out[..., 1, 1, 0] = -se * c1
        out[..., 2, 0, 0] = out[..., 2, 2, 2] = -se * c2
        out[..., 2, 0, 2] = out[..., 2, 2, 0] = -ce * s2
        out[..., 3, 0, 0] = out[..., 3, 2, 2] = -se * s2
        out[..., 3, 0, 2] = out[..., 3, 2, 0] = ce * c2
        return out

    return SmoothMap(HOPF_CHART, R4_CHART, F, J, H, label="hopf_embedding")


# ---------------------------------------------------------------------------
# contact form on the solid torus


class HProfile:
    """A function ``H(u)`` of ``u = r^2`` on ``[0, 1]`` with ``H - u H' > 0``.

    Parameters
    ----------
    H, dH : callable
        Vectorised ``H`` and ``H'``.
    d2H : callable, optional
        ``H''``; when given, the contact form carries analytic Hessians and the
        Reeb field an analytic Jacobian.
    label : str
    """

    def __init__(self, H: Callable, dH: Callable, d2H: Optional[Callable] = None,
                 label: str = "", check_points: int = 1000):
        self.H = H
        self.dH = dH
        self.d2H = d2H
        self.label = label
        u = np.linspace(0.0, 1.0, check_points)
        tau = np.asarray(H(u), dtype=float) - u * np.asarray(dH(u), dtype=float)
        if not np.all(np.isfinite(tau)) or np.min(tau) <= 0:
            i = int(np.argmin(np.where(np.isfinite(tau), tau, -np.inf)))
            raise ValueError(f"H - u H' must be positive on [0, 1]; it is {tau[i]:.6g} at u = {u[i]:.6g}")

    def tau(self, u):
        u = np.asarray(u, dtype=float)
        return self.H(u) - u * self.dH(u)

    @classmethod
    def polynomial(cls, coeffs, label: str = "") -> "HProfile":
        """``H(u) = sum c_k u^k`` with exact derivatives."""
        p = np.polynomial.Polynomial(coeffs)
        dp, d2p = p.deriv(1), p.deriv(2)
        return cls(p, dp, d2p, label or str(list(coeffs)))


class DiscContact(NamedTuple):
    chart: ChartDomain
    alpha: KForm
    X: VectorFieldRepr
    tau: ScalarField


def disc_contact(H: HProfile) -> DiscContact:
    """Contact form ``H(r^2) dtheta + (r^2/2) dphi`` on the solid torus and its Reeb field.

    ``X = (d/dtheta - 2 H'(r^2) d/dphi) / tau`` with ``tau = H - r^2 H'``.
    """
    d2H = H.d2H

    def coeffs(x):
        r = x[..., 0]
        u = r * r
        return _stack_last(0.0 * r, 0.5 * u, H.H(u))

    def grad(x):
        r = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 3))
        out[..., 1, 0] = r
        out[..., 2, 0] = 2 * r * H.dH(r * r)
        return out

    hess = None
    if d2H is not None:
        def hess(x):
            r = x[..., 0]
            u = r * r
            out = np.zeros(x.shape[:-1] + (3, 3, 3))
            out[..., 1, 0, 0] = 1.0
            out[..., 2, 0, 0] = 2 * H.dH(u) + 4 * u * d2H(u)
            return out

    alpha = KForm(DISC_CHART, 1, coeffs, grad, hess, label="alpha_disc")

    def tau_r(r):
        return H.tau(r * r)

    def X_comp(x):
        r = x[..., 0]
        t = tau_r(r)
        return _stack_last(0.0 * r, -2 * H.dH(r * r) / t, 1.0 / t)

    X_jac = None
    if d2H is not None:
        def X_jac(x):
            r = x[..., 0]
            u = r * r
            t, h1, h2 = tau_r(r), H.dH(u), d2H(u)
            dt = -2 * r * u * h2
            out = np.zeros(x.shape + (3,))
            out[..., 1, 0] = -(4 * r * h2 * t - 2 * h1 * dt) / t ** 2
            out[..., 2, 0] = -dt / t ** 2
            return out

    X = VectorFieldRepr(DISC_CHART, X_comp, X_jac, label="reeb_disc")
    tau_grad = None
    if d2H is not None:
        def tau_grad(x):
            r = x[..., 0]
            return _stack_last(-2 * r ** 3 * d2H(r * r), 0.0 * r, 0.0 * r)
    tau = ScalarField(DISC_CHART, lambda x: tau_r(x[..., 0]), tau_grad, label="tau")
    return DiscContact(DISC_CHART, alpha, X, tau)


def _disc_slice() -> SmoothMap:
    # the meridian disc theta = 0
    def F(x):
        return _stack_last(x[..., 0], x[..., 1], 0.0 * x[..., 0])

    Jc = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    return SmoothMap(DISC_SLICE_CHART, DISC_CHART, F,
                     lambda x: np.broadcast_to(Jc, x.shape[:-1] + (3, 2)),
                     lambda x: np.zeros(x.shape[:-1] + (3, 2, 2)), label="meridian_disc")


def disc_volume(H: HProfile, method: str = "direct", spec: QuadratureSpec = DEFAULT_SPEC) -> IntegrationResult:
    """Volume of the Reeb field of :func:`disc_contact`.

    ``direct`` integrates ``alpha ^ d alpha`` over the solid torus (theta has
    period 1).  ``return_time`` integrates ``tau * sigma`` over the meridian
    disc, with ``sigma`` the restriction of ``d alpha`` to the disc; here the
    return time of the flow to the disc equals ``tau``.
    """
    from .checks import return_time_volume

    chart, alpha, X, tau = disc_contact(H)
    method = method.replace("-", "_")
    if method == "direct":
        return integrate_form(wedge(alpha, ext_d(alpha)), chart_chain(chart), spec)
    if method == "return_time":
        slice_map = _disc_slice()
        sigma = pullback(slice_map, ext_d(alpha))
        tau_disc = ScalarField(DISC_SLICE_CHART, lambda x: H.tau(x[..., 0] ** 2), label="tau")
        return return_time_volume(tau_disc, sigma, chart_chain(DISC_SLICE_CHART), spec)
    raise ValueError(f"unknown method {method!r}; use 'direct' or 'return_time'")


# ---------------------------------------------------------------------------
# Beltrami family


def round_metric() -> MetricField:
    """Round metric of the unit S^3: ``d eta^2 + cos^2 eta dphi1^2 + sin^2 eta dphi2^2``."""

    def g(x):
        eta = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 3))
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = np.cos(eta) ** 2
        out[..., 2, 2] = np.sin(eta) ** 2
        return out

    return MetricField(HOPF_CHART, g, label="round")


def _check_params(a1, a2):
    if not (a1 > 0 and a2 > 0 and math.isfinite(a1) and math.isfinite(a2)):
        raise ValueError(f"parameters must be positive and finite, got a1={a1}, a2={a2}")


def beltrami_map(a1: float, a2: float) -> SmoothMap:
    """``p -> A p / |A p|`` with ``A = diag(a1, a1, a2, a2)``, in Hopf coordinates.

    The angles are unchanged and ``eta -> atan2(a2 sin eta, a1 cos eta)``.
    """
    _check_params(a1, a2)

    def delta(eta):
        return a1 ** 2 * np.cos(eta) ** 2 + a2 ** 2 * np.sin(eta) ** 2

    def F(x):
        eta = x[..., 0]
        return _stack_last(np.arctan2(a2 * np.sin(eta), a1 * np.cos(eta)), x[..., 1], x[..., 2])

    def J(x):
        out = np.zeros(x.shape[:-1] + (3, 3))
        out[..., 0, 0] = a1 * a2 / delta(x[..., 0])
        out[..., 1, 1] = out[..., 2, 2] = 1.0
        return out

    def H(x):
        eta = x[..., 0]
        out = np.zeros(x.shape[:-1] + (3, 3, 3))
        out[..., 0, 0, 0] = -a1 * a2 * (a2 ** 2 - a1 ** 2) * np.sin(2 * eta) / delta(eta) ** 2
        return out

    return SmoothMap(HOPF_CHART, HOPF_CHART, F, J, H, label=f"beltrami({a1},{a2})")


class BeltramiFamily(NamedTuple):
    chart: ChartDomain
    g: MetricField
    X1: VectorFieldRepr
    L2: ScalarField
    alpha: KForm


def _ambient_parts(p, a1, a2):
    x1, y1, x2, y2 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    delta = a1 ** 2 * (x1 * x1 + y1 * y1) + a2 ** 2 * (x2 * x2 + y2 * y2)
    q = x1 * x2 + y1 * y2
    return x1, y1, x2, y2, delta, q


def beltrami_family(a1: float, a2: float) -> BeltramiFamily:
    """Closed-form metric ``g_{a1,a2}``, field ``X1``, its squared length and ``alpha``.

    The metric, ``L^2`` and ``L alpha`` are written in the ambient
    coordinates of R^4 and evaluated through :func:`hopf_embedding`.
    ``X1 = x1 d/dx2 - x2 d/dx1 + y1 d/dy2 - y2 d/dy1`` is expressed in Hopf
    coordinates as ``cos(psi) d/deta + sin(psi) (tan eta d/dphi1 + cot eta d/dphi2)``
    with ``psi = phi1 - phi2``.  ``alpha = g(X1/L, .)`` has unit value on
    ``X1/L``.
    """
    _check_params(a1, a2)
    emb = hopf_embedding()
    A1, A2 = a1 ** 2, a2 ** 2

    def G_ambient(p):
        x1, y1, x2, y2, delta, _ = _ambient_parts(p, a1, a2)
        zero = 0.0 * x1
        u1 = _stack_last(x1, y1, zero, zero)
        u2 = _stack_last(zero, zero, x2, y2)
        D = (A1 / delta)[..., None, None] * np.diag([1.0, 1.0, 0.0, 0.0]) \
            + (A2 / delta)[..., None, None] * np.diag([0.0, 0.0, 1.0, 1.0])
        outer11 = u1[..., :, None] * u1[..., None, :]
        outer22 = u2[..., :, None] * u2[..., None, :]
        outer12 = u1[..., :, None] * u2[..., None, :]
        d2 = (delta ** 2)[..., None, None]
        return (D - A1 ** 2 * outer11 / d2 - A2 ** 2 * outer22 / d2
                - A1 * A2 * (outer12 + np.swapaxes(outer12, -1, -2)) / d2)

    def g(x):
        J = emb.jacobian(x)
        return np.einsum("...ai,...ab,...bj->...ij", J, G_ambient(emb(x)), J)

    def L2_func(x):
        x1, y1, x2, y2, delta, q = _ambient_parts(emb(x), a1, a2)
        r1s, r2s = x1 * x1 + y1 * y1, x2 * x2 + y2 * y2
        return (A1 * r2s + A2 * r1s) / delta - (A1 - A2) ** 2 / delta ** 2 * q * q

    def L_alpha_ambient(p):
        x1, y1, x2, y2, delta, q = _ambient_parts(p, a1, a2)
        zero = 0.0 * x1
        c1 = (A1 * A1 - A1 * A2) / delta ** 2 * q
        c2 = (A2 * A2 - A1 * A2) / delta ** 2 * q
        return (-(A1 / delta)[..., None] * _stack_last(x2, y2, zero, zero)
                + (A2 / delta)[..., None] * _stack_last(zero, zero, x1, y1)
                + c1[..., None] * _stack_last(x1, y1, zero, zero)
                - c2[..., None] * _stack_last(zero, zero, x2, y2))

    L_alpha = pullback(emb, KForm(R4_CHART, 1, L_alpha_ambient))
    alpha = wedge(ScalarField(HOPF_CHART, lambda x: 1.0 / np.sqrt(L2_func(x))), L_alpha)
    alpha.label = f"alpha_beltrami({a1},{a2})"

    def X1_comp(x):
        eta, psi = x[..., 0], x[..., 1] - x[..., 2]
        return _stack_last(np.cos(psi), np.sin(psi) * np.tan(eta), np.sin(psi) / np.tan(eta))

    def X1_jac(x):
        eta, psi = x[..., 0], x[..., 1] - x[..., 2]
        cp, sp, t = np.cos(psi), np.sin(psi), np.tan(eta)
        out = np.zeros(x.shape + (3,))
        out[..., 0, 1], out[..., 0, 2] = -sp, sp
        out[..., 1, 0] = sp / np.cos(eta) ** 2
        out[..., 1, 1], out[..., 1, 2] = cp * t, -cp * t
        out[..., 2, 0] = -sp / np.sin(eta) ** 2
        out[..., 2, 1], out[..., 2, 2] = cp / t, -cp / t
        return out

    X1 = VectorFieldRepr(HOPF_CHART, X1_comp, X1_jac, label="X1")
    return BeltramiFamily(HOPF_CHART, MetricField(HOPF_CHART, g, label=f"g({a1},{a2})"), X1,
                          ScalarField(HOPF_CHART, L2_func, label="L2"), alpha)


# ---------------------------------------------------------------------------
# quaternionic coframe


class QuaternionicCoframe(NamedTuple):
    chart: ChartDomain
    a: KForm
    b: KForm
    c: KForm


def _rotation_generator(pairs):
    # matrix of sum over (i, j) of x_i dx_j - x_j dx_i
    M = np.zeros((4, 4))
    for i, j in pairs:
        M[j, i] += 1.0
        M[i, j] -= 1.0
    return M


def quaternionic_coframe() -> QuaternionicCoframe:
    """Left-invariant coframe of S^3 = SU(2), pulled back to Hopf coordinates.

    With ``(x1, x2, x3, x4) = (x1, y1, x2, y2)``::

        a = x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3
        b = x1 dx3 - x3 dx1 + x4 dx2 - x2 dx4
        c = x1 dx4 - x4 dx1 + x2 dx3 - x3 dx2

    These satisfy ``db = 2 c ^ a`` and ``dc = 2 a ^ b``.
    """
    emb = hopf_embedding()
    a = pullback(emb, linear_form(R4_CHART, _rotation_generator([(0, 1), (2, 3)])))
    b = pullback(emb, linear_form(R4_CHART, _rotation_generator([(0, 2), (3, 1)])))
    c = pullback(emb, linear_form(R4_CHART, _rotation_generator([(0, 3), (1, 2)])))
    a.label, b.label, c.label = "a", "b", "c"
    return QuaternionicCoframe(HOPF_CHART, a, b, c)


# ---------------------------------------------------------------------------
# surfaces of revolution


class RevolutionProfile:
    """Warped metric ``dr^2 + f(r)^2 dphi^2`` on ``[0, L] x S^1``.

    Closing conditions: ``f(0) = f(L) = 0``, ``f'(0) = 1/alpha1`` and
    ``f'(L) = -1/alpha2`` within ``1e-8``, and ``f > 0`` inside.  The
    endpoints are then cone points of orders ``alpha1`` and ``alpha2`` (order
    1 meaning smooth).
    """

    CLOSE_TOL = 1e-8

    def __init__(self, f: Callable, df: Callable, d2f: Callable, length: float,
                 alpha1: int = 1, alpha2: int = 1, label: str = ""):
        self.f, self.df, self.d2f = f, df, d2f
        self.length = float(length)
        self.alpha1, self.alpha2 = int(alpha1), int(alpha2)
        self.label = label
        if self.length <= 0:
            raise ValueError("profile length must be positive")
        if self.alpha1 < 1 or self.alpha2 < 1:
            raise ValueError("cone orders must be >= 1")
        L = self.length
        checks = [
            ("f(0) = 0", float(f(np.float64(0.0))), 0.0),
            ("f(L) = 0", float(f(np.float64(L))), 0.0),
            (f"f'(0) = 1/{self.alpha1}", float(df(np.float64(0.0))), 1.0 / self.alpha1),
            (f"f'(L) = -1/{self.alpha2}", float(df(np.float64(L))), -1.0 / self.alpha2),
        ]
        for name, got, want in checks:
            if not abs(got - want) <= self.CLOSE_TOL:
                raise ValueError(f"closing condition {name} violated: got {got!r}")
        r = np.linspace(0.0, L, 1002)[1:-1]
        if np.min(f(r)) <= 0:
            raise ValueError("profile must be positive in the interior")

    def orbifold(self) -> Orbifold2D:
        return Orbifold2D(0, tuple(a for a in (self.alpha1, self.alpha2) if a > 1))


def gauss_bonnet_revolution(P: RevolutionProfile, spec: QuadratureSpec = DEFAULT_SPEC,
                            tolerance: float = 1e-8) -> CheckReport:
    """Total curvature by quadrature against ``2 pi chi_orb``.

    ``K = -f''/f`` and ``dA = f dr dphi``; the integrand ``K f`` is evaluated
    at interior nodes only.
    """

    def integrand(x):
        r = x[..., 0]
        fr = P.f(r)
        return (-P.d2f(r) / fr) * fr

    res = integrate_scalar(integrand, ((0.0, P.length), (0.0, TWO_PI)), spec)
    chi = chi_orb(P.orbifold())
    return CheckReport(
        "gauss_bonnet", res.value, TWO_PI * float(chi), tolerance,
        detail=f"chi_orb = {chi}; expected 2*pi*chi_orb; quadrature error estimate {res.error_estimate:.3g}",
        provenance=res.provenance,
    )
