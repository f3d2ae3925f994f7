"""Metrics on charts: index lowering, pullback, Christoffel symbols, and the
Wadsley residual ``L_X a - g(nabla_X X, .)`` for ``a = g(X, .)``.

Metric derivatives are always taken by central differences, so every
geodesy check here is accurate to the finite-difference level only.
"""

from __future__ import annotations

import warnings
from typing import Callable

import numpy as np

from .forms import (ChartDomain, ChartError, KForm, SmoothMap, VectorFieldRepr,
                    central_difference, lie_derivative, _as_coords)

__all__ = [
    "COND_LIMIT",
    "MetricError",
    "MetricField",
    "flat",
    "pullback_metric",
    "metric_derivative",
    "christoffel",
    "cov_accel",
    "wadsley_residual",
]

COND_LIMIT = 1e12
UNIT_TOL = 1e-6


class MetricError(ValueError):
    pass


class MetricField:
    """``g(x)`` returns symmetric matrices of shape ``(..., dim, dim)``."""

    def __init__(self, chart: ChartDomain, g: Callable[[np.ndarray], np.ndarray], label: str = ""):
        self.chart = chart
        self._g = g
        self.label = label

    def __call__(self, x) -> np.ndarray:
        x = _as_coords(x, self.chart.dim)
        d = self.chart.dim
        return np.broadcast_to(np.asarray(self._g(x), dtype=float), x.shape[:-1] + (d, d))

    def check(self, points, sym_tol: float = 1e-12) -> float:
        """Verify symmetry and positive definiteness; return the smallest eigenvalue."""
        G = self(points)
        asym = np.max(np.abs(G - np.swapaxes(G, -1, -2)), initial=0.0)
        scale = max(1.0, float(np.max(np.abs(G))))
        if asym > sym_tol * scale:
            raise MetricError(f"metric not symmetric (max asymmetry {asym:.3g})")
        lam = float(np.min(np.linalg.eigvalsh(0.5 * (G + np.swapaxes(G, -1, -2)))))
        if lam <= 0:
            raise MetricError(f"metric not positive definite (smallest eigenvalue {lam:.3g})")
        return lam

    def norm_sq(self, X: VectorFieldRepr, x) -> np.ndarray:
        v = X(x)
        return np.einsum("...i,...ij,...j->...", v, self(x), v)


def _solve(G: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(G)
    worst = float(np.max(cond))
    if not np.isfinite(worst) or worst > COND_LIMIT:
        raise MetricError(f"metric matrix too ill-conditioned (condition number {worst:.3g})")
    return np.linalg.solve(G, rhs)


def flat(g: MetricField, X: VectorFieldRepr) -> KForm:
    """The 1-form ``g(X, .)``."""
    if g.chart != X.chart:
        raise ChartError(f"metric on {g.chart}, field on {X.chart}")
    return KForm(g.chart, 1, lambda x: np.einsum("...ij,...j->...i", g(x), X(x)), label="flat")


def pullback_metric(F: SmoothMap, g: MetricField, check_points: int = 16) -> MetricField:
    """``J^T g(F(x)) J``; warns if the Jacobian is rank deficient at sampled points."""
    if F.target != g.chart:
        raise ChartError(f"map targets {F.target}, metric lives on {g.chart}")
    pts = F.source.sample(check_points, seed=0)
    ranks = np.linalg.matrix_rank(F.jacobian(pts))
    if np.any(ranks < F.source.dim):
        warnings.warn(f"Jacobian of {F!r} is rank deficient at some sampled points", RuntimeWarning, stacklevel=2)

    def G(x):
        J = F.jacobian(x)
        return np.einsum("...ti,...tu,...uj->...ij", J, g(F(x)), J)

    return MetricField(F.source, G, label=f"pullback of {g.label}")


def metric_derivative(g: MetricField, x) -> np.ndarray:
    """``dg[..., a, b, m] = d_m g_ab`` by central differences."""
    return central_difference(g, _as_coords(x, g.chart.dim))


def christoffel(g: MetricField, p) -> np.ndarray:
    """Levi-Civita symbols ``Gamma[..., k, i, j]``, symmetric in ``(i, j)``."""
    x = _as_coords(np.asarray(p, dtype=float), g.chart.dim)
    dg = metric_derivative(g, x)
    # first kind: [l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    first = (np.einsum("...jli->...lij", dg) + np.einsum("...ilj->...lij", dg)
             - np.einsum("...ijl->...lij", dg))
    d = g.chart.dim
    rhs = first.reshape(first.shape[:-2] + (d * d,))
    gamma = 0.5 * _solve(g(x), rhs).reshape(first.shape)
    return 0.5 * (gamma + np.swapaxes(gamma, -1, -2))


def cov_accel(g: MetricField, X: VectorFieldRepr, p) -> np.ndarray:
    """``(nabla_X X)^k = X^i d_i X^k + Gamma^k_ij X^i X^j``."""
    if g.chart != X.chart:
        raise ChartError(f"metric on {g.chart}, field on {X.chart}")
    x = _as_coords(np.asarray(p, dtype=float), g.chart.dim)
    v = X(x)
    dX = X.derivative(x)
    gamma = christoffel(g, x)
    return np.einsum("...i,...ki->...k", v, dX) + np.einsum("...kij,...i,...j->...k", gamma, v, v)


def wadsley_residual(g: MetricField, X: VectorFieldRepr, samples) -> float:
    """Max over samples and directions of ``|(L_X a - g(nabla_X X, .))(d_i)|``.

    ``X`` must have unit length at every sample (tolerance 1e-6); it is not
    rescaled.
    """
    x = _as_coords(np.asarray(samples, dtype=float), g.chart.dim)
    lengths = g.norm_sq(X, x)
    worst = float(np.max(np.abs(lengths - 1.0)))
    if worst > UNIT_TOL:
        raise MetricError(f"vector field is not of unit length (max | |X|^2 - 1 | = {worst:.3g})")
    alpha = flat(g, X)
    lie = lie_derivative(X, alpha)(x)
    acc = np.einsum("...ij,...j->...i", g(x), cov_accel(g, X, x))
    return float(np.max(np.abs(lie - acc)))
