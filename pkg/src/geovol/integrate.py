"""Integration of k-forms over parametrised k-chains.

Two schemes are available: tensor-product Gauss--Legendre quadrature and
seeded Monte Carlo.  Integrands are evaluated in fixed-size blocks of node
indices; blocks may be farmed out to worker threads, but results are always
concatenated in node order before a single pairwise ``np.sum``, so the value
does not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .forms import KForm, SmoothMap, ChartDomain, DegreeError, ChartError, identity_map, pullback

__all__ = [
    "QuadratureSpec",
    "IntegrationResult",
    "ParametrizedChain",
    "IntegrationError",
    "DEFAULT_SPEC",
    "chart_chain",
    "integrate_scalar",
    "integrate_form",
    "integrate_truncated",
]

BLOCK = 4096


class IntegrationError(ArithmeticError):
    """Raised when an integrand is not finite at a node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate.

    Use the constructors :meth:`gauss_legendre` and :meth:`monte_carlo`.
    ``order`` may be an int (same on every axis) or a tuple per axis.
    """

    scheme: str = "gauss_legendre"
    order: object = 32
    samples: int = 0
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.scheme == "gauss_legendre":
            orders = self.order if isinstance(self.order, tuple) else (self.order,)
            if any(int(o) < 2 for o in orders):
                raise ValueError("Gauss-Legendre order must be >= 2 on every axis")
        elif self.scheme == "monte_carlo":
            if self.samples < 1:
                raise ValueError("Monte Carlo needs at least one sample")
        else:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def gauss_legendre(cls, order=32, workers: int = 1) -> "QuadratureSpec":
        return cls("gauss_legendre", order=order, workers=workers)

    @classmethod
    def monte_carlo(cls, samples: int, seed: int = 0, workers: int = 1) -> "QuadratureSpec":
        return cls("monte_carlo", order=0, samples=samples, seed=seed, workers=workers)

    def orders(self, k: int) -> tuple:
        if isinstance(self.order, tuple):
            if len(self.order) != k:
                raise ValueError(f"order tuple has {len(self.order)} entries, box has {k} axes")
            return tuple(int(o) for o in self.order)
        return (int(self.order),) * k

    @property
    def provenance(self) -> str:
        return "quadrature" if self.scheme == "gauss_legendre" else "monte_carlo"


DEFAULT_SPEC = QuadratureSpec.gauss_legendre(32)


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    evaluations: int
    provenance: str = "quadrature"
    truncation_error: Optional[float] = None

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "evaluations": self.evaluations,
            "provenance": self.provenance,
        }
        if self.truncation_error is not None:
            out["truncation_error"] = self.truncation_error
        return out


@dataclass(frozen=True)
class ParametrizedChain:
    """An oriented box in R^k mapped into a chart.

    ``param_domain`` defaults to the bounds of ``map.source``.
    """

    map: SmoothMap
    param_domain: Optional[tuple] = None
    orientation: int = 1

    def __post_init__(self):
        dom = self.param_domain if self.param_domain is not None else self.map.source.bounds
        dom = tuple((float(lo), float(hi)) for lo, hi in dom)
        if len(dom) != self.map.source.dim:
            raise ValueError("parameter box dimension must equal the map's source dimension")
        if any(not lo < hi for lo, hi in dom):
            raise ValueError(f"degenerate parameter box {dom}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "param_domain", dom)

    @property
    def k(self) -> int:
        return self.map.source.dim

    @property
    def target(self) -> ChartDomain:
        return self.map.target

    def reversed(self) -> "ParametrizedChain":
        return ParametrizedChain(self.map, self.param_domain, -self.orientation)

    def split(self, axis: int, at: float) -> tuple:
        lo, hi = self.param_domain[axis]
        if not lo < at < hi:
            raise ValueError("split point must be interior")
        left = list(self.param_domain)
        right = list(self.param_domain)
        left[axis] = (lo, at)
        right[axis] = (at, hi)
        return (ParametrizedChain(self.map, tuple(left), self.orientation),
                ParametrizedChain(self.map, tuple(right), self.orientation))


def chart_chain(chart: ChartDomain, orientation: int = 1, box=None) -> ParametrizedChain:
    """The whole chart (or a sub-box of it) as a chain via the identity map."""
    return ParametrizedChain(identity_map(chart), box, orientation)


# ---------------------------------------------------------------------------


def _evaluate_blocks(f, points: np.ndarray, workers: int) -> np.ndarray:
    starts = range(0, len(points), BLOCK)

    def run(s):
        return np.asarray(f(points[s:s + BLOCK]), dtype=float).reshape(-1)

    if workers > 1 and len(points) > BLOCK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    values = np.concatenate(parts)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise IntegrationError(f"integrand is {values[i]} at node {points[i].tolist()}", node=points[i])
    return values


def _gauss_grid(box, orders):
    nodes, weights = [], []
    for (lo, hi), n in zip(box, orders):
        t, w = np.polynomial.legendre.leggauss(n)
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (t + 1.0))
        weights.append(half * w)
    mesh = np.meshgrid(*nodes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    wmesh = np.meshgrid(*weights, indexing="ij")
    w = np.prod(np.stack([m.reshape(-1) for m in wmesh], axis=-1), axis=-1)
    return pts, w


def _gauss(f, box, orders, workers):
    pts, w = _gauss_grid(box, orders)
    vals = _evaluate_blocks(f, pts, workers)
    terms = w * vals
    return float(np.sum(terms)), float(np.sum(np.abs(terms))), len(pts)


def _uniform_block(seed: int, start: int, count: int, k: int) -> np.ndarray:
    # one Philox counter step (four doubles) per 4 coordinates of a sample,
    # so sample i depends only on (seed, i)
    steps = -(-k // 4)
    bg = np.random.Philox(key=seed)
    bg.advance(start * steps)
    return np.random.Generator(bg).random((count, 4 * steps))[:, :k]


def _monte_carlo(f, box, spec: QuadratureSpec):
    k = len(box)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    volume = float(np.prod(hi - lo))
    n = spec.samples
    starts = list(range(0, n, BLOCK))

    def run(s):
        count = min(BLOCK, n - s)
        u = _uniform_block(spec.seed, s, count, k)
        return _evaluate_blocks(f, lo + (hi - lo) * u, 1)

    if spec.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    vals = np.concatenate(parts)
    mean = float(np.sum(vals)) / n
    stderr = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return volume * mean, volume * stderr, n


def integrate_scalar(f, box: Sequence = None, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegrationResult:
    """Integrate a function over a coordinate box.

    Parameters
    ----------
    f : callable or KForm
        Either a vectorised ``x (..., k) -> (...)`` or a 0-form, in which case
        ``box`` defaults to its chart bounds.
    box : sequence of (lo, hi)
    spec : QuadratureSpec

    Returns
    -------
    IntegrationResult
        For Gauss--Legendre, ``error_estimate`` is the difference to a rule of
        half the order, floored at the rounding level of the sum.
    """
    if isinstance(f, KForm):
        if f.degree != 0:
            raise DegreeError("integrate_scalar needs a 0-form")
        form = f
        box = form.chart.bounds if box is None else box
        f = form.scalar
    if box is None:
        raise ValueError("integration box required")
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    if spec.scheme == "monte_carlo":
        value, err, n = _monte_carlo(f, box, spec)
        return IntegrationResult(value, err, n, "monte_carlo")
    orders = spec.orders(len(box))
    value, absum, n = _gauss(f, box, orders, spec.workers)
    coarse = tuple(max(2, o // 2) for o in orders)
    coarse_value, _, m = _gauss(f, box, coarse, spec.workers)
    err = max(abs(value - coarse_value), 16 * np.finfo(float).eps * absum)
    return IntegrationResult(value, float(err), n + m, "quadrature")


def integrate_form(omega: KForm, chain: ParametrizedChain, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegrationResult:
    """``orientation * integral over the box of the pulled-back form``."""
    if omega.degree != chain.k:
        raise DegreeError(f"cannot integrate a {omega.degree}-form over a {chain.k}-chain")
    if omega.chart != chain.target:
        raise ChartError(f"form on {omega.chart}, chain maps into {chain.target}")
    pulled = pullback(chain.map, omega)

    def integrand(u):
        return pulled(u)[..., 0]

    res = integrate_scalar(integrand, chain.param_domain, spec)
    return IntegrationResult(chain.orientation * res.value, res.error_estimate, res.evaluations, res.provenance)


def integrate_truncated(omega_on: Callable[[float], tuple], r_max: float,
                        spec: QuadratureSpec = DEFAULT_SPEC,
                        tail_bound: Optional[Callable[[float], float]] = None) -> IntegrationResult:
    """Integrate over a region truncated at radius ``r_max``.

    ``omega_on(R)`` returns ``(form, chain)`` for the region cut off at ``R``.
    The truncation error is ``tail_bound(r_max)`` when a closed-form bound is
    supplied; otherwise it is estimated as the change when ``r_max`` doubles.
    """
    form, chain = omega_on(r_max)
    res = integrate_form(form, chain, spec)
    evaluations = res.evaluations
    if tail_bound is not None:
        trunc = float(tail_bound(r_max))
    else:
        form2, chain2 = omega_on(2.0 * r_max)
        res2 = integrate_form(form2, chain2, spec)
        evaluations += res2.evaluations
        trunc = abs(res2.value - res.value)
    return IntegrationResult(res.value, res.error_estimate, evaluations, res.provenance, trunc)
