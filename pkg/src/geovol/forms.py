"""Chart-based exterior algebra for numerically evaluated differential forms.

Every field in this module is *vectorised*: coefficient callables take an
array of chart coordinates of shape ``(..., dim)`` and return an array whose
leading axes match.  A degree-``k`` form on a ``dim``-dimensional chart stores
``C(dim, k)`` coefficients, one per strictly increasing multi-index, ordered
lexicographically (the order of :func:`itertools.combinations`).

Derivative information is optional.  A form may carry an analytic gradient
(and Hessian) of its coefficients; operations propagate these where the
product rule allows and otherwise fall back to central finite differences
with step ``eps**(1/3) * max(1, |x|)``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "FD_SCALE",
    "SAMPLE_MARGIN",
    "ChartError",
    "DegreeError",
    "TopDegreeWarning",
    "ChartDomain",
    "Point",
    "KForm",
    "ScalarField",
    "VectorFieldRepr",
    "SmoothMap",
    "multi_indices",
    "permutation_sign",
    "central_difference",
    "identity_map",
    "constant_form",
    "coordinate_form",
    "wedge",
    "wedge_power",
    "ext_d",
    "interior",
    "lie_derivative",
    "pullback",
    "evaluate_pairing",
]

FD_SCALE = np.finfo(float).eps ** (1.0 / 3.0)
SAMPLE_MARGIN = 1e-6

ArrayFn = Callable[[np.ndarray], np.ndarray]


class ChartError(ValueError):
    """Objects living on different charts were combined."""


class DegreeError(ValueError):
    """A form degree is out of range for the requested operation."""


class TopDegreeWarning(UserWarning):
    """Exterior derivative of a top-degree form (zero by convention)."""


# ---------------------------------------------------------------------------
# Charts and points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartDomain:
    """A coordinate box hosting forms, fields and maps.

    ``excluded_sets`` is informational only: a human readable description of
    the measure-zero loci where the coordinates degenerate.
    """

    name: str
    coordinate_names: tuple
    bounds: tuple
    excluded_sets: str = ""

    def __post_init__(self):
        names = tuple(self.coordinate_names)
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        if len(names) != len(bounds):
            raise ValueError(
                f"chart {self.name!r}: {len(names)} coordinate names but {len(bounds)} bounds"
            )
        for nm, (lo, hi) in zip(names, bounds):
            if not lo < hi:
                raise ValueError(f"chart {self.name!r}: empty interval for {nm}: [{lo}, {hi}]")
        object.__setattr__(self, "coordinate_names", names)
        object.__setattr__(self, "bounds", bounds)

    @property
    def dim(self) -> int:
        return len(self.coordinate_names)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower) & (x <= self.upper), axis=-1)

    def sample(self, n: int, seed: int = 0, margin: float = SAMPLE_MARGIN) -> np.ndarray:
        """Uniform random interior points, kept ``margin`` away from the boundary."""
        lo = self.lower + margin
        hi = self.upper - margin
        rng = np.random.default_rng(seed)
        return lo + (hi - lo) * rng.random((n, self.dim))

    def point(self, *coords) -> "Point":
        return Point(self, coords)

    def __str__(self):
        return f"{self.name}({', '.join(self.coordinate_names)})"


@dataclass(frozen=True)
class Point:
    chart: ChartDomain
    coords: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in np.ravel(self.coords))
        if len(coords) != self.chart.dim:
            raise ValueError(f"point has {len(coords)} coordinates, chart {self.chart} needs {self.chart.dim}")
        if not self.chart.contains(coords):
            raise ValueError(f"point {coords} lies outside chart {self.chart}")
        object.__setattr__(self, "coords", coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _as_coords(x, dim: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ValueError(f"expected coordinates with trailing axis of length {dim}, got shape {arr.shape}")
    return arr


# ---------------------------------------------------------------------------
# Multi-index bookkeeping
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def multi_indices(dim: int, k: int) -> tuple:
    """Strictly increasing ``k``-tuples from ``range(dim)``, lexicographic."""
    if k < 0:
        return ()
    return tuple(itertools.combinations(range(dim), k))


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 when an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def _index_lookup(dim: int, k: int) -> dict:
    return {idx: n for n, idx in enumerate(multi_indices(dim, k))}


@lru_cache(maxsize=None)
def _wedge_table(dim: int, k: int, l: int) -> np.ndarray:
    left, right = multi_indices(dim, k), multi_indices(dim, l)
    out = _index_lookup(dim, k + l)
    table = np.zeros((len(left), len(right), len(out)))
    for a, I in enumerate(left):
        for b, J in enumerate(right):
            s = permutation_sign(I + J)
            if s:
                table[a, b, out[tuple(sorted(I + J))]] = s
    return table


@lru_cache(maxsize=None)
def _d_table(dim: int, k: int) -> np.ndarray:
    # d(f dx_I) = sum_i df/dx_i dx_i ^ dx_I
    src = _index_lookup(dim, k)
    out = multi_indices(dim, k + 1)
    table = np.zeros((len(src), dim, len(out)))
    for c, K in enumerate(out):
        for m, i in enumerate(K):
            table[src[K[:m] + K[m + 1:]], i, c] = (-1) ** m
    return table


@lru_cache(maxsize=None)
def _interior_table(dim: int, k: int) -> np.ndarray:
    src = multi_indices(dim, k)
    out = _index_lookup(dim, k - 1)
    table = np.zeros((dim, len(src), len(out)))
    for c, K in enumerate(src):
        for m, i in enumerate(K):
            table[i, c, out[K[:m] + K[m + 1:]]] = (-1) ** m
    return table


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------


def central_difference(fn: ArrayFn, x: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """Central-difference derivative of a vectorised function.

    Returns an array of shape ``fn(x).shape + (dim,)`` whose last axis is the
    coordinate direction.  The default step is ``eps**(1/3) * max(1, |x_i|)``.
    """
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    cols = []
    for i in range(dim):
        scale = np.maximum(1.0, np.abs(x[..., i]))
        h = (FD_SCALE if step is None else step) * scale
        xp = x.copy()
        xm = x.copy()
        xp[..., i] += h
        xm[..., i] -= h
        # actual spacing after rounding of x +- h
        width = xp[..., i] - xm[..., i]
        fp, fm = np.asarray(fn(xp)), np.asarray(fn(xm))
        width = width.reshape(width.shape + (1,) * (fp.ndim - width.ndim))
        cols.append((fp - fm) / width)
    return np.stack(cols, axis=-1)


# ---------------------------------------------------------------------------
# Forms, fields, maps
# ---------------------------------------------------------------------------


class KForm:
    """A degree-``k`` differential form on a chart.

    Parameters
    ----------
    chart : ChartDomain
    degree : int
        ``0 <= degree <= chart.dim``.
    coeffs : callable
        ``x (..., dim) -> (..., C(dim, k))`` coefficients on the increasing
        multi-indices.
    grad, hess : callable, optional
        Analytic first and second coordinate derivatives of the coefficients,
        shapes ``(..., N, dim)`` and ``(..., N, dim, dim)``.
    """

    def __init__(self, chart: ChartDomain, degree: int, coeffs: ArrayFn,
                 grad: Optional[ArrayFn] = None, hess: Optional[ArrayFn] = None,
                 label: str = ""):
        if not 0 <= degree <= chart.dim:
            raise DegreeError(f"degree {degree} form cannot live on {chart.dim}-dimensional chart {chart}")
        self._setup(chart, degree, coeffs, grad, hess, label)

    def _setup(self, chart, degree, coeffs, grad, hess, label):
        self.chart = chart
        self.degree = degree
        self._coeffs = coeffs
        self._grad = grad
        self._hess = hess
        self.label = label

    @classmethod
    def zero(cls, chart: ChartDomain, degree: int) -> "KForm":
        """The zero form; ``degree > dim`` is allowed and has no coefficients."""
        if degree < 0:
            raise DegreeError("negative degree")
        n = len(multi_indices(chart.dim, degree))

        def coeffs(x):
            return np.zeros(np.shape(x)[:-1] + (n,))

        def grad(x):
            return np.zeros(np.shape(x)[:-1] + (n, chart.dim))

        def hess(x):
            return np.zeros(np.shape(x)[:-1] + (n, chart.dim, chart.dim))

        form = cls.__new__(cls)
        form._setup(chart, degree, coeffs, grad, hess, "0")
        return form

    @property
    def size(self) -> int:
        return len(multi_indices(self.chart.dim, self.degree))

    @property
    def indices(self) -> tuple:
        return multi_indices(self.chart.dim, self.degree)

    @property
    def has_grad(self) -> bool:
        return self._grad is not None

    @property
    def has_hess(self) -> bool:
        return self._hess is not None

    def __call__(self, x) -> np.ndarray:
        x = _as_coords(x, self.chart.dim)
        values = np.asarray(self._coeffs(x), dtype=float)
        expected = x.shape[:-1] + (self.size,)
        if values.shape != expected:
            values = np.broadcast_to(values, expected)
        return values

    def jacobian(self, x) -> np.ndarray:
        """Coordinate derivatives of the coefficients, ``(..., N, dim)``."""
        x = _as_coords(x, self.chart.dim)
        if self._grad is not None:
            return np.broadcast_to(np.asarray(self._grad(x), dtype=float),
                                   x.shape[:-1] + (self.size, self.chart.dim))
        return central_difference(self.__call__, x)

    def hessian(self, x) -> Optional[np.ndarray]:
        if self._hess is None:
            return None
        x = _as_coords(x, self.chart.dim)
        return np.broadcast_to(np.asarray(self._hess(x), dtype=float),
                               x.shape[:-1] + (self.size, self.chart.dim, self.chart.dim))

    def scalar(self, x) -> np.ndarray:
        """Values of a 0-form with the coefficient axis dropped."""
        if self.degree != 0:
            raise DegreeError("scalar() needs a 0-form")
        return self(x)[..., 0]

    def components(self, x) -> dict:
        """Coefficients at a single point keyed by coordinate-name tuples."""
        vals = self(np.asarray(x, dtype=float))
        names = self.chart.coordinate_names
        return {tuple(names[i] for i in idx): float(v) for idx, v in zip(self.indices, vals)}

    # linear structure -----------------------------------------------------

    def _check_compatible(self, other: "KForm"):
        if other.chart != self.chart:
            raise ChartError(f"chart mismatch: {self.chart} vs {other.chart}")
        if other.degree != self.degree:
            raise DegreeError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def _combine(self, other: "KForm", sign: float) -> "KForm":
        self._check_compatible(other)
        a, b = self, other

        def coeffs(x):
            return a(x) + sign * b(x)

        grad = hess = None
        if a.has_grad and b.has_grad:
            def grad(x):
                return a.jacobian(x) + sign * b.jacobian(x)
        if a.has_hess and b.has_hess:
            def hess(x):
                return a.hessian(x) + sign * b.hessian(x)
        return KForm(self.chart, self.degree, coeffs, grad, hess)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, c):
        if isinstance(c, KForm):
            return wedge(self, c)
        c = float(c)
        a = self
        grad = (lambda x: c * a.jacobian(x)) if a.has_grad else None
        hess = (lambda x: c * a.hessian(x)) if a.has_hess else None
        return KForm(self.chart, self.degree, lambda x: c * a(x), grad, hess)

    __rmul__ = __mul__

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"<KForm{tag} degree={self.degree} on {self.chart}>"


class ScalarField(KForm):
    """A 0-form built from a scalar-valued function.

    ``func`` returns shape ``(...)``; ``grad`` ``(..., dim)``; ``hess``
    ``(..., dim, dim)``.
    """

    def __init__(self, chart: ChartDomain, func: ArrayFn, grad: Optional[ArrayFn] = None,
                 hess: Optional[ArrayFn] = None, label: str = ""):
        g = (lambda x: np.asarray(grad(x), dtype=float)[..., None, :]) if grad is not None else None
        h = (lambda x: np.asarray(hess(x), dtype=float)[..., None, :, :]) if hess is not None else None
        super().__init__(chart, 0, lambda x: np.asarray(func(x), dtype=float)[..., None], g, h, label)


class VectorFieldRepr:
    """Components of a vector field on a chart; ``jacobian[..., k, i] = d_i X^k``."""

    def __init__(self, chart: ChartDomain, components: ArrayFn,
                 jacobian: Optional[ArrayFn] = None, label: str = ""):
        self.chart = chart
        self._components = components
        self._jacobian = jacobian
        self.label = label

    @property
    def has_jacobian(self) -> bool:
        return self._jacobian is not None

    def __call__(self, x) -> np.ndarray:
        x = _as_coords(x, self.chart.dim)
        return np.broadcast_to(np.asarray(self._components(x), dtype=float), x.shape)

    def derivative(self, x) -> np.ndarray:
        x = _as_coords(x, self.chart.dim)
        if self._jacobian is not None:
            return np.broadcast_to(np.asarray(self._jacobian(x), dtype=float), x.shape + (self.chart.dim,))
        return central_difference(self.__call__, x)

    def scaled(self, f: KForm) -> "VectorFieldRepr":
        """The field ``f * X`` for a 0-form ``f``."""
        if f.degree != 0 or f.chart != self.chart:
            raise ChartError("scaling needs a 0-form on the same chart")
        X = self
        jac = None
        if X.has_jacobian and f.has_grad:
            def jac(x):
                fx = f.scalar(x)
                return fx[..., None, None] * X.derivative(x) + X(x)[..., :, None] * f.jacobian(x)[..., 0, None, :]
        return VectorFieldRepr(self.chart, lambda x: f.scalar(x)[..., None] * X(x), jac)

    def __repr__(self):
        return f"<VectorFieldRepr {self.label} on {self.chart}>"


class SmoothMap:
    """A map between charts with optional analytic Jacobian and Hessian.

    ``jacobian(x)[..., t, s] = dF^t/dx^s`` and
    ``hessian(x)[..., t, s, u] = d^2F^t/dx^s dx^u``.
    """

    def __init__(self, source: ChartDomain, target: ChartDomain, components: ArrayFn,
                 jacobian: Optional[ArrayFn] = None, hessian: Optional[ArrayFn] = None,
                 label: str = ""):
        self.source = source
        self.target = target
        self._components = components
        self._jacobian = jacobian
        self._hessian = hessian
        self.label = label

    @property
    def has_jacobian(self) -> bool:
        return self._jacobian is not None

    @property
    def has_hessian(self) -> bool:
        return self._hessian is not None

    def __call__(self, x) -> np.ndarray:
        x = _as_coords(x, self.source.dim)
        out = np.asarray(self._components(x), dtype=float)
        return np.broadcast_to(out, x.shape[:-1] + (self.target.dim,))

    def jacobian(self, x) -> np.ndarray:
        x = _as_coords(x, self.source.dim)
        shape = x.shape[:-1] + (self.target.dim, self.source.dim)
        if self._jacobian is not None:
            jac = np.broadcast_to(np.asarray(self._jacobian(x), dtype=float), shape)
        else:
            jac = central_difference(self.__call__, x)
        if not np.all(np.isfinite(jac)):
            raise ValueError(f"non-finite Jacobian of map {self.label or ''} {self.source} -> {self.target}")
        return jac

    def hessian(self, x) -> Optional[np.ndarray]:
        if self._hessian is None:
            return None
        x = _as_coords(x, self.source.dim)
        d, s = self.target.dim, self.source.dim
        return np.broadcast_to(np.asarray(self._hessian(x), dtype=float), x.shape[:-1] + (d, s, s))

    def __repr__(self):
        return f"<SmoothMap {self.label} {self.source} -> {self.target}>"


def identity_map(chart: ChartDomain) -> SmoothMap:
    dim = chart.dim
    eye = np.eye(dim)
    return SmoothMap(
        chart, chart,
        lambda x: x,
        lambda x: np.broadcast_to(eye, x.shape[:-1] + (dim, dim)),
        lambda x: np.zeros(x.shape[:-1] + (dim, dim, dim)),
        label="id",
    )


def constant_form(chart: ChartDomain, degree: int, values: Sequence[float]) -> KForm:
    values = np.asarray(values, dtype=float)
    n, dim = len(multi_indices(chart.dim, degree)), chart.dim
    if values.shape != (n,):
        raise ValueError(f"need {n} coefficients, got {values.shape}")
    return KForm(
        chart, degree,
        lambda x: np.broadcast_to(values, np.shape(x)[:-1] + (n,)),
        lambda x: np.zeros(np.shape(x)[:-1] + (n, dim)),
        lambda x: np.zeros(np.shape(x)[:-1] + (n, dim, dim)),
    )


def coordinate_form(chart: ChartDomain, *names: str) -> KForm:
    """The basis form ``dx_{i1} ^ ... ^ dx_{ik}`` named by coordinates."""
    pos = [chart.coordinate_names.index(nm) for nm in names]
    sign = permutation_sign(pos)
    values = np.zeros(len(multi_indices(chart.dim, len(pos))))
    if sign:
        values[_index_lookup(chart.dim, len(pos))[tuple(sorted(pos))]] = sign
    return constant_form(chart, len(pos), values)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _same_chart(*objs):
    charts = [o.chart for o in objs]
    for c in charts[1:]:
        if c != charts[0]:
            raise ChartError(f"chart mismatch: {charts[0]} vs {c}")


def wedge(omega: KForm, eta: KForm) -> KForm:
    """Exterior product ``omega ^ eta``."""
    _same_chart(omega, eta)
    chart = omega.chart
    k, l = omega.degree, eta.degree
    if k + l > chart.dim:
        raise DegreeError(f"wedge of degrees {k} and {l} exceeds dimension {chart.dim}")
    table = _wedge_table(chart.dim, k, l)

    def coeffs(x):
        return np.einsum("...i,...j,ijk->...k", omega(x), eta(x), table)

    grad = None
    if omega.has_grad and eta.has_grad:
        def grad(x):
            return (np.einsum("...im,...j,ijk->...km", omega.jacobian(x), eta(x), table)
                    + np.einsum("...i,...jm,ijk->...km", omega(x), eta.jacobian(x), table))
    return KForm(chart, k + l, coeffs, grad)


def wedge_power(omega: KForm, n: int) -> KForm:
    """``omega ^ ... ^ omega`` (``n`` factors); ``n = 0`` gives the constant 1."""
    result = constant_form(omega.chart, 0, [1.0])
    for _ in range(n):
        result = wedge(result, omega)
    return result


def ext_d(omega: KForm) -> KForm:
    """Exterior derivative.

    Uses the analytic gradient when present, otherwise central differences.
    The result carries an analytic gradient exactly when ``omega`` carries a
    Hessian.
    """
    chart, k = omega.chart, omega.degree
    if k >= chart.dim:
        warnings.warn(f"d of a degree-{k} form on a {chart.dim}-chart is zero", TopDegreeWarning, stacklevel=2)
        return KForm.zero(chart, k + 1)
    table = _d_table(chart.dim, k)

    def coeffs(x):
        out = np.einsum("...Ii,IiK->...K", omega.jacobian(x), table)
        if not np.all(np.isfinite(out)):
            raise ValueError("non-finite derivative in ext_d")
        return out

    grad = None
    if omega.has_hess:
        def grad(x):
            return np.einsum("...Iim,IiK->...Km", omega.hessian(x), table)
    return KForm(chart, k + 1, coeffs, grad)


def interior(X: VectorFieldRepr, omega: KForm) -> KForm:
    """Contraction ``i_X omega`` in the first slot."""
    _same_chart(X, omega)
    chart, k = omega.chart, omega.degree
    if k == 0:
        raise DegreeError("interior product of a 0-form")
    table = _interior_table(chart.dim, k)

    def coeffs(x):
        return np.einsum("...i,...K,iKJ->...J", X(x), omega(x), table)

    grad = None
    if X.has_jacobian and omega.has_grad:
        def grad(x):
            return (np.einsum("...im,...K,iKJ->...Jm", X.derivative(x), omega(x), table)
                    + np.einsum("...i,...Km,iKJ->...Jm", X(x), omega.jacobian(x), table))
    return KForm(chart, k - 1, coeffs, grad)


def lie_derivative(X: VectorFieldRepr, omega: KForm) -> KForm:
    """``L_X omega = i_X d omega + d i_X omega``."""
    _same_chart(X, omega)
    if omega.degree == 0:
        return interior(X, ext_d(omega))
    if omega.degree == omega.chart.dim:
        return ext_d(interior(X, omega))
    return interior(X, ext_d(omega)) + ext_d(interior(X, omega))


def _minor_det_grad(jac, hes, rows, cols):
    """d/dx_m det(jac[rows, cols]) for every m, via column replacement."""
    m = jac[..., rows, :][..., :, cols]
    k = len(cols)
    s = jac.shape[-1]
    total = np.zeros(jac.shape[:-2] + (s,))
    for c in range(k):
        rep = np.broadcast_to(m[..., None, :, :], m.shape[:-2] + (s, k, k)).copy()
        # column c replaced by d/dx_m of that column, for every m
        dcol = hes[..., rows, cols[c], :]                  # (..., k, s)
        rep[..., :, :, c] = np.swapaxes(dcol, -1, -2)      # (..., s, k)
        total = total + np.linalg.det(rep)
    return total


def pullback(F: SmoothMap, omega: KForm) -> KForm:
    """Pull a form on ``F.target`` back to ``F.source`` via Jacobian minors.

    The result has an analytic gradient when ``omega`` has one and ``F``
    provides analytic Jacobian and Hessian.
    """
    if omega.chart != F.target:
        raise ChartError(f"form lives on {omega.chart}, map targets {F.target}")
    k = omega.degree
    src = F.source
    if k > src.dim:
        return KForm.zero(src, k)
    rows_list = multi_indices(F.target.dim, k)
    cols_list = multi_indices(src.dim, k)
    row_idx = [list(r) for r in rows_list]
    col_idx = [list(c) for c in cols_list]

    def minors(jac):
        if k == 0:
            return np.ones(jac.shape[:-2] + (1, 1))
        if k == 1:
            return jac
        out = np.empty(jac.shape[:-2] + (len(rows_list), len(cols_list)))
        for a, r in enumerate(row_idx):
            sub = jac[..., r, :]
            for b, c in enumerate(col_idx):
                out[..., a, b] = np.linalg.det(sub[..., :, c])
        return out

    def coeffs(x):
        jac = F.jacobian(x)
        return np.einsum("...J,...JI->...I", omega(F(x)), minors(jac))

    grad = None
    if k == 1 and omega.has_grad and F.has_jacobian and F.has_hessian:
        # 1x1 minors are the Jacobian entries themselves
        def grad(x):
            jac = F.jacobian(x)
            y = F(x)
            chain = np.einsum("...Jt,...ts->...Js", omega.jacobian(y), jac)
            return (np.einsum("...Js,...JI->...Is", chain, jac)
                    + np.einsum("...J,...JIs->...Is", omega(y), F.hessian(x)))
    elif omega.has_grad and F.has_jacobian and F.has_hessian:
        def grad(x):
            jac = F.jacobian(x)
            hes = F.hessian(x)
            y = F(x)
            chain = np.einsum("...Jt,...ts->...Js", omega.jacobian(y), jac)
            out = np.einsum("...Js,...JI->...Is", chain, minors(jac))
            if k > 0:
                vals = omega(y)
                for a, r in enumerate(row_idx):
                    for b, c in enumerate(col_idx):
                        out[..., b, :] += vals[..., a, None] * _minor_det_grad(jac, hes, r, c)
            return out
    return KForm(src, k, coeffs, grad)


def evaluate_pairing(omega: KForm, vectors: Sequence[VectorFieldRepr], x) -> np.ndarray:
    """``omega(V_1, ..., V_k)`` at ``x`` by repeated contraction."""
    form = omega
    for V in vectors:
        form = interior(V, form)
    return form.scalar(x)
