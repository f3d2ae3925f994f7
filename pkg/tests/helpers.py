"""Shared fixtures-by-function for the test modules."""

import math

import numpy as np

from geovol.catalog import R3_CHART
from geovol.forms import ChartDomain, KForm

TORUS3 = ChartDomain("T3", ("x", "y", "z"), ((0.0, 2 * math.pi),) * 3)
CUBE3 = ChartDomain("cube3", ("x", "y", "z"), ((-1.0, 1.0),) * 3)


def gaussian_base_form(center=(0.3, -0.2, 0.5), axis: int = 1) -> KForm:
    """``exp(-|p - c|^2) dp_axis`` on R^3 with exact gradient and Hessian."""
    c = np.asarray(center, dtype=float)

    def h(x):
        return np.exp(-np.sum((x - c) ** 2, axis=-1))

    def coeffs(x):
        out = np.zeros(x.shape[:-1] + (3,))
        out[..., axis] = h(x)
        return out

    def grad(x):
        out = np.zeros(x.shape[:-1] + (3, 3))
        out[..., axis, :] = -2 * (x - c) * h(x)[..., None]
        return out

    def hess(x):
        d = x - c
        out = np.zeros(x.shape[:-1] + (3, 3, 3))
        out[..., axis, :, :] = h(x)[..., None, None] * (4 * d[..., :, None] * d[..., None, :] - 2 * np.eye(3))
        return out

    return KForm(R3_CHART, 1, coeffs, grad, hess, label="gaussian_dy")
