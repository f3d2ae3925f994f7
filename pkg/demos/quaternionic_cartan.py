"""
A Cartan structure on S^3 and its Bott invariant
================================================

The left-invariant coframe (a, b, c) of SU(2) gives the pair (b, c); the
connection form alpha is solved for pointwise by least squares.
"""

import numpy as np

from geovol import catalog
from geovol.checks import (bott_relation, cartan_alpha_form, cartan_residual, cartan_solve_alpha,
                           common_kernel_field, geodesibility_residual)

chart, a, b, c = catalog.quaternionic_coframe()
pts = chart.sample(50, seed=0)

print(cartan_residual(b, c, pts).summary())

sol = cartan_solve_alpha(b, c, pts)
print("max |alpha - 2a|:", np.abs(sol - 2 * a(pts)).max())

alpha = cartan_alpha_form(b, c)
X = common_kernel_field(b, c, alpha)
print("common kernel field at a sample point:", X(pts[0]))
print(geodesibility_residual(alpha, X, pts, tolerance=1e-5).summary())

rep = bott_relation(b, c, X, catalog.hopf_chain())
print("Bott invariant", rep.computed, "and -vol_X", rep.expected)
print("vol_X / pi^2 =", -rep.expected.real / np.pi ** 2)
