"""
The Hopf fibration as a geodesible flow
=======================================

Walk through the volume of the Hopf flow on S^3, the curvature of its
connection form integrated over a section, and the exact Seifert count.
"""

import numpy as np

from geovol import catalog
from geovol.forms import ext_d, interior, pullback, wedge
from geovol.integrate import QuadratureSpec, integrate_form
from geovol.seifert import SeifertData, euler_number, vol_from_seifert

# The bundle comes as a chart, the period-1 generator X and the connection form.
chart, X, alpha = catalog.hopf_bundle()
pts = chart.sample(5, seed=0)
print("alpha(X) at five points:", interior(X, alpha).scalar(pts))

# X lies in the kernel of d alpha, so alpha is a characteristic form for X.
print("max |i_X d alpha|:", np.abs(interior(X, ext_d(alpha))(pts)).max())

# The volume of the flow is the integral of alpha ^ d alpha over S^3.
vol = integrate_form(wedge(alpha, ext_d(alpha)), catalog.hopf_chain())
print("vol_X by quadrature:", vol.value, "+/-", vol.error_estimate)

# Raising the quadrature order barely moves it.
for order in (8, 16, 32):
    r = integrate_form(wedge(alpha, ext_d(alpha)), catalog.hopf_chain(), QuadratureSpec.gauss_legendre(order))
    print(f"  order {order:2d}: {r.value:.16f}")

# The same number from the Seifert invariants, in exact arithmetic.
S = SeifertData(0, ((1, 1),))
print("Seifert invariants", S, "euler number", euler_number(S), "volume", vol_from_seifert(S))

# Pull d alpha back along the section over the plane.  The density decays like
# r^-3, so the truncated integral approaches 1 like 1 - 1/(1 + R^2).
density = pullback(catalog.hopf_section(), ext_d(alpha))
r = np.array([0.5, 1.0, 2.0, 10.0])
print("section density at r =", r, ":", density(np.stack([r, 0 * r], -1))[:, 0])
for R in (10.0, 100.0, 1000.0):
    res = catalog.hopf_curvature_integral(R)
    print(f"  R = {R:6.0f}: {res.value:.12f}  (tail bound {res.truncation_error:.1e})")
