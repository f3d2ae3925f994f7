"""
Two routes to the volume of a Reeb flow on the solid torus
==========================================================

The form H(r^2) dtheta + r^2/2 dphi is contact whenever tau = H - r^2 H' is
positive.  Its volume can be integrated over the whole solid torus, or over
the meridian disc weighted by the return time tau.
"""

import math

import numpy as np

from geovol.catalog import HProfile, disc_contact, disc_volume
from geovol.checks import geodesibility_residual
from geovol.expr import derivative, evaluate, parse_expr, to_text

# Profiles can be polynomial coefficient lists...
H = HProfile.polynomial([1.0, 0.0, 0.125])
chart, alpha, X, tau = disc_contact(H)
print("tau at r = 0, 0.5, 1:", tau.scalar(np.array([[0.0, 0, 0], [0.5, 0, 0], [1.0, 0, 0]])))
print(geodesibility_residual(alpha, X, chart.sample(100)).summary())

for method in ("direct", "return_time"):
    r = disc_volume(H, method)
    print(f"{method:12s} {r.value:.15f}")
print("closed form  ", math.pi * (1 - 1 / 24))

# ...or expressions, differentiated symbolically.
e = parse_expr("2 - u + 0.1*sin(3*u)")
d1 = derivative(e)
print("H  =", to_text(e))
print("H' =", to_text(d1))
H2 = HProfile(lambda u: evaluate(e, u), lambda u: evaluate(d1, u), lambda u: evaluate(derivative(d1), u))
print("volumes:", disc_volume(H2, "direct").value, disc_volume(H2, "return_time").value)

# A profile with tau <= 0 somewhere is rejected up front.
try:
    HProfile.polynomial([0.5, 0.0, 1.0])
except ValueError as exc:
    print("rejected:", exc)
