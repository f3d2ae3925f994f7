"""
Orbifold Euler characteristics and unit tangent bundles
=======================================================

Everything here is exact: Fractions all the way through.
"""

import math

import numpy as np

from geovol.catalog import RevolutionProfile, gauss_bonnet_revolution
from geovol.seifert import (Orbifold2D, SeifertData, ZeroDatum, chi_orb, euler_number,
                            integrality_certificate, orbifold_index, poincare_hopf_check,
                            stb_invariants, vol_from_seifert)

# Spherical triangle groups and their Euler characteristics.
for cones in [(), (2, 3), (2, 3, 5), (2, 3, 7)]:
    O = Orbifold2D(0, cones)
    print(f"sphere with cones {cones!s:10s} chi_orb = {chi_orb(O)}")

# The unit tangent bundle of an orbifold is Seifert fibred with euler number chi_orb.
O = Orbifold2D(0, (2, 3, 5))
S = stb_invariants(O)
print("STB", S, "euler", euler_number(S), "chi_orb", chi_orb(O))

# Volumes are rational with a predictable denominator.
S = SeifertData(0, ((2, 1), (3, 1), (5, 1)))
print("vol", vol_from_seifert(S), "certificate", integrality_certificate(S))

# Poincare-Hopf with orbifold indices: a rotation of the spindle S^2(2, 3)
# has one zero at each cone point.
print("indices", orbifold_index(2, 0), orbifold_index(3, 0))
print(poincare_hopf_check(Orbifold2D(0, (2, 3)), [ZeroDatum(2, 0), ZeroDatum(3, 0)]).summary())

# A metric realisation: a surface of revolution with cone angles 2 pi/2 and
# 2 pi/3 at its poles.  Gauss-Bonnet recovers 2 pi chi_orb by quadrature.
A, B = 5 / 12, 1 / 12
football = RevolutionProfile(lambda r: A * np.sin(r) + B * np.sin(2 * r) / 2,
                             lambda r: A * np.cos(r) + B * np.cos(2 * r),
                             lambda r: -A * np.sin(r) - 2 * B * np.sin(2 * r), math.pi, 2, 3)
print(gauss_bonnet_revolution(football, tolerance=1e-6).summary())
