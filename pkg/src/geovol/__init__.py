"""Numerical exterior calculus and exact invariants for geodesible vector fields.

Subpackages are imported lazily by name; the most used entry points are
re-exported here.
"""

__version__ = "0.1.0"

from .forms import (ChartDomain, KForm, Point, ScalarField, SmoothMap, VectorFieldRepr,
                    ext_d, interior, lie_derivative, pullback, wedge)
from .integrate import IntegrationResult, ParametrizedChain, QuadratureSpec, integrate_form
from .report import CheckReport
from .seifert import Orbifold2D, SeifertData, chi_orb, euler_number, vol_from_seifert

__all__ = [
    "__version__",
    "ChartDomain", "KForm", "Point", "ScalarField", "SmoothMap", "VectorFieldRepr",
    "ext_d", "interior", "lie_derivative", "pullback", "wedge",
    "IntegrationResult", "ParametrizedChain", "QuadratureSpec", "integrate_form",
    "CheckReport",
    "Orbifold2D", "SeifertData", "chi_orb", "euler_number", "vol_from_seifert",
]
