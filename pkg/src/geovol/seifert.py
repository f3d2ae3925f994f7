"""Exact invariants of Seifert fibrations and closed oriented 2-orbifolds.

All arithmetic is exact (``int`` and :class:`fractions.Fraction`); nothing in
this module touches floating point.  The regular fibres are normalised to
period 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .report import CheckReport

__all__ = [
    "RationalQ",
    "SeifertData",
    "Orbifold2D",
    "ZeroDatum",
    "euler_number",
    "vol_from_seifert",
    "integrality_certificate",
    "chi_orb",
    "stb_invariants",
    "orbifold_index",
    "poincare_hopf_check",
    "gluing_check",
    "gluing_complement",
    "rational_to_json",
    "rational_from_json",
]

RationalQ = Fraction


def rational_to_json(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rational_from_json(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


@dataclass(frozen=True)
class SeifertData:
    """Seifert invariants ``(g; (a_1, b_1), ..., (a_n, b_n))``.

    Pairs with ``a = 1`` are allowed: they are not singular fibres but still
    contribute to the Euler number.
    """

    genus: int
    pairs: tuple = ()

    def __post_init__(self):
        if int(self.genus) != self.genus or self.genus < 0:
            raise ValueError(f"genus must be a non-negative integer, got {self.genus}")
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        for a, b in pairs:
            if a == 0:
                raise ValueError("fibre multiplicity alpha must be nonzero")
            if math.gcd(a, b) != 1:
                raise ValueError(f"pair ({a}, {b}) is not coprime")
        object.__setattr__(self, "genus", int(self.genus))
        object.__setattr__(self, "pairs", pairs)

    def to_json(self) -> dict:
        return {"genus": self.genus, "pairs": [[a, b] for a, b in self.pairs]}

    @classmethod
    def from_json(cls, obj) -> "SeifertData":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["genus"], tuple(tuple(p) for p in obj.get("pairs", [])))

    def __str__(self):
        inner = ", ".join(f"({a},{b})" for a, b in self.pairs)
        return f"({self.genus}; {inner})" if inner else f"({self.genus};)"


@dataclass(frozen=True)
class Orbifold2D:
    """Closed oriented 2-orbifold: underlying genus and cone orders (each >= 2)."""

    genus: int
    cones: tuple = ()

    def __post_init__(self):
        if int(self.genus) != self.genus or self.genus < 0:
            raise ValueError(f"genus must be a non-negative integer, got {self.genus}")
        cones = tuple(int(a) for a in self.cones)
        if any(a < 2 for a in cones):
            raise ValueError(f"cone orders must be >= 2, got {cones}")
        object.__setattr__(self, "genus", int(self.genus))
        object.__setattr__(self, "cones", cones)

    def to_json(self) -> dict:
        return {"genus": self.genus, "cones": list(self.cones)}

    @classmethod
    def from_json(cls, obj) -> "Orbifold2D":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["genus"], tuple(obj.get("cones", [])))


@dataclass(frozen=True)
class ZeroDatum:
    """A zero of a vector field on an orbifold.

    ``order`` is 1 for a smooth point, otherwise the cone order; ``k`` is the
    winding integer of the local model.
    """

    order: int
    k: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be 1 (smooth) or a cone order >= 2")

    @property
    def is_cone(self) -> bool:
        return self.order >= 2


def _lcm(values: Iterable[int]) -> int:
    m = 1
    for v in values:
        m = m * abs(v) // math.gcd(m, abs(v))
    return m


def euler_number(S: SeifertData) -> Fraction:
    """``e = -sum b_i / a_i``."""
    m = _lcm(a for a, _ in S.pairs)
    # common denominator keeps this to one reduction
    return Fraction(-sum(b * (m // a) for a, b in S.pairs), m)


def vol_from_seifert(S: SeifertData) -> Fraction:
    """Volume of the period-1 fibre-generating field: ``-e``."""
    return -euler_number(S)


def integrality_certificate(S: SeifertData) -> tuple:
    """``(m, m * vol)`` with ``m`` the lcm of the multiplicities.

    The product is always an integer; an AssertionError here means an
    arithmetic bug, not bad input.
    """
    m = _lcm(a for a, _ in S.pairs)
    product = m * vol_from_seifert(S)
    assert product.denominator == 1, f"m * vol = {product} is not an integer"
    return m, product


def chi_orb(O: Orbifold2D) -> Fraction:
    """``2 - 2g - n + sum 1/a_i``."""
    n = len(O.cones)
    return 2 - 2 * O.genus - n + sum((Fraction(1, a) for a in O.cones), Fraction(0))


def stb_invariants(O: Orbifold2D) -> SeifertData:
    """Seifert invariants of the unit tangent bundle."""
    pairs = ((1, 2 * O.genus - 2),) + tuple((a, a - 1) for a in O.cones)
    return SeifertData(O.genus, pairs)


def orbifold_index(alpha: int, k: int) -> Fraction:
    """Index ``1/alpha - k`` of a zero at a point of order ``alpha`` (1 = smooth)."""
    if alpha <= 0:
        raise ValueError(f"order must be >= 1, got {alpha}")
    return Fraction(1, alpha) - k


def poincare_hopf_check(O: Orbifold2D, zeros: Sequence[ZeroDatum]) -> CheckReport:
    """Compare the index sum over ``zeros`` with ``chi_orb(O)`` exactly.

    Every cone point must be listed as a zero (cone points are forced zeros);
    smooth zeros are unrestricted.
    """
    listed = sorted(z.order for z in zeros if z.is_cone)
    needed = sorted(O.cones)
    if listed != needed:
        missing = list(needed)
        for a in listed:
            if a in missing:
                missing.remove(a)
            else:
                raise ValueError(f"zero cites cone order {a}, which the orbifold does not have (cones {O.cones})")
        raise ValueError(f"cone points of order {missing} are missing from the zero list")
    total = sum((orbifold_index(z.order, z.k) for z in zeros), Fraction(0))
    chi = chi_orb(O)
    terms = " + ".join(str(orbifold_index(z.order, z.k)) for z in zeros) or "0"
    return CheckReport("poincare_hopf", total, chi, 0, detail=f"index sum {terms}; chi_orb(g={O.genus}, cones={list(O.cones)})")


def gluing_check(alpha: int, beta: int, alpha_p: int, beta_p: int) -> bool:
    """True iff ``alpha * beta' - alpha' * beta == 1``."""
    return alpha * beta_p - alpha_p * beta == 1


def gluing_complement(alpha: int, beta: int) -> tuple:
    """Some ``(alpha', beta')`` completing ``(alpha, beta)`` to determinant 1."""
    if math.gcd(alpha, beta) != 1:
        raise ValueError("pair is not coprime")
    # extended Euclid: x*alpha + y*beta = 1  ->  beta' = x, alpha' = -y
    old_r, r, old_s, s, old_t, t = alpha, beta, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return -old_t, old_s
