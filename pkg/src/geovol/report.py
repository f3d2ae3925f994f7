"""The universal check record and its JSON/CSV encodings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

__all__ = ["CheckReport", "is_passing", "encode_value", "reports_to_csv_rows"]


def is_passing(computed, expected, tolerance) -> bool:
    """``|computed - expected| <= tolerance``; exact comparison when tolerance is 0."""
    if tolerance == 0:
        return computed == expected
    try:
        diff = abs(computed - expected)
    except TypeError:
        return False
    if isinstance(diff, float) and math.isnan(diff):
        return False
    return diff <= tolerance


def encode_value(v):
    """JSON-safe encoding: rationals as ``"num/den"`` strings, complex as a pair."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return v
    if isinstance(v, complex):
        return {"re": encode_value(v.real), "im": encode_value(v.imag)}
    if isinstance(v, Number):
        f = float(v)
        if math.isfinite(f):
            return f
        return "inf" if f > 0 else ("-inf" if f < 0 else "nan")
    return v


@dataclass(frozen=True)
class CheckReport:
    """One named comparison of a computed value against an expected one.

    ``passed`` is derived, never supplied.
    """

    name: str
    computed: object
    expected: object
    tolerance: float = 0.0
    detail: str = ""
    provenance: str = "exact"
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        object.__setattr__(self, "passed", is_passing(self.computed, self.expected, self.tolerance))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "computed": encode_value(self.computed),
            "expected": encode_value(self.expected),
            "tolerance": encode_value(self.tolerance),
            "passed": self.passed,
            "detail": self.detail,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: computed={encode_value(self.computed)} expected={encode_value(self.expected)} tol={self.tolerance:g}"


CSV_FIELDS = ["name", "computed", "expected", "tolerance", "passed", "detail", "provenance"]


def reports_to_csv_rows(reports):
    for r in reports:
        d = r.to_dict()
        yield {k: (json.dumps(d[k]) if isinstance(d[k], dict) else d[k]) for k in CSV_FIELDS}
