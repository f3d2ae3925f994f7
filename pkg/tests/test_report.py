import json
import math
from fractions import Fraction

from hypothesis import given, strategies as st

from geovol.report import CheckReport, encode_value, is_passing, reports_to_csv_rows

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(finite, finite, st.floats(0, 1e3, allow_nan=False))
def test_passed_is_a_function_of_the_triple(c, e, t):
    a = CheckReport("x", c, e, t)
    b = CheckReport("y", c, e, t, detail="other")
    assert a.passed == b.passed == (abs(c - e) <= t if t > 0 else c == e)


def test_exact_and_special_values():
    assert CheckReport("q", Fraction(1, 3), Fraction(1, 3)).passed
    assert not CheckReport("q", Fraction(1, 3), 0.3333333333333333).passed
    assert not is_passing(math.nan, 0.0, 1.0)
    assert not is_passing(math.inf, 0.0, 1.0)
    assert is_passing(complex(1, 1e-12), complex(1, 0), 1e-9)


def test_json_encoding():
    r = CheckReport("q", Fraction(-31, 30), Fraction(-31, 30), detail="d")
    d = json.loads(r.to_json())
    assert d == {"name": "q", "computed": "-31/30", "expected": "-31/30", "tolerance": 0.0,
                 "passed": True, "detail": "d", "provenance": "exact"}
    assert encode_value(complex(1.5, -2)) == {"re": 1.5, "im": -2.0}
    assert encode_value(float("inf")) == "inf"
    rows = list(reports_to_csv_rows([CheckReport("c", complex(1, 0), complex(1, 0), 1e-9)]))
    assert rows[0]["computed"] == '{"re": 1.0, "im": 0.0}'
