"""A small expression language for user-supplied profile functions.

Grammar (one free variable, ``u`` or ``r``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-2^2 == -4`` and ``2^3^2 == 512``.
Functions: ``sin cos exp log``; the constant ``pi`` is recognised.
Evaluation is vectorised over numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ExprError",
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "parse_expr",
    "to_text",
    "evaluate",
    "derivative",
    "free_variables",
]

VARIABLES = ("u", "r")
FUNCTIONS = ("sin", "cos", "exp", "log")
CONSTANTS = {"pi": math.pi}


class ExprError(ValueError):
    def __init__(self, message: str, offset: int = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, off = self.take()
        if val != value:
            raise ExprError(f"expected {value!r}, found {val or 'end of input'!r}", off)

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected {val!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in VARIABLES:
                return Var(val)
            if val in CONSTANTS:
                return Const(val)
            raise ExprError(f"unknown identifier {val!r}", off)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected {val or 'end of input'!r}", off)


def parse_expr(text: str) -> Expr:
    """Parse ``text``; raises :class:`ExprError` with a byte offset."""
    node = _Parser(text).parse()
    names = free_variables(node)
    if len(names) > 1:
        raise ExprError(f"expressions take one free variable, found {sorted(names)}")
    return node


def free_variables(node: Expr) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Num, Const)):
        return set()
    if isinstance(node, (Neg, Call)):
        return free_variables(node.arg)
    return free_variables(node.left) | free_variables(node.right)


def to_text(node: Expr) -> str:
    """Fully parenthesised text that parses back to ``node``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.arg)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"


# ---------------------------------------------------------------------------
# evaluation


def evaluate(node: Expr, x):
    """Evaluate at ``x`` (scalar or array) for whichever variable occurs."""
    x = np.asarray(x, dtype=float)
    out = _eval(node, x)
    return np.broadcast_to(out, x.shape) if np.ndim(out) < x.ndim else out


def _eval(node, x):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Const):
        return np.float64(CONSTANTS[node.name])
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, Call):
        a = _eval(node.arg, x)
        if node.func == "log":
            if np.any(a <= 0):
                raise ExprError("log of a non-positive value")
            return np.log(a)
        return {"sin": np.sin, "cos": np.cos, "exp": np.exp}[node.func](a)
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(b == 0):
            raise ExprError("division by zero")
        return a / b
    # power
    if np.any((a == 0) & (b < 0)):
        raise ExprError("0 raised to a negative power")
    with np.errstate(invalid="ignore"):
        out = np.power(a, b)
    if np.any(np.isnan(out) & ~np.isnan(a) & ~np.isnan(b)):
        raise ExprError("negative base with non-integer exponent")
    return out


# ---------------------------------------------------------------------------
# symbolic differentiation with light constant folding


def _num(v: float) -> Expr:
    return Neg(Num(-v)) if v < 0 else Num(float(v))


def _const_value(node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg) and isinstance(node.arg, Num):
        return -node.arg.value
    return None


def _add(a, b):
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0:
        return b
    if cb == 0:
        return a
    if ca is not None and cb is not None:
        return _num(ca + cb)
    return BinOp("+", a, b)


def _sub(a, b):
    ca, cb = _const_value(a), _const_value(b)
    if cb == 0:
        return a
    if ca == 0:
        return _neg(b)
    if ca is not None and cb is not None:
        return _num(ca - cb)
    return BinOp("-", a, b)


def _neg(a):
    c = _const_value(a)
    if c is not None:
        return _num(-c)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a, b):
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0 or cb == 0:
        return Num(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca is not None and cb is not None:
        return _num(ca * cb)
    return BinOp("*", a, b)


def _div(a, b):
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0:
        return Num(0.0)
    if cb == 1:
        return a
    return BinOp("/", a, b)


def _pow(a, b):
    cb = _const_value(b)
    if cb == 1:
        return a
    if cb == 0:
        return Num(1.0)
    return BinOp("^", a, b)


def derivative(node: Expr, var: str = None) -> Expr:
    """Symbolic derivative with respect to ``var`` (default: the free variable)."""
    if var is None:
        names = free_variables(node)
        var = names.pop() if names else "u"
    return _d(node, var)


def _d(node, v):
    if isinstance(node, (Num, Const)):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0 if node.name == v else 0.0)
    if isinstance(node, Neg):
        return _neg(_d(node.arg, v))
    if isinstance(node, Call):
        inner = _d(node.arg, v)
        a = node.arg
        if node.func == "sin":
            outer = Call("cos", a)
        elif node.func == "cos":
            outer = Neg(Call("sin", a))
        elif node.func == "exp":
            outer = Call("exp", a)
        else:
            outer = _div(Num(1.0), a)
        return _mul(outer, inner)
    a, b = node.left, node.right
    da, db = _d(a, v), _d(b, v)
    if node.op == "+":
        return _add(da, db)
    if node.op == "-":
        return _sub(da, db)
    if node.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if node.op == "/":
        if v not in free_variables(b):
            return _div(da, b)
        return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, Num(2.0)))
    # a ^ b
    if v not in free_variables(b):
        return _mul(_mul(b, _pow(a, _sub(b, Num(1.0)))), da)
    # general case: a^b * (b' log a + b a'/a)
    return _mul(node, _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)))
