"""Constant arithmetic expressions used for gate parameters and matrix entries.

Grammar, lowest to highest precedence::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := number | 'pi' | 'i' | %name | func '(' expr ')' | '(' expr ')'
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

FUNCTIONS = ("sin", "cos", "sqrt", "exp", "cis")
CONSTANTS = ("pi", "i")


class ExpressionError(ValueError):
    """Raised for malformed expressions and for evaluation failures."""


@dataclass(frozen=True)
class Number:
    value: complex


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


Expression = Union[Number, Constant, Param, Neg, BinOp, Call]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<param>%[A-Za-z_][A-Za-z0-9_]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r} in expression {text!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group()))
    return tokens


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, text = self.take()
        if text != value:
            raise ExpressionError(f"expected {value!r} in expression {self.text!r}, got {text!r}")

    def parse(self) -> Expression:
        if not self.tokens:
            raise ExpressionError("empty expression")
        node = self.expr()
        if self.pos != len(self.tokens):
            raise ExpressionError(f"trailing input {self.peek()[1]!r} in expression {self.text!r}")
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expression:
        kind, text = self.take()
        if kind == "number":
            if text.endswith("i"):
                return Number(complex(0.0, float(text[:-1])))
            return Number(complex(float(text), 0.0))
        if kind == "param":
            return Param(text[1:])
        if kind == "name":
            if text in CONSTANTS:
                return Constant(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise ExpressionError(f"unknown name {text!r} in expression {self.text!r}")
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if text is None:
            raise ExpressionError(f"unexpected end of expression {self.text!r}")
        raise ExpressionError(f"unexpected token {text!r} in expression {self.text!r}")


def parse_expression(text: str) -> Expression:
    return _ExprParser(text).parse()


def cis(theta: complex) -> complex:
    """``cos(theta) + i sin(theta)``; real arguments avoid complex-exp rounding."""
    if isinstance(theta, complex) and theta.imag != 0.0:
        return cmath.cos(theta) + 1j * cmath.sin(theta)
    t = theta.real if isinstance(theta, complex) else float(theta)
    return complex(math.cos(t), math.sin(t))


def call_function(func: str, z: complex) -> complex:
    real = z.imag == 0.0
    if func == "sin":
        return complex(math.sin(z.real)) if real else cmath.sin(z)
    if func == "cos":
        return complex(math.cos(z.real)) if real else cmath.cos(z)
    if func == "sqrt":
        if real:
            # principal root regardless of the sign of a zero imaginary part
            r = math.sqrt(abs(z.real))
            return complex(r) if z.real >= 0 else complex(0.0, r)
        return cmath.sqrt(z)
    if func == "exp":
        return complex(math.exp(z.real)) if real else cmath.exp(z)
    if func == "cis":
        return cis(z)
    raise ExpressionError(f"unknown function {func!r}")


def evaluate(expr: Expression, bindings: Mapping[str, complex] | None = None) -> complex:
    """Evaluate ``expr`` to a complex number.

    ``bindings`` maps formal parameter names (without ``%``) to values.
    """
    bindings = bindings or {}
    if isinstance(expr, Number):
        return complex(expr.value)
    if isinstance(expr, Constant):
        return complex(math.pi) if expr.name == "pi" else 1j
    if isinstance(expr, Param):
        try:
            return complex(bindings[expr.name])
        except KeyError:
            raise ExpressionError(f"unbound parameter %{expr.name}") from None
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, bindings)
    if isinstance(expr, Call):
        return call_function(expr.func, evaluate(expr.arg, bindings))
    if isinstance(expr, BinOp):
        a = evaluate(expr.left, bindings)
        b = evaluate(expr.right, bindings)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if expr.op == "/":
            if b == 0:
                raise ExpressionError("division by zero")
            return a / b
        if expr.op == "^":
            try:
                if a.imag == 0.0 and b.imag == 0.0 and (a.real >= 0 or b.real.is_integer()):
                    return complex(a.real ** b.real)
                return a ** b
            except ZeroDivisionError:
                raise ExpressionError("zero raised to a negative power") from None
            except OverflowError:
                raise ExpressionError("overflow in exponentiation") from None
    raise ExpressionError(f"cannot evaluate {expr!r}")


def params_of(expr: Expression) -> set[str]:
    """Names of the formal parameters referenced by ``expr``."""
    if isinstance(expr, Param):
        return {expr.name}
    if isinstance(expr, Neg):
        return params_of(expr.operand)
    if isinstance(expr, Call):
        return params_of(expr.arg)
    if isinstance(expr, BinOp):
        return params_of(expr.left) | params_of(expr.right)
    return set()


def substitute(expr: Expression, values: Mapping[str, Expression]) -> Expression:
    """Replace parameter references found in ``values``; others are left alone."""
    if isinstance(expr, Param):
        return values.get(expr.name, expr)
    if isinstance(expr, Neg):
        return Neg(substitute(expr.operand, values))
    if isinstance(expr, Call):
        return Call(expr.func, substitute(expr.arg, values))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, substitute(expr.left, values), substitute(expr.right, values))
    return expr


# Printing -----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _fmt_float(x: float) -> str:
    if math.isinf(x) or math.isnan(x):
        raise ExpressionError(f"cannot print non-finite value {x}")
    if x.is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(float(x))


def _number_text(z: complex) -> tuple[str, int]:
    re_, im = z.real, z.imag
    if im == 0.0 and math.copysign(1.0, re_) > 0:
        return _fmt_float(re_), _ATOM_PREC
    if re_ == 0.0 and math.copysign(1.0, re_) > 0 and math.copysign(1.0, im) > 0:
        return _fmt_float(im) + "i", _ATOM_PREC
    if im == 0.0:
        return "-" + _fmt_float(-re_), _NEG_PREC
    sign = "+" if math.copysign(1.0, im) > 0 else "-"
    return f"({_fmt_float(re_)}{sign}{_fmt_float(abs(im))}i)", _ATOM_PREC


def _show(expr: Expression) -> tuple[str, int]:
    if isinstance(expr, Number):
        return _number_text(expr.value)
    if isinstance(expr, Constant):
        return expr.name, _ATOM_PREC
    if isinstance(expr, Param):
        return "%" + expr.name, _ATOM_PREC
    if isinstance(expr, Call):
        return f"{expr.func}({format_expression(expr.arg)})", _ATOM_PREC
    if isinstance(expr, Neg):
        text, prec = _show(expr.operand)
        if prec < _NEG_PREC or text.startswith("-"):
            text = f"({text})"
        return "-" + text, _NEG_PREC
    if isinstance(expr, BinOp):
        prec = _PREC[expr.op]
        left, lp = _show(expr.left)
        right, rp = _show(expr.right)
        if expr.op == "^":
            need_left, need_right = _ATOM_PREC, _NEG_PREC
        else:
            need_left, need_right = prec, prec + 1
        if lp < need_left:
            left = f"({left})"
        if rp < need_right:
            right = f"({right})"
        return f"{left}{expr.op}{right}", prec
    raise ExpressionError(f"cannot print {expr!r}")


def format_expression(expr: Expression) -> str:
    return _show(expr)[0]
