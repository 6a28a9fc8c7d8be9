"""Small arithmetic expression language with exact symbolic differentiation.

Grammar (whitespace-insensitive)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' rational)?
    base   := number | 'x' | '(' expr ')' | ('exp'|'log') base | '-' factor

Exponents are rational constants, so differentiation stays inside the
language.  ``^`` binds tighter than unary minus: ``-x^2`` is ``-(x^2)``.

Expressions are immutable trees; :func:`evaluate` walks them and
:func:`compile_expr` emits a plain Python callable for hot loops.  Both
raise :class:`DomainError` on division by zero, log of a nonpositive
number, fractional powers of negatives, and overflow.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ParseError


class ExprNode:
    """Base class for expression tree nodes."""

    __slots__ = ()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Num(ExprNode):
    value: float


@dataclass(frozen=True)
class Var(ExprNode):
    pass


@dataclass(frozen=True)
class Add(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True)
class Sub(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True)
class Mul(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True)
class Div(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True)
class Pow(ExprNode):
    base: ExprNode
    exponent: Fraction


@dataclass(frozen=True)
class Exp(ExprNode):
    arg: ExprNode


@dataclass(frozen=True)
class Log(ExprNode):
    arg: ExprNode


@dataclass(frozen=True)
class Neg(ExprNode):
    arg: ExprNode


X = Var()

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|(x)|(exp|log)|([()+\-*/^]))")
_NUMBER = re.compile(r"\s*(\d+\.\d*|\.\d+|\d+)")


class _Parser:
    def __init__(self, src):
        self.src = src
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.src):
            return None
        return self.src[self.pos]

    def fail(self, message):
        raise ParseError(message, self.pos)

    def expect(self, char):
        if self.peek() != char:
            self.fail(f"expected '{char}'")
        self.pos += 1

    def match_word(self, word):
        self._skip_ws()
        if self.src.startswith(word, self.pos):
            end = self.pos + len(word)
            nxt = self.src[end:end + 1]
            if not (nxt.isalnum() or nxt == "_"):
                self.pos = end
                return True
        return False

    def number(self):
        self._skip_ws()
        m = _NUMBER.match(self.src, self.pos)
        if not m:
            self.fail("expected a number")
        self.pos = m.end()
        return m.group(1)

    def rational(self):
        sign = 1
        if self.peek() == "-":
            self.pos += 1
            sign = -1
        parens = self.peek() == "("
        if parens:
            self.pos += 1
        text = self.number()
        value = Fraction(text)
        # A slash continues the rational only when a digit follows; otherwise
        # it is an ordinary division of the whole factor.
        if parens:
            if self.peek() == "/":
                self.pos += 1
                value /= Fraction(self.number())
            self.expect(")")
        elif self.peek() == "/" and _NUMBER.match(self.src, self.pos + 1):
            self.pos += 1
            value /= Fraction(self.number())
        return sign * value

    def expr(self):
        node = self.term()
        while True:
            c = self.peek()
            if c == "+":
                self.pos += 1
                node = Add(node, self.term())
            elif c == "-":
                self.pos += 1
                node = Sub(node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            c = self.peek()
            if c == "*":
                self.pos += 1
                node = Mul(node, self.factor())
            elif c == "/":
                self.pos += 1
                node = Div(node, self.factor())
            else:
                return node

    def factor(self):
        node = self.base()
        if self.peek() == "^":
            self.pos += 1
            node = Pow(node, self.rational())
        return node

    def base(self):
        c = self.peek()
        if c is None:
            self.fail("unexpected end of input")
        if c == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if c == "-":
            self.pos += 1
            return Neg(self.factor())
        if self.match_word("exp"):
            return Exp(self.base())
        if self.match_word("log"):
            return Log(self.base())
        if c == "x":
            nxt = self.src[self.pos + 1:self.pos + 2]
            if nxt.isalnum() or nxt == "_":
                self.fail("unknown identifier")
            self.pos += 1
            return X
        if c.isdigit() or c == ".":
            return Num(float(self.number()))
        self.fail(f"unexpected character {c!r}")


def parse_expr(src: str) -> ExprNode:
    """Parse source text into an expression tree."""
    parser = _Parser(src)
    node = parser.expr()
    parser._skip_ws()
    if parser.pos != len(src):
        parser.fail("trailing input")
    return node


# === evaluation ===

def _pow_value(base, exponent: Fraction):
    if exponent.denominator == 1:
        e = exponent.numerator
        if base == 0.0 and e < 0:
            raise DomainError("zero raised to a negative power")
        try:
            return base ** e
        except OverflowError as err:
            raise DomainError("overflow in power") from err
    if base < 0.0:
        raise DomainError("fractional power of a negative number")
    if base == 0.0 and exponent < 0:
        raise DomainError("zero raised to a negative power")
    return base ** float(exponent)


def evaluate(node: ExprNode, x: float) -> float:
    """Binary-64 evaluation of the tree at ``x``."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Add):
        return evaluate(node.left, x) + evaluate(node.right, x)
    if isinstance(node, Sub):
        return evaluate(node.left, x) - evaluate(node.right, x)
    if isinstance(node, Mul):
        return evaluate(node.left, x) * evaluate(node.right, x)
    if isinstance(node, Div):
        denom = evaluate(node.right, x)
        if denom == 0.0:
            raise DomainError("division by zero")
        return evaluate(node.left, x) / denom
    if isinstance(node, Pow):
        return _pow_value(evaluate(node.base, x), node.exponent)
    if isinstance(node, Exp):
        try:
            return math.exp(evaluate(node.arg, x))
        except OverflowError as err:
            raise DomainError("overflow in exp") from err
    if isinstance(node, Log):
        value = evaluate(node.arg, x)
        if value <= 0.0:
            raise DomainError("log of a nonpositive number")
        return math.log(value)
    if isinstance(node, Neg):
        return -evaluate(node.arg, x)
    raise TypeError(f"not an expression node: {node!r}")


# === differentiation ===

def _is_const(node, value=None):
    return isinstance(node, Num) and (value is None or node.value == value)


def _add(a, b):
    if _is_const(a) and _is_const(b):
        return Num(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def _sub(a, b):
    if _is_const(a) and _is_const(b):
        return Num(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return Sub(a, b)


def _mul(a, b):
    if _is_const(a) and _is_const(b):
        return Num(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Num(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Mul(a, b)


def _div(a, b):
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return Num(0.0)
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Num(a.value / b.value)
    return Div(a, b)


def _neg(a):
    if _is_const(a):
        return Num(-a.value)
    return Neg(a)


def _pow(base, exponent: Fraction):
    if exponent == 0:
        return Num(1.0)
    if exponent == 1:
        return base
    if _is_const(base):
        try:
            return Num(_pow_value(base.value, exponent))
        except DomainError:
            pass
    return Pow(base, exponent)


def differentiate(node: ExprNode) -> ExprNode:
    """Exact derivative with respect to the variable, constant-folded."""
    if isinstance(node, Num):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0)
    if isinstance(node, Add):
        return _add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return _sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Mul):
        return _add(_mul(differentiate(node.left), node.right),
                    _mul(node.left, differentiate(node.right)))
    if isinstance(node, Div):
        num = _sub(_mul(differentiate(node.left), node.right),
                   _mul(node.left, differentiate(node.right)))
        return _div(num, _pow(node.right, Fraction(2)))
    if isinstance(node, Pow):
        scale = _mul(Num(float(node.exponent)), _pow(node.base, node.exponent - 1))
        return _mul(scale, differentiate(node.base))
    if isinstance(node, Exp):
        return _mul(Exp(node.arg), differentiate(node.arg))
    if isinstance(node, Log):
        return _div(differentiate(node.arg), node.arg)
    if isinstance(node, Neg):
        return _neg(differentiate(node.arg))
    raise TypeError(f"not an expression node: {node!r}")


# === source / compilation ===

def to_source(node: ExprNode) -> str:
    """Render a tree back to parseable source text."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Add):
        return f"({to_source(node.left)} + {to_source(node.right)})"
    if isinstance(node, Sub):
        return f"({to_source(node.left)} - {to_source(node.right)})"
    if isinstance(node, Mul):
        return f"({to_source(node.left)} * {to_source(node.right)})"
    if isinstance(node, Div):
        return f"({to_source(node.left)} / {to_source(node.right)})"
    if isinstance(node, Pow):
        e = node.exponent
        text = str(e.numerator) if e.denominator == 1 else f"({e.numerator}/{e.denominator})"
        return f"({to_source(node.base)})^{text}"
    if isinstance(node, Exp):
        return f"exp({to_source(node.arg)})"
    if isinstance(node, Log):
        return f"log({to_source(node.arg)})"
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def _rt_exp(v):
    try:
        return math.exp(v)
    except OverflowError as err:
        raise DomainError("overflow in exp") from err


def _rt_log(v):
    if v <= 0.0:
        raise DomainError("log of a nonpositive number")
    return math.log(v)


def _rt_div(a, b):
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


_RUNTIME = {"_exp": _rt_exp, "_log": _rt_log, "_div": _rt_div, "_pow": _pow_value,
            "Fraction": Fraction}


def _emit(node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Add):
        return f"({_emit(node.left)} + {_emit(node.right)})"
    if isinstance(node, Sub):
        return f"({_emit(node.left)} - {_emit(node.right)})"
    if isinstance(node, Mul):
        return f"({_emit(node.left)} * {_emit(node.right)})"
    if isinstance(node, Div):
        return f"_div({_emit(node.left)}, {_emit(node.right)})"
    if isinstance(node, Pow):
        e = node.exponent
        if e.denominator == 1 and e.numerator >= 0:
            return f"({_emit(node.base)} ** {e.numerator})"
        return f"_pow({_emit(node.base)}, Fraction({e.numerator}, {e.denominator}))"
    if isinstance(node, Exp):
        return f"_exp({_emit(node.arg)})"
    if isinstance(node, Log):
        return f"_log({_emit(node.arg)})"
    if isinstance(node, Neg):
        return f"(-{_emit(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def compile_expr(node: ExprNode):
    """Compile a tree to a fast ``float -> float`` callable.

    Semantics match :func:`evaluate`, including the raised errors.
    """
    namespace = dict(_RUNTIME)
    exec(f"def _compiled(x):\n    return {_emit(node)}\n", namespace)
    return namespace["_compiled"]
