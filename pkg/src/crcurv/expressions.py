"""Scalar expression language for immersion components.

Variables are ``u1 .. um``.  The grammar supports literals, ``+ - * /``,
unary minus, integer powers written ``base^exponent`` and the functions
sin, cos, exp, log, sqrt.  Precedence, tightest first::

    ^   >   unary -   >   * /   >   + -

Binary operators of equal precedence associate to the left; the exponent
of ``^`` must be an integer literal (optionally negative).  Expressions
are immutable after parsing and printing then re-parsing reproduces the
same tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArityError, DomainError, ExprSyntaxError, UnknownIdentifier

__all__ = [
    "Expression", "Var", "Const", "Add", "Sub", "Mul", "Div", "Neg", "Pow",
    "Func", "FUNCTION_NAMES", "parse_expression", "to_source", "eval_value",
]

FUNCTION_NAMES = ("sin", "cos", "exp", "log", "sqrt")


class Expression:
    __slots__ = ()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Var(Expression):
    index: int  # 0-based; prints as u{index+1}


@dataclass(frozen=True)
class Const(Expression):
    value: float


@dataclass(frozen=True)
class Add(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Mul(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Div(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: int


@dataclass(frozen=True)
class Func(Expression):
    name: str
    arg: Expression


# ---------------------------------------------------------------------------
# tokenizer

_NUM, _IDENT, _OP, _END = "num", "ident", "op", "end"
_OP_CHARS = "+-*/^(),"


def _tokenize(src):
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            tokens.append((_NUM, src[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append((_IDENT, src[i:j], i))
            i = j
            continue
        if ch in _OP_CHARS:
            tokens.append((_OP, ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append((_END, "", n))
    return tokens


# ---------------------------------------------------------------------------
# recursive descent parser

class _Parser:
    def __init__(self, src, nvars):
        self.src = src
        self.nvars = nvars
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, ch):
        kind, text, off = self.peek()
        if kind != _OP or text != ch:
            raise ExprSyntaxError(f"expected {ch!r}", off)
        return self.advance()

    def parse(self):
        expr = self.expression()
        kind, text, off = self.peek()
        if kind != _END:
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", off)
        return expr

    def expression(self):
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if text == "+" else Sub(node, rhs)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text in "*/":
                self.advance()
                rhs = self.factor()
                node = Mul(node, rhs) if text == "*" else Div(node, rhs)
            else:
                return node

    def factor(self):
        kind, text, _ = self.peek()
        if kind == _OP and text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        node = self.atom()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text == "^":
                self.advance()
                node = Pow(node, self.int_exponent())
            else:
                return node

    def int_exponent(self):
        sign = 1
        kind, text, off = self.peek()
        if kind == _OP and text == "-":
            self.advance()
            sign = -1
            kind, text, off = self.peek()
        if kind != _NUM or any(c in text for c in ".eE"):
            raise ExprSyntaxError("exponent must be an integer literal", off)
        self.advance()
        return sign * int(text)

    def atom(self):
        kind, text, off = self.advance()
        if kind == _NUM:
            return Const(float(text))
        if kind == _OP and text == "(":
            inner = self.expression()
            self.expect_op(")")
            return inner
        if kind == _IDENT:
            if text in FUNCTION_NAMES:
                nxt_kind, nxt_text, nxt_off = self.peek()
                if nxt_kind != _OP or nxt_text != "(":
                    raise ArityError(f"function {text!r} requires one "
                                     "parenthesized argument", nxt_off)
                self.advance()
                arg = self.expression()
                kind2, text2, off2 = self.peek()
                if kind2 == _OP and text2 == ",":
                    raise ArityError(f"function {text!r} takes exactly one "
                                     "argument", off2)
                self.expect_op(")")
                return Func(text, arg)
            if text.startswith("u") and text[1:].isdigit():
                k = int(text[1:])
                if 1 <= k <= self.nvars and text == f"u{k}":
                    return Var(k - 1)
                raise UnknownIdentifier(
                    f"variable {text!r} outside u1..u{self.nvars}", off)
            raise UnknownIdentifier(f"unknown identifier {text!r}", off)
        raise ExprSyntaxError(f"unexpected token {text!r}", off)


def parse_expression(src, m):
    """Parse ``src`` over variables ``u1..u{m}`` into an Expression tree."""
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    if m < 0:
        raise ValueError("variable count must be nonnegative")
    return _Parser(src, m).parse()


# ---------------------------------------------------------------------------
# printer (round-trips through parse_expression)

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e):
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _render(e, min_prec):
    text = _render_bare(e)
    if _prec(e) < min_prec:
        return f"({text})"
    return text


def _render_bare(e):
    if isinstance(e, Var):
        return f"u{e.index + 1}"
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Add):
        return f"{_render(e.left, _PREC_ADD)} + {_render(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Sub):
        return f"{_render(e.left, _PREC_ADD)} - {_render(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Mul):
        return f"{_render(e.left, _PREC_MUL)}*{_render(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Div):
        return f"{_render(e.left, _PREC_MUL)}/{_render(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Neg):
        return f"-{_render(e.operand, _PREC_NEG)}"
    if isinstance(e, Pow):
        return f"{_render(e.base, _PREC_ATOM)}^{e.exponent}"
    if isinstance(e, Func):
        return f"{e.name}({_render(e.arg, _PREC_ADD)})"
    raise TypeError(f"not an Expression: {e!r}")


def to_source(e):
    """Render an Expression; parse_expression(to_source(e)) equals ``e``
    whenever every Const in ``e`` is nonnegative (as produced by parsing)."""
    return _render(e, _PREC_ADD)


# ---------------------------------------------------------------------------
# plain evaluation (independent of the jet machinery; used by FD oracles)

def eval_value(e, u):
    """Evaluate an expression at a parameter point; raises DomainError on
    division by zero, log/sqrt outside their domain or non-finite results."""
    v = _eval(e, u)
    if not math.isfinite(v):
        raise DomainError(f"non-finite value {v!r} for {to_source(e)}")
    return v


def _eval(e, u):
    if isinstance(e, Var):
        return float(u[e.index])
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Add):
        return _eval(e.left, u) + _eval(e.right, u)
    if isinstance(e, Sub):
        return _eval(e.left, u) - _eval(e.right, u)
    if isinstance(e, Mul):
        return _eval(e.left, u) * _eval(e.right, u)
    if isinstance(e, Div):
        denom = _eval(e.right, u)
        if denom == 0.0:
            raise DomainError("division by zero")
        return _eval(e.left, u) / denom
    if isinstance(e, Neg):
        return -_eval(e.operand, u)
    if isinstance(e, Pow):
        base = _eval(e.base, u)
        if base == 0.0 and e.exponent < 0:
            raise DomainError("zero raised to a negative power")
        return base ** e.exponent
    if isinstance(e, Func):
        x = _eval(e.arg, u)
        if e.name == "sin":
            return math.sin(x)
        if e.name == "cos":
            return math.cos(x)
        if e.name == "exp":
            return math.exp(x)
        if e.name == "log":
            if x <= 0.0:
                raise DomainError("log of a nonpositive value")
            return math.log(x)
        if e.name == "sqrt":
            if x < 0.0:
                raise DomainError("sqrt of a negative value")
            return math.sqrt(x)
    raise TypeError(f"not an Expression: {e!r}")
