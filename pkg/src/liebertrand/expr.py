"""Scalar expressions in the arc-length variable ``s``.

Grammar, lowest to highest precedence::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | "+" unary | power
    power   := primary ("^" unary)?          # right associative
    primary := NUMBER | "s" | "pi" | FUNC "(" expr ")" | "(" expr ")"

``-s^2`` therefore parses as ``-(s^2)`` and ``2^-s`` is accepted.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ExprSyntaxError, ExpressionDomainError, UnknownIdentifier

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": math.pi}

BINARY_KINDS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}
_SYMBOL = {v: k for k, v in BINARY_KINDS.items()}

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "s"


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    kind: str  # add | sub | mul | div | pow
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, expected, message=None):
        got = self.peek()
        if message is None:
            message = f"unexpected {got!r}" if got else "unexpected end of input"
        raise ExprSyntaxError(message, self.pos, expected)

    def parse(self):
        node = self.expr()
        if self.peek():
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(BINARY_KINDS[op], node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(BINARY_KINDS[op], node, self.unary())
        return node

    def unary(self):
        c = self.peek()
        if c == "-":
            self.pos += 1
            return Neg(self.unary())
        if c == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek() == "^":
            self.pos += 1
            return BinOp("pow", base, self.unary())
        return base

    def primary(self):
        c = self.peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            node = self.expr()
            if self.peek() != ")":
                self.fail((")",))
            self.pos += 1
            return node
        m = _NUMBER.match(self.text, self.pos)
        if m:
            value = float(m.group(0))
            if not math.isfinite(value):
                raise ExprSyntaxError("numeric literal overflows", start)
            self.pos = m.end()
            return Const(value)
        m = _IDENT.match(self.text, self.pos)
        if m:
            name = m.group(0)
            self.pos = m.end()
            if name == "s":
                return Var()
            if name in CONSTANTS:
                return Const(CONSTANTS[name])
            if name in FUNCTIONS:
                if self.peek() != "(":
                    self.fail(("(",))
                self.pos += 1
                arg = self.expr()
                if self.peek() != ")":
                    self.fail((")",))
                self.pos += 1
                return Call(name, arg)
            raise UnknownIdentifier(
                f"unknown identifier {name!r}", start,
                ("s", *CONSTANTS, *FUNCTIONS),
            )
        self.fail(("number", "s", "function", "("))


def parse_expr(text):
    """Parse ``text`` into an expression tree.

    Raises ``ExprSyntaxError`` (with the byte offset of the offending token)
    or ``UnknownIdentifier``.
    """
    if not isinstance(text, str):
        raise ExprSyntaxError("expression must be a string", 0)
    # offsets are reported in bytes; the grammar itself is pure ASCII
    try:
        text.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ExprSyntaxError("non-ASCII character", exc.start) from None
    return _Parser(text).parse()


def _check(value, node):
    if not np.all(np.isfinite(value)):
        raise ExpressionDomainError(
            f"non-finite value in subexpression {to_string(node)!r}",
            subexpression=to_string(node),
        )
    return value


def eval_expr(ast, s):
    """Evaluate ``ast`` at ``s`` (scalar or numpy array) in IEEE double.

    Raises ``ExpressionDomainError`` naming the first subexpression that
    produced a non-finite value (log of non-positive numbers, division by
    zero, overflow, ...).
    """
    scalar = np.ndim(s) == 0
    s = np.asarray(s, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(ast, s)
    out = np.broadcast_to(out, s.shape).astype(float)
    return float(out) if scalar else out


def _eval(node, s):
    if isinstance(node, Const):
        return np.float64(node.value)
    if isinstance(node, Var):
        return s
    if isinstance(node, Neg):
        return -_eval(node.operand, s)
    if isinstance(node, Call):
        return _check(FUNCTIONS[node.func](_eval(node.arg, s)), node)
    if isinstance(node, BinOp):
        a = _eval(node.left, s)
        b = _eval(node.right, s)
        if node.kind == "add":
            r = a + b
        elif node.kind == "sub":
            r = a - b
        elif node.kind == "mul":
            r = a * b
        elif node.kind == "div":
            r = a / b
        else:
            r = np.power(a, b)
        return _check(r, node)
    raise TypeError(f"not an expression node: {node!r}")


def to_string(node):
    """Render ``node`` as text that parses back to the same tree."""
    if isinstance(node, Const):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "s"
    if isinstance(node, Neg):
        return f"(-{to_string(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, BinOp):
        return (f"({to_string(node.left)} {_SYMBOL[node.kind]} "
                f"{to_string(node.right)})")
    raise TypeError(f"not an expression node: {node!r}")


class Expression:
    """Parsed expression that remembers its source text."""

    def __init__(self, text):
        self.text = text
        self.ast = parse_expr(text)

    def __call__(self, s):
        return eval_expr(self.ast, s)

    def __repr__(self):
        return f"Expression({self.text!r})"
