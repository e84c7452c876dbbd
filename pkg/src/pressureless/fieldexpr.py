"""Closed-form scalar fields: parsing, evaluation, symbolic differentiation.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Expressions are immutable trees.  Evaluation accepts floats or numpy arrays
(broadcast together) and raises :class:`DomainError` instead of returning
NaN or inf.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    ExprSyntaxError,
    NonDifferentiable,
    UnknownFunction,
    UnknownIdentifier,
)

FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs", "log")
DEFAULT_VARIABLES = ("a", "b")


# {{{ tree

@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


class FieldExpr:
    """A parsed expression over a fixed tuple of variable names."""

    __slots__ = ("root", "variables", "_fn")

    def __init__(self, root: Node, variables=DEFAULT_VARIABLES):
        self.root = root
        self.variables = tuple(variables)
        self._fn = _compile(root, self.variables)

    def __call__(self, *args, **kwargs):
        if kwargs:
            args = args + tuple(kwargs[v] for v in self.variables[len(args):])
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments "
                            f"({', '.join(self.variables)}), got {len(args)}")
        return evaluate(self, *args)

    def diff(self, var: str) -> "FieldExpr":
        return differentiate(self, var)

    @property
    def is_constant(self) -> bool:
        return isinstance(self.root, Const)

    def __repr__(self):
        return f"FieldExpr({render(self)!r})"

    def __str__(self):
        return render(self)

    def __eq__(self, other):
        return (isinstance(other, FieldExpr) and self.root == other.root
                and self.variables == other.variables)

    def __hash__(self):
        return hash((self.root, self.variables))

# }}}


# {{{ parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source, variables):
        self.source = source
        self.variables = variables
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, pos = self.peek()
        if value != text or kind not in ("op",):
            what = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"expected {text!r}, found {what}", pos, self.source)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {value!r}", pos, self.source)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.unary())
        if kind == "op" and value == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value, pos = self.advance()
        if kind == "num":
            return Const(float(value))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if value not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {value!r}", pos, self.source)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value in FUNCTIONS:
                raise ExprSyntaxError(f"function {value!r} needs an argument", pos, self.source)
            if value == "pi":
                return Const(math.pi)
            if value not in self.variables:
                raise UnknownIdentifier(f"unknown identifier {value!r}", pos, self.source)
            return Var(value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"unexpected {what}", pos, self.source)


def parse(source: str, variables=DEFAULT_VARIABLES) -> FieldExpr:
    """Parse ``source`` into a :class:`FieldExpr` over ``variables``."""
    if not isinstance(source, str):
        source = repr(float(source))
    return FieldExpr(_Parser(source, tuple(variables)).parse(), variables)


def constant(value: float, variables=DEFAULT_VARIABLES) -> FieldExpr:
    return FieldExpr(Const(float(value)), variables)


def as_field(value, variables=DEFAULT_VARIABLES) -> FieldExpr:
    """Coerce a number, string or FieldExpr to a FieldExpr over ``variables``."""
    if isinstance(value, FieldExpr):
        return value
    if isinstance(value, (int, float)):
        return constant(value, variables)
    return parse(value, variables)

# }}}


# {{{ rendering

def _render(node):
    """Return (text, precedence) of ``node``."""
    if isinstance(node, Const):
        v = node.value
        text = repr(v) if v != int(v) or abs(v) >= 1e16 else str(int(v))
        if v < 0:
            return f"({text})", 5
        return text, 5
    if isinstance(node, Var):
        return node.name, 5
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)[0]})", 5
    if isinstance(node, Neg):
        text, prec = _render(node.operand)
        if prec <= _PRECEDENCE["neg"]:
            text = f"({text})"
        return f"-{text}", _PRECEDENCE["neg"]
    prec = _PRECEDENCE[node.op]
    lt, lp = _render(node.left)
    rt, rp = _render(node.right)
    if node.op == "^":
        # right-associative; a negated base must be parenthesized
        if lp <= prec:
            lt = f"({lt})"
        if rp < prec:
            rt = f"({rt})"
    else:
        if lp < prec:
            lt = f"({lt})"
        if rp < prec or (rp == prec and node.op in ("-", "/")):
            rt = f"({rt})"
        if rp == _PRECEDENCE["neg"]:
            rt = f"({rt})"
    return f"{lt} {node.op} {rt}" if prec == 1 else f"{lt}{node.op}{rt}", prec


def render(e: FieldExpr) -> str:
    return _render(e.root)[0]

# }}}


# {{{ evaluation

def _check(value, what):
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{what} produced a non-finite value")
    return value


def _compile(node, variables):
    """Build a closure evaluating ``node`` on a tuple of arguments."""
    if isinstance(node, Const):
        v = node.value
        return lambda args: v
    if isinstance(node, Var):
        k = variables.index(node.name)
        return lambda args: args[k]
    if isinstance(node, Neg):
        f = _compile(node.operand, variables)
        return lambda args: -f(args)
    if isinstance(node, Call):
        f = _compile(node.arg, variables)
        name = node.func
        if name == "sqrt":
            def sqrt(args):
                x = f(args)
                if np.any(np.asarray(x) < 0):
                    raise DomainError("sqrt of a negative number")
                return np.sqrt(x)
            return sqrt
        if name == "log":
            def log(args):
                x = f(args)
                if np.any(np.asarray(x) <= 0):
                    raise DomainError("log of a non-positive number")
                return np.log(x)
            return log
        if name == "exp":
            def exp(args):
                with np.errstate(over="ignore"):
                    return _check(np.exp(f(args)), "exp")
            return exp
        ufunc = {"sin": np.sin, "cos": np.cos, "abs": np.abs}[name]
        return lambda args: ufunc(f(args))

    lf = _compile(node.left, variables)
    rf = _compile(node.right, variables)
    op = node.op
    if op == "+":
        return lambda args: lf(args) + rf(args)
    if op == "-":
        return lambda args: lf(args) - rf(args)
    if op == "*":
        return lambda args: lf(args) * rf(args)
    if op == "/":
        def div(args):
            den = rf(args)
            if np.any(np.asarray(den) == 0):
                raise DomainError("division by zero")
            return lf(args) / den
        return div
    if isinstance(node.right, Const) and float(node.right.value).is_integer():
        n = int(node.right.value)
        if n == 2:
            def square(args):
                x = lf(args)
                return x * x
            return square

    def power(args):
        base = lf(args)
        ex = rf(args)
        with np.errstate(all="ignore"):
            out = np.power(np.asarray(base, dtype=float), ex)
        return _check(out, "power")
    return power


def evaluate(e: FieldExpr, *args):
    """Evaluate ``e`` at the given variable values (scalars or arrays)."""
    arrays = any(isinstance(x, np.ndarray) for x in args)
    args = tuple(np.asarray(x, dtype=float) if isinstance(x, np.ndarray) else float(x)
                 for x in args)
    with np.errstate(over="ignore", invalid="ignore"):
        value = e._fn(args)
    value = _check(value, render(e))
    if arrays:
        shape = np.broadcast_shapes(*(np.shape(x) for x in args))
        return np.broadcast_to(np.asarray(value, dtype=float), shape)
    return float(value)

# }}}


# {{{ differentiation

_ZERO = Const(0.0)
_ONE = Const(1.0)


def _is(node, value):
    return isinstance(node, Const) and node.value == value


def _add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return _ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def _div(a, b):
    if _is(a, 0):
        return _ZERO
    if _is(b, 1):
        return a
    return BinOp("/", a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _d(node, var):
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Var):
        return _ONE if node.name == var else _ZERO
    if isinstance(node, Neg):
        return _neg(_d(node.operand, var))
    if isinstance(node, Call):
        inner = _d(node.arg, var)
        if node.func == "abs":
            raise NonDifferentiable("abs() is not differentiable")
        if _is(inner, 0):
            # still reject abs nested deeper
            _d_check(node.arg, var)
            return _ZERO
        u = node.arg
        outer = {
            "sin": lambda: Call("cos", u),
            "cos": lambda: _neg(Call("sin", u)),
            "exp": lambda: node,
            "sqrt": lambda: _div(Const(0.5), node),
            "log": lambda: _div(_ONE, u),
        }[node.func]()
        return _mul(outer, inner)

    left, right = node.left, node.right
    dl, dr = _d(left, var), _d(right, var)
    if node.op == "+":
        return _add(dl, dr)
    if node.op == "-":
        return _sub(dl, dr)
    if node.op == "*":
        return _add(_mul(dl, right), _mul(left, dr))
    if node.op == "/":
        if _is(dr, 0):
            return _div(dl, right)
        return _div(_sub(_mul(dl, right), _mul(left, dr)), BinOp("^", right, Const(2.0)))
    # power
    if isinstance(right, Const):
        n = right.value
        if n == 0:
            return _ZERO
        if n == 1:
            return dl
        lowered = left if n == 2 else BinOp("^", left, Const(n - 1))
        return _mul(_mul(Const(n), lowered), dl)
    # general x^y = exp(y log x)
    term = _add(_mul(dr, Call("log", left)), _div(_mul(right, dl), left))
    return _mul(node, term)


def _d_check(node, var):
    """Raise NonDifferentiable if ``node`` contains abs()."""
    if isinstance(node, Call):
        if node.func == "abs":
            raise NonDifferentiable("abs() is not differentiable")
        _d_check(node.arg, var)
    elif isinstance(node, Neg):
        _d_check(node.operand, var)
    elif isinstance(node, BinOp):
        _d_check(node.left, var)
        _d_check(node.right, var)


def differentiate(e: FieldExpr, var: str) -> FieldExpr:
    """Symbolic partial derivative of ``e`` with respect to ``var``.

    Any ``abs`` node in the tree makes this fail, even when it does not
    depend on ``var``.
    """
    if var not in e.variables:
        raise ValueError(f"{var!r} is not a variable of this expression")
    _d_check(e.root, var)
    return FieldExpr(_d(e.root, var), e.variables)

# }}}
