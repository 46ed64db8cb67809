"""Univariate closed-form expressions evaluated as third-order Taylor jets.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;            (* right associative *)
    atom    = number | "pi" | VAR | FUNC "(" expr ")" | "(" expr ")" ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
    FUNC    = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" ;

``VAR`` is ``u`` unless another variable name is requested at parse time.
``^`` binds tighter than unary minus, so ``-u^2`` is ``-(u^2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")


class ExprError(ValueError):
    """Base class for expression errors; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifier(ExprError):
    pass


class ArityError(ExprError):
    pass


class ExprDomainError(ExprError):
    pass


# --------------------------------------------------------------------------
# Taylor jets


class Jet3:
    """Value and first three derivatives of a function at a point.

    Coefficients may be floats or numpy arrays of a common shape, so one jet
    can carry a whole grid of evaluation points.
    """

    __slots__ = ("c0", "c1", "c2", "c3")

    def __init__(self, c0, c1=0.0, c2=0.0, c3=0.0):
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3

    @classmethod
    def variable(cls, u) -> "Jet3":
        u = np.asarray(u, dtype=float)
        return cls(u, np.ones_like(u), np.zeros_like(u), np.zeros_like(u))

    def astuple(self):
        return (self.c0, self.c1, self.c2, self.c3)

    def derivative(self) -> "Jet3":
        """Jet of the derivative; its third derivative is unknown (NaN)."""
        return Jet3(self.c1, self.c2, self.c3, np.full_like(np.asarray(self.c3, dtype=float), np.nan))

    def compose(self, f0, f1, f2, f3) -> "Jet3":
        """Chain rule: jet of F(self) given F and its derivatives at self.c0."""
        a1, a2, a3 = self.c1, self.c2, self.c3
        return Jet3(
            f0,
            f1 * a1,
            f2 * a1 * a1 + f1 * a2,
            f3 * a1 * a1 * a1 + 3.0 * f2 * a1 * a2 + f1 * a3,
        )

    def __repr__(self) -> str:
        return f"Jet3({self.c0!r}, {self.c1!r}, {self.c2!r}, {self.c3!r})"

    def __add__(self, other):
        if isinstance(other, Jet3):
            return Jet3(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2, self.c3 + other.c3)
        return Jet3(self.c0 + other, self.c1, self.c2, self.c3)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.c0, -self.c1, -self.c2, -self.c3)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet3):
            a0, a1, a2, a3 = self.astuple()
            b0, b1, b2, b3 = other.astuple()
            return Jet3(
                a0 * b0,
                a0 * b1 + a1 * b0,
                a0 * b2 + 2.0 * a1 * b1 + a2 * b0,
                a0 * b3 + 3.0 * (a1 * b2 + a2 * b1) + a3 * b0,
            )
        return Jet3(self.c0 * other, self.c1 * other, self.c2 * other, self.c3 * other)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet3":
        x = self.c0
        if np.any(np.asarray(x) == 0.0):
            raise ZeroDivisionError("jet reciprocal of zero")
        r = 1.0 / x
        return self.compose(r, -r * r, 2.0 * r**3, -6.0 * r**4)

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return self * other.reciprocal()
        if np.any(np.asarray(other) == 0.0):
            raise ZeroDivisionError("jet division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, other):
        if isinstance(other, Jet3):
            return (other * self.log()).exp()
        n = float(other)
        if n.is_integer():
            return self.ipow(int(n))
        return (self.log() * n).exp()

    def ipow(self, n: int) -> "Jet3":
        x = self.c0
        if n == 0:
            one = np.ones_like(np.asarray(x, dtype=float))
            return Jet3(one, 0.0 * one, 0.0 * one, 0.0 * one)
        if n < 0 and np.any(np.asarray(x) == 0.0):
            raise ZeroDivisionError("negative power of zero")
        f0 = _safe_pow(x, n)
        f1 = _falling(x, n, 1)
        f2 = _falling(x, n, 2)
        f3 = _falling(x, n, 3)
        return self.compose(f0, f1, f2, f3)

    def sin(self):
        s, c = np.sin(self.c0), np.cos(self.c0)
        return self.compose(s, c, -s, -c)

    def cos(self):
        s, c = np.sin(self.c0), np.cos(self.c0)
        return self.compose(c, -s, -c, s)

    def tan(self):
        t = np.tan(self.c0)
        sec2 = 1.0 + t * t
        return self.compose(t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (1.0 + 3.0 * t * t))

    def exp(self):
        e = np.exp(self.c0)
        return self.compose(e, e, e, e)

    def log(self):
        x = self.c0
        return self.compose(np.log(x), 1.0 / x, -1.0 / x**2, 2.0 / x**3)

    def sqrt(self):
        r = np.sqrt(self.c0)
        return self.compose(r, 0.5 / r, -0.25 / r**3, 0.375 / r**5)

    def atan(self):
        x = self.c0
        d = 1.0 + x * x
        return self.compose(np.arctan(x), 1.0 / d, -2.0 * x / d**2, (6.0 * x * x - 2.0) / d**3)


def _safe_pow(x, k: int):
    if k >= 0:
        return x**k
    return 1.0 / x ** (-k)


def _falling(x, n: int, m: int):
    """m-th derivative of x^n; exactly zero once the falling factorial vanishes."""
    coef = math.prod(n - i for i in range(m))
    if coef == 0:
        return 0.0 * np.asarray(x, dtype=float)
    return coef * _safe_pow(x, n - m)


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Const:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    arg: "Expression"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expression"
    pos: int = field(default=0, compare=False)


Expression = Union[Num, Var, Const, Neg, BinOp, Call]

_CONSTANTS = {"pi": math.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            j = i
            while j < n and text[j].isspace():
                j += 1
            if j >= n:
                break
            raise ExprSyntaxError(f"unexpected character {text[j]!r}", _byte_offset(text, j))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), _byte_offset(text, start)))
        i = m.end()
    tokens.append(("end", "", _byte_offset(text, n)))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, variable: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variable = variable

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Expression:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary(), pos)
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return BinOp("^", base, self.unary(), pos)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val), pos)
        if kind == "name":
            if val in FUNCTIONS:
                return self.call(val, pos)
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                raise UnknownIdentifier(f"unknown function {val!r}", pos)
            if val == self.variable:
                return Var(val, pos)
            if val in _CONSTANTS:
                return Const(val, pos)
            raise UnknownIdentifier(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected an operand, found {found}", pos)

    def call(self, fn: str, pos: int):
        kind, val, p = self.peek()
        if not (kind == "op" and val == "("):
            raise ArityError(f"function {fn!r} requires one argument in parentheses", pos)
        self.take()
        if self.peek()[1] == ")" and self.peek()[0] == "op":
            raise ArityError(f"function {fn!r} takes exactly 1 argument, got 0", pos)
        args = [self.expr()]
        while self.peek()[1] == "," and self.peek()[0] == "op":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ArityError(f"function {fn!r} takes exactly 1 argument, got {len(args)}", pos)
        return Call(fn, args[0], pos)


def parse(text: str, variable: str = "u") -> Expression:
    """Parse ``text`` into an expression tree in the single variable ``variable``."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text, variable).parse()


def substitute(text: str, constants: Mapping[str, float]) -> str:
    """Replace whole-word identifiers by numeric literals before parsing."""
    if not constants:
        return text

    def repl(m):
        name = m.group(0)
        if name not in constants:
            return name
        value = float(constants[name])
        lit = repr(value)
        return f"({lit})" if value < 0 else lit

    return re.sub(r"\b[A-Za-z_]\w*\b", repl, text)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(expr: Expression) -> str:
    """Serialize back to source; parsing the result yields an equal tree."""
    if isinstance(expr, Num):
        return repr(float(expr.value))
    if isinstance(expr, (Var, Const)):
        return expr.name
    if isinstance(expr, Neg):
        return f"-({to_text(expr.arg)})"
    if isinstance(expr, Call):
        return f"{expr.fn}({to_text(expr.arg)})"
    return f"({to_text(expr.left)}) {expr.op} ({to_text(expr.right)})"


# --------------------------------------------------------------------------
# Evaluation


def eval_jet3(expr: Expression, u, variable_jet: Jet3 | None = None) -> Jet3:
    """Evaluate ``expr`` at ``u`` (scalar or array) as a third-order jet.

    Raises ExprDomainError (carrying the offending node's offset) when the
    expression is undefined at any requested point.
    """
    x = variable_jet if variable_jet is not None else Jet3.variable(u)
    shape = np.shape(x.c0)
    with np.errstate(all="ignore"):
        return _eval(expr, x, shape)


def _const(value: float, shape) -> Jet3:
    if shape == ():
        return Jet3(float(value), 0.0, 0.0, 0.0)
    full = np.full(shape, float(value))
    zero = np.zeros(shape)
    return Jet3(full, zero, zero, zero)


def _eval(node, x: Jet3, shape) -> Jet3:
    if isinstance(node, Num):
        return _const(node.value, shape)
    if isinstance(node, Const):
        return _const(_CONSTANTS[node.name], shape)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.arg, x, shape)
    if isinstance(node, Call):
        a = _eval(node.arg, x, shape)
        v = np.asarray(a.c0)
        if node.fn == "log" and np.any(v <= 0.0):
            raise ExprDomainError("log of non-positive value", node.pos)
        if node.fn == "sqrt" and np.any(v <= 0.0):
            raise ExprDomainError("sqrt of non-positive value (derivatives undefined)", node.pos)
        if node.fn == "tan" and np.any(np.abs(np.cos(v)) < 1e-300):
            raise ExprDomainError("tan at a pole", node.pos)
        return getattr(a, node.fn)()
    left = _eval(node.left, x, shape)
    if node.op == "^":
        right_node = node.right
        if _is_constant(right_node):
            p = _eval(right_node, x, shape)
            p0 = float(np.ravel(p.c0)[0])
            if float(p0).is_integer():
                if p0 < 0 and np.any(np.asarray(left.c0) == 0.0):
                    raise ExprDomainError("negative power of zero", node.pos)
                return left.ipow(int(p0))
            if np.any(np.asarray(left.c0) <= 0.0):
                raise ExprDomainError("non-integer power of non-positive base", node.pos)
            return (left.log() * p0).exp()
        right = _eval(right_node, x, shape)
        if np.any(np.asarray(left.c0) <= 0.0):
            raise ExprDomainError("variable power of non-positive base", node.pos)
        return (right * left.log()).exp()
    right = _eval(node.right, x, shape)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if np.any(np.asarray(right.c0) == 0.0):
        raise ExprDomainError("division by zero", node.pos)
    return left / right


def _is_constant(node) -> bool:
    if isinstance(node, (Num, Const)):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return _is_constant(node.arg)
    if isinstance(node, Call):
        return _is_constant(node.arg)
    return _is_constant(node.left) and _is_constant(node.right)


# --------------------------------------------------------------------------
# Smooth univariate functions


class SmoothFn1:
    """A univariate C^3 function delivered as a jet: ``f(u) -> Jet3``.

    Built from an expression string, a constant, or any callable returning a
    Jet3. Calls accept scalars or numpy arrays.
    """

    def __init__(self, fn: Callable[[object], Jet3], label: str = "<fn>"):
        self._fn = fn
        self.label = label

    @classmethod
    def from_expr(cls, source, constants: Mapping[str, float] | None = None, variable: str = "u") -> "SmoothFn1":
        if isinstance(source, str):
            text = substitute(source, constants or {})
            tree = parse(text, variable)
            label = text
        else:
            tree = source
            label = to_text(tree)
        return cls(lambda u: eval_jet3(tree, u), label)

    @classmethod
    def constant(cls, value: float) -> "SmoothFn1":
        value = float(value)
        return cls(lambda u: _const(value, np.shape(u)), repr(value))

    @classmethod
    def coerce(cls, f) -> "SmoothFn1":
        """Accept a SmoothFn1, an expression string, or a number."""
        if isinstance(f, SmoothFn1):
            return f
        if isinstance(f, str):
            return cls.from_expr(f)
        if isinstance(f, (int, float)):
            return cls.constant(f)
        if callable(f):
            return cls(f)
        raise TypeError(f"cannot interpret {f!r} as a smooth function")

    def __call__(self, u) -> Jet3:
        return self._fn(u)

    def value(self, u):
        return self._fn(u).c0

    def __repr__(self) -> str:
        return f"SmoothFn1({self.label})"
