"""Expression trees for smooth scalar fields on coordinate boxes.

Nodes are hash-consed: two structurally equal trees are the same Python
object, so structural equality is identity and shared subtrees are shared in
memory.  Every node is built through the smart constructors below, which
apply only constant folding and the ``x + 0``, ``x * 0``, ``x * 1`` family
of rules.
"""

from __future__ import annotations

import math
import threading
from functools import lru_cache

UNARY_OPS = ("neg", "exp", "log", "sinh", "cosh", "tanh", "coth", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div")

_table: dict = {}
_lock = threading.Lock()


class Expr:
    """Immutable node of a scalar field expression.

    Attributes
    ----------
    op : str
        One of ``"var"``, ``"const"``, ``"pow"``, a unary op name or a binary
        op name.
    args : tuple of Expr
        Child nodes (empty for leaves, one for unary ops and ``pow``).
    value : int or float or None
        Axis index for ``var``, the number for ``const``, the constant
        exponent for ``pow``.
    """

    __slots__ = ("op", "args", "value", "depth")

    def __new__(cls, *args, **kwargs):
        raise TypeError("use the constructor functions (var, const, exp, ...)")

    # arithmetic sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        if isinstance(exponent, Expr):
            if exponent.op != "const":
                raise ValueError("exponent must be a constant")
            exponent = exponent.value
        return power(self, exponent)

    def __reduce__(self):
        if self.op == "var":
            return (var, (self.value,))
        if self.op == "const":
            return (const, (self.value,))
        if self.op == "pow":
            return (power, (self.args[0], self.value))
        return (_rebuild, (self.op, self.args))

    def __repr__(self):
        from .parser import to_text

        text = to_text(self)
        if len(text) > 200:
            text = text[:197] + "..."
        return f"Expr({text!r})"

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    def free_axes(self) -> frozenset:
        """Indices of the variables the expression depends on."""
        return _free_axes(self)

    def size(self) -> int:
        """Number of distinct nodes in the expression DAG."""
        seen = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.extend(node.args)
        return len(seen)


def _make(op, args=(), value=None):
    key = (op, value, args)
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is None:
            node = object.__new__(Expr)
            node.op = op
            node.args = args
            node.value = value
            node.depth = 1 + max((a.depth for a in args), default=0)
            _table[key] = node
    return node


def _rebuild(op, args):
    if op in UNARY_OPS:
        return _UNARY_BUILDERS[op](args[0])
    return _BINARY_BUILDERS[op](*args)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return const(x)
    try:
        return const(float(x))
    except (TypeError, ValueError):
        raise TypeError(f"cannot convert {type(x).__name__} to Expr") from None


def var(axis: int) -> Expr:
    """Coordinate function ``x_{axis+1}`` (axes are zero-based)."""
    axis = int(axis)
    if axis < 0:
        raise ValueError("axis must be nonnegative")
    return _make("var", (), axis)


def const(value: float) -> Expr:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"constants must be finite, got {value}")
    if value == 0.0:
        value = 0.0  # drop the sign of -0.0
    return _make("const", (), value)


ZERO = const(0.0)
ONE = const(1.0)


def _is(e: Expr, v: float) -> bool:
    return e.op == "const" and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const":
        return const(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return _make("add", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const":
        return const(a.value - b.value)
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return _make("sub", (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const":
        return const(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return _make("mul", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if b.op == "const":
        if b.value == 0.0:
            raise ZeroDivisionError("division by the constant 0")
        if a.op == "const":
            return const(a.value / b.value)
        if b.value == 1.0:
            return a
    if _is(a, 0.0):
        return ZERO
    return _make("div", (a, b))


def neg(a: Expr) -> Expr:
    if a.op == "const":
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    return _make("neg", (a,))


def power(a: Expr, exponent: float) -> Expr:
    """``a ** exponent`` for a constant real exponent."""
    exponent = float(exponent)
    if not math.isfinite(exponent):
        raise ValueError("exponent must be finite")
    if exponent == 0.0:
        return ONE
    if exponent == 1.0:
        return a
    if a.op == "const":
        folded = _fold_pow(a.value, exponent)
        if folded is not None:
            return const(folded)
    return _make("pow", (a,), exponent)


def _fold_pow(base, exponent):
    try:
        out = math.pow(base, exponent)
    except (OverflowError, ValueError):
        return None
    return out if math.isfinite(out) else None


def _fold_unary(op, fn, guard=None):
    def build(a: Expr) -> Expr:
        a = as_expr(a)
        if a.op == "const" and (guard is None or guard(a.value)):
            try:
                out = fn(a.value)
            except (OverflowError, ValueError):
                out = None
            if out is not None and math.isfinite(out):
                return const(out)
        return _make(op, (a,))

    build.__name__ = op
    return build


exp = _fold_unary("exp", math.exp)
log = _fold_unary("log", math.log, lambda v: v > 0)
sinh = _fold_unary("sinh", math.sinh)
cosh = _fold_unary("cosh", math.cosh)
tanh = _fold_unary("tanh", math.tanh)
coth = _fold_unary("coth", lambda v: 1.0 / math.tanh(v), lambda v: v != 0)
sqrt = _fold_unary("sqrt", math.sqrt, lambda v: v >= 0)

_UNARY_BUILDERS = {
    "neg": neg, "exp": exp, "log": log, "sinh": sinh, "cosh": cosh,
    "tanh": tanh, "coth": coth, "sqrt": sqrt,
}
_BINARY_BUILDERS = {"add": add, "sub": sub, "mul": mul, "div": div}


def sum_exprs(terms) -> Expr:
    """Sum an iterable of expressions (empty sum is 0)."""
    out = ZERO
    for t in terms:
        out = add(out, as_expr(t))
    return out


@lru_cache(maxsize=None)
def _free_axes(e: Expr) -> frozenset:
    if e.op == "var":
        return frozenset((e.value,))
    out = frozenset()
    for a in e.args:
        out |= _free_axes(a)
    return out


# differentiation ------------------------------------------------------

@lru_cache(maxsize=None)
def differentiate(e: Expr, axis: int) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``x_{axis+1}``."""
    op = e.op
    if op == "const":
        return ZERO
    if op == "var":
        return ONE if e.value == axis else ZERO
    if axis not in _free_axes(e):
        return ZERO
    if op == "add":
        return add(differentiate(e.args[0], axis), differentiate(e.args[1], axis))
    if op == "sub":
        return sub(differentiate(e.args[0], axis), differentiate(e.args[1], axis))
    if op == "mul":
        a, b = e.args
        return add(mul(differentiate(a, axis), b), mul(a, differentiate(b, axis)))
    if op == "div":
        a, b = e.args
        da, db = differentiate(a, axis), differentiate(b, axis)
        # (a/b)' = a'/b - a b' / b^2
        return sub(div(da, b), div(mul(a, db), power(b, 2.0)))
    if op == "pow":
        a = e.args[0]
        c = e.value
        return mul(mul(const(c), power(a, c - 1.0)), differentiate(a, axis))
    a = e.args[0]
    da = differentiate(a, axis)
    if op == "neg":
        return neg(da)
    if op == "exp":
        return mul(e, da)
    if op == "log":
        return div(da, a)
    if op == "sinh":
        return mul(cosh(a), da)
    if op == "cosh":
        return mul(sinh(a), da)
    if op == "tanh":
        return mul(power(cosh(a), -2.0), da)
    if op == "coth":
        return mul(neg(power(sinh(a), -2.0)), da)
    if op == "sqrt":
        return div(da, mul(const(2.0), e))
    raise AssertionError(f"unknown op {op}")


def gradient(e: Expr, n: int) -> list:
    return [differentiate(e, i) for i in range(n)]


def substitute(e: Expr, mapping) -> Expr:
    """Replace variables by expressions.

    ``mapping`` maps axis index to an Expr; axes not in the mapping are left
    alone.  Used to pull fields back along parametrised curves.
    """
    mapping = {int(k): as_expr(v) for k, v in mapping.items()}
    memo: dict = {}

    def walk(node):
        hit = memo.get(node)
        if hit is not None:
            return hit
        if node.op == "var":
            out = mapping.get(node.value, node)
        elif node.op == "const":
            out = node
        elif node.op == "pow":
            out = power(walk(node.args[0]), node.value)
        elif node.op in _UNARY_BUILDERS:
            out = _UNARY_BUILDERS[node.op](walk(node.args[0]))
        else:
            out = _BINARY_BUILDERS[node.op](walk(node.args[0]), walk(node.args[1]))
        memo[node] = out
        return out

    return walk(e)
