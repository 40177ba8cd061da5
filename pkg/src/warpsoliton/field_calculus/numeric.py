"""Vectorised evaluation of expression DAGs and finite-difference checks."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .expr import Expr

TINY = 1e-300


class DomainViolation(ValueError):
    """A node was evaluated outside its domain of definition.

    Attributes
    ----------
    point : ndarray or None
        The first offending evaluation point.
    """

    def __init__(self, message, point=None):
        self.point = None if point is None else np.asarray(point, dtype=float)
        if self.point is not None:
            message = f"{message} at point {np.array2string(self.point, precision=6)}"
        super().__init__(message)


class Tape:
    """Topologically ordered program for a tuple of expressions.

    Each distinct node is computed once per call, for a whole batch of
    points at a time.
    """

    def __init__(self, exprs):
        self.outputs = tuple(exprs)
        order = []
        index = {}
        stack = [(e, False) for e in reversed(self.outputs)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in index:
                continue
            if expanded:
                index[id(node)] = len(order)
                order.append(node)
            else:
                stack.append((node, True))
                for a in reversed(node.args):
                    if id(a) not in index:
                        stack.append((a, False))
        self.program = [
            (node.op, node.value, tuple(index[id(a)] for a in node.args))
            for node in order
        ]
        self.output_slots = [index[id(e)] for e in self.outputs]
        self.max_axis = max(
            (node.value for node in order if node.op == "var"), default=-1)

    def __call__(self, points):
        """Evaluate on ``points`` of shape ``(k, n)``; returns ``(len(outputs), k)``."""
        X = np.asarray(points, dtype=float)
        if X.ndim != 2:
            raise ValueError("points must have shape (k, n)")
        if self.max_axis >= X.shape[1]:
            raise ValueError(
                f"expression uses x{self.max_axis + 1} but points have dimension {X.shape[1]}")
        k = X.shape[0]
        vals = [None] * len(self.program)
        with np.errstate(all="ignore"):
            for slot, (op, value, args) in enumerate(self.program):
                if op == "const":
                    vals[slot] = value
                    continue
                if op == "var":
                    vals[slot] = X[:, value]
                    continue
                a = vals[args[0]]
                if op == "add":
                    r = a + vals[args[1]]
                elif op == "sub":
                    r = a - vals[args[1]]
                elif op == "mul":
                    r = a * vals[args[1]]
                elif op == "div":
                    b = vals[args[1]]
                    _check(np.abs(b) < TINY, "division by ~0", X)
                    r = a / b
                elif op == "neg":
                    r = -a
                elif op == "exp":
                    r = np.exp(a)
                elif op == "log":
                    _check(a <= 0, "log of nonpositive value", X)
                    r = np.log(a)
                elif op == "sinh":
                    r = np.sinh(a)
                elif op == "cosh":
                    r = np.cosh(a)
                elif op == "tanh":
                    r = np.tanh(a)
                elif op == "coth":
                    _check(np.abs(a) < TINY, "coth at 0", X)
                    r = 1.0 / np.tanh(a)
                elif op == "sqrt":
                    _check(a < 0, "sqrt of negative value", X)
                    r = np.sqrt(a)
                elif op == "pow":
                    if not float(value).is_integer():
                        _check(a < 0, "non-integer power of negative value", X)
                    if value < 0:
                        _check(np.abs(a) < TINY, "negative power of ~0", X)
                    r = np.power(a, value)
                else:
                    raise AssertionError(op)
                _check(~np.isfinite(r), f"non-finite result in {op}", X)
                vals[slot] = r
        out = np.empty((len(self.outputs), k))
        for row, slot in enumerate(self.output_slots):
            out[row] = vals[slot]
        return out


def _check(mask, message, X):
    mask = np.broadcast_to(mask, (X.shape[0],)) if np.ndim(mask) == 0 else mask
    if np.any(mask):
        raise DomainViolation(message, X[int(np.argmax(mask))])


@lru_cache(maxsize=4096)
def compile_exprs(exprs: tuple) -> Tape:
    """Compile (and cache) a tape for a tuple of expressions."""
    return Tape(exprs)


def _as_points(p):
    P = np.asarray(p, dtype=float)
    single = P.ndim == 1
    return np.atleast_2d(P), single


def evaluate_many(exprs, p):
    """Evaluate several expressions at once.

    Returns shape ``(len(exprs),)`` for a single point or
    ``(len(exprs), k)`` for a ``(k, n)`` batch.
    """
    X, single = _as_points(p)
    out = compile_exprs(tuple(exprs))(X)
    return out[:, 0] if single else out


def evaluate(e: Expr, p):
    """Evaluate ``e`` at a point (returns float) or a batch of points."""
    X, single = _as_points(p)
    out = compile_exprs((e,))(X)[0]
    return float(out[0]) if single else out


_EPS = np.finfo(float).eps


def finite_difference(e: Expr, p, axis: int, order: int = 1, domain=None) -> float:
    """Central-difference estimate of a first or second partial derivative.

    The step is ``eps**(1/3) * (|p_axis| + 1)`` for first derivatives and
    ``eps**(1/4) * (|p_axis| + 1)`` for second derivatives.

    Raises
    ------
    ValueError
        If ``domain`` is given and the stencil leaves it.
    """
    p = np.asarray(p, dtype=float)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    root = 3.0 if order == 1 else 4.0
    h = _EPS ** (1.0 / root) * (abs(p[axis]) + 1.0)
    step = np.zeros_like(p)
    step[axis] = h
    stencil = np.stack([p - step, p, p + step])
    if domain is not None:
        for q in (stencil[0], stencil[2]):
            if not domain.contains(q):
                raise ValueError(f"finite-difference stencil leaves the domain at {q}")
    lo, mid, hi = evaluate(e, stencil)
    if order == 1:
        return float((hi - lo) / (2.0 * h))
    return float((hi - 2.0 * mid + lo) / (h * h))
