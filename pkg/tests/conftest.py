import math

import numpy as np
import pytest
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr as sp_parse, standard_transformations

from warpsoliton.field_calculus import (
    Domain,
    const,
    cosh,
    coth,
    exp,
    log,
    sinh,
    sqrt,
    tanh,
    to_text,
    var,
)


def random_expr(rng, n, depth=6):
    """Random tree of depth <= ``depth`` that is smooth on ``[-1, 1]^n``.

    Arguments of log, sqrt, coth and of divisions are lifted to ``1 + a^2``
    so every draw is defined everywhere; exp-type nodes get a tanh-damped
    argument so values stay moderate.
    """
    if depth <= 1 or rng.random() < 0.15:
        if rng.random() < 0.7:
            return var(int(rng.integers(n)))
        return const(float(np.round(rng.uniform(-2, 2), 3)))
    kind = rng.integers(10)
    a = random_expr(rng, n, depth - 1)
    if kind <= 3:
        b = random_expr(rng, n, depth - 1)
        op = ("add", "sub", "mul", "div")[kind]
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        return a / (const(1.0) + b * b)
    pos = const(1.0) + a * a
    if kind == 4:
        return exp(tanh(a))
    if kind == 5:
        return log(pos)
    if kind == 6:
        return sinh(tanh(a)) if rng.random() < 0.5 else cosh(tanh(a))
    if kind == 7:
        return tanh(a)
    if kind == 8:
        return sqrt(pos)
    return coth(pos)


_TRANSFORMS = standard_transformations + (convert_xor,)


def to_sympy(e, n):
    """Independent translation into sympy through the printed text."""
    syms = sp.symbols(f"x1:{n + 1}")
    local = {f"x{i + 1}": s for i, s in enumerate(syms)}
    local.update(exp=sp.exp, log=sp.log, sinh=sp.sinh, cosh=sp.cosh, tanh=sp.tanh,
                 coth=sp.coth, sqrt=sp.sqrt)
    return sp_parse(to_text(e), local_dict=local, transformations=_TRANSFORMS), syms


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_box():
    def make(n):
        return Domain((-1.0,) * n, (1.0,) * n, 1e-6)
    return make


@pytest.fixture
def half_plane():
    from warpsoliton.riemannian_core import ConformalMetric
    return ConformalMetric(-log(var(1)), Domain((-math.inf, 0.0), (math.inf, math.inf), 1e-12))
