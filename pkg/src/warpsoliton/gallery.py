"""Explicit soliton warped products with closed-form data.

Example names are stable identifiers used by the command line:

``hyperbolic_traceless``
    base ``coth^2(x_n) delta`` on ``x_n > 0``, ``f = coth(x_n)``;
    steady traceless (``rho = 1/3``, ``lam = 0``) at ``(n, m) = (1, 2)``.
``cosh_traceless``
    base ``cosh^2(x_n) delta``, ``f = cosh(x_n)``; shrinking traceless
    (``rho = 1/3``, ``lam = 1/3``) at ``(n, m) = (1, 2)``.
``halfspace_steady``
    base ``x_n^-4 delta`` on ``x_n > 0``, ``f = 1/x_n``; incomplete, with
    ``mu = (5 - m - 4n)/3``.  The rho-Einstein regime is offered at ``m = 1``
    only: for ``m > 1`` the recovered ``lam`` is not constant.
``schouten_linear``
    base ``exp(2 xi) delta`` with ``xi = <a, x>``, ``|a| = 1``,
    ``f = exp(xi)``; Schouten soliton with ``lam = c``.
``gaussian_shrinker``
    flat base, ``f = 1``, ``phi = lam0 |x|^2 / 2`` and an Einstein fiber with
    ``mu = lam0``; the trivial reference case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .field_calculus import (
    Domain,
    const,
    cosh,
    coth,
    exp,
    log,
    power,
    sinh,
    sum_exprs,
    var,
)
from .riemannian_core import ConformalMetric
from .warped_soliton import WarpedSolitonData, schouten_rho

NAMES = ("hyperbolic_traceless", "cosh_traceless", "halfspace_steady", "schouten_linear")
EXTRA_NAMES = ("gaussian_shrinker",)
HALF_SPACE = ("hyperbolic_traceless", "halfspace_steady")

_DEFAULTS = {
    "hyperbolic_traceless": dict(n=1, m=2),
    "cosh_traceless": dict(n=1, m=2),
    "halfspace_steady": dict(n=3, m=1),
    "schouten_linear": dict(n=3, m=1, c=0.0),
    "gaussian_shrinker": dict(n=2, m=1, c=1.0, rho=0.1),
}


@dataclass(frozen=True)
class ExampleId:
    """Name plus parameters of a gallery example.

    ``c`` is the Schouten shift (``schouten_linear``) or ``lam0``
    (``gaussian_shrinker``); ``direction`` is the unit vector ``a`` of
    ``schouten_linear`` (default: last axis); ``rho`` is the declared rho of
    ``gaussian_shrinker``.
    """

    name: str
    n: int
    m: int
    c: float = 0.0
    direction: Optional[tuple] = None
    rho: Optional[float] = None

    @classmethod
    def default(cls, name: str, **overrides) -> "ExampleId":
        if name not in _DEFAULTS:
            raise ValueError(f"unknown example {name!r}; choose from {NAMES + EXTRA_NAMES}")
        params = dict(_DEFAULTS[name])
        params.update({k: v for k, v in overrides.items() if v is not None})
        if params.get("direction") is not None:
            params["direction"] = tuple(float(a) for a in params["direction"])
        return cls(name=name, **params)

    def validate(self, regime: str = "almost"):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if regime not in ("almost", "rho"):
            raise ValueError("regime must be 'almost' or 'rho'")
        if self.name in ("hyperbolic_traceless", "cosh_traceless"):
            if regime == "rho" and (self.n, self.m) != (1, 2):
                raise ValueError(f"{self.name} is rho-Einstein only at (n, m) = (1, 2)")
        elif self.name == "halfspace_steady":
            if self.n < 3:
                raise ValueError("halfspace_steady needs n >= 3")
            if 4 * self.n + self.m - 5 == 0:
                raise ValueError("alpha undefined for 4n + m = 5")
            if regime == "rho" and self.m != 1:
                raise ValueError("halfspace_steady has constant lam only for m = 1")
        elif self.name == "schouten_linear":
            if self.n < 3:
                raise ValueError("schouten_linear needs n >= 3")
            a = np.asarray(self.unit_direction())
            if a.shape != (self.n,) or abs(float(a @ a) - 1.0) > 1e-12:
                raise ValueError("direction must be a unit vector of length n")
        elif self.name == "gaussian_shrinker":
            if regime == "rho" and self.n + self.m < 3:
                raise ValueError("rho-Einstein mode needs n + m >= 3")
        else:
            raise ValueError(f"unknown example {self.name!r}")

    def unit_direction(self):
        if self.direction is None:
            return tuple(0.0 for _ in range(self.n - 1)) + (1.0,)
        return tuple(self.direction)


def _as_id(example, **overrides) -> ExampleId:
    if isinstance(example, ExampleId):
        return example
    return ExampleId.default(example, **overrides)


def default_domain(example, inset: float = 0.2, **overrides) -> Domain:
    """Sampling box: ``x_n in [inset, 5]`` on half spaces, ``[-3, 3]`` otherwise."""
    ex = _as_id(example, **overrides)
    lo = [-3.0 - inset] * ex.n
    hi = [3.0 + inset] * ex.n
    if ex.name in HALF_SPACE:
        lo[-1], hi[-1] = 0.0, 5.0 + inset
    return Domain(tuple(lo), tuple(hi), inset)


def natural_domain(example, **overrides) -> Domain:
    """The full coordinate region of the example (possibly unbounded)."""
    ex = _as_id(example, **overrides)
    lo = [-math.inf] * ex.n
    hi = [math.inf] * ex.n
    if ex.name in HALF_SPACE:
        lo[-1] = 0.0
    return Domain(tuple(lo), tuple(hi), 1e-12)


def halfspace_alpha(n: int, m: int) -> float:
    return -(17 + 3 * m * m - 18 * n + 4 * n * n + 2 * m * (-8 + 5 * n)) / (2 * (4 * n + m - 5))


def expected_constants(example, regime: str = "rho", **overrides) -> dict:
    """Reference values ``{alpha, rho, lam, mu}`` printed for an example.

    Only the values that hold at the given parameters are returned.
    """
    ex = _as_id(example, **overrides)
    n, m = ex.n, ex.m
    if ex.name == "hyperbolic_traceless":
        out = {"mu": 0.0}
        if (n, m) == (1, 2):
            out.update(alpha=-1.0, rho=1 / 3, lam=0.0)
        return out
    if ex.name == "cosh_traceless":
        out = {"mu": 0.0}
        if (n, m) == (1, 2):
            out.update(alpha=-1.0, rho=1 / 3, lam=1 / 3)
        return out
    if ex.name == "halfspace_steady":
        alpha = halfspace_alpha(n, m)
        out = {"mu": (5 - m - 4 * n) / 3, "alpha": alpha}
        if m == 1:
            out.update(rho=1 / (n + 1 - alpha), lam=0.0)
        return out
    if ex.name == "schouten_linear":
        return {"mu": 0.0, "alpha": float(-2 * m - n + 3), "rho": schouten_rho(n + m), "lam": ex.c}
    if ex.name == "gaussian_shrinker":
        return {"mu": ex.c}
    raise ValueError(ex.name)


def build_example(example, regime: str = "almost", inset: float = 0.2, domain: Optional[Domain] = None,
                  **overrides) -> WarpedSolitonData:
    """Construct the soliton data of a gallery example.

    Parameters
    ----------
    example : str or ExampleId
        Example name (parameters from ``overrides`` or the defaults) or an id.
    regime : {"almost", "rho"}
        ``"almost"`` passes the printed ``Lambda`` explicitly; ``"rho"``
        declares ``(lam, rho)`` and lets ``Lambda = lam + rho S_g``.
    inset, domain
        Sampling box (see :func:`default_domain`) or an explicit domain.
    """
    ex = _as_id(example, **overrides)
    ex.validate(regime)
    n, m = ex.n, ex.m
    dom = domain if domain is not None else default_domain(ex, inset)
    xn = var(n - 1)
    k = float(m + n - 2)
    if ex.name == "hyperbolic_traceless":
        u = log(coth(xn))
        f = coth(xn)
        phi = const(2.0 / 3.0 * k) * log(cosh(xn))
        Lam = -(const(2.0 * k) + const(1.0 + m + n) * cosh(const(2.0) * xn)) / (
            const(3.0) * power(cosh(xn), 4))
        mu = 0.0
        rho_pair = (0.0, 1.0 / 3.0)
    elif ex.name == "cosh_traceless":
        u = log(cosh(xn))
        f = cosh(xn)
        phi = const(k / 12.0) * (const(8.0) * log(cosh(xn)) + cosh(const(2.0) * xn))
        Lam = -(const(3.0) - const(k) * power(sinh(xn), 4)) / (const(3.0) * power(cosh(xn), 4))
        mu = 0.0
        rho_pair = (1.0 / 3.0, 1.0 / 3.0)
    elif ex.name == "halfspace_steady":
        u = const(-2.0) * log(xn)
        f = power(xn, -1)
        phi = const(2.0 * (2 - m - n) / 3.0) * log(xn)
        Lam = const(2.0 * (5 - m - 4 * n) / 3.0) * power(xn, 2)
        mu = (5 - m - 4 * n) / 3.0
        rho_pair = (0.0, 1.0 / (n + 1 - halfspace_alpha(n, m)))
    elif ex.name == "schouten_linear":
        xi = sum_exprs(const(a) * var(i) for i, a in enumerate(ex.unit_direction()))
        u = xi
        f = exp(xi)
        s = (2.0 - m - n) / 2.0
        phi = const(ex.c / 2.0) * exp(const(2.0) * xi) - const(s) * xi
        Lam = const(ex.c) + const(s) * exp(const(-2.0) * xi)
        mu = 0.0
        rho_pair = (ex.c, schouten_rho(n + m))
    else:  # gaussian_shrinker
        lam0 = ex.c
        u = const(0.0)
        f = const(1.0)
        phi = const(lam0 / 2.0) * sum_exprs(power(var(i), 2) for i in range(n))
        Lam = const(lam0)
        mu = lam0
        rho = ex.rho if ex.rho is not None else 0.1
        rho_pair = (lam0 * (1.0 - rho * m), rho)
    base = ConformalMetric(u, dom)
    if regime == "almost":
        return WarpedSolitonData(base, f, phi, m, mu, Lambda=Lam, name=ex.name)
    lam, rho = rho_pair
    return WarpedSolitonData(base, f, phi, m, mu, lam=lam, rho=rho, name=ex.name)


def closed_form_scalar(example, p, **overrides):
    """The printed closed-form warped scalar curvature at ``p``.

    For ``halfspace_steady`` the printed formula equals the warped scalar
    curvature only at ``m = 1``.
    """
    ex = _as_id(example, **overrides)
    ex.validate("almost")
    P = np.asarray(p, dtype=float)
    X = np.atleast_2d(P)
    n, m = ex.n, ex.m
    N = m + n
    xn = X[:, n - 1]
    if ex.name == "hyperbolic_traceless":
        S = -(N - 1) * (N - 2 + 2 * np.cosh(2 * xn)) / np.cosh(xn) ** 4
    elif ex.name == "cosh_traceless":
        S = -(N - 1) * (6 - N + (N - 2) * np.cosh(2 * xn)) / (2 * np.cosh(xn) ** 4)
    elif ex.name == "halfspace_steady":
        S = -(7 + 3 * m * m - 20 * n + 12 * n * n + 2 * m * (-7 + 6 * n)) * xn ** 2 / 3
    elif ex.name == "schouten_linear":
        xi = X @ np.asarray(ex.unit_direction())
        S = -(N - 2) * (N - 1) * np.exp(-2 * xi)
    else:
        S = np.full(len(X), float(m * ex.c))
    return float(S[0]) if P.ndim == 1 else S


def gaussian_potential_check(lam0: float, n: int):
    """``(metric, phi)`` of the flat Gaussian shrinker on ``R^n`` (unbounded)."""
    dom = Domain((-math.inf,) * n, (math.inf,) * n, 1e-12)
    phi = const(lam0 / 2.0) * sum_exprs(power(var(i), 2) for i in range(n))
    return ConformalMetric(const(0.0), dom), phi


__all__ = [
    "EXTRA_NAMES", "ExampleId", "NAMES", "build_example", "closed_form_scalar",
    "default_domain", "expected_constants", "gaussian_potential_check",
    "halfspace_alpha", "natural_domain",
]
