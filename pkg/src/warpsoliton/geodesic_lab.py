"""Numerical probes of global behaviour: geodesics, arc length, growth, volume.

Completeness is probed, never decided.  A finite length along a divergent
curve shows incompleteness along that curve; an unbounded length is only
reported as "diverges beyond X".

All geodesic work goes through one batched fixed-step RK4 integrator for
``g = exp(2u) delta``, where the geodesic equation reads

    x'' = -(2 <du, x'> x' - |x'|^2 du)        (Euclidean pairings).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .field_calculus import (
    DomainViolation,
    as_expr,
    compile_exprs,
    differentiate,
    evaluate,
    substitute,
    sum_exprs,
    var,
)
from .field_calculus import exp as exp_expr
from .field_calculus import const, sqrt as sqrt_expr
from .riemannian_core import ConformalMetric

DEFAULT_STEP = 1e-3
DEFAULT_HORIZON = 50.0
TAIL_TOL = 1e-8
SPEED_GUARD = 1e-10


class InsufficientHorizon(RuntimeError):
    """A ray left the domain before half of the requested horizon."""


class CurveExitsDomain(DomainViolation):
    """A parametric curve left the metric's domain."""


class DivergentLength(ArithmeticError):
    """Arc length did not converge within the subdivision budget.

    ``length`` is the length accumulated up to the parameter ``beyond``.
    """

    def __init__(self, length, beyond):
        super().__init__(f"diverges beyond {beyond:.9g} (length {length:.9g} so far)")
        self.length = float(length)
        self.beyond = float(beyond)


# ---------------------------------------------------------------------------
# integrator core


class _Flow:
    """Vectorised right-hand side of the geodesic equation."""

    def __init__(self, g: ConformalMetric, guard: Optional[float] = None):
        self.g = g
        self.guard = guard
        self.domain = g.domain
        self._du = compile_exprs(tuple(g.du))
        self._u = compile_exprs((g.u,))
        self.unresolved = np.zeros(0, dtype=bool)

    def accel(self, X, V, alive):
        """Acceleration for rows with ``alive``; rows leaving the domain are killed."""
        A = np.zeros_like(X)
        ok = alive & self.domain.inside(X)
        if np.any(ok):
            du = self._du(X[ok]).T
            dv = np.sum(du * V[ok], axis=1)
            vv = np.sum(V[ok] * V[ok], axis=1)
            A[ok] = -(2.0 * dv[:, None] * V[ok] - vv[:, None] * du)
        return A, ok

    def speed(self, X, V):
        return np.exp(self._u(X)[0]) * np.linalg.norm(V, axis=1)

    def unit(self, p, v):
        """Scale coordinate vectors ``v`` at ``p`` to unit ``g``-speed."""
        P = np.atleast_2d(p)
        V = np.atleast_2d(np.asarray(v, dtype=float))
        norm = np.linalg.norm(V, axis=1)
        if np.any(norm == 0):
            raise ValueError("initial velocity must be nonzero")
        return V / (np.exp(self._u(P)[0]) * norm)[:, None]

    def rk4(self, X, V, h, alive):
        """One RK4 step with per-row step sizes ``h``; returns new state and mask."""
        hh = h[:, None]
        a1, ok1 = self.accel(X, V, alive)
        X2, V2 = X + 0.5 * hh * V, V + 0.5 * hh * a1
        a2, ok2 = self.accel(X2, V2, ok1)
        X3, V3 = X + 0.5 * hh * V2, V + 0.5 * hh * a2
        a3, ok3 = self.accel(X3, V3, ok2)
        X4, V4 = X + hh * V3, V + hh * a3
        a4, ok4 = self.accel(X4, V4, ok3)
        with np.errstate(over="ignore", invalid="ignore"):
            Xn = X + hh / 6.0 * (V + 2.0 * V2 + 2.0 * V3 + V4)
            Vn = V + hh / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        ok = ok4 & self.domain.inside(Xn)
        # a step that breaks speed conservation no longer resolves the flow
        # (typically an escape to infinity in finite time); stop the row there
        lost = ok & ~np.all(np.isfinite(np.concatenate([Xn, Vn], axis=1)), axis=1)
        good = ok & ~lost
        if self.guard is not None and np.any(good):
            with np.errstate(over="ignore", invalid="ignore"):
                ratio = self.speed(Xn[good], Vn[good]) / self.speed(X[good], V[good])
            lost[np.flatnonzero(good)[~(np.abs(ratio - 1.0) <= self.guard)]] = True
        ok &= ~lost
        self.unresolved |= lost
        Xn[~ok] = X[~ok]
        Vn[~ok] = V[~ok]
        return Xn, Vn, ok


@dataclass
class Trajectory:
    """Sampled geodesic: times, positions, coordinate velocities, ``g``-speed."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    speed: np.ndarray
    exit_reason: str  # "horizon" | "domain-boundary" | "unresolved"

    @property
    def speed_drift(self) -> float:
        return float(np.max(np.abs(self.speed - self.speed[0])))

    @property
    def end(self) -> float:
        return float(self.t[-1])


def _check_start(g, P):
    if not np.all(g.domain.inside(P)):
        bad = P[~g.domain.inside(P)][0]
        raise DomainViolation("start point outside the domain", bad)


def integrate_rays(g: ConformalMetric, p, directions, T: float, step: float = DEFAULT_STEP,
                   normalize: bool = True, speed_guard: Optional[float] = SPEED_GUARD):
    """Integrate several geodesics from ``p`` in lock step.

    Returns ``(t, X, V, alive)`` with ``X, V`` of shape ``(steps+1, rays, n)``
    and ``alive`` the per-step mask of rays still inside the domain.  A ray is
    also stopped when one step changes its ``g``-speed by more than
    ``speed_guard`` (relative), which is how a finite-time escape shows up;
    ``None`` switches the guard off.
    """
    return _integrate(g, p, directions, T, step, normalize, speed_guard)[:4]


def _integrate(g, p, directions, T, step, normalize, speed_guard):
    if not step > 0:
        raise ValueError("step must be positive")
    if not T > 0:
        raise ValueError("horizon must be positive")
    flow = _Flow(g, speed_guard)
    D = np.atleast_2d(np.asarray(directions, dtype=float))
    P = np.repeat(np.atleast_2d(np.asarray(p, dtype=float)), len(D), axis=0)
    _check_start(g, P[:1])
    V = flow.unit(P, D) if normalize else D.copy()
    steps = int(math.ceil(T / step - 1e-9))
    hs = np.full(steps, step)
    hs[-1] = T - step * (steps - 1)
    Xs = np.empty((steps + 1,) + P.shape)
    Vs = np.empty_like(Xs)
    alive = np.ones((steps + 1, len(D)), dtype=bool)
    X = P.copy()
    Xs[0], Vs[0] = X, V
    cur = alive[0].copy()
    flow.unresolved = np.zeros(len(D), dtype=bool)
    for k in range(steps):
        X, V, cur = flow.rk4(X, V, np.full(len(D), hs[k]), cur)
        Xs[k + 1], Vs[k + 1], alive[k + 1] = X, V, cur
        if not cur.any():
            Xs, Vs, alive = Xs[:k + 2], Vs[:k + 2], alive[:k + 2]
            break
    t = np.concatenate([[0.0], np.cumsum(hs)])[: len(Xs)]
    return t, Xs, Vs, alive, flow.unresolved


def integrate_geodesic(g: ConformalMetric, p, v, T: float, step: float = DEFAULT_STEP,
                       speed_guard: Optional[float] = SPEED_GUARD) -> Trajectory:
    """Unit-speed geodesic from ``p`` with initial direction ``v``.

    ``v`` is rescaled to ``|v|_g = 1``.  Integration stops at ``T``, at the
    last step that stays inside the domain, or where the step no longer
    resolves the flow (``exit_reason == "unresolved"``).

    Raises
    ------
    ValueError
        For a nonpositive step.
    DomainViolation
        If ``p`` is outside the domain.
    """
    t, Xs, Vs, alive, unresolved = _integrate(g, p, [v], T, step, True, speed_guard)
    live = alive[:, 0]
    last = int(np.nonzero(live)[0][-1])
    if last == len(t) - 1 and abs(t[-1] - T) < 1e-9:
        reason = "horizon"
    else:
        reason = "unresolved" if unresolved[0] else "domain-boundary"
    X, V = Xs[: last + 1, 0], Vs[: last + 1, 0]
    return Trajectory(t[: last + 1], X, V, _Flow(g).speed(X, V), reason)


# ---------------------------------------------------------------------------
# arc length


def _curve_integrand(g: ConformalMetric, curve: Sequence):
    """``|c'(t)|_g`` as an expression in ``t = x1``, plus the curve components."""
    comps = [as_expr(c) for c in curve]
    if len(comps) != g.n:
        raise ValueError(f"curve needs {g.n} components")
    for c in comps:
        if any(a != 0 for a in c.free_axes()):
            raise ValueError("curve components must depend on the parameter x1 only")
    u_on_curve = substitute(g.u, {i: c for i, c in enumerate(comps)})
    speed_sq = sum_exprs(differentiate(c, 0) * differentiate(c, 0) for c in comps)
    return exp_expr(u_on_curve) * sqrt_expr(speed_sq), comps


def _make_integrand(g, curve):
    speed, comps = _curve_integrand(g, curve)
    # position first, so an exit is reported before the metric is evaluated there
    where, tape = compile_exprs(tuple(comps)), compile_exprs((speed,))
    dom = g.domain

    def f(t):
        T = np.array([[t]])
        x = where(T)[:, 0]
        if not dom.contains(x) or not np.all(dom.inside(x)):
            raise CurveExitsDomain("curve leaves the domain", x)
        return float(tape(T)[0, 0])

    return f


def curve_arclength(g: ConformalMetric, curve: Sequence, t0: float, t1: float = math.inf,
                    tail_tol: float = TAIL_TOL, max_chunks: int = 40, first_chunk: float = 1.0,
                    horizon: Optional[float] = None) -> float:
    """Length ``int |c'(t)|_g dt`` of a parametric curve.

    Parameters
    ----------
    curve : sequence of Expr
        Coordinate functions of the parameter ``t``, written as ``x1``.
    t0, t1 : float
        Parameter range; ``t1`` may be ``inf``.

    For an infinite upper limit the range is cut into chunks of doubling
    length, each integrated adaptively.  Once the chunk lengths decay
    geometrically the remaining tail is bounded by ``last * q / (1 - q)``
    (``q`` the latest chunk ratio) and integration stops when that bound
    drops below ``tail_tol``.  ``horizon`` caps the parameter range searched
    for convergence (the last chunk is cut at it).

    Raises
    ------
    CurveExitsDomain
        If the curve leaves the metric's domain.
    DivergentLength
        If the tail bound has not converged after ``max_chunks`` chunks or
        by ``horizon``.
    """
    f = _make_integrand(g, curve)
    quad = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    if math.isfinite(t1):
        if t1 < t0:
            raise ValueError("t1 must be >= t0")
        return float(integrate.quad(f, t0, t1, **quad)[0])
    total = 0.0
    a, width = float(t0), float(first_chunk)
    prev = None
    for _ in range(max_chunks):
        b = a + width
        if horizon is not None and b >= horizon:
            total += float(integrate.quad(f, a, horizon, **quad)[0]) if horizon > a else 0.0
            raise DivergentLength(total, max(a, horizon))
        piece = float(integrate.quad(f, a, b, **quad)[0])
        total += piece
        if prev is not None and prev > 0:
            q = piece / prev
            if q < 1.0:
                tail = piece * q / (1.0 - q)
                if tail < tail_tol:
                    return total + tail
        prev = piece
        a, width = b, 2.0 * width
    raise DivergentLength(total, a)


def ray_curve(n: int, base_point: Sequence, axis: int = -1):
    """Straight coordinate ray ``base_point + t e_axis`` (parameter ``x1``)."""
    axis = axis % n
    t = var(0)
    return [t if i == axis else const(float(base_point[i])) for i in range(n)]


# ---------------------------------------------------------------------------
# potential growth


@dataclass
class GrowthSeries:
    """``(1/t) dphi/dt`` along unit-speed rays and its final-quarter maxima."""

    t: np.ndarray
    ratio: np.ndarray            # (steps, rays); nan once a ray has left the domain
    tail_max: np.ndarray         # per ray
    directions: np.ndarray
    horizon: float

    @property
    def min_tail_max(self) -> float:
        """Smallest tail maximum over the sampled directions (no uniformity claim)."""
        return float(np.min(self.tail_max))


def sphere_directions(n: int, count: int, seed: int = 0):
    """``count`` seeded directions, uniform on the unit sphere."""
    if n == 1:
        return np.where(np.random.default_rng(seed).random(count) < 0.5, -1.0, 1.0)[:, None]
    Z = np.random.default_rng(seed).standard_normal((count, n))
    return Z / np.linalg.norm(Z, axis=1)[:, None]


def potential_growth(g: ConformalMetric, phi, p, v=None, T: float = DEFAULT_HORIZON,
                     step: float = DEFAULT_STEP, rays: int = 1, seed: int = 0) -> GrowthSeries:
    """Ratio ``(1/t) dphi/dt`` along unit-speed geodesics from ``p``.

    ``v`` gives one direction or an array of directions; without it ``rays``
    seeded directions are drawn.  The limsup proxy is the maximum of the
    ratio over ``t >= 3T/4``.

    Raises
    ------
    InsufficientHorizon
        If a ray leaves the domain before ``T/2``.
    """
    phi = as_expr(phi)
    D = sphere_directions(g.n, rays, seed) if v is None else np.atleast_2d(np.asarray(v, dtype=float))
    t, Xs, Vs, alive = integrate_rays(g, p, D, T, step)
    last_alive = np.array([t[np.nonzero(alive[:, r])[0][-1]] for r in range(len(D))])
    if np.any(last_alive < T / 2 - 1e-12):
        raise InsufficientHorizon(
            f"a ray left the domain at t = {last_alive.min():.6g} < T/2 = {T / 2:.6g}")
    dphi = compile_exprs(tuple(differentiate(phi, i) for i in range(g.n)))
    steps, nr, n = Xs.shape
    ratio = np.full((steps, nr), np.nan)
    flatX, flatV = Xs.reshape(-1, n), Vs.reshape(-1, n)
    live = alive.reshape(-1)
    vals = dphi(flatX[live]).T
    rate = np.full(len(flatX), np.nan)
    rate[live] = np.sum(vals * flatV[live], axis=1)
    rate = rate.reshape(steps, nr)
    ratio[1:] = rate[1:] / t[1:, None]
    tail = t >= 0.75 * T - 1e-12
    tail_max = np.nanmax(ratio[tail], axis=0)
    return GrowthSeries(t[1:], ratio[1:], tail_max, D, T)


# ---------------------------------------------------------------------------
# weighted ball volume


@dataclass
class VolumeEstimate:
    """Monte Carlo estimate of ``int_{B(p,R)} exp(-w) dvol_g``."""

    radius: float
    estimate: float
    stderr: float
    samples: int
    seed: int
    clipped: int = 0
    notes: list = field(default_factory=list)

    @property
    def clipped_fraction(self) -> float:
        return self.clipped / self.samples if self.samples else 0.0


def sphere_area(n: int) -> float:
    """Area of the unit sphere ``S^{n-1}`` in ``R^n`` (2 for ``n = 1``)."""
    return 2.0 * math.pi ** (n / 2.0) / float(gamma_fn(n / 2.0))


def _tangent_frames(theta):
    """Orthonormal bases of ``theta^perp`` via the Householder map ``e1 -> theta``."""
    k, n = theta.shape
    e1 = np.zeros(n)
    e1[0] = 1.0
    w = e1 - theta
    nw = np.sum(w * w, axis=1)
    H = np.broadcast_to(np.eye(n), (k, n, n)).copy()
    big = nw > 1e-24
    H[big] -= 2.0 * w[big, :, None] * w[big, None, :] / nw[big, None, None]
    return H[:, :, 1:]


def _shoot(flow: _Flow, p, V0, r, steps):
    """End points and velocities of geodesics of length ``r`` (per row)."""
    X = np.repeat(np.atleast_2d(p), len(V0), axis=0)
    V = V0.copy()
    h = r / steps
    alive = np.ones(len(V0), dtype=bool)
    flow.unresolved = np.zeros(len(V0), dtype=bool)
    for _ in range(steps):
        X, V, alive = flow.rk4(X, V, h, alive)
    return X, V, alive


def weighted_ball_volume(g: ConformalMetric, w, p, R: float, n_samples: int = 4096, seed: int = 0,
                         strata: int = 32, steps: int = 64, fd_step: float = 1e-4) -> VolumeEstimate:
    """Estimate the weighted volume of the geodesic ball ``B(p, R)``.

    In geodesic polar coordinates ``vol = int_S int_0^R exp(-w) J dr dsigma``.
    The radius is sampled stratified (``strata`` equal bins, each with its
    own random stream split from ``seed``) and the direction uniformly.  The
    Jacobian ``J = exp(n u(x)) |det[x_r, x_theta]|`` uses the geodesic
    velocity and central differences of neighbouring geodesics in a
    Householder frame of the tangent sphere.

    The ball is realized by radial shooting; this is exact for radially
    symmetric metrics and ignores cut points otherwise.  Samples whose ray
    leaves the domain contribute zero and are counted in ``clipped``.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if n_samples < 2 * strata:
        raise ValueError(f"n_samples must be >= 2 * strata = {2 * strata}")
    w = as_expr(w)
    n = g.n
    flow = _Flow(g)
    P = np.asarray(p, dtype=float)
    _check_start(g, P[None, :])
    per = n_samples // strata
    children = np.random.SeedSequence(seed).spawn(strata)
    rs, thetas = [], []
    for s, child in enumerate(children):
        rng = np.random.default_rng(child)
        rs.append(R * (s + rng.random(per)) / strata)
        if n == 1:
            thetas.append(np.where(rng.random(per) < 0.5, -1.0, 1.0)[:, None])
        else:
            Z = rng.standard_normal((per, n))
            thetas.append(Z / np.linalg.norm(Z, axis=1)[:, None])
    r = np.concatenate(rs)
    theta = np.concatenate(thetas)
    k = len(r)
    scale = math.exp(-evaluate(g.u, P))
    rows = [theta]
    if n > 1:
        E = _tangent_frames(theta)
        for j in range(n - 1):
            for sgn in (1.0, -1.0):
                th = theta + sgn * fd_step * E[:, :, j]
                rows.append(th / np.linalg.norm(th, axis=1)[:, None])
    V0 = scale * np.concatenate(rows)
    X, V, alive = _shoot(flow, P, V0, np.tile(r, len(rows)), steps)
    X = X.reshape(len(rows), k, n)
    V = V.reshape(len(rows), k, n)
    ok = np.all(alive.reshape(len(rows), k), axis=0)
    cols = [V[0]]
    for j in range(n - 1):
        cols.append((X[1 + 2 * j] - X[2 + 2 * j]) / (2.0 * fd_step))
    M = np.stack(cols, axis=2)
    F = np.zeros(k)
    if np.any(ok):
        Xo = X[0][ok]
        vals = compile_exprs((g.u, w))(Xo)
        F[ok] = np.exp(n * vals[0] - vals[1]) * np.abs(np.linalg.det(M[ok]))
    F = F.reshape(strata, per)
    width = R / strata
    area = sphere_area(n)
    est = area * width * float(np.sum(F.mean(axis=1)))
    var = (area * width) ** 2 * float(np.sum(F.var(axis=1, ddof=1) / per))
    clipped = int(k - np.count_nonzero(ok))
    notes = ["ball realized by radial shooting; exact only for radially symmetric metrics"]
    if clipped:
        notes.append(f"{clipped} of {k} samples left the domain before radius R and were clipped")
    return VolumeEstimate(float(R), est, math.sqrt(var), k, int(seed), clipped, notes)


@dataclass
class GrowthFit:
    fits_quadratic_exponent: bool
    C0: float
    intercept: float
    residual_rms: float


def growth_bound_check(estimates: Sequence[VolumeEstimate], residual_bound: float = 10.0) -> GrowthFit:
    """Least-squares fit ``log vol(R) ~ a + C0 R^2``.

    The fit passes when every volume is positive, ``C0`` is finite and the
    RMS residual is below ``residual_bound``.

    Raises
    ------
    ValueError
        With fewer than four radii.
    """
    if len(estimates) < 4:
        raise ValueError("growth_bound_check needs at least 4 radii")
    R = np.array([e.radius for e in estimates])
    vol = np.array([e.estimate for e in estimates])
    if np.any(vol <= 0):
        return GrowthFit(False, math.nan, math.nan, math.inf)
    y = np.log(vol)
    C0, a = np.polyfit(R * R, y, 1)
    rms = float(np.sqrt(np.mean((a + C0 * R * R - y) ** 2)))
    ok = bool(np.isfinite(C0) and rms <= residual_bound)
    return GrowthFit(ok, float(C0), float(a), rms)


def soliton_weight(phi, rho: Optional[float], N: int):
    """The weight ``phi / (1 - 2 rho (N - 1))`` used for weighted volumes.

    Falls back to ``phi`` when ``rho`` is None or the denominator vanishes
    (the Schouten value), returning ``(weight, note)``.
    """
    phi = as_expr(phi)
    if rho is None:
        return phi, "weight = phi"
    denom = 1.0 - 2.0 * rho * (N - 1)
    if abs(denom) < 1e-12:
        return phi, "1 - 2 rho (N - 1) = 0 (Schouten value); weight = phi"
    return const(1.0 / denom) * phi, f"weight = phi / {denom:.9g}"


__all__ = [
    "CurveExitsDomain", "DivergentLength", "GrowthFit", "GrowthSeries", "InsufficientHorizon",
    "Trajectory", "VolumeEstimate", "curve_arclength", "growth_bound_check", "integrate_geodesic",
    "integrate_rays", "potential_growth", "ray_curve", "soliton_weight", "sphere_area",
    "sphere_directions", "weighted_ball_volume",
]
