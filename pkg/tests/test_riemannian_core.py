import math

import numpy as np
import pytest

from warpsoliton.field_calculus import (
    Domain,
    DomainViolation,
    const,
    cosh,
    differentiate,
    evaluate,
    finite_difference,
    log,
    parse_expr,
    power,
    sum_exprs,
    var,
)
from warpsoliton.riemannian_core import (
    ConformalMetric,
    bianchi_residual,
    christoffel,
    gradient_norm_sq,
    gradient_pairing,
    hessian,
    laplacian,
    ricci,
    scalar_curvature,
)

from conftest import random_expr


def fd_christoffel(g, p):
    """Gamma assembled from finite differences of g_ij = exp(2u) delta_ij."""
    n = g.n
    G = np.zeros((n, n, n))
    factor = g.factor
    dg = np.array([finite_difference(factor, p, a, 1) for a in range(n)])
    inv = 1.0 / evaluate(factor, p)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                # 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij) with diagonal g
                t = (dg[i] if k == j else 0.0) + (dg[j] if k == i else 0.0) - (dg[k] if i == j else 0.0)
                G[k, i, j] = 0.5 * inv * t
    return G


def fd_ricci(g, p, h=1e-4):
    """Ricci from finite-difference Christoffels and their central differences."""
    n = g.n
    p = np.asarray(p, dtype=float)
    G = fd_christoffel(g, p)
    dG = np.zeros((n, n, n, n))
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        dG[a] = (fd_christoffel(g, p + e) - fd_christoffel(g, p - e)) / (2 * h)
    R = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            R[i, j] = (sum(dG[k, k, i, j] for k in range(n)) - sum(dG[j, k, i, k] for k in range(n))
                       + np.einsum("kl,l->", G[:, :, :].diagonal(axis1=0, axis2=1).T, G[:, i, j])
                       - np.einsum("kl,lk->", G[:, j, :], G[:, i, :]))
    return R


def hyperbolic(n):
    lo = (-math.inf,) * (n - 1) + (0.0,)
    return ConformalMetric(-log(var(n - 1)), Domain(lo, (math.inf,) * n, 1e-12))


def flat(n, u=0.0):
    return ConformalMetric(const(u), Domain((-5.0,) * n, (5.0,) * n, 1e-6))


class TestChristoffel:
    def test_flat_zero(self):
        assert np.all(christoffel(flat(3), [0.1, 0.2, 0.3]) == 0)

    def test_constant_rescaling_zero(self):
        assert np.all(christoffel(flat(2, 1.7), [0.1, 0.2]) == 0)

    def test_half_plane_values(self):
        G = christoffel(hyperbolic(2), [0.0, 1.0])
        assert G[1, 1, 1] == -1.0
        assert G[0, 0, 1] == -1.0
        assert G[1, 0, 0] == 1.0

    def test_half_plane_against_fd(self, rng):
        g = hyperbolic(2)
        for _ in range(5):
            p = np.array([rng.uniform(-1, 1), rng.uniform(0.5, 2)])
            assert np.max(np.abs(christoffel(g, p) - fd_christoffel(g, p))) <= 1e-8

    def test_batch_layout(self):
        g = hyperbolic(3)
        P = np.array([[0.0, 0.0, 1.0], [0.3, 0.2, 2.0]])
        G = christoffel(g, P)
        assert G.shape == (2, 3, 3, 3)
        assert np.array_equal(G[1], christoffel(g, P[1]))


class TestRicci:
    def test_flat_zero(self):
        assert np.all(ricci(flat(3), [0.0, 0.0, 0.0]) == 0)

    def test_constant_u_matches_flat(self):
        assert np.array_equal(ricci(flat(3, 0.4), [0.1, 0.2, 0.3]), ricci(flat(3), [0.1, 0.2, 0.3]))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_hyperbolic_einstein(self, n, rng):
        g = hyperbolic(n)
        P = np.column_stack([rng.uniform(-1, 1, (20, n - 1)), rng.uniform(0.3, 3, 20)])
        Ric = ricci(g, P)
        fac = evaluate(g.factor, P)
        target = -(n - 1) * fac[:, None, None] * np.eye(n)
        assert np.max(np.abs(Ric - target) / fac[:, None, None]) <= 1e-12

    def test_hyperbolic_against_fd_oracle(self):
        g = hyperbolic(3)
        p = np.array([0.2, -0.1, 1.3])
        assert np.max(np.abs(ricci(g, p) - fd_ricci(g, p))) <= 1e-5

    def test_random_metric_against_fd_oracle(self, rng):
        u = random_expr(rng, 2, depth=3) * const(0.3)
        g = ConformalMetric(u, Domain((-2.0,) * 2, (2.0,) * 2, 1e-6))
        p = rng.uniform(-0.5, 0.5, 2)
        R = ricci(g, p)
        assert np.max(np.abs(R - fd_ricci(g, p))) <= 1e-5 * (1 + np.max(np.abs(R)))

    def test_exact_symmetry(self, rng):
        u = random_expr(rng, 3, depth=4)
        g = ConformalMetric(u, Domain((-1.0,) * 3, (1.0,) * 3))
        R = ricci(g, rng.uniform(-1, 1, (10, 3)))
        assert np.array_equal(R, np.transpose(R, (0, 2, 1)))


class TestScalar:
    def test_flat_zero(self):
        assert scalar_curvature(flat(3), [0.0, 0.0, 0.0]) == 0.0

    def test_hyperbolic_three(self):
        assert scalar_curvature(hyperbolic(3), [0.4, -2.0, 0.7]) == pytest.approx(-6.0, abs=1e-12)

    def test_round_sphere_stereographic(self, rng):
        # u = log(2 / (1 + |x|^2)) is the unit round sphere: S = n(n-1)
        n = 3
        r2 = sum_exprs(var(i) * var(i) for i in range(n))
        g = ConformalMetric(log(const(2.0) / (const(1.0) + r2)), Domain((-3.0,) * n, (3.0,) * n))
        P = rng.uniform(-2, 2, (30, n))
        assert np.max(np.abs(scalar_curvature(g, P) - 6.0)) <= 1e-10

    def test_constant_shift_scaling(self, rng):
        for _ in range(10):
            u = random_expr(rng, 3, depth=4)
            c = 0.37
            g = ConformalMetric(u, Domain((-1.0,) * 3, (1.0,) * 3))
            gs = ConformalMetric(u + const(c), g.domain)
            phi = random_expr(rng, 3, depth=4)
            P = rng.uniform(-1, 1, (10, 3))
            assert np.allclose(ricci(gs, P), ricci(g, P), rtol=1e-10, atol=1e-12)
            a, b = scalar_curvature(gs, P), math.exp(-2 * c) * scalar_curvature(g, P)
            assert np.all(np.abs(a - b) <= 1e-10 * (1 + np.abs(b)))
            for f in (laplacian, gradient_norm_sq):
                a, b = f(gs, phi, P), math.exp(-2 * c) * f(g, phi, P)
                assert np.all(np.abs(a - b) <= 1e-10 * (1 + np.abs(b)))


class TestFieldOperators:
    def test_flat_quadratic(self):
        n = 3
        phi = const(0.5) * sum_exprs(var(i) * var(i) for i in range(n))
        p = np.array([0.5, -1.0, 2.0])
        assert np.array_equal(hessian(flat(n), phi, p), np.eye(n))
        assert laplacian(flat(n), phi, p) == pytest.approx(3.0)
        assert gradient_norm_sq(flat(n), phi, p) == pytest.approx(p @ p)

    def test_flat_linear_hessian_zero(self):
        phi = parse_expr("2*x1 - 3*x2", 2)
        assert np.all(hessian(flat(2), phi, [0.3, 0.1]) == 0)

    def test_pairing_scaling(self):
        g = flat(2, 0.25)
        a, b = parse_expr("x1*x2", 2), parse_expr("exp(x1)", 2)
        p = [0.3, -0.4]
        assert gradient_pairing(g, a, b, p) == pytest.approx(
            math.exp(-0.5) * gradient_pairing(flat(2), a, b, p), rel=1e-14)

    def test_example_hessian_against_fd(self):
        # base coth^2 dx^2, phi = (2/3)(m+n-2) log cosh x with n=1, m=2
        g = ConformalMetric(log(parse_expr("coth(x1)", 1)), Domain((0.0,), (5.0,), 0.2))
        phi = const(2.0 / 3.0) * log(cosh(var(0)))
        for x in (0.4, 1.0, 2.5):
            G = christoffel(g, [x])[0, 0, 0]
            oracle = finite_difference(phi, [x], 0, 2) - G * finite_difference(phi, [x], 0, 1)
            assert abs(hessian(g, phi, [x])[0, 0] - oracle) <= 1e-7

    def test_fiber_constant_of_halfspace_data(self, rng):
        n, m = 3, 2
        g = ConformalMetric(const(-2.0) * log(var(2)), Domain((-3.2, -3.2, 0.0), (3.2, 3.2, 5.2), 0.2))
        f = power(var(2), -1)
        phi = const(2.0 * (2 - m - n) / 3.0) * log(var(2))
        Lam = const(2.0 * (5 - m - 4 * n) / 3.0) * power(var(2), 2)
        P = g.domain.sample(200, seed=1)
        fv, Lv = evaluate(f, P), evaluate(Lam, P)
        mu = (fv * laplacian(g, f, P) + (m - 1) * gradient_norm_sq(g, f, P)
              - fv * gradient_pairing(g, phi, f, P) + Lv * fv * fv)
        assert np.max(np.abs(mu - (5 - m - 4 * n) / 3)) <= 1e-10

    def test_second_derivatives_against_fd(self, rng):
        worst = 0.0
        for _ in range(30):
            u = random_expr(rng, 2, depth=4) * const(0.5)
            phi = random_expr(rng, 2, depth=4)
            g = ConformalMetric(u, Domain((-1.0,) * 2, (1.0,) * 2))
            p = rng.uniform(-0.8, 0.8, 2)
            G = christoffel(g, p)
            dphi = np.array([finite_difference(phi, p, a, 1) for a in range(2)])
            H = hessian(g, phi, p)
            for i in range(2):
                for j in range(2):
                    if i == j:
                        dd = finite_difference(phi, p, i, 2)
                    else:
                        dd = finite_difference(differentiate(phi, i), p, j, 1)
                    ref = dd - G[:, i, j] @ dphi
                    worst = max(worst, abs(H[i, j] - ref) / (1 + abs(ref)))
        assert worst <= 1e-6

    def test_domain_violation_propagates(self):
        with pytest.raises(DomainViolation):
            scalar_curvature(hyperbolic(2), [0.0, -1.0])


class TestBianchi:
    def test_flat_zero(self):
        assert np.all(bianchi_residual(flat(3), [0.1, 0.2, 0.3]) == 0)

    def test_hyperbolic_zero(self):
        r = bianchi_residual(hyperbolic(3), [0.1, 0.2, 0.9])
        assert np.max(np.abs(r)) <= 1e-8

    def test_random_metrics(self, rng):
        worst = 0.0
        for k in range(20):
            n = 2 + k % 3
            u = random_expr(rng, n, depth=4)
            g = ConformalMetric(u, Domain((-1.0,) * n, (1.0,) * n))
            r = bianchi_residual(g, g.domain.sample(50, seed=k))
            worst = max(worst, float(np.max(np.abs(r))))
        assert worst <= 1e-6

    def test_detects_broken_ricci(self):
        g = hyperbolic(2)
        g.__dict__["ricci_exprs"] = {k: v * const(1.01) if k == (0, 0) else v
                                     for k, v in g.ricci_exprs.items()}
        g.__dict__["scalar_expr"] = g.inverse_factor * (g.ricci_exprs[0, 0] + g.ricci_exprs[1, 1])
        assert np.max(np.abs(bianchi_residual(g, [0.0, 1.3]))) > 1e-4
