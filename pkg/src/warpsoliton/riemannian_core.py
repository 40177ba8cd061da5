"""Curvature of conformally flat metrics ``g = exp(2u) * delta``.

All geometric quantities are first built as expression trees (Christoffel
symbols, Ricci tensor, scalar curvature, Hessians of fields) and cached on
the metric, then evaluated pointwise.  Point arguments are either a single
point of shape ``(n,)`` or a batch of shape ``(k, n)``; outputs gain a
leading batch axis in the second case.

Index conventions: ``christoffel(...)[k, i, j]`` is Gamma^k_ij, axes are
zero-based, and symmetric matrices are filled from their upper triangle so
symmetry is exact.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .field_calculus import (
    ZERO,
    Domain,
    Expr,
    as_expr,
    const,
    differentiate,
    evaluate_many,
    exp,
    sum_exprs,
)


class ConformalMetric:
    """Riemannian metric ``exp(2u) delta_ij`` on a coordinate box.

    Parameters
    ----------
    u : Expr
        Conformal exponent.
    domain : Domain
        Coordinate box; its dimension fixes ``n``.
    """

    def __init__(self, u, domain: Domain):
        self.u = as_expr(u)
        self.domain = domain
        self.n = domain.n
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        bad = [a for a in self.u.free_axes() if a >= self.n]
        if bad:
            raise ValueError(f"u depends on x{max(bad) + 1} but n = {self.n}")

    def __repr__(self):
        return f"ConformalMetric(u={self.u!r}, n={self.n})"

    def with_domain(self, domain: Domain) -> "ConformalMetric":
        return ConformalMetric(self.u, domain)

    # symbolic tables ----------------------------------------------------
    @cached_property
    def du(self) -> list:
        return [differentiate(self.u, i) for i in range(self.n)]

    @cached_property
    def factor(self) -> Expr:
        """``exp(2u)``, the metric coefficient."""
        return exp(const(2.0) * self.u)

    @cached_property
    def inverse_factor(self) -> Expr:
        """``exp(-2u)``, the inverse-metric coefficient."""
        return exp(const(-2.0) * self.u)

    @cached_property
    def christoffel_exprs(self) -> list:
        n, du = self.n, self.du
        gamma = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    term = ZERO
                    if k == i:
                        term = term + du[j]
                    if k == j:
                        term = term + du[i]
                    if i == j:
                        term = term - du[k]
                    gamma[k][i][j] = gamma[k][j][i] = term
        return gamma

    @cached_property
    def ricci_exprs(self) -> dict:
        """Upper triangle ``{(i, j): R_ij}`` of the Ricci tensor.

        ``R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik``.
        """
        n, G = self.n, self.christoffel_exprs
        out = {}
        for i in range(n):
            for j in range(i, n):
                terms = []
                for k in range(n):
                    terms.append(differentiate(G[k][i][j], k))
                    terms.append(-differentiate(G[k][i][k], j))
                    for l in range(n):
                        terms.append(G[k][k][l] * G[l][i][j])
                        terms.append(-(G[k][j][l] * G[l][i][k]))
                out[i, j] = sum_exprs(terms)
        return out

    @cached_property
    def scalar_expr(self) -> Expr:
        trace = sum_exprs(self.ricci_exprs[i, i] for i in range(self.n))
        return self.inverse_factor * trace

    # symbolic operators on fields ------------------------------------------
    def hessian_exprs(self, w) -> dict:
        """Upper triangle of ``d_i d_j w - Gamma^k_ij d_k w``."""
        w = as_expr(w)
        n, G = self.n, self.christoffel_exprs
        dw = [differentiate(w, k) for k in range(n)]
        out = {}
        for i in range(n):
            for j in range(i, n):
                corr = sum_exprs(G[k][i][j] * dw[k] for k in range(n))
                out[i, j] = differentiate(dw[i], j) - corr
        return out

    def laplacian_expr(self, w) -> Expr:
        H = self.hessian_exprs(w)
        return self.inverse_factor * sum_exprs(H[i, i] for i in range(self.n))

    def pairing_expr(self, a, b) -> Expr:
        """``g(grad a, grad b) = exp(-2u) sum_i d_i a d_i b``."""
        a, b = as_expr(a), as_expr(b)
        s = sum_exprs(differentiate(a, i) * differentiate(b, i) for i in range(self.n))
        return self.inverse_factor * s

    def grad_norm_sq_expr(self, w) -> Expr:
        return self.pairing_expr(w, w)

    def matrix_norm_sq_expr(self, M: dict) -> Expr:
        """``|M|^2_g`` for a symmetric covariant 2-tensor given by its upper triangle."""
        terms = []
        for (i, j), e in M.items():
            terms.append((e * e) if i == j else const(2.0) * (e * e))
        return self.inverse_factor * self.inverse_factor * sum_exprs(terms)


# numeric evaluation ----------------------------------------------------------

def _sym(values, n, single):
    """Assemble symmetric matrices from an upper-triangle value stack."""
    k = 1 if single else values.shape[1]
    M = np.empty((k, n, n))
    row = 0
    for i in range(n):
        for j in range(i, n):
            M[:, i, j] = values[row]
            M[:, j, i] = values[row]
            row += 1
    return M[0] if single else M


def _upper(table: dict, n: int) -> list:
    return [table[i, j] for i in range(n) for j in range(i, n)]


def _single(p):
    return np.ndim(p) == 1


def christoffel(g: ConformalMetric, p):
    """Christoffel symbols ``Gamma[k, i, j]`` at ``p``."""
    n = g.n
    flat = [g.christoffel_exprs[k][i][j] for k in range(n) for i in range(n) for j in range(n)]
    vals = evaluate_many(flat, p)
    return vals.reshape((n, n, n)) if _single(p) else np.moveaxis(vals.reshape((n, n, n, -1)), -1, 0)


def ricci(g: ConformalMetric, p):
    return _sym(evaluate_many(_upper(g.ricci_exprs, g.n), p), g.n, _single(p))


def scalar_curvature(g: ConformalMetric, p):
    out = evaluate_many([g.scalar_expr], p)
    return float(out[0]) if _single(p) else out[0]


def hessian(g: ConformalMetric, phi, p):
    return _sym(evaluate_many(_upper(g.hessian_exprs(phi), g.n), p), g.n, _single(p))


def _scalar(e, p):
    out = evaluate_many([e], p)
    return float(out[0]) if _single(p) else out[0]


def laplacian(g: ConformalMetric, phi, p):
    return _scalar(g.laplacian_expr(phi), p)


def gradient_norm_sq(g: ConformalMetric, phi, p):
    return _scalar(g.grad_norm_sq_expr(phi), p)


def gradient_pairing(g: ConformalMetric, phi, psi, p):
    return _scalar(g.pairing_expr(phi, psi), p)


def bianchi_residual(g: ConformalMetric, p):
    """Components of ``div Ric - dS / 2`` at ``p``.

    ``(div Ric)_j = exp(-2u) sum_i (d_i R_ij - G^l_ii R_lj - G^l_ij R_il)``.
    The contracted Bianchi identity makes this vanish for every metric, so
    the result measures assembly and rounding error only.
    """
    n = g.n
    single = _single(p)
    P = np.atleast_2d(np.asarray(p, dtype=float))
    R_up = _upper(g.ricci_exprs, n)
    dR = [differentiate(e, a) for e in R_up for a in range(n)]
    dS = [differentiate(g.scalar_expr, j) for j in range(n)]
    G_flat = [g.christoffel_exprs[k][i][j] for k in range(n) for i in range(n) for j in range(n)]
    vals = evaluate_many(R_up + dR + dS + G_flat + [g.inverse_factor], P)
    k = P.shape[0]
    m = len(R_up)
    R = _sym(vals[:m], n, False)
    dR_arr = np.empty((k, n, n, n))  # [., a, i, j] = d_a R_ij
    row = m
    for i in range(n):
        for j in range(i, n):
            for a in range(n):
                dR_arr[:, a, i, j] = dR_arr[:, a, j, i] = vals[row]
                row += 1
    dS_arr = vals[row:row + n].T
    row += n
    G = vals[row:row + n ** 3].T.reshape(k, n, n, n)
    inv = vals[row + n ** 3]
    div = np.einsum("piij->pj", dR_arr)
    div -= np.einsum("plii,plj->pj", G, R)
    div -= np.einsum("plij,pil->pj", G, R)
    res = inv[:, None] * div - 0.5 * dS_arr
    return res[0] if single else res
