# %% [markdown]
# # Expressions and conformal curvature
#
# Fields are plain expression trees over x1..xn.  Derivatives are symbolic
# and memoised, and evaluation runs over whole batches of points.

# %%
import numpy as np

from warpsoliton.field_calculus import Domain, differentiate, evaluate, finite_difference, parse_expr, to_text
from warpsoliton.riemannian_core import ConformalMetric, bianchi_residual, ricci, scalar_curvature

phi = parse_expr("(2/3)*log(cosh(x1)) + x1*x2^2", 2)
print(to_text(differentiate(phi, 0)))

# %% [markdown]
# The symbolic derivative agrees with a central difference to roughly 1e-10.

# %%
p = np.array([0.4, -0.7])
print(evaluate(differentiate(phi, 0), p), finite_difference(phi, p, 0, 1))

# %% [markdown]
# ## The hyperbolic half-space
#
# g = e^{2u} delta with u = -log x3 has constant sectional curvature -1, so
# Ric = -2 g and S = -6 everywhere.

# %%
g = ConformalMetric(parse_expr("-log(x3)", 3), Domain((-2, -2, 0), (2, 2, 4), 0.1))
P = g.domain.sample(5, seed=0)
print(scalar_curvature(g, P))
print(ricci(g, P[0]) / evaluate(g.factor, P[0]))

# %% [markdown]
# The contracted Bianchi identity div Ric = dS/2 holds to rounding.

# %%
print(np.abs(bianchi_residual(g, P)).max())
