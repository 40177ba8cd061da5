# %% [markdown]
# # Potential growth and weighted volume
#
# On the flat Gaussian shrinker phi = (lam/2)|x|^2 the ratio (1/t) dphi/dt
# along unit-speed geodesics from the origin equals lam for every t, and the
# weighted total volume is (2 pi/lam)^(n/2).  Here lam = 1 and n = 2.

# %%
import math

import numpy as np

from warpsoliton import gallery as G
from warpsoliton import geodesic_lab as L
from warpsoliton.field_calculus import Domain, const, parse_expr
from warpsoliton.riemannian_core import ConformalMetric

flat = ConformalMetric(const(0.0), Domain((-math.inf,) * 2, (math.inf,) * 2, 1e-12))
phi = parse_expr("0.5*(x1^2 + x2^2)", 2)
gs = L.potential_growth(flat, phi, [0.0, 0.0], T=20.0, step=1e-2, rays=5, seed=0)
print(gs.min_tail_max, np.abs(gs.ratio - 1.0).max())

# %%
for R in (2.0, 4.0, 8.0):
    v = L.weighted_ball_volume(flat, phi, [0.0, 0.0], R, 4096, seed=0)
    print(R, v.estimate, v.stderr)
print(2 * math.pi)

# %% [markdown]
# ## Volume growth on a curved base
#
# The hyperbolic plane grows like e^R, well inside exp(C0 R^2), and the fit
# of log vol against R^2 reports a finite C0.

# %%
half_plane = ConformalMetric(parse_expr("-log(x2)", 2), Domain((-math.inf, 0.0), (math.inf, math.inf), 1e-12))
ests = [L.weighted_ball_volume(half_plane, const(0.0), [0.0, 1.0], R, 2048, seed=1) for R in (0.5, 1, 1.5, 2)]
for e in ests:
    print(e.radius, e.estimate, 2 * math.pi * (math.cosh(e.radius) - 1))
print(L.growth_bound_check(ests))

# %% [markdown]
# The same fit on the cosh^2 base, weighted by its potential.

# %%
d = G.build_example("cosh_traceless")
ests = [L.weighted_ball_volume(d.base, d.phi, [0.0], R, 1024, seed=0) for R in (0.5, 1, 1.5, 2)]
print(L.growth_bound_check(ests))
