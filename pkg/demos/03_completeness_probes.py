# %% [markdown]
# # Probing completeness
#
# A manifold is complete when every divergent curve has infinite length.
# Here two base metrics are probed along the ray x -> infinity.

# %%
import math

from warpsoliton import gallery as G
from warpsoliton import geodesic_lab as L
from warpsoliton.field_calculus import var

# %% [markdown]
# On the half-space base the ray t -> (0, 0, t) from t = 1 has length
# exactly 1, so the metric is incomplete.

# %%
g = G.build_example("halfspace_steady").base.with_domain(G.natural_domain("halfspace_steady"))
print(L.curve_arclength(g, L.ray_curve(3, [0, 0, 0]), 1.0))

# %% [markdown]
# The unit-speed geodesic along the same axis is x3 = 1/(1 - t); the
# integrator stops just before the blow-up at t = 1.

# %%
tr = L.integrate_geodesic(g, [0, 0, 1], [0, 0, 1], 5.0)
print(tr.exit_reason, tr.end, tr.x[-1], tr.speed_drift)

# %% [markdown]
# On the coth^2 base the same kind of ray has length log sinh T - log sinh 1,
# which grows without bound.

# %%
g = G.build_example("hyperbolic_traceless").base.with_domain(G.natural_domain("hyperbolic_traceless"))
try:
    L.curve_arclength(g, [var(0)], 1.0, horizon=50.0)
except L.DivergentLength as exc:
    print(exc)
    print(math.log(math.sinh(50.0)) - math.log(math.sinh(1.0)))
