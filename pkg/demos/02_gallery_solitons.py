# %% [markdown]
# # The example gallery
#
# Four warped-product constructions come built in.  Each is checked against
# the base equation, the integrability condition, the fiber equation and the
# trace identities, and its constants (alpha, rho, lambda, mu) are recovered
# from sampled data.

# %%
from warpsoliton import gallery as G
from warpsoliton.warped_soliton import (
    catino_identity_residual,
    derive_soliton_constants,
    mu_estimate,
    scalar_bound_report,
    verify,
)

for name in G.NAMES:
    d = G.build_example(name)
    P = d.base.domain.sample(200, seed=0)
    rep = verify(d, P)
    c = derive_soliton_constants(d, P)
    mu, _ = mu_estimate(d, P)
    worst = max(v.sup for v in rep.equations.values())
    print(f"{name:22s} pass={rep.passed} sup={worst:.1e} alpha={c.alpha:+.4f} "
          f"rho={c.rho:.4f} lam={c.lam:+.4f} mu={mu:+.4f}")

# %% [markdown]
# ## Detecting a broken soliton
#
# Shifting the potential by a small bump breaks the base equation at the
# 1e-2 level.

# %%
from warpsoliton.field_calculus import parse_expr

d = G.build_example("cosh_traceless")
bad = d.replace(phi=d.phi + parse_expr("0.1*exp(-x1^2)", 1))
rep = verify(bad, bad.base.domain.sample(200, seed=0))
print(rep.passed, rep.equations["base"].sup)

# %% [markdown]
# ## rho-Einstein data
#
# With explicit (lambda, rho) the drifted-Laplacian identity for the scalar
# curvature can be checked directly.  Setting rho wrong by 10% breaks it.

# %%
d = G.build_example("cosh_traceless", regime="rho")
P = d.base.domain.sample(200, seed=0)
print(abs(catino_identity_residual(d, P)).max())
print(abs(catino_identity_residual(d.replace(rho=d.rho * 1.1), P)).max())

# %% [markdown]
# The Schouten example with c > 0 is a shrinker whose scalar curvature dips
# below the bound that complete shrinkers must respect, which flags the
# metric as incomplete.

# %%
d = G.build_example("schouten_linear", regime="rho", c=1.0)
r = scalar_bound_report(d, d.base.domain.sample(200, seed=0))
print(r.flag, r.bound, r.inf_scalar)
print(r.note)
