# %% [markdown]
# # Three ways to build an ideal core
#
# * **support**: for each direction u, the ideal limsup of <u, x_n> bounds
#   a halfspace; the core is their intersection.
# * **cluster hull**: the convex hull of the estimated cluster set.
# * **balls**: p belongs iff ‖p − y‖ ≤ I-limsup ‖x_n − y‖ for every center y.
#
# On a bounded sequence the three agree up to the grid tolerances.

# %%
import numpy as np

from idealcore import caratheodory_decompose, generate, make_density_zero, make_fin
from idealcore.geometry import hausdorff_distance
from idealcore.invariants import build_constructions, probe_agreement

tri = generate("cycle([(0,0),(1,0),(0,1)], noise=5.0, noise_mode='sparse', seed=2)", 10_000)
I = make_density_zero(0.05)
c = build_constructions(tri, I)
for name in ("support", "cluster", "ball"):
    rep = getattr(c, name)
    print(f"{name:>8}: {len(rep.result.vertices)} vertices, diameter {rep.diameter:.4f}")

# %% [markdown]
# The sparse noise has amplitude 5 but lives on the perfect squares, which
# the density ideal ignores: the core is still the unit triangle.

# %%
print("support vs cluster hull:", round(hausdorff_distance(c.support.result, c.cluster.result), 4))
print("support vs balls:       ", round(hausdorff_distance(c.support.result, c.ball.result), 4))
pa = probe_agreement(c.support, c.balls)
print(f"probe agreement {pa.agree:.3f}, deepest disagreement {pa.max_shell:.4f}")

# %% [markdown]
# Under Fin the same squares are not negligible and the core swells to
# the hull of everything the noise reaches infinitely often.

# %%
print("Fin core diameter:", round(build_constructions(tri, make_fin()).support.diameter, 3))

# %% [markdown]
# ## Decomposing core points
#
# Any point of the cluster hull is a convex combination of at most k + 1
# cluster candidates.

# %%
p = np.array([0.2, 0.3])
cc = caratheodory_decompose(p, c.clusters)
for s, w in zip(cc.supports, cc.weights):
    print(f"  {w:.4f} x {s.round(4)}")
print("reconstruction error", cc.error(p))

# %% [markdown]
# A point outside comes back with a separating halfspace instead.

# %%
try:
    caratheodory_decompose([0.8, 0.8], c.clusters)
except ValueError as err:
    print(err)
