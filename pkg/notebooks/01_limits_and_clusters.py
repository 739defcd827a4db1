# %% [markdown]
# # Ideal limits and cluster points at finite scale
#
# An ideal decides which index sets are negligible.  Under `fin` only sets
# that stop before the window's second half are negligible; under
# `density(0.05)` any set with relative frequency below 5% past a short
# burn-in is.  This script contrasts the two on a sequence that is 1 on the
# perfect squares and 0 elsewhere.

# %%
import numpy as np

from idealcore import generate, make_density_zero, make_fin, scalar_limits
from idealcore.cluster import estimate_clusters

N = 10_000
spike = generate("sparse_spike(squares)", N)
fin, z = make_fin(), make_density_zero(0.05)

# %% [markdown]
# The squares keep recurring, so the ordinary (Fin) limsup is 1.  They have
# density zero, so under Z the spikes are invisible.

# %%
for I in (fin, z):
    r = scalar_limits(spike, I)
    print(f"{I.name:>14}: liminf {r.iliminf:+.3f}  limsup {r.ilimsup:+.3f}")

# %% [markdown]
# The limsup is computed from a data threshold: the smallest value t with
# {n : x_n > t} negligible.  A quick cross-check against the plain tail
# maximum for a noisy alternating sequence:

# %%
x = generate("alt(noise=0.3, seed=1)", N)
tail = x.values[N // 2 :, 0]
r = scalar_limits(x, fin, delta=1e-3)
print("tail max", tail.max().round(4), "limsup", round(r.ilimsup, 4))
print("tail min", tail.min().round(4), "liminf", round(r.iliminf, 4))

# %% [markdown]
# ## Cluster candidates
#
# Cells of an adaptive ℓ∞ grid survive while the indices landing in them
# are not negligible.  Each survivor splits into 2^k children until the
# half-width reaches `eps_final`.

# %%
for I in (fin, z):
    C = estimate_clusters(spike, I, eps_final=1e-2)
    print(I.name, "candidates", np.unique(C.points.round(2)).tolist(), "half-width", C.radius)

# %% [markdown]
# A planar example: three points visited cyclically, with decaying noise.
# The candidates gather around the three vertices.

# %%
tri = generate("cycle([(0,0),(1,0),(0,1)], noise=0.2, seed=3)", N)
C = estimate_clusters(tri, fin)
print(len(C), "cells; rounded centers:", sorted({tuple(p) for p in (C.points.round(1) + 0.0).tolist()}))
