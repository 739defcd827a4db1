# %% [markdown]
# # Double sequences and Euler means
#
# Double windows index the square [1, M]^2.  Three convergence modes are
# modelled as ideals: Pringsheim (`pringsheim(0.1)`), statistical
# (`double-density(0.05)`) and e-convergence (`transpose(product(fin,fin))`).

# %%
import numpy as np

from idealcore import double_convergence, euler_core, euler_transform, generate
from idealcore.transforms import euler_row_sums

M = 256
for seq in ("double_alt", "double_alt_rows", "double_harmonic"):
    x = generate(seq, M)
    for mode in ("pringsheim", "statistical", "e"):
        r = double_convergence(x, mode, tol=2e-2)
        lo, hi = r.report.result.bounding_box()
        verdict = f"limit {r.limit[0]:+.3f}" if r.converges else "diverges"
        print(f"{seq:>16} {mode:>12}: core [{lo[0]:+.3f}, {hi[0]:+.3f}]  {verdict}")

# %% [markdown]
# The harmonic double sequence 1/(n+m) tends to 0.  Its P-core is twice as
# wide as the other two because the Pringsheim corner at M = 256 starts at
# n, m >= 26, where the values are still near 0.02, while the density
# models only discard a thin border.  The corner shrinks like 1/M.

# %%
for M_, delta in ((256, 1e-2), (1000, 1e-3)):
    r = double_convergence(generate("double_harmonic", M_), "pringsheim", tol=2e-2, delta=delta)
    print(f"M = {M_:>4}: P-core diameter {r.report.diameter:.4f}, limit {r.limit[0]:.4f}")

# %% [markdown]
# ## Euler means
#
# Row n of the Euler matrix holds the binomial weights C(n,k)(1−r)^(n−k) r^k.
# For r = 1/2 the means of (−1)^n vanish from the second term on, so the
# Euler core of the alternating sequence collapses to {0}.

# %%
print("max |row sum - 1| up to n = 2048:", np.abs(euler_row_sums(2049, 0.5) - 1).max())
alt = generate("alt", 10_000)
y = euler_transform(alt, 0.5).values[:6, 0]
print("first Euler means:", y.round(12))
E = euler_core(alt, 0.5)
print("E-core:", E.result.bounding_box())
print("r = 1 core:", euler_core(alt, 1.0).result.bounding_box())
