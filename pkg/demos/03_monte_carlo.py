"""
Checking formulas by simulation
===============================

Every closed-form functional has a Monte Carlo counterpart. For the
compound Poisson model the paths are simulated exactly, claim by claim,
so only statistical error remains.
"""

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from levydiv import (
    CramerLundbergExp,
    SimConfig,
    classical_barrier_value,
    dividends_doubly,
    doubly_reflected_potential,
    injections_doubly,
)
from levydiv.simulate import simulate_doubly_reflected, simulate_occupation, simulate_reflected_barrier

model = CramerLundbergExp(2.0, 1.0, 1.0)
q, a, x = 0.1, 2.0, 1.0
cfg = SimConfig(n_paths=50_000, horizon=150.0, seed=1)

# %%
est = simulate_reflected_barrier(model, a, x, q, cfg).dividends
exact = classical_barrier_value(model, q, a, x)
print(f"dividends until ruin: MC {est.mean:.4f} +- {est.stderr:.4f}, formula {exact:.4f}")

both = simulate_doubly_reflected(model, a, x, q, cfg)
print(f"doubly reflected dividends: MC {both.dividends.mean:.4f}, formula {dividends_doubly(model, q, a, x):.4f}")
print(f"doubly reflected injections: MC {both.injections.mean:.4f}, formula {injections_doubly(model, q, a, x):.4f}")

# %% [markdown]
# Discounted occupation of the doubly reflected surplus: a density on
# [0, a] plus an atom at a, where the surplus sits while dividends flow.

# %%
occ = simulate_occupation(model, a, x, q, cfg.replace(n_paths=20_000), n_bins=25)
pd = doubly_reflected_potential(model, q, a, x)
ys = np.linspace(0.0, a, 200)
plt.figure(figsize=(6, 4))
plt.bar(occ.centers, occ.density, width=np.diff(occ.edges), alpha=0.5, label="simulation")
plt.plot(ys, pd.density(ys), "k", label="formula")
plt.title(f"atom at a: MC {occ.atom.mean:.3f}, formula {pd.atom:.3f}")
plt.legend()
plt.tight_layout()
plt.savefig("occupation.png", dpi=120)
