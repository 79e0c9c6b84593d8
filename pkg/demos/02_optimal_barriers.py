"""
Optimal dividend barriers
=========================

Classical problem: pay dividends above a barrier a until ruin. The best
barrier c* minimises W'. Bail-out problem: shareholders also inject capital
at cost phi per unit to avoid ruin; the best barrier d* is the first zero of
G(a) = (phi Z(a) - 1) W'(a) - phi q W(a)^2.
"""

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from levydiv import (
    BailoutBarrierValue,
    ClassicalBarrierValue,
    CramerLundbergExp,
    optimal_bailout_barrier,
    optimal_classical_barrier,
    verify_hjb_classical,
)

model = CramerLundbergExp(2.0, 1.0, 1.0)
q, phi_cost = 0.1, 1.5

c = optimal_classical_barrier(model, q)
d = optimal_bailout_barrier(model, q, phi_cost)
print(f"c* = {c.level:.6f} ({c.method.value}, generic search {c.cross_check:.6f})")
print(f"d* = {d.level:.6f} (G(d*) = {d.criterion_residual:.1e})")

# %% [markdown]
# Values of a few barrier strategies started from x. The optimal barrier
# lies above every other curve.

# %%
xs = np.linspace(0.0, 8.0, 300)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
for a in (1.0, 2.5, c.level, 6.0):
    ax1.plot(xs, ClassicalBarrierValue(model, q, a)(xs), lw=2.5 if a == c.level else 1, label=f"a = {a:.2f}")
for a in (0.5, d.level, 3.0):
    ax2.plot(xs, BailoutBarrierValue(model, q, phi_cost, a)(xs), lw=2.5 if a == d.level else 1,
             label=f"a = {a:.2f}")
ax1.set_title("classical: v_a(x)")
ax2.set_title(f"bail-out: phi = {phi_cost}")
ax1.legend()
ax2.legend()
fig.tight_layout()
fig.savefig("optimal_barriers.png", dpi=120)

# %% [markdown]
# The optimal value solves the variational inequality: the generator
# residual vanishes below c* and is nonpositive above.

# %%
rep = verify_hjb_classical(model, q)
print(f"interior max |res| = {rep.interior_max_abs:.1e}, largest violation above c* = {rep.max_violation:.1e}")
print("condition holds:", rep.condition_holds)

# %% [markdown]
# In the compound Poisson model c* drops to zero once claims are too
# frequent relative to the premium: p lambda mu <= (q + lambda)^2.

# %%
for p in (1.5, 2.0, 4.0, 8.0):
    m = CramerLundbergExp(p, 1.0, 1.0)
    print(f"p = {p:4.1f}  c* = {optimal_classical_barrier(m, q).level:.4f}")
