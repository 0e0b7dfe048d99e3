# %% [markdown]
# # Why descent alone gets stuck, and how a Boolean decision frees it
#
# One unknown `x1` in [-20, 6] flows through three nested branches and the
# final value must be either <= 0 or > 25. Only x1 in (4, 5] works.

# %%
import numpy as np

from smoothsat import CoreConfig, OptimizerConfig, solve, solve_phase1, verify
from smoothsat.bench.toys import BRANCH_CHAIN, branch_chain, find_atom

print(BRANCH_CHAIN)
p = branch_chain()

# %% [markdown]
# Brute force over a fine grid gives the ground truth.

# %%
xs = np.round(np.arange(-20, 6.0005, 1e-3), 6)
ok = [x for x in xs if verify(p, {"x1": float(x)})]
print(f"{len(ok)} feasible grid points in [{min(ok):.3f}, {max(ok):.3f}]")

# %% [markdown]
# Smoothed descent started at the left edge slides toward -20: on that
# branch the value 21 + x1 shrinks as x1 decreases, which looks like progress.

# %%
free = solve_phase1(p, {}, OptimizerConfig(), x0={"x1": -20.0})
print("no decisions:", free.status, "x1 =", round(free.x["x1"], 3), "residual", round(free.residual, 3))

# %% [markdown]
# Declaring `x1 <= 0` false replaces that condition by a constant and adds
# `x1 >= 0` as a constraint. The same start now converges.

# %%
pin = {find_atom(p, "(>= (sub 0 x1) 0)"): 0}
pinned = solve_phase1(p, pin, OptimizerConfig(), x0={"x1": -20.0})
print("x1 <= 0 is false:", pinned.status, "x1 =", round(pinned.x["x1"], 4))

# %% [markdown]
# The full solver finds such decisions on its own.

# %%
for seed in range(3):
    res = solve(p, CoreConfig(seed=seed))
    print(seed, res.status, round(res.sigma.reals["x1"], 4), res.stats["numeric_calls"], "numerical calls")
