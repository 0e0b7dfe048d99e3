# %% [markdown]
# # Smoothing alone vs. smoothing steered by a SAT solver
#
# The point car has to leave its lane, pass a box and reach a goal band.
# Which axis and direction each mode switch watches is a Boolean unknown, so
# the smoothed problem mixes discrete and continuous choices.

# %%
from smoothsat import CoreConfig, baseline_smoothing, solve
from smoothsat.bench.registry import get_benchmark

bench = get_benchmark("pointcar")
p = bench.generate()
print(f"{len(p.bool_unknowns)} Boolean and {len(p.real_unknowns)} real unknowns, {len(p.asserts)} asserts")

# %%
print("seed  full            baseline (found / correct of 20)")
for seed in range(5):
    res = solve(p, CoreConfig(seed=seed, timeout=300))
    ok = res.sat and bench.simulate_ok(res.sigma)
    bl = baseline_smoothing(p, restarts=20, seed=seed)
    print(f"{seed:>4}  {res.status:<4} sim={ok!s:<5}  {bl.found:>2} / {bl.correct}")

# %% [markdown]
# "found" counts trials whose smoothed constraints were met; "correct" counts
# those whose rounded assignment also passes the exact program.
