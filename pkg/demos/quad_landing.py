# %% [markdown]
# # Landing a planar quadcopter with a three-mode PD controller

# %%
from smoothsat import CoreConfig, solve
from smoothsat.bench.registry import get_benchmark

bench = get_benchmark("quad-landing")
p = bench.generate()
print(f"{len(p.nodes)} nodes, {len(p.asserts)} asserts, "
      f"{len(p.bool_unknowns)} Boolean / {len(p.real_unknowns)} real unknowns")

# %%
res = solve(p, CoreConfig(seed=0))
print(res.status, res.stats)
print("switches:", res.sigma.bools, {k: round(res.sigma.reals[k], 3) for k in ("c1", "c2")})

# %%
rows = bench.trajectory(res.sigma)
print("   t      x      y    angle     dy  mode")
for r in rows[::5] + [rows[-1]]:
    t, x, y, ang, dx, dy, dang, mode = r
    print(f"{t:5.2f} {x:6.3f} {y:6.3f} {ang:7.3f} {dy:6.3f}  {mode}")
print("simulator agrees:", bench.simulate_ok(res.sigma))
