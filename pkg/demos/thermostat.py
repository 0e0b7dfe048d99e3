# %% [markdown]
# # Synthesizing thermostat switching temperatures
#
# Two unknowns: the temperature at which heating turns on and the one at
# which it turns off. The room must stay between 18 and 20 degrees and the
# controller must respect a minimum dwell time in the OFF and ON modes.

# %%
import sys

from smoothsat import CoreConfig, solve
from smoothsat.bench.thermostat import MODE_NAMES, gen_thermostat, simulate_thermostat

steps, dt, dwell = (500, 2.0, 200.0) if "--long" in sys.argv else (50, 2.0, 20.0)
p = gen_thermostat(steps, dt, dwell)
print(f"{len(p.nodes)} nodes, {len(p.asserts)} asserts, unknowns {p.real_unknowns}")

# %%
res = solve(p, CoreConfig(eta=5, seed=0))
t_on, t_off = res.sigma.reals["t_on"], res.sigma.reals["t_off"]
print(res.status, f"t_on={t_on:.3f} t_off={t_off:.3f}", f"{res.stats['wall_ms']:.0f} ms")

# %% [markdown]
# An independent forward simulation with the synthesized thresholds.

# %%
rows, violated = simulate_thermostat(t_on, t_off, steps, dt, dwell)
temps = [T for _, T, _, _ in rows]
print(f"temperature range [{min(temps):.3f}, {max(temps):.3f}], dwell violated: {violated}")
for t, T, mode, _ in rows[:: max(1, steps // 10)]:
    print(f"  t={t:6.1f}  T={T:7.3f}  {MODE_NAMES[mode]}")

# %%
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot([r[0] for r in rows], temps)
    ax.axhline(18, ls="--", c="gray")
    ax.axhline(20, ls="--", c="gray")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("room temperature")
    fig.tight_layout()
    fig.savefig("thermostat.png", dpi=120)
    print("wrote thermostat.png")
