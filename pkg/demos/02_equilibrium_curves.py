# %% [markdown]
# # Delivered heat against chiller capacity
#
# For every rack outlet temperature the closed-form steady state gives the
# heat the rack hands to the driving circuit, P_d(T), and the chiller's drive
# limit P_d^max(T). Their crossing is the equilibrium. Shrinking the chiller
# removes the crossing and the plant runs away; switching the cluster off
# leaves nothing to drive the chiller.

# %%
from hotloop import PlantConfig, build_plant, solve_equilibrium, with_overrides

eq = solve_equilibrium(build_plant())
print(eq.format_table())
print(f"-> {eq.diagnosis} at {eq.t_eq:.2f} degC\n")

# %% capacity scaling
for scale in (2.0, 1.5, 1.0, 0.8, 0.5, 0.2):
    p = build_plant(with_overrides(PlantConfig(), {"chiller.capacity_scale": scale}))
    e = solve_equilibrium(p)
    where = f"{e.t_eq:6.2f} degC" if e.t_eq is not None else "   none   "
    print(f"capacity x{scale:3.1f}: {where}  ({e.diagnosis})")

# %% no load
e = solve_equilibrium(build_plant(with_overrides(PlantConfig(), {"site.load_fraction": 0})))
print(f"\ncluster idle: {e.diagnosis}")
