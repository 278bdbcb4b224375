# %% [markdown]
# # Running hotter: what it costs and what it buys
#
# Each row holds the rack outlet at a setpoint and averages a steady window.
# Hotter water makes the chips draw a little more power and loses more heat
# to the room, but the chiller's COP climbs faster, so the share of electric
# power recovered as cooling ends up near a quarter.

# %%
from hotloop import PlantConfig, build_plant, sweep_temperature, with_overrides

setpoints = [49, 52, 55, 57, 60, 62, 65, 67, 70]
table = sweep_temperature(build_plant(), setpoints)

print(" T_out  core  node W   +P    COP   in-water  P_d/P_el  reuse")
for r in table.rows:
    d = dict(zip(table.columns, r))
    print(f"{d['setpoint_C']:5.0f} {d['t_core_mean_C']:6.1f} {d['node_power_W']:6.1f} "
          f"{100 * d['node_power_rel']:5.1f}% {d['cop']:6.3f} {d['heat_in_water']:8.3f} "
          f"{d['p_d_fraction']:8.3f} {d['reuse_fraction']:7.3f}")

cop = table.row(70)["cop"] / table.row(57)["cop"]
print(f"\nCOP(70)/COP(57) = {cop:.3f}")

# %% [markdown]
# With perfect rack insulation and no air-cooled power supplies, every watt
# ends up in the water and the reuse fraction roughly doubles.

# %%
ideal = build_plant(with_overrides(PlantConfig(), {"cluster.ua_rack": 0, "cluster.psu_air_fraction": 0}))
row = sweep_temperature(ideal, [70]).row(70)
print(f"insulated plant at 70 degC: heat-in-water {row['heat_in_water']:.3f}, reuse {row['reuse_fraction']:.3f}")
