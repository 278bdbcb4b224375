# %% [markdown]
# # Losing the chiller
#
# Starting from the settled plant, the chiller drops out. With nothing taking
# heat from the driving circuit the tank warms until the rack inlet reaches
# the valve controller's setpoint. The valve then diverts rack water through
# the exchanger to the primary circuit, and the central cooling circuit picks
# up the extra load once the primary supply exceeds 20 degC.

# %%
import numpy as np

from hotloop import ScenarioEvent, build_plant, initial_state, run

plant = build_plant()
warm = run(plant, initial_state(plant), 6 * 3600.0, 2.0).final_state
t_fail = warm.time + 600.0
ts = run(plant, warm, 2 * 3600.0, 1.0, [ScenarioEvent(t_fail, "disable_chiller")])

# %%
for minutes in (5, 15, 20, 30, 45, 60, 90, 120):
    i = int(np.searchsorted(ts["time_s"], warm.time + 60.0 * minutes))
    i = min(i, len(ts) - 1)
    print(f"{minutes:4d} min  inlet {ts['t_rack_in_C'][i]:6.3f}  valve {ts['valve_fraction'][i]:5.3f}  "
          f"primary {ts['t_primary_C'][i]:5.2f}  central {ts['q_central_W'][i] / 1e3:5.1f} kW  "
          f"P_c {ts['p_c_W'][i] / 1e3:4.1f} kW")

print(f"\nsetpoint {plant.pid.setpoint} degC, final inlet {ts.last('t_rack_in_C'):.3f} degC")
