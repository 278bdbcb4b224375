# %% [markdown]
# # Cold start to equilibrium
#
# The plant starts at 20 degC with the valve shut. The cluster heats the rack
# water, the buffer tank follows, and once the driving circuit passes 55 degC
# the chiller wakes up and starts taking heat. Where the chiller's maximum
# drive power meets the delivered heat the plant settles.

# %%
import numpy as np

from hotloop import build_plant, initial_state, run, solve_equilibrium

np.set_printoptions(precision=2, suppress=True)

plant = build_plant()
ts = run(plant, initial_state(plant), 6 * 3600.0, 1.0)

# %% one line every half hour
every = 1800
for i in range(every - 1, len(ts), every):
    print(f"t={ts['time_s'][i] / 3600:4.1f} h  rack out {ts['t_rack_out_C'][i]:5.2f}  "
          f"tank {ts['t_tank_C'][i]:5.2f}  chiller {'on ' if ts['chiller_active'][i] else 'off'}  "
          f"P_d {ts['p_d_W'][i] / 1e3:5.1f} kW  P_c {ts['p_c_W'][i] / 1e3:4.1f} kW")

# %% the integrator should land where the root finder says
eq = solve_equilibrium(plant)
print(f"\nsolve_equilibrium: {eq.t_eq:.2f} degC; simulated after 6 h: {ts.last('t_rack_out_C'):.2f} degC")
print(f"rack dT at the end: {ts.last('t_rack_out_C') - ts.last('t_rack_in_C'):.2f} K")
print(f"worst energy-audit residual: {ts['audit_residual'].max():.1e}")

# %% when does the chiller first switch on?
on = np.flatnonzero(ts["chiller_active"] > 0)
print(f"chiller activation after {ts['time_s'][on[0]] / 60:.0f} min at tank {ts['t_tank_C'][on[0]]:.2f} degC")
