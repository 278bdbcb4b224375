# %% [markdown]
# # What the instruments would have seen
#
# The simulated series is exact. Real sensors are not: node sensors read to
# about a kelvin, water sensors to a fifth of that, the rack flow meter to a
# percent and the others only to ten percent. Noise is added per sample with
# a recorded seed so the noisy file can always be regenerated.

# %%
import io

import numpy as np

from hotloop import (
    SensorSpec,
    apply_sensor_noise,
    build_plant,
    fit_gaussian,
    initial_state,
    read_timeseries,
    run,
    write_timeseries,
)

plant = build_plant()
state = run(plant, initial_state(plant), 6 * 3600.0, 2.0).final_state
clean = run(plant, state, 3600.0, 1.0)
noisy = apply_sensor_noise(clean, SensorSpec(), seed=7)

# %%
for col in ("t_core_mean_C", "t_rack_out_C", "m_rack_kg_s", "m_drive_kg_s"):
    err = noisy[col] - clean[col]
    if col.startswith("m_"):
        err = err / clean[col]
    mu, sigma = fit_gaussian(err)
    print(f"{col:15s} error mean {mu:+.4f}  sigma {sigma:.4f}")

# %% round trip through the file format
buf = io.BytesIO()
size = write_timeseries(noisy, buf)
back = read_timeseries(buf.getvalue())
rel = np.max(np.abs(back.data - noisy.data) / np.maximum(np.abs(noisy.data), 1e-12))
print(f"\n{size} bytes, {len(back)} rows, worst relative round-trip error {rel:.1e}")
