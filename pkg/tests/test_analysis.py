import numpy as np
import pytest

from hotloop.analysis import (
    _balance,
    chiller_capacity,
    rack_steady,
    solve_equilibrium,
    sweep_temperature,
)
from hotloop.config import PlantConfig, with_overrides
from hotloop.errors import OutOfRange
from hotloop.plant import build_plant, initial_state, run, solve_rack_loop
from hotloop.thermo import FluidStream


def plant_with(**overrides):
    return build_plant(with_overrides(PlantConfig(), overrides))


def test_default_equilibrium_window(plant):
    eq = solve_equilibrium(plant, 0.0)
    assert eq.diagnosis == "equilibrium"
    assert 60.0 <= eq.t_eq <= 70.0
    # bracket holds at the reported tolerance
    assert _balance(plant, eq.t_eq - 0.01)[0] < 0.0 <= _balance(plant, eq.t_eq + 0.01)[0]
    assert len(eq.table) == 51


def test_runaway_and_subcritical():
    eq = solve_equilibrium(plant_with(**{"chiller.capacity_scale": 0.2}))
    assert eq.t_eq is None and eq.diagnosis == "runaway"
    eq = solve_equilibrium(plant_with(**{"site.load_fraction": 0}))
    assert eq.t_eq is None and eq.diagnosis == "subcritical"


def test_regulated_when_pid_setpoint_binds():
    p = plant_with(**{"pid.setpoint": 58.0})
    eq = solve_equilibrium(p, None)
    assert eq.diagnosis == "regulated"
    assert rack_steady(p, eq.t_eq).t_in == pytest.approx(58.0, abs=1e-4)
    assert solve_equilibrium(p, 0.0).diagnosis == "equilibrium"
    with pytest.raises(OutOfRange):
        solve_equilibrium(p, 0.5)


def test_closed_form_matches_rack_loop(plant):
    rs = rack_steady(plant, 65.0)
    drive = FluidStream(plant.drive_flow, rs.t_ret, plant.glycol_cp)
    primary = FluidStream(plant.primary_flow, 20.0, plant.water_cp)
    loop = solve_rack_loop(plant, 0.0, drive, primary, 1.0, plant.room_temp, rs.t_in)
    assert loop.cl.outlet.temperature == pytest.approx(65.0, abs=1e-6)
    assert loop.p_d == pytest.approx(rs.p_d, rel=1e-6)
    assert loop.drive_out.temperature == pytest.approx(rs.t_tank, abs=1e-6)


@pytest.mark.parametrize("t0", [20.0, 45.0, 75.0])
def test_integrator_agrees_with_root(plant, t0):
    eq = solve_equilibrium(plant)
    ts = run(plant, initial_state(plant, t0), 8 * 3600.0, 2.0)
    assert ts.last("t_rack_out_C") == pytest.approx(eq.t_eq, abs=0.5)


def test_chiller_capacity_zero_below_standby(plant):
    assert chiller_capacity(plant, 54.9) == 0.0
    assert chiller_capacity(plant, 70.0) > 0.0


def test_sweep_heat_in_water_matches_closed_form(plant, sweep):
    hiw = sweep.column("heat_in_water")
    assert np.all(np.diff(hiw) < 0)
    for sp, h in zip(sweep.column("setpoint_C"), hiw):
        assert h == pytest.approx(rack_steady(plant, sp).heat_in_water, abs=2e-3)
    assert np.all(sweep.column("converged") == 1.0)


def test_sweep_rejects_out_of_range(plant):
    with pytest.raises(OutOfRange):
        sweep_temperature(plant, [25.0])


def test_sweep_csv(sweep):
    text = sweep.to_csv()
    lines = text.splitlines()
    assert lines[0].split(",")[0] == "setpoint_C"
    assert len(lines) == len(sweep.rows) + 1
    assert sweep.row(67.0)["setpoint_C"] == 67.0
