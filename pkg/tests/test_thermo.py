import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hotloop.errors import IncompatibleFluid, OutOfRange, StabilityViolation
from hotloop.thermo import (
    CP_WATER,
    FluidStream,
    ThermalMass,
    advance_thermal_mass,
    check_temperature,
    hx_transfer,
    mix_streams,
    pipe_loss,
    split_stream,
)

flows = st.floats(0.0, 10.0)
temps = st.floats(-20.0, 110.0)
cps = st.sampled_from([CP_WATER, 3600.0])


def test_mix_examples():
    out = mix_streams(FluidStream(1.0, 60.0), FluidStream(1.0, 40.0))
    assert out.mass_flow == 2.0 and out.temperature == pytest.approx(50.0)
    out = mix_streams(FluidStream(2.0, 70.0), FluidStream(0.0, 20.0))
    assert out.mass_flow == 2.0 and out.temperature == pytest.approx(70.0)
    # weighted mean (1.5*65 + 0.5*25) / 2
    out = mix_streams(FluidStream(1.5, 65.0), FluidStream(0.5, 25.0))
    assert out.mass_flow == 2.0 and out.temperature == pytest.approx((1.5 * 65 + 0.5 * 25) / 2.0)


def test_mix_zero_flows_and_fluid_mismatch():
    out = mix_streams(FluidStream(0.0, 30.0), FluidStream(0.0, 50.0))
    assert out.mass_flow == 0.0 and out.temperature == 40.0
    with pytest.raises(IncompatibleFluid):
        mix_streams(FluidStream(1.0, 30.0, 4186.0), FluidStream(1.0, 30.0, 3600.0))


def test_split_examples():
    a, b = split_stream(FluidStream(2.0, 65.0), 1.0)
    assert (a.mass_flow, b.mass_flow) == (2.0, 0.0) and a.temperature == b.temperature == 65.0
    a, b = split_stream(FluidStream(2.0, 65.0), 0.5)
    assert (a.mass_flow, b.mass_flow) == (1.0, 1.0)
    a, b = split_stream(FluidStream(1.2, 70.0), 0.25)
    assert a.mass_flow == pytest.approx(0.3) and b.mass_flow == pytest.approx(0.9)
    with pytest.raises(OutOfRange):
        split_stream(FluidStream(1.0, 20.0), 1.5)


def test_hx_examples():
    hot, cold, q = hx_transfer(FluidStream(1.0, 70.0), FluidStream(1.0, 60.0), 1.0)
    assert q == pytest.approx(41_860.0)
    assert hot.temperature == pytest.approx(60.0) and cold.temperature == pytest.approx(70.0)

    hot, cold, q = hx_transfer(FluidStream(1.0, 50.0), FluidStream(1.0, 50.0), 0.8)
    assert q == 0.0 and hot.temperature == 50.0 and cold.temperature == 50.0

    hot, cold, q = hx_transfer(FluidStream(2.0, 70.0), FluidStream(1.0, 50.0), 0.5)
    assert q == pytest.approx(0.5 * 1 * 4186 * 20)
    assert cold.temperature == pytest.approx(60.0) and hot.temperature == pytest.approx(65.0)


def test_hx_no_reverse_transfer_and_bad_effectiveness():
    hot, cold, q = hx_transfer(FluidStream(1.0, 30.0), FluidStream(1.0, 60.0), 0.9)
    assert q == 0.0 and hot.temperature == 30.0
    with pytest.raises(OutOfRange):
        hx_transfer(FluidStream(1.0, 70.0), FluidStream(1.0, 60.0), 1.2)


def test_pipe_loss_examples():
    out, q = pipe_loss(FluidStream(2.0, 70.0), 100.0, 25.0)
    assert q == pytest.approx(4500.0)
    assert 70.0 - out.temperature == pytest.approx(4500.0 / (2 * 4186), abs=1e-12)
    assert 70.0 - out.temperature == pytest.approx(0.537, abs=1e-3)
    s = FluidStream(1.3, 44.0)
    assert pipe_loss(s, 0.0, 10.0) == (s, 0.0)
    assert pipe_loss(FluidStream(1.0, 25.0), 50.0, 25.0)[1] == 0.0
    # warmer air heats the water
    assert pipe_loss(FluidStream(1.0, 20.0), 50.0, 25.0)[1] < 0.0
    assert pipe_loss(FluidStream(0.0, 60.0), 50.0, 25.0)[1] == 0.0


def test_thermal_mass_examples():
    tm, out = advance_thermal_mass(ThermalMass(800.0, 60.0), FluidStream(2.0, 60.0), 123.0)
    assert tm.temperature == 60.0 and out.temperature == 60.0
    tm, out = advance_thermal_mass(ThermalMass(800.0, 20.0), FluidStream(2.0, 70.0), 400.0)
    assert tm.temperature == pytest.approx(70.0 - 50.0 * math.exp(-1.0))
    assert tm.temperature == pytest.approx(51.6, abs=0.05)
    assert out.temperature == tm.temperature and out.mass_flow == 2.0
    tm, _ = advance_thermal_mass(ThermalMass(800.0, 20.0), FluidStream(0.0, 70.0), 1000.0)
    assert tm.temperature == 20.0


def test_explicit_update_guard():
    with pytest.raises(StabilityViolation):
        advance_thermal_mass(ThermalMass(10.0, 20.0), FluidStream(2.0, 70.0), 10.0, method="explicit")
    tm, out = advance_thermal_mass(ThermalMass(10.0, 20.0), FluidStream(2.0, 70.0), 1.0, method="explicit")
    assert tm.temperature == pytest.approx(30.0) and out.temperature == 20.0


def test_invalid_values():
    with pytest.raises(OutOfRange):
        FluidStream(-1.0, 20.0)
    with pytest.raises(OutOfRange):
        FluidStream(1.0, 20.0, 0.0)
    with pytest.raises(OutOfRange):
        ThermalMass(0.0, 20.0)
    with pytest.raises(OutOfRange):
        check_temperature(130.0)
    assert check_temperature(-30.0) == -30.0


@given(flows, temps, flows, temps, cps)
def test_mix_conserves_mass_and_enthalpy(ma, ta, mb, tb, cp):
    out = mix_streams(FluidStream(ma, ta, cp), FluidStream(mb, tb, cp))
    assert out.mass_flow == pytest.approx(ma + mb, rel=1e-9, abs=1e-12)
    assert out.mass_flow * out.temperature == pytest.approx(ma * ta + mb * tb, rel=1e-9, abs=1e-9)


@given(flows, temps, st.floats(0.0, 1.0), cps)
def test_split_then_mix_is_identity(m, t, f, cp):
    s = FluidStream(m, t, cp)
    back = mix_streams(*split_stream(s, f))
    assert back.mass_flow == pytest.approx(m, rel=1e-12, abs=1e-12)
    if m > 0:
        assert back.temperature == pytest.approx(t, rel=1e-12, abs=1e-12)


@given(flows, temps, flows, temps, st.floats(0.0, 1.0), cps, cps)
def test_hx_bounds_and_conservation(mh, th, mc, tc, eps, cph, cpc):
    hot, cold, q = hx_transfer(FluidStream(mh, th, cph), FluidStream(mc, tc, cpc), eps)
    assert q >= 0.0
    if q > 0:
        assert hot.temperature >= tc - 1e-9
        assert cold.temperature <= th + 1e-9
        # temperatures carry rounding of order eps*|T|, scaled by the capacity rate
        tol_h = 1e-12 * mh * cph * (abs(th) + abs(tc) + 1.0)
        tol_c = 1e-12 * mc * cpc * (abs(th) + abs(tc) + 1.0)
        assert mh * cph * (th - hot.temperature) == pytest.approx(q, rel=1e-9, abs=tol_h)
        assert mc * cpc * (cold.temperature - tc) == pytest.approx(q, rel=1e-9, abs=tol_c)


@given(st.floats(0.01, 10.0), temps, temps)
def test_hx_equal_capacity_full_effectiveness_swaps(m, th, tc):
    hot, cold, q = hx_transfer(FluidStream(m, th), FluidStream(m, tc), 1.0)
    if th > tc:
        assert hot.temperature == pytest.approx(tc, abs=1e-9)
        assert cold.temperature == pytest.approx(th, abs=1e-9)


@given(st.floats(1.0, 2000.0), temps, flows, temps, st.floats(0.1, 5000.0))
def test_thermal_mass_monotone(mass, t0, m, tin, dt):
    tm, _ = advance_thermal_mass(ThermalMass(mass, t0), FluidStream(m, tin), dt)
    lo, hi = min(t0, tin), max(t0, tin)
    assert lo - 1e-9 <= tm.temperature <= hi + 1e-9
    assert abs(tm.temperature - tin) <= abs(t0 - tin) + 1e-12


@settings(max_examples=50)
@given(flows, temps, temps)
def test_pipe_loss_zero_ua_identity(m, t, amb):
    s = FluidStream(m, t)
    assert pipe_loss(s, 0.0, amb) == (s, 0.0)
