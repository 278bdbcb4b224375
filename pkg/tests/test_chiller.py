import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hotloop.chiller import (
    ChillerModel,
    ChillerState,
    chiller_cop,
    chiller_pd_max,
    chiller_step,
    next_activity,
)
from hotloop.curves import PiecewiseLinear
from hotloop.errors import OutOfRange
from hotloop.thermo import FluidStream

GLYCOL = 3600.0


def streams(t_drive, c_drive=1.36 * GLYCOL, t_chill=20.0, t_recool=25.0):
    return (
        FluidStream(c_drive / GLYCOL, t_drive, GLYCOL),
        FluidStream(1.5, t_chill),
        FluidStream(2.0, t_recool, GLYCOL),
    )


def test_standby_returns_none_and_zero():
    m = ChillerModel()
    assert chiller_cop(m, 50.0, False) is None
    assert chiller_pd_max(m, 70.0, False) == 0.0
    r = chiller_step(m, ChillerState(), *streams(50.0))
    assert r.p_d == r.p_c == r.p_reject == 0.0
    assert r.drive_out.temperature == 50.0 and not r.state.active


def test_default_cop_ratio_and_reuse_anchor():
    m = ChillerModel()
    assert m.cop_curve(70.0) / m.cop_curve(57.0) == pytest.approx(1.90, abs=0.01)
    assert m.cop_curve(57.0) == pytest.approx(0.26, abs=0.01)
    assert m.cop_curve(70.0) == pytest.approx(0.50, abs=0.01)
    assert m.cop_curve(70.0) * 0.50 == pytest.approx(0.25, abs=0.005)


def test_pd_max_division():
    m = ChillerModel(cop_curve=PiecewiseLinear(((55, 0.4), (80, 0.4))),
                     pc_max_curve=PiecewiseLinear(((55, 9000.0), (80, 9000.0))))
    assert chiller_pd_max(m, 65.0, True) == pytest.approx(22_500.0)


def test_pd_max_grid_oracle():
    m = ChillerModel()
    grid = np.arange(55.0, 80.0 + 1e-9, 0.5)
    vals = [chiller_pd_max(m, t, True) for t in grid]
    brute = [m.pc_max_curve(t) / m.cop_curve(t) for t in grid]
    assert np.allclose(vals, brute, rtol=1e-15)
    assert max(vals) == max(brute)


def test_step_hand_example():
    m = ChillerModel(cop_curve=PiecewiseLinear(((55, 0.4), (80, 0.4))),
                     pc_max_curve=PiecewiseLinear(((55, 50_000.0), (80, 50_000.0))),
                     chilled_setpoint=-10.0)
    # 2000 W/K above a 55 degC threshold at 65 degC gives 20 kW of drive heat
    r = chiller_step(m, ChillerState(True), *streams(65.0, c_drive=2000.0))
    assert r.p_d == pytest.approx(20_000.0)
    assert r.p_c == pytest.approx(8000.0)
    assert r.p_reject == pytest.approx(28_000.0)


def test_hysteresis():
    m = ChillerModel()
    off, on = ChillerState(False), ChillerState(True)
    assert not next_activity(m, off, 54.0)
    assert next_activity(m, off, 55.0)
    assert next_activity(m, on, 53.5)
    assert not next_activity(m, on, 52.9)
    assert not next_activity(m, ChillerState(True, enabled=False), 70.0)


def test_demand_cap_reduces_drive_draw():
    m = ChillerModel()
    r = chiller_step(m, ChillerState(True), *streams(70.0), chilled_demand=1000.0)
    assert r.p_c == pytest.approx(1000.0)
    assert r.p_d == pytest.approx(1000.0 / m.cop_curve(70.0))


def test_curve_validation():
    with pytest.raises(OutOfRange):
        ChillerModel(cop_curve=PiecewiseLinear(((55, 0.5), (80, 0.3))))
    with pytest.raises(OutOfRange):
        ChillerModel(cop_curve=PiecewiseLinear(((55, 0.0), (80, 0.3))))
    with pytest.raises(OutOfRange):
        ChillerModel(pc_max_curve=PiecewiseLinear(((55, -1.0), (80, 0.3))))


@given(
    t=st.floats(20.0, 90.0),
    was_active=st.booleans(),
    c_drive=st.floats(0.0, 20_000.0),
    t_chill=st.floats(5.0, 40.0),
    t_recool=st.floats(5.0, 45.0),
    demand=st.one_of(st.just(math.inf), st.floats(0.0, 30_000.0)),
    scale=st.floats(0.0, 3.0),
)
def test_chiller_first_law_and_limits(t, was_active, c_drive, t_chill, t_recool, demand, scale):
    m = ChillerModel().scaled_capacity(scale)
    r = chiller_step(m, ChillerState(was_active), *streams(t, c_drive, t_chill, t_recool), demand)
    assert r.p_reject == r.p_d + r.p_c
    if not r.state.active:
        assert r.p_d == r.p_c == r.p_reject == 0.0
    else:
        assert r.p_d <= chiller_pd_max(m, t, True) * (1 + 1e-12) + 1e-9
        assert r.p_c <= demand + 1e-9
    if t < m.standby_temp - m.hysteresis:
        assert r.p_reject == 0.0
