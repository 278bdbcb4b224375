"""Thermally driven (adsorption) chiller.

The sorption cycle itself is not modelled. The chiller is a black box that
goes to standby below an activation temperature and otherwise absorbs heat
from its driving circuit, removes ``COP`` times that heat from the chilled
circuit, and rejects the sum to the recooling circuit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .curves import PiecewiseLinear
from .errors import OutOfRange
from .thermo import FluidStream

DEFAULT_COP = PiecewiseLinear(
    ((55.0, 0.22), (57.0, 0.5 / 1.9), (60.0, 0.39), (65.0, 0.45), (70.0, 0.50), (80.0, 0.56))
)
DEFAULT_PC_MAX = PiecewiseLinear(
    ((55.0, 3000.0), (57.0, 3600.0), (62.0, 6000.0), (68.0, 9500.0), (72.0, 10500.0), (80.0, 11500.0))
)


@dataclass(frozen=True)
class ChillerModel:
    """Standby threshold plus COP and cooling-capacity curves over drive temperature.

    Attributes:
        standby_temp: activation temperature of the driving circuit, degC.
        hysteresis: the chiller switches off only below ``standby_temp - hysteresis``.
        cop_curve: drive temperature -> COP.
        pc_max_curve: drive temperature -> maximum chilled-side cooling, W.
        chilled_setpoint: the chiller never cools chilled water below this, degC.
    """

    standby_temp: float = 55.0
    hysteresis: float = 2.0
    cop_curve: PiecewiseLinear = DEFAULT_COP
    pc_max_curve: PiecewiseLinear = DEFAULT_PC_MAX
    chilled_setpoint: float = 16.0

    def __post_init__(self):
        if self.hysteresis < 0.0:
            raise OutOfRange(f"hysteresis must be >= 0, got {self.hysteresis}")
        cop = [y for x, y in self.cop_curve.points]
        if min(cop) <= 0.0:
            raise OutOfRange("COP must be positive everywhere")
        active = [y for x, y in self.cop_curve.points if x >= self.standby_temp]
        if any(b < a for a, b in zip(active, active[1:])):
            raise OutOfRange("COP must be non-decreasing above the standby temperature")
        if min(y for x, y in self.pc_max_curve.points) < 0.0:
            raise OutOfRange("cooling capacity must be non-negative")

    def scaled_capacity(self, factor: float) -> ChillerModel:
        return ChillerModel(
            self.standby_temp, self.hysteresis, self.cop_curve,
            self.pc_max_curve.scaled(factor), self.chilled_setpoint,
        )


@dataclass(frozen=True, slots=True)
class ChillerState:
    active: bool = False
    enabled: bool = True


def chiller_cop(model: ChillerModel, t_drive: float, active: bool) -> float | None:
    if not active:
        return None
    return model.cop_curve(t_drive)


def chiller_pd_max(model: ChillerModel, t_drive: float, active: bool) -> float:
    """Largest heat flow the chiller can draw from its driving circuit."""
    if not active:
        return 0.0
    return model.pc_max_curve(t_drive) / model.cop_curve(t_drive)


def next_activity(model: ChillerModel, state: ChillerState, t_drive: float) -> bool:
    if not state.enabled:
        return False
    if t_drive >= model.standby_temp:
        return True
    return state.active and t_drive >= model.standby_temp - model.hysteresis


@dataclass(frozen=True, slots=True)
class ChillerStep:
    drive_out: FluidStream
    chilled_out: FluidStream
    recool_out: FluidStream
    p_d: float
    p_c: float
    p_reject: float
    state: ChillerState
    cop: float | None


def chiller_step(
    model: ChillerModel,
    state: ChillerState,
    drive_in: FluidStream,
    chilled_return: FluidStream,
    recool_supply: FluidStream,
    chilled_demand: float = math.inf,
    dt: float = 1.0,
) -> ChillerStep:
    """One step of the chiller.

    When active the chiller draws ``p_d = min(heat above standby, P_d^max)``
    from the driving stream. Cooling is ``p_c = COP * p_d`` unless the chilled
    demand or the chilled setpoint caps it; in that case the drive draw is
    reduced to ``p_c / COP`` so the chiller stays on its COP curve.
    ``p_reject = p_d + p_c`` always.
    """
    if dt <= 0.0:
        raise OutOfRange(f"dt must be > 0, got {dt}")
    t = drive_in.temperature
    active = next_activity(model, state, t)
    new_state = ChillerState(active, state.enabled)
    if not active:
        return ChillerStep(drive_in, chilled_return, recool_supply, 0.0, 0.0, 0.0, new_state, None)

    cop = model.cop_curve(t)
    c_drive = drive_in.capacity_rate
    c_chill = chilled_return.capacity_rate
    c_recool = recool_supply.capacity_rate

    available = max(0.0, c_drive * (t - model.standby_temp))
    p_d = min(available, chiller_pd_max(model, t, True))
    p_c_full = cop * p_d
    chill_room = max(0.0, c_chill * (chilled_return.temperature - model.chilled_setpoint))
    p_c = min(p_c_full, chilled_demand, chill_room)
    if c_recool == 0.0:
        p_c = 0.0
    if p_c < p_c_full:
        p_d = p_c / cop
    p_reject = p_d + p_c

    drive_out = drive_in if p_d == 0.0 else drive_in.at(t - p_d / c_drive)
    chilled_out = chilled_return if p_c == 0.0 else chilled_return.at(chilled_return.temperature - p_c / c_chill)
    recool_out = recool_supply if p_reject == 0.0 else recool_supply.at(recool_supply.temperature + p_reject / c_recool)
    return ChillerStep(drive_out, chilled_out, recool_out, p_d, p_c, p_reject, new_state, cop)
