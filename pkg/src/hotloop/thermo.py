"""Thermal-transport primitives shared by all plant components.

Every circuit is described by :class:`FluidStream` values that flow from one
component to the next. Components are pure functions: they take streams in and
return new streams plus the heat they moved, so a whole plant step can be
audited by summing the returned heat flows.

Units are SI throughout: kg/s, degrees Celsius, J/(kg K), W, s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IncompatibleFluid, OutOfRange, StabilityViolation

CP_WATER = 4186.0
CP_GLYCOL = 3600.0

PLANT_T_MIN = -30.0
PLANT_T_MAX = 120.0


def check_temperature(value: float, name: str = "temperature") -> float:
    """Validate a temperature against the plant-realistic band."""
    if not math.isfinite(value):
        raise OutOfRange(f"{name} must be finite, got {value!r}")
    if not PLANT_T_MIN <= value <= PLANT_T_MAX:
        raise OutOfRange(f"{name}={value} outside [{PLANT_T_MIN}, {PLANT_T_MAX}] degC")
    return value


@dataclass(frozen=True, slots=True)
class FluidStream:
    """A directed flow of liquid.

    Attributes:
        mass_flow: kg/s, non-negative.
        temperature: degC.
        specific_heat: J/(kg K), positive.
    """

    mass_flow: float
    temperature: float
    specific_heat: float = CP_WATER

    def __post_init__(self):
        if not self.mass_flow >= 0.0:
            raise OutOfRange(f"mass_flow must be >= 0, got {self.mass_flow}")
        if not self.specific_heat > 0.0:
            raise OutOfRange(f"specific_heat must be > 0, got {self.specific_heat}")

    @property
    def capacity_rate(self) -> float:
        """Heat capacity rate m*cp in W/K."""
        return self.mass_flow * self.specific_heat

    def at(self, temperature: float) -> FluidStream:
        return FluidStream(self.mass_flow, temperature, self.specific_heat)


@dataclass(frozen=True, slots=True)
class ThermalMass:
    """A well-mixed lump of liquid (buffer tank, circuit pipework)."""

    mass: float
    temperature: float
    specific_heat: float = CP_WATER

    def __post_init__(self):
        if not self.mass > 0.0:
            raise OutOfRange(f"mass must be > 0, got {self.mass}")
        if not self.specific_heat > 0.0:
            raise OutOfRange(f"specific_heat must be > 0, got {self.specific_heat}")

    @property
    def heat_capacity(self) -> float:
        return self.mass * self.specific_heat


def _same_fluid(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * max(abs(a), abs(b))


def mix_streams(a: FluidStream, b: FluidStream) -> FluidStream:
    """Adiabatic junction of two streams of the same fluid."""
    if not _same_fluid(a.specific_heat, b.specific_heat):
        raise IncompatibleFluid(
            f"cannot mix cp={a.specific_heat} with cp={b.specific_heat}"
        )
    m = a.mass_flow + b.mass_flow
    if m == 0.0:
        return FluidStream(0.0, 0.5 * (a.temperature + b.temperature), a.specific_heat)
    t = (a.mass_flow * a.temperature + b.mass_flow * b.temperature) / m
    return FluidStream(m, t, a.specific_heat)


def split_stream(s: FluidStream, fraction: float) -> tuple[FluidStream, FluidStream]:
    """Divide a stream; the first branch receives ``fraction`` of the flow."""
    if not 0.0 <= fraction <= 1.0:
        raise OutOfRange(f"fraction must lie in [0, 1], got {fraction}")
    first = fraction * s.mass_flow
    return (
        FluidStream(first, s.temperature, s.specific_heat),
        FluidStream(s.mass_flow - first, s.temperature, s.specific_heat),
    )


def hx_transfer(
    hot_in: FluidStream, cold_in: FluidStream, effectiveness: float
) -> tuple[FluidStream, FluidStream, float]:
    """Passive two-stream heat exchanger, effectiveness model.

    ``q = effectiveness * C_min * (T_hot,in - T_cold,in)``; no heat moves when
    the nominal hot side is the colder one.

    Returns:
        ``(hot_out, cold_out, q)`` with ``q`` in W.
    """
    if not 0.0 <= effectiveness <= 1.0:
        raise OutOfRange(f"effectiveness must lie in [0, 1], got {effectiveness}")
    dt = hot_in.temperature - cold_in.temperature
    c_hot = hot_in.mass_flow * hot_in.specific_heat
    c_cold = cold_in.mass_flow * cold_in.specific_heat
    if dt <= 0.0 or c_hot == 0.0 or c_cold == 0.0 or effectiveness == 0.0:
        return hot_in, cold_in, 0.0
    q = effectiveness * min(c_hot, c_cold) * dt
    hot_out = FluidStream(hot_in.mass_flow, hot_in.temperature - q / c_hot, hot_in.specific_heat)
    cold_out = FluidStream(cold_in.mass_flow, cold_in.temperature + q / c_cold, cold_in.specific_heat)
    return hot_out, cold_out, q


def pipe_loss(s: FluidStream, ua: float, ambient: float) -> tuple[FluidStream, float]:
    """Heat lost from a pipe run with conductance ``ua`` (W/K) to ambient air.

    The loss is evaluated at the inlet temperature. It is negative when the
    air is warmer than the water.
    """
    if ua < 0.0:
        raise OutOfRange(f"ua must be >= 0, got {ua}")
    c = s.mass_flow * s.specific_heat
    if ua == 0.0 or c == 0.0:
        return s, 0.0
    q = ua * (s.temperature - ambient)
    return FluidStream(s.mass_flow, s.temperature - q / c, s.specific_heat), q


def advance_thermal_mass(
    tm: ThermalMass, inflow: FluidStream, dt: float, method: str = "exact"
) -> tuple[ThermalMass, FluidStream]:
    """Advance a well-mixed mass fed by ``inflow`` over one step.

    ``method="exact"`` integrates ``dT/dt = m*(T_in - T)/M`` analytically and
    the outflow leaves at the updated temperature.

    ``method="explicit"`` is the flux-conservative forward update
    ``T' = T + m*dt*(T_in - T)/M`` whose outflow leaves at the start-of-step
    temperature. Stored energy then equals inflow minus outflow enthalpy to
    rounding, which the plant energy audit relies on. It requires
    ``m*dt/M <= 1``.
    """
    if dt <= 0.0:
        raise OutOfRange(f"dt must be > 0, got {dt}")
    if not _same_fluid(tm.specific_heat, inflow.specific_heat):
        raise IncompatibleFluid(
            f"inflow cp={inflow.specific_heat} differs from mass cp={tm.specific_heat}"
        )
    k = inflow.mass_flow * dt / tm.mass
    if method == "exact":
        t_new = inflow.temperature + (tm.temperature - inflow.temperature) * math.exp(-k)
        out_t = t_new
    elif method == "explicit":
        if k > 1.0:
            raise StabilityViolation(
                f"m*dt/M = {k:.3g} > 1 (mass {tm.mass} kg, flow {inflow.mass_flow} kg/s, dt {dt} s)"
            )
        t_new = tm.temperature + k * (inflow.temperature - tm.temperature)
        out_t = tm.temperature
    else:
        raise ValueError(f"unknown method {method!r}")
    return (
        ThermalMass(tm.mass, t_new, tm.specific_heat),
        FluidStream(inflow.mass_flow, out_t, inflow.specific_heat),
    )
