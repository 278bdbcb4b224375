"""Outdoor fan-driven dry recooler."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfRange
from .thermo import FluidStream


@dataclass(frozen=True)
class RecoolerModel:
    """Air-cooled exchanger whose conductance scales with fan speed.

    ``UA = ua_max * speed**fan_exponent``; fan power follows the cube law.
    """

    ua_max: float = 4000.0
    fan_exponent: float = 0.8
    fan_power_max: float = 800.0
    ambient: float = 15.0

    def __post_init__(self):
        if not self.ua_max > 0.0:
            raise OutOfRange(f"ua_max must be > 0, got {self.ua_max}")
        if self.fan_exponent <= 0.0:
            raise OutOfRange(f"fan_exponent must be > 0, got {self.fan_exponent}")
        if self.fan_power_max < 0.0:
            raise OutOfRange(f"fan_power_max must be >= 0, got {self.fan_power_max}")


def recooler_step(
    model: RecoolerModel, inlet: FluidStream, fan_speed: float, dt: float = 1.0
) -> tuple[FluidStream, float, float]:
    """Reject heat to outdoor air.

    Returns:
        ``(outlet, q_rejected, fan_power)``. The outlet never drops below
        ambient, and no heat is taken up when the water is colder than air.
    """
    if not 0.0 <= fan_speed <= 1.0:
        raise OutOfRange(f"fan_speed must lie in [0, 1], got {fan_speed}")
    fan_power = model.fan_power_max * fan_speed ** 3
    dt_air = inlet.temperature - model.ambient
    c = inlet.capacity_rate
    if fan_speed == 0.0 or dt_air <= 0.0 or c == 0.0:
        return inlet, 0.0, fan_power
    ua = model.ua_max * fan_speed ** model.fan_exponent
    q = min(ua * dt_air, c * dt_air)
    return inlet.at(inlet.temperature - q / c), q, fan_power


def fan_speed_for_duty(model: RecoolerModel, duty: float, t_in: float) -> float:
    """Fan speed whose conductance just rejects ``duty`` watts at inlet ``t_in``.

    This is the default fan policy: speed tracks the chiller's reject heat.
    """
    dt_air = t_in - model.ambient
    if duty <= 0.0 or dt_air <= 0.0:
        return 0.0
    ua_needed = duty / dt_air
    if ua_needed >= model.ua_max:
        return 1.0
    return (ua_needed / model.ua_max) ** (1.0 / model.fan_exponent)
