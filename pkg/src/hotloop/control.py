"""Valve controller for the rack inlet temperature."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfRange


@dataclass(frozen=True, slots=True)
class PidController:
    """Positional PID acting on ``measured - setpoint``.

    The output is the share of rack flow sent through the additional
    (primary-circuit) cooler, clamped to ``[out_min, out_max]``. The integral
    state is the accumulated error in K*s. Integration is skipped whenever the
    output is saturated and the error would push it further out.
    """

    kp: float = 0.005
    ki: float = 0.001
    kd: float = 0.0
    setpoint: float = 65.0
    integral: float = 0.0
    prev_measured: float | None = None
    out_min: float = 0.0
    out_max: float = 1.0

    def with_setpoint(self, setpoint: float) -> PidController:
        return PidController(self.kp, self.ki, self.kd, setpoint, self.integral,
                             self.prev_measured, self.out_min, self.out_max)

    def with_output(self, output: float) -> PidController:
        """Preload the integral so a zero-error update returns ``output``."""
        integral = output / self.ki if self.ki > 0 else 0.0
        return PidController(self.kp, self.ki, self.kd, self.setpoint, integral,
                             self.prev_measured, self.out_min, self.out_max)


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def pid_update(ctrl: PidController, measured: float, dt: float) -> tuple[float, PidController]:
    if dt <= 0.0:
        raise OutOfRange(f"dt must be > 0, got {dt}")
    error = measured - ctrl.setpoint
    deriv = 0.0 if ctrl.prev_measured is None else (measured - ctrl.prev_measured) / dt
    fixed = ctrl.kp * error + ctrl.kd * deriv

    integral = ctrl.integral + error * dt
    raw = fixed + ctrl.ki * integral
    if (raw > ctrl.out_max and error > 0.0) or (raw < ctrl.out_min and error < 0.0):
        integral = ctrl.integral
    if ctrl.ki > 0.0:
        integral = _clamp(integral, ctrl.out_min / ctrl.ki, ctrl.out_max / ctrl.ki)
    out = _clamp(fixed + ctrl.ki * integral, ctrl.out_min, ctrl.out_max)
    new = PidController(ctrl.kp, ctrl.ki, ctrl.kd, ctrl.setpoint, integral, measured,
                        ctrl.out_min, ctrl.out_max)
    return out, new
