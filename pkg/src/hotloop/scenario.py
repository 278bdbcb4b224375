"""Timed operator events applied during a run.

A scenario document is a JSON list of events, for example::

    [
      {"at": 3600, "action": "disable_chiller"},
      {"at": 7200, "action": "set_ambient", "value": 30, "target": "outdoor"},
      {"at": 9000, "action": "lock_valve", "value": 0.0}
    ]
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .chiller import ChillerState
from .errors import ParseError, ValidationError

ACTIONS = (
    "set_load_fraction",
    "disable_chiller",
    "enable_chiller",
    "set_setpoint",
    "set_ambient",
    "lock_valve",
)
_NEEDS_VALUE = {"set_load_fraction", "set_setpoint", "set_ambient"}
_TARGETS = ("room", "outdoor")


@dataclass(frozen=True)
class ScenarioEvent:
    """One event. ``value`` is unused by the chiller on/off actions.

    ``lock_valve`` with ``value=None`` releases the valve back to the PID.
    ``target`` selects which ambient ``set_ambient`` changes.
    """

    at: float
    action: str
    value: float | None = None
    target: str = "room"


def _validate(event: ScenarioEvent, path: str) -> None:
    if not (math.isfinite(event.at) and event.at >= 0.0):
        raise ValidationError(f"event time must be finite and >= 0, got {event.at}", f"{path}.at")
    if event.action not in ACTIONS:
        raise ValidationError(f"unknown action {event.action!r}", f"{path}.action")
    if event.action in _NEEDS_VALUE and event.value is None:
        raise ValidationError("action needs a value", f"{path}.value")
    v = event.value
    if event.action == "set_load_fraction" and not 0.0 <= v <= 1.0:
        raise ValidationError(f"load fraction must lie in [0, 1], got {v}", f"{path}.value")
    if event.action == "lock_valve" and v is not None and not 0.0 <= v <= 1.0:
        raise ValidationError(f"valve fraction must lie in [0, 1], got {v}", f"{path}.value")
    if event.action in ("set_setpoint", "set_ambient") and not -30.0 <= v <= 120.0:
        raise ValidationError(f"temperature out of range: {v}", f"{path}.value")
    if event.target not in _TARGETS:
        raise ValidationError(f"target must be one of {_TARGETS}", f"{path}.target")


def validate_scenario(events) -> tuple[ScenarioEvent, ...]:
    events = tuple(events)
    for i, ev in enumerate(events):
        _validate(ev, f"[{i}]")
        if i and ev.at < events[i - 1].at:
            raise ValidationError("event times must be non-decreasing", f"[{i}].at")
    return events


def load_scenario(text: bytes | str) -> tuple[ScenarioEvent, ...]:
    """Parse and validate a JSON event list."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed scenario at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, list):
        raise ValidationError("scenario must be a list of events", "<root>")
    events = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ValidationError("event must be a table", f"[{i}]")
        unknown = sorted(set(item) - {"at", "action", "value", "target"})
        if unknown:
            raise ValidationError(f"unknown key {unknown[0]!r}", f"[{i}].{unknown[0]}")
        if "at" not in item or "action" not in item:
            raise ValidationError("event needs 'at' and 'action'", f"[{i}]")
        at, value = item["at"], item.get("value")
        if isinstance(at, bool) or not isinstance(at, (int, float)):
            raise ValidationError("expected a number", f"[{i}].at")
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise ValidationError("expected a number", f"[{i}].value")
        events.append(ScenarioEvent(float(at), str(item["action"]),
                                    None if value is None else float(value),
                                    str(item.get("target", "room"))))
    return validate_scenario(events)


def apply_event(plant, state, event: ScenarioEvent):
    """Return ``state`` with ``event`` applied."""
    a = event.action
    if a == "set_load_fraction":
        return replace(state, load_fraction=event.value)
    if a == "disable_chiller":
        return replace(state, chiller=ChillerState(False, False))
    if a == "enable_chiller":
        return replace(state, chiller=ChillerState(state.chiller.active, True))
    if a == "set_setpoint":
        return replace(state, pid=state.pid.with_setpoint(event.value))
    if a == "set_ambient":
        key = "room_temp" if event.target == "room" else "outdoor_temp"
        return replace(state, **{key: event.value})
    if a == "lock_valve":
        return replace(state, valve_lock=event.value)
    raise ValidationError(f"unknown action {a!r}", "action")
