"""Plant configuration: schema, defaults, validation and (de)serialisation.

A configuration document is UTF-8 JSON. Every key is optional; missing keys
take the calibrated defaults below, unknown keys are rejected, and every
error names the dotted path of the offending field. Example::

    {
      "schema_version": 1,
      "seed": 7,
      "chiller": {"standby_temp": 55.0,
                  "cop_curve": [[55, 0.25], [80, 0.55]]},
      "tank": {"mass": 800}
    }
"""
import copy
import dataclasses
import hashlib
import json
import math
import typing
from dataclasses import dataclass, field

from .chiller import DEFAULT_COP, DEFAULT_PC_MAX
from .cluster import DEFAULT_ALPHA
from .errors import ParseError, ValidationError, VersionError
from .manifold import TOPOLOGIES

SCHEMA_VERSION = 1


def _f(default, lo=None, hi=None, lo_open=False, doc=""):
    return field(default=default, metadata={"lo": lo, "hi": hi, "lo_open": lo_open, "doc": doc})


def _curve(points):
    return field(default_factory=lambda: tuple(tuple(p) for p in points.points),
                 metadata={"curve": True})


@dataclass(frozen=True)
class ClusterConfig:
    n_nodes: int = _f(216, 1, 100_000)
    dT_core_low: float = _f(15.0, 0.0, 60.0)
    dT_core_high: float = _f(17.5, 0.0, 60.0)
    T_ref_low: float = _f(49.0, -30.0, 120.0)
    T_ref_high: float = _f(70.0, -30.0, 120.0)
    sigma_core: float = _f(2.8, 0.0, 20.0)
    P0: float = _f(206.0, 0.0, 10_000.0, lo_open=True)
    T_core_ref: float = _f(80.0, -30.0, 150.0)
    sigma_P: float = _f(5.4, 0.0, 1000.0)
    alpha: float = _f(DEFAULT_ALPHA, 0.0, 0.1)
    psu_air_fraction: float = _f(0.12, 0.0, 0.999)
    ua_rack: float = _f(400.0, 0.0, 1e6)
    throttle_temp: float = _f(100.0, 0.0, 150.0)


@dataclass(frozen=True)
class ChillerConfig:
    enabled: bool = True
    standby_temp: float = _f(55.0, 0.0, 120.0)
    hysteresis: float = _f(2.0, 0.0, 20.0)
    cop_curve: tuple = _curve(DEFAULT_COP)
    pc_max_curve: tuple = _curve(DEFAULT_PC_MAX)
    capacity_scale: float = _f(1.0, 0.0, 100.0)
    chilled_setpoint: float = _f(16.0, -10.0, 40.0)


@dataclass(frozen=True)
class PidConfig:
    kp: float = _f(0.005, 0.0, 100.0)
    ki: float = _f(0.001, 0.0, 100.0)
    kd: float = _f(0.0, 0.0, 1000.0)
    setpoint: float = _f(65.0, 0.0, 100.0, doc="rack inlet setpoint, degC")


@dataclass(frozen=True)
class RecoolerConfig:
    ua_max: float = _f(4000.0, 0.0, 1e7, lo_open=True)
    fan_exponent: float = _f(0.8, 0.0, 5.0, lo_open=True)
    fan_power_max: float = _f(800.0, 0.0, 1e6)


@dataclass(frozen=True)
class ManifoldConfig:
    racks: int = _f(3, 1, 1000)
    branch_resistance: float = _f(0.08 / 0.36, 0.0, 1e3, lo_open=True)
    header_resistance: float = _f(0.002, 0.0, 1e3)
    linear_resistance: float = _f(0.0, 0.0, 1e3)
    topology: str = "tichelmann"


@dataclass(frozen=True)
class TankConfig:
    mass: float = _f(800.0, 0.0, 1e6, lo_open=True)


@dataclass(frozen=True)
class CircuitsConfig:
    rack_flow: float = _f(1.17, 0.0, 100.0, lo_open=True, doc="kg/s")
    drive_flow: float = _f(1.36, 0.0, 100.0, lo_open=True)
    primary_flow: float = _f(1.5, 0.0, 100.0, lo_open=True)
    recool_flow: float = _f(2.0, 0.0, 100.0, lo_open=True)
    central_flow: float = _f(2.0, 0.0, 100.0, lo_open=True)
    water_cp: float = _f(4186.0, 0.0, 10_000.0, lo_open=True)
    glycol_cp: float = _f(3600.0, 0.0, 10_000.0, lo_open=True)
    primary_mass: float = _f(20.0, 0.0, 1e6, lo_open=True)
    recool_mass: float = _f(20.0, 0.0, 1e6, lo_open=True)
    rack_pipe_ua: float = _f(110.0, 0.0, 1e5)
    drive_effectiveness: float = _f(0.98, 0.0, 1.0)
    primary_effectiveness: float = _f(0.8, 0.0, 1.0)
    central_effectiveness: float = _f(0.9, 0.0, 1.0)
    pump_power: float = _f(400.0, 0.0, 1e6, doc="all circuit pumps, W")


@dataclass(frozen=True)
class SiteConfig:
    room_temp: float = _f(25.0, -30.0, 60.0)
    outdoor_temp: float = _f(15.0, -30.0, 60.0)
    central_supply_temp: float = _f(8.0, -10.0, 40.0)
    support_threshold: float = _f(20.0, -10.0, 60.0)
    gpu_load: float = _f(12000.0, 0.0, 1e7)
    initial_temp: float = _f(20.0, -30.0, 120.0)
    load_fraction: float = _f(1.0, 0.0, 1.0)


@dataclass(frozen=True)
class PlantConfig:
    schema_version: int = SCHEMA_VERSION
    seed: int = 2012
    dt: float = _f(1.0, 0.0, 10.0, lo_open=True)
    duration: float = _f(21600.0, 0.0, 1e8, lo_open=True)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    chiller: ChillerConfig = field(default_factory=ChillerConfig)
    pid: PidConfig = field(default_factory=PidConfig)
    recooler: RecoolerConfig = field(default_factory=RecoolerConfig)
    manifold: ManifoldConfig = field(default_factory=ManifoldConfig)
    tank: TankConfig = field(default_factory=TankConfig)
    circuits: CircuitsConfig = field(default_factory=CircuitsConfig)
    site: SiteConfig = field(default_factory=SiteConfig)


def _join(path, key):
    return f"{path}.{key}" if path else key


def _coerce(value, tp, path, meta):
    if meta.get("curve"):
        if not isinstance(value, (list, tuple)) or len(value) < 2:
            raise ValidationError("curve needs a list of at least two [x, y] pairs", path)
        pts = []
        for i, p in enumerate(value):
            if (not isinstance(p, (list, tuple)) or len(p) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
                raise ValidationError("expected an [x, y] pair of numbers", f"{path}[{i}]")
            pts.append((float(p[0]), float(p[1])))
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError("curve x values must be strictly increasing", path)
        return tuple(pts)
    if tp is bool:
        if not isinstance(value, bool):
            raise ValidationError(f"expected true/false, got {value!r}", path)
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            else:
                raise ValidationError(f"expected an integer, got {value!r}", path)
    elif tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"expected a number, got {value!r}", path)
        value = float(value)
        if not math.isfinite(value):
            raise ValidationError("must be finite", path)
    elif tp is str:
        if not isinstance(value, str):
            raise ValidationError(f"expected a string, got {value!r}", path)
    lo, hi = meta.get("lo"), meta.get("hi")
    if lo is not None:
        if meta.get("lo_open") and not value > lo:
            raise ValidationError(f"must be > {lo}, got {value}", path)
        if not value >= lo:
            raise ValidationError(f"must be >= {lo}, got {value}", path)
    if hi is not None and not value <= hi:
        raise ValidationError(f"must be <= {hi}, got {value}", path)
    return value


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ValidationError(f"expected a table of keys, got {type(data).__name__}", path or "<root>")
    hints = typing.get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise ValidationError(f"unknown key {unknown[0]!r}", _join(path, unknown[0]))
    kwargs = {}
    for name, value in data.items():
        tp = hints[name]
        sub = _join(path, name)
        if dataclasses.is_dataclass(tp):
            kwargs[name] = _build(tp, value, sub)
        else:
            kwargs[name] = _coerce(value, tp, sub, fields[name].metadata)
    return cls(**kwargs)


def _cross_checks(cfg: PlantConfig) -> None:
    c = cfg.cluster
    if c.T_ref_high <= c.T_ref_low:
        raise ValidationError("must exceed cluster.T_ref_low", "cluster.T_ref_high")
    if cfg.site.support_threshold <= cfg.site.central_supply_temp:
        raise ValidationError("must exceed site.central_supply_temp", "site.support_threshold")
    if cfg.manifold.topology not in TOPOLOGIES:
        raise ValidationError(f"must be one of {TOPOLOGIES}", "manifold.topology")
    cop = cfg.chiller.cop_curve
    if min(y for _, y in cop) <= 0.0:
        raise ValidationError("COP values must be > 0", "chiller.cop_curve")
    active = [y for x, y in cop if x >= cfg.chiller.standby_temp]
    if any(b < a for a, b in zip(active, active[1:])):
        raise ValidationError("COP must be non-decreasing above standby_temp", "chiller.cop_curve")
    if min(y for _, y in cfg.chiller.pc_max_curve) < 0.0:
        raise ValidationError("capacities must be >= 0", "chiller.pc_max_curve")


def from_dict(data: dict) -> PlantConfig:
    data = dict(data)
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}",
                           "schema_version")
    cfg = _build(PlantConfig, data, "")
    _cross_checks(cfg)
    return cfg


def load_config(text: bytes | str = b"") -> PlantConfig:
    """Parse and validate a configuration document; empty input gives defaults."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    if not text.strip():
        return PlantConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed document at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def to_dict(cfg: PlantConfig) -> dict:
    def conv(obj):
        if dataclasses.is_dataclass(obj):
            return {f.name: conv(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if isinstance(obj, tuple):
            return [conv(v) for v in obj]
        return obj
    return conv(cfg)


def save_config(cfg: PlantConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2) + "\n"


def config_hash(cfg: PlantConfig) -> str:
    return hashlib.sha256(save_config(cfg).encode("utf-8")).hexdigest()


def _parse_scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def with_overrides(cfg: PlantConfig, overrides: dict) -> PlantConfig:
    """Return ``cfg`` with dotted-path overrides applied and revalidated.

    String values are parsed as JSON when possible, so ``"56"`` becomes 56
    and ``"[[55, 0.3], [80, 0.6]]"`` becomes a curve.
    """
    data = copy.deepcopy(to_dict(cfg))
    for key, value in overrides.items():
        if isinstance(value, str):
            value = _parse_scalar(value)
        parts = key.split(".")
        node = data
        for i, part in enumerate(parts[:-1]):
            if not isinstance(node.get(part), dict):
                raise ValidationError("unknown key", ".".join(parts[: i + 1]))
            node = node[part]
        if parts[-1] not in node:
            raise ValidationError("unknown key", key)
        node[parts[-1]] = value
    return from_dict(data)
