"""Time-series records, sensor-noise emulation and the delimited file format.

File format: comma-separated, a header row of column names carrying a unit
suffix (``t_rack_out_C``, ``p_d_W``, ``m_rack_kg_s``), one row per sample,
values written with 6 significant digits, LF line endings.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaMismatch, TooFewSamples

COLUMNS: tuple[str, ...] = (
    "time_s",
    "t_rack_in_C",
    "t_rack_out_C",
    "t_core_mean_C",
    "t_tank_C",
    "t_drive_return_C",
    "t_primary_C",
    "t_recool_C",
    "valve_fraction",
    "fan_speed",
    "chiller_active",
    "cop",
    "p_electric_W",
    "p_r_W",
    "p_to_air_W",
    "p_d_W",
    "p_d_abs_W",
    "p_add_W",
    "p_loss_W",
    "p_c_W",
    "p_reject_W",
    "q_central_W",
    "q_recooler_W",
    "p_gpu_W",
    "p_fan_W",
    "p_pump_W",
    "storage_W",
    "m_rack_kg_s",
    "m_drive_kg_s",
    "m_primary_kg_s",
    "m_recool_kg_s",
    "audit_residual",
)


@dataclass(eq=False)
class TimeSeries:
    """Column-oriented samples with a fixed column order.

    ``true`` holds the noise-free series when this one carries sensor noise.
    """

    columns: tuple[str, ...]
    data: np.ndarray
    metadata: dict = field(default_factory=dict)
    true: TimeSeries | None = None

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.columns))
        if len(self) > 1 and "time_s" in self.columns:
            t = self["time_s"]
            if np.any(np.diff(t) < 0):
                raise SchemaMismatch("time column must be non-decreasing")

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def last(self, name: str) -> float:
        return float(self[name][-1])

    def to_dict(self) -> dict[str, np.ndarray]:
        return {c: self[c] for c in self.columns}


def write_timeseries(series: TimeSeries, destination) -> int:
    """Write ``series`` to a path or binary stream; returns the byte count."""
    buf = io.StringIO()
    buf.write(",".join(series.columns) + "\n")
    for row in series.data:
        buf.write(",".join(f"{v:.6g}" for v in row) + "\n")
    payload = buf.getvalue().encode("ascii")
    try:
        if isinstance(destination, (str, os.PathLike)):
            with open(destination, "wb") as fh:
                fh.write(payload)
        else:
            destination.write(payload)
    except OSError as exc:
        raise IOError(f"cannot write time series: {exc}") from exc
    return len(payload)


def read_timeseries(source, columns: tuple[str, ...] | None = COLUMNS) -> TimeSeries:
    """Parse bytes (or a path) written by :func:`write_timeseries`.

    With ``columns`` given, the header must contain every expected column;
    a missing one raises :class:`SchemaMismatch` naming it.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            source = fh.read()
    lines = source.decode("ascii").split("\n")
    if not lines or not lines[0]:
        raise SchemaMismatch("missing header row")
    header = tuple(lines[0].split(","))
    if columns is not None:
        for name in columns:
            if name not in header:
                raise SchemaMismatch(f"missing column {name!r}")
        extra = [h for h in header if h not in columns]
        if extra:
            raise SchemaMismatch(f"unexpected column {extra[0]!r}")
    rows = [ln.split(",") for ln in lines[1:] if ln]
    for i, r in enumerate(rows):
        if len(r) != len(header):
            raise SchemaMismatch(f"row {i + 1} has {len(r)} fields, header has {len(header)}")
    data = np.array([[float(v) for v in r] for r in rows], dtype=float).reshape(-1, len(header))
    ts = TimeSeries(header, data)
    if columns is not None and header != tuple(columns):
        idx = [header.index(c) for c in columns]
        ts = TimeSeries(tuple(columns), data[:, idx])
    return ts


@dataclass(frozen=True)
class SensorSpec:
    """Accuracy of each instrument, read as one Gaussian standard deviation.

    Attributes:
        node_temp_sigma: chip-internal and node-level sensors, K.
        water_temp_sigma: sensors in direct contact with the water, K.
        rack_flow_rel: ultrasonic meter on the rack circuit, relative.
        other_flow_rel: the simpler meters on every other circuit, relative.
    """

    node_temp_sigma: float = 1.0
    water_temp_sigma: float = 0.2
    rack_flow_rel: float = 0.01
    other_flow_rel: float = 0.10

    def __post_init__(self):
        for name in ("node_temp_sigma", "water_temp_sigma", "rack_flow_rel", "other_flow_rel"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def noise_for(self, column: str) -> tuple[str, float] | None:
        """``("abs"|"rel", sigma)`` for a column, or None if it is not a sensor."""
        if column == "t_core_mean_C":
            return "abs", self.node_temp_sigma
        if column.startswith("t_") and column.endswith("_C"):
            return "abs", self.water_temp_sigma
        if column == "m_rack_kg_s":
            return "rel", self.rack_flow_rel
        if column.startswith("m_") and column.endswith("_kg_s"):
            return "rel", self.other_flow_rel
        return None


def apply_sensor_noise(series: TimeSeries, spec: SensorSpec, seed: int) -> TimeSeries:
    """Add independent seeded Gaussian noise to every sensor column."""
    if len(series) == 0:
        raise ValueError("series is empty")
    rng = np.random.default_rng(seed)
    noisy = series.data.copy()
    for j, name in enumerate(series.columns):
        kind = spec.noise_for(name)
        if kind is None:
            continue
        mode, sigma = kind
        draw = rng.standard_normal(len(series))
        if sigma == 0.0:
            continue
        if mode == "abs":
            noisy[:, j] += sigma * draw
        else:
            noisy[:, j] *= 1.0 + sigma * draw
    meta = dict(series.metadata)
    meta["noise_seed"] = int(seed)
    meta["sensor_spec"] = {
        "node_temp_sigma": spec.node_temp_sigma,
        "water_temp_sigma": spec.water_temp_sigma,
        "rack_flow_rel": spec.rack_flow_rel,
        "other_flow_rel": spec.other_flow_rel,
    }
    return TimeSeries(series.columns, noisy, meta, true=series)


def fit_gaussian(samples) -> tuple[float, float]:
    """Maximum-likelihood Gaussian fit: sample mean and population sigma.

    This is the fit used for every histogram reproduction.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 3:
        raise TooFewSamples(f"need at least 3 samples, got {x.size}")
    mu = float(np.mean(x))
    return mu, float(math.sqrt(np.mean((x - mu) ** 2)))
