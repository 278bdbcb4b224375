"""The compute cluster as a heat source.

Each node has a static core-temperature offset and a static power offset,
both drawn once from a seeded Gaussian to represent chip-to-chip
manufacturing spread. Node power grows linearly with core temperature, and
core temperature sits a slightly temperature-dependent margin above the rack
outlet water.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, NoConvergence, OutOfRange, ZeroFlow
from .thermo import FluidStream


def core_margin(t_out: float, lo: float, hi: float, t_lo: float, t_hi: float) -> float:
    """Core-to-water temperature difference, interpolated and clamped."""
    if t_out <= t_lo:
        return lo
    if t_out >= t_hi:
        return hi
    return lo + (hi - lo) * (t_out - t_lo) / (t_hi - t_lo)


def alpha_from_ratio(
    ratio: float = 1.07,
    t_out_low: float = 49.0,
    t_out_high: float = 70.0,
    margin_low: float = 15.0,
    margin_high: float = 17.5,
    t_core_ref: float = 80.0,
) -> float:
    """Power-temperature coefficient giving ``P(t_out_high)/P(t_out_low) == ratio``.

    Solves ``1 + a*(c_hi - ref) = ratio * (1 + a*(c_lo - ref))`` for the mean
    node, with core temperatures ``c = t_out + margin``.
    """
    c_lo = t_out_low + margin_low - t_core_ref
    c_hi = t_out_high + margin_high - t_core_ref
    return (ratio - 1.0) / (c_hi - ratio * c_lo)


DEFAULT_ALPHA = alpha_from_ratio()


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Parameters and per-node offsets of the compute cluster.

    Use :func:`make_cluster` to draw the offsets from a seed.
    """

    n_nodes: int = 216
    dT_core_low: float = 15.0
    dT_core_high: float = 17.5
    T_ref_low: float = 49.0
    T_ref_high: float = 70.0
    sigma_core: float = 2.8
    P0: float = 206.0
    T_core_ref: float = 80.0
    sigma_P: float = 5.4
    alpha: float = DEFAULT_ALPHA
    psu_air_fraction: float = 0.12
    ua_rack: float = 400.0
    throttle_temp: float = 100.0
    seed: int = 0
    core_offsets: np.ndarray = field(default=None, repr=False)
    power_offsets: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_nodes <= 0:
            raise OutOfRange(f"n_nodes must be > 0, got {self.n_nodes}")
        if not 0.0 <= self.psu_air_fraction < 1.0:
            raise OutOfRange(f"psu_air_fraction must lie in [0, 1), got {self.psu_air_fraction}")
        if self.alpha < 0.0:
            raise OutOfRange(f"alpha must be >= 0, got {self.alpha}")
        if self.ua_rack < 0.0:
            raise OutOfRange(f"ua_rack must be >= 0, got {self.ua_rack}")
        if self.core_offsets is None or self.power_offsets is None:
            rng = np.random.default_rng(self.seed)
            core = rng.normal(0.0, self.sigma_core, self.n_nodes)
            power = rng.normal(0.0, self.sigma_P, self.n_nodes)
            object.__setattr__(self, "core_offsets", core)
            object.__setattr__(self, "power_offsets", power)
        core = np.asarray(self.core_offsets, dtype=float)
        power = np.asarray(self.power_offsets, dtype=float)
        if core.shape != (self.n_nodes,) or power.shape != (self.n_nodes,):
            raise OutOfRange("offset arrays must have length n_nodes")
        core.flags.writeable = False
        power.flags.writeable = False
        object.__setattr__(self, "core_offsets", core)
        object.__setattr__(self, "power_offsets", power)
        base = self.P0 + power
        # sums for the closed-form total when no node throttles
        object.__setattr__(self, "_s0", float(base.sum()))
        object.__setattr__(self, "_s1", float((base * core).sum()))
        object.__setattr__(self, "_max_offset", float(core.max()))
        object.__setattr__(self, "_mean_offset", float(core.mean()))

    def margin(self, t_out: float) -> float:
        return core_margin(
            t_out, self.dT_core_low, self.dT_core_high, self.T_ref_low, self.T_ref_high
        )

    def core_temperatures(self, t_out_water: float) -> np.ndarray:
        return t_out_water + self.margin(t_out_water) + self.core_offsets

    def node_powers(self, t_core) -> np.ndarray:
        """Per-node power at the given core temperature(s), throttling applied."""
        t = np.minimum(np.asarray(t_core, dtype=float), self.throttle_temp)
        return (self.P0 + self.power_offsets) * (1.0 + self.alpha * (t - self.T_core_ref))

    def total_power(self, t_out_water: float) -> tuple[float, tuple[int, ...]]:
        """Sum of node powers at full load and the indices of throttling nodes."""
        m = self.margin(t_out_water)
        if t_out_water + m + self._max_offset < self.throttle_temp:
            return self._s0 * (1.0 + self.alpha * (t_out_water + m - self.T_core_ref)) + self.alpha * self._s1, ()
        cores = t_out_water + m + self.core_offsets
        throttled = tuple(int(i) for i in np.flatnonzero(cores >= self.throttle_temp))
        return float(self.node_powers(cores).sum()), throttled


def make_cluster(seed: int = 0, **params) -> ClusterModel:
    return ClusterModel(seed=seed, **params)


def _check_index(model: ClusterModel, node_index: int) -> None:
    if not 0 <= node_index < model.n_nodes:
        raise IndexOutOfRange(f"node_index {node_index} not in [0, {model.n_nodes})")


def core_temperature(model: ClusterModel, t_out_water: float, node_index: int) -> float:
    _check_index(model, node_index)
    return t_out_water + model.margin(t_out_water) + float(model.core_offsets[node_index])


def node_power(model: ClusterModel, t_core: float, node_index: int) -> float:
    _check_index(model, node_index)
    t = min(t_core, model.throttle_temp)
    p = model.P0 + float(model.power_offsets[node_index])
    return p * (1.0 + model.alpha * (t - model.T_core_ref))


@dataclass(frozen=True, slots=True)
class ClusterStep:
    outlet: FluidStream
    p_electric: float
    p_to_water: float
    p_to_air: float
    throttling: tuple[int, ...]
    t_core_mean: float
    iterations: int


def cluster_step(
    model: ClusterModel,
    inlet: FluidStream,
    air_temp: float,
    load_fraction: float = 1.0,
    guess: float | None = None,
    tol: float = 1e-4,
    max_iter: int = 100,
    relaxation: float = 1.0,
) -> ClusterStep:
    """Heat the rack water with the cluster's dissipated power.

    Outlet temperature, node power and core temperature depend on each other;
    the loop is closed by relaxed fixed-point iteration on the outlet
    temperature until successive iterates differ by less than ``tol``.
    The returned heat flows always close exactly:
    ``p_electric == p_to_water + p_to_air`` and the outlet temperature is
    ``inlet + p_to_water / (m * cp)``.

    Raises:
        ZeroFlow: if the inlet carries no water.
        NoConvergence: after ``max_iter`` iterations.
    """
    c = inlet.mass_flow * inlet.specific_heat
    if c <= 0.0:
        raise ZeroFlow("cluster inlet has zero mass flow")
    t_in = inlet.temperature
    t_out = t_in + 5.0 if guess is None else guess
    psu = model.psu_air_fraction
    ua = model.ua_rack
    for it in range(1, max_iter + 1):
        p_nodes, throttled = model.total_power(t_out)
        p_el = load_fraction * p_nodes
        p_air = psu * p_el + ua * (0.5 * (t_in + t_out) - air_temp)
        p_w = p_el - p_air
        t_new = t_in + p_w / c
        if abs(t_new - t_out) < tol:
            return ClusterStep(
                FluidStream(inlet.mass_flow, t_new, inlet.specific_heat),
                p_el, p_w, p_air, throttled,
                t_new + model.margin(t_new) + model._mean_offset,
                it,
            )
        t_out = t_out + relaxation * (t_new - t_out)
    raise NoConvergence(f"cluster fixed point not reached in {max_iter} iterations")


def heat_in_water_fraction(step: ClusterStep) -> float:
    return step.p_to_water / step.p_electric if step.p_electric > 0 else float("nan")
