"""Steady-state analysis: equilibrium temperature and setpoint sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chiller import ChillerState, chiller_pd_max
from .errors import HotloopError, OutOfRange
from .plant import PlantGraph, SimState, step

EQ_GRID = 0.5
EQ_TOL = 0.01


@dataclass(frozen=True)
class RackSteady:
    """Closed-form steady state of the rack and driving circuits, valve shut.

    All values follow from the rack outlet temperature ``t_out`` alone: the
    cluster fixes the inlet, the return pipe fixes the exchanger outlet, and
    a tank in steady state returns water at ``t_tank - p_d / C_d``.
    """

    t_out: float
    t_in: float
    p_electric: float
    p_r: float
    p_to_air: float
    p_d: float
    p_loss: float
    t_ret: float
    t_tank: float

    @property
    def heat_in_water(self) -> float:
        return self.p_r / self.p_electric if self.p_electric > 0 else math.nan


def rack_steady(plant: PlantGraph, t_out: float, load_fraction: float | None = None,
                room: float | None = None) -> RackSteady:
    cl = plant.cluster
    load = plant.load_fraction if load_fraction is None else load_fraction
    air = plant.room_temp if room is None else room
    c_r = plant.rack_flow * plant.water_cp
    c_d = plant.drive_flow * plant.glycol_cp
    p_el = load * cl.total_power(t_out)[0]
    ua = cl.ua_rack
    p_w = (p_el * (1.0 - cl.psu_air_fraction) - ua * (t_out - air)) / (1.0 - ua / (2.0 * c_r))
    t_in = t_out - p_w / c_r
    ua_p = plant.rack_pipe_ua
    t_h = (c_r * t_in - ua_p * air) / (c_r - ua_p)
    p_d = c_r * (t_out - t_h)
    p_loss = c_r * (t_h - t_in)
    eps_c = plant.drive_effectiveness * min(c_r, c_d)
    if p_d > 0.0 and eps_c > 0.0:
        t_ret = t_out - p_d / eps_c
        t_tank = t_ret + p_d / c_d
    else:
        t_ret = t_tank = t_out
    return RackSteady(t_out, t_in, p_el, p_w, p_el - p_w, p_d, p_loss, t_ret, t_tank)


def chiller_capacity(plant: PlantGraph, t_tank: float) -> float:
    """Drive heat the active chiller can take with the tank at ``t_tank``."""
    ch = plant.chiller
    if t_tank < ch.standby_temp:
        return 0.0
    avail = plant.drive_flow * plant.glycol_cp * (t_tank - ch.standby_temp)
    return min(avail, chiller_pd_max(ch, t_tank, True))


@dataclass(frozen=True)
class Equilibrium:
    t_eq: float | None
    diagnosis: str
    table: tuple[tuple[float, float, float], ...]
    valve_fraction: float = 0.0

    def format_table(self) -> str:
        lines = ["  T_out_C      P_d_W   P_d_max_W"]
        lines += [f"{t:9.2f} {pd:10.1f} {pm:11.1f}" for t, pd, pm in self.table]
        return "\n".join(lines)


def _balance(plant, t):
    rs = rack_steady(plant, t)
    return chiller_capacity(plant, rs.t_tank) - rs.p_d, rs


def solve_equilibrium(plant: PlantGraph, valve_locked: float | None = 0.0) -> Equilibrium:
    """Rack outlet temperature where the chiller's drive capacity meets the delivered heat.

    Scans ``[standby_temp, 80]`` degC on a 0.5 K grid, then bisects the first
    bracket to 0.01 K. Diagnoses:

    * ``"equilibrium"``: a root was found;
    * ``"runaway"``: the delivered heat exceeds capacity everywhere;
    * ``"subcritical"``: the drive circuit never reaches the activation
      temperature (nothing to deliver at standby);
    * ``"regulated"``: only with ``valve_locked=None``, the PID would open the
      valve before the root is reached, so the rack inlet is held at its
      setpoint instead and ``t_eq`` is the outlet that inlet implies.

    Only a shut valve (0) or PID control (None) have a closed form; other
    locked fractions raise ``OutOfRange``.
    """
    if valve_locked not in (None, 0.0, 0):
        raise OutOfRange("closed-form equilibrium needs a shut valve or PID control")
    lo = plant.chiller.standby_temp
    grid = np.arange(lo, 80.0 + 1e-9, EQ_GRID)
    table = []
    fs = []
    for t in grid:
        f, rs = _balance(plant, float(t))
        table.append((float(t), rs.p_d, rs.p_d + f))
        fs.append(f)
    table = tuple(table)
    if rack_steady(plant, lo).p_d <= 0.0 or not plant.chiller_enabled:
        return Equilibrium(None, "subcritical", table)
    root = None
    for i in range(len(grid) - 1):
        if fs[i] < 0.0 <= fs[i + 1]:
            a, b = float(grid[i]), float(grid[i + 1])
            while b - a > EQ_TOL:
                m = 0.5 * (a + b)
                if _balance(plant, m)[0] < 0.0:
                    a = m
                else:
                    b = m
            root = 0.5 * (a + b)
            break
    if root is None and fs[0] >= 0.0:
        root = float(grid[0])
    if root is None:
        return Equilibrium(None, "runaway", table)
    if valve_locked is None:
        t_in_sp = plant.pid.setpoint
        if rack_steady(plant, root).t_in > t_in_sp:
            return Equilibrium(_outlet_for_inlet(plant, t_in_sp), "regulated", table)
    return Equilibrium(root, "equilibrium", table)


def _outlet_for_inlet(plant: PlantGraph, t_in: float, tol: float = 1e-6) -> float:
    """Rack outlet temperature the cluster produces for inlet ``t_in``."""
    a, b = t_in, t_in + 40.0
    while b - a > tol:
        m = 0.5 * (a + b)
        if rack_steady(plant, m).t_in < t_in:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def steady_start(plant: PlantGraph, t_out: float, chilled_demand: float = math.inf) -> SimState:
    """Simulator state sitting at the shut-valve steady state for ``t_out``."""
    rs = rack_steady(plant, t_out)
    active = plant.chiller_enabled and rs.t_tank >= plant.chiller.standby_temp
    return SimState(
        time=0.0, t_rack_in=rs.t_in, t_rack_out=t_out, t_tank=rs.t_tank,
        t_drive_return=rs.t_ret, t_primary=plant.support_threshold,
        t_recool=plant.outdoor_temp + 5.0,
        chiller=ChillerState(active, plant.chiller_enabled),
        pid=plant.pid.with_setpoint(rs.t_in).with_output(0.0),
        load_fraction=plant.load_fraction, room_temp=plant.room_temp,
        outdoor_temp=plant.outdoor_temp, chilled_demand=chilled_demand,
    )


SWEEP_COLUMNS = (
    "setpoint_C", "t_out_C", "t_out_std_K", "t_in_C", "t_core_mean_C", "node_power_W",
    "node_power_rel", "cop", "heat_in_water", "p_d_fraction", "reuse_fraction",
    "valve_fraction", "converged",
)


@dataclass(frozen=True)
class SweepTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def row(self, setpoint: float) -> dict:
        for r in self.rows:
            if abs(r[0] - setpoint) < 1e-9:
                return dict(zip(self.columns, r))
        raise KeyError(setpoint)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(f"{v:.6g}" for v in r) for r in self.rows]
        return "\n".join(lines) + "\n"


def sweep_row(plant: PlantGraph, setpoint: float, settle: float = 3600.0,
              window: float = 1200.0, dt: float = 2.0, tol: float = 0.1) -> tuple[float, ...]:
    """Hold the rack outlet at ``setpoint`` and average the steady window.

    The PID holds the inlet temperature that the cluster maps onto the
    requested outlet. Above the natural equilibrium the chiller would pull
    the tank down, so its chilled output is capped at the value that exactly
    absorbs the delivered drive heat.
    """
    rs = rack_steady(plant, setpoint)
    t_tank = rs.t_tank
    demand = math.inf
    if chiller_capacity(plant, t_tank) >= rs.p_d > 0.0:
        demand = plant.chiller.cop_curve(t_tank) * rs.p_d
    state = steady_start(plant, setpoint, demand)
    n_settle = int(round(settle / dt))
    n_win = int(round(window / dt))
    acc = np.zeros((n_win, 9))
    for _ in range(n_settle):
        state = step(plant, state, dt).state
    for k in range(n_win):
        r = step(plant, state, dt)
        state = r.state
        acc[k] = (state.t_rack_out, state.t_rack_in, r.t_core_mean, r.p_electric, r.p_r,
                  r.p_d, r.cop if state.chiller.active else math.nan, state.valve_fraction,
                  r.p_d_abs)
    t_out = acc[:, 0]
    p_el = acc[:, 3].mean()
    cop = acc[:, 6].mean()
    hiw = acc[:, 4].mean() / p_el if p_el > 0 else math.nan
    n = plant.cluster.n_nodes * state.load_fraction
    node_p = p_el / n if n > 0 else math.nan
    ref = plant.cluster.total_power(plant.cluster.T_ref_low)[0] / plant.cluster.n_nodes
    drift = abs(t_out[-n_win // 4:].mean() - t_out[: n_win // 4].mean())
    converged = abs(t_out.mean() - setpoint) < tol and drift < tol
    return (
        setpoint, t_out.mean(), t_out.std(), acc[:, 1].mean(), acc[:, 2].mean(), node_p,
        node_p / ref - 1.0, cop, hiw, acc[:, 5].mean() / p_el if p_el > 0 else math.nan,
        cop * hiw, acc[:, 7].mean(), float(converged),
    )


def sweep_temperature(plant: PlantGraph, setpoints, **kwargs) -> SweepTable:
    """One steady-state row per rack outlet setpoint (degC, within [30, 75])."""
    rows = []
    for sp in setpoints:
        sp = float(sp)
        if not 30.0 <= sp <= 75.0:
            raise OutOfRange(f"setpoint {sp} outside [30, 75] degC")
        try:
            rows.append(sweep_row(plant, sp, **kwargs))
        except HotloopError:
            rows.append((sp,) + (math.nan,) * (len(SWEEP_COLUMNS) - 2) + (0.0,))
    return SweepTable(SWEEP_COLUMNS, tuple(rows))
