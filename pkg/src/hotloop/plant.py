"""The five-circuit plant and its time stepping.

Circuits:

1. central cooling: an infinite 8 degC source reached through an exchanger
   that engages once the primary supply exceeds the support threshold;
2. primary cooling: chilled by the chiller, heated by the GPU cluster and by
   the additional-cooling path of the rack circuit (one lumped mass);
3. rack cooling: cluster, exchanger to the driving circuit, 3-way valve
   diverting part of the flow through the exchanger to the primary circuit,
   return pipe (no thermal mass, solved algebraically each step);
4. driving: buffer tank feeding the chiller (the tank is the lumped mass);
5. recooling: chiller reject heat to the dry recooler (one lumped mass).

Within a step every lumped mass emits its start-of-step temperature, the
streams are propagated once in flow order, and each mass then absorbs the net
enthalpy it received. That keeps the energy audit closed to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .chiller import ChillerModel, ChillerState, chiller_step
from .cluster import ClusterModel, ClusterStep, cluster_step
from .config import PlantConfig
from .control import PidController, pid_update
from .curves import PiecewiseLinear
from .errors import InvalidConfig, NoConvergence, OutOfRange, StabilityViolation
from .manifold import ManifoldModel, manifold_flows
from .recooler import RecoolerModel, fan_speed_for_duty, recooler_step
from .telemetry import COLUMNS, TimeSeries
from .thermo import FluidStream, hx_transfer, mix_streams, pipe_loss, split_stream

DT_MAX = 10.0
LITRE_PER_KG = 1.0


FanPolicy = Callable[[RecoolerModel, float, float], float]


@dataclass(frozen=True, eq=False)
class PlantGraph:
    """Component instances and fixed circuit parameters."""

    cluster: ClusterModel
    chiller: ChillerModel
    recooler: RecoolerModel
    manifold: ManifoldModel
    pid: PidController
    water_cp: float
    glycol_cp: float
    rack_flow: float
    drive_flow: float
    primary_flow: float
    recool_flow: float
    central_flow: float
    tank_mass: float
    primary_mass: float
    recool_mass: float
    rack_pipe_ua: float
    drive_effectiveness: float
    primary_effectiveness: float
    central_effectiveness: float
    pump_power: float
    room_temp: float
    outdoor_temp: float
    central_supply_temp: float
    support_threshold: float
    gpu_load: float
    initial_temp: float
    load_fraction: float
    chiller_enabled: bool = True
    fan_policy: FanPolicy = fan_speed_for_duty
    branch_flows: np.ndarray = field(default=None, repr=False)
    config: PlantConfig | None = field(default=None, repr=False)

    @property
    def n_circuits(self) -> int:
        return 5


@dataclass(frozen=True, slots=True)
class SimState:
    time: float
    t_rack_in: float
    t_rack_out: float
    t_tank: float
    t_drive_return: float
    t_primary: float
    t_recool: float
    chiller: ChillerState
    pid: PidController
    valve_fraction: float = 0.0
    fan_speed: float = 0.0
    load_fraction: float = 1.0
    room_temp: float = 25.0
    outdoor_temp: float = 15.0
    valve_lock: float | None = None
    chilled_demand: float = math.inf

    def __post_init__(self):
        for name in ("t_rack_in", "t_rack_out", "t_tank", "t_drive_return", "t_primary", "t_recool"):
            if not math.isfinite(getattr(self, name)):
                raise OutOfRange(f"state temperature {name} is not finite")


@dataclass(frozen=True, slots=True)
class StepResult:
    state: SimState
    t_core_mean: float
    cop: float
    p_electric: float
    p_r: float
    p_to_air: float
    p_d: float
    p_d_abs: float
    p_add: float
    p_loss: float
    p_c: float
    p_reject: float
    q_central: float
    q_recooler: float
    p_gpu: float
    p_fan: float
    p_pump: float
    storage_tank: float
    storage_primary: float
    storage_recool: float
    m_rack: float
    m_drive: float
    m_primary: float
    m_recool: float
    throttled: int = 0

    @property
    def storage(self) -> float:
        return self.storage_tank + self.storage_primary + self.storage_recool

    @property
    def heat_in_water(self) -> float:
        return self.p_r / self.p_electric if self.p_electric > 0 else math.nan


def build_plant(config: PlantConfig | None = None) -> PlantGraph:
    """Instantiate every component from a validated configuration."""
    cfg = config or PlantConfig()
    try:
        cc = cfg.cluster
        cluster = ClusterModel(
            n_nodes=cc.n_nodes, dT_core_low=cc.dT_core_low, dT_core_high=cc.dT_core_high,
            T_ref_low=cc.T_ref_low, T_ref_high=cc.T_ref_high, sigma_core=cc.sigma_core,
            P0=cc.P0, T_core_ref=cc.T_core_ref, sigma_P=cc.sigma_P, alpha=cc.alpha,
            psu_air_fraction=cc.psu_air_fraction, ua_rack=cc.ua_rack,
            throttle_temp=cc.throttle_temp, seed=cfg.seed,
        )
        ch = cfg.chiller
        chiller = ChillerModel(
            standby_temp=ch.standby_temp, hysteresis=ch.hysteresis,
            cop_curve=PiecewiseLinear(ch.cop_curve),
            pc_max_curve=PiecewiseLinear(ch.pc_max_curve).scaled(ch.capacity_scale),
            chilled_setpoint=ch.chilled_setpoint,
        )
        rc = cfg.recooler
        recooler = RecoolerModel(rc.ua_max, rc.fan_exponent, rc.fan_power_max, cfg.site.outdoor_temp)
        mc = cfg.manifold
        per_rack = -(-cc.n_nodes // mc.racks)
        manifold = ManifoldModel(per_rack, mc.branch_resistance, mc.header_resistance,
                                 mc.topology, mc.linear_resistance)
        pc = cfg.pid
        pid = PidController(pc.kp, pc.ki, pc.kd, pc.setpoint)
    except (OutOfRange, ValueError) as exc:
        raise InvalidConfig(str(exc)) from exc
    ci = cfg.circuits
    site = cfg.site
    if site.support_threshold <= site.central_supply_temp:
        raise InvalidConfig("must exceed site.central_supply_temp", "site.support_threshold")
    rack_l_min = ci.rack_flow * LITRE_PER_KG * 60.0 / mc.racks
    branch = manifold_flows(manifold, rack_l_min)
    return PlantGraph(
        cluster=cluster, chiller=chiller, recooler=recooler, manifold=manifold, pid=pid,
        water_cp=ci.water_cp, glycol_cp=ci.glycol_cp,
        rack_flow=ci.rack_flow, drive_flow=ci.drive_flow, primary_flow=ci.primary_flow,
        recool_flow=ci.recool_flow, central_flow=ci.central_flow,
        tank_mass=cfg.tank.mass, primary_mass=ci.primary_mass, recool_mass=ci.recool_mass,
        rack_pipe_ua=ci.rack_pipe_ua, drive_effectiveness=ci.drive_effectiveness,
        primary_effectiveness=ci.primary_effectiveness,
        central_effectiveness=ci.central_effectiveness, pump_power=ci.pump_power,
        room_temp=site.room_temp, outdoor_temp=site.outdoor_temp,
        central_supply_temp=site.central_supply_temp, support_threshold=site.support_threshold,
        gpu_load=site.gpu_load, initial_temp=site.initial_temp, load_fraction=site.load_fraction,
        chiller_enabled=cfg.chiller.enabled, branch_flows=branch, config=cfg,
    )


def initial_state(plant: PlantGraph, temperature: float | None = None) -> SimState:
    """Uniform cold-start state: every circuit at ``temperature``."""
    t = plant.initial_temp if temperature is None else temperature
    return SimState(
        time=0.0, t_rack_in=t, t_rack_out=t, t_tank=t, t_drive_return=t,
        t_primary=t, t_recool=t,
        chiller=ChillerState(False, plant.chiller_enabled), pid=plant.pid,
        load_fraction=plant.load_fraction, room_temp=plant.room_temp,
        outdoor_temp=plant.outdoor_temp,
    )


@dataclass(slots=True)
class _RackLoop:
    t_in: float
    cl: ClusterStep
    p_d: float
    p_add: float
    p_loss: float
    t_ret: float
    drive_out: FluidStream
    primary_out: FluidStream


def _rack_pass(plant, t_in, x, drive_cold, primary_cold, load, room, guess):
    rack_in = FluidStream(plant.rack_flow, t_in, plant.water_cp)
    cl = cluster_step(plant.cluster, rack_in, room, load, guess=guess, tol=1e-11)
    hot, drive_out, p_d = hx_transfer(cl.outlet, drive_cold, plant.drive_effectiveness)
    extra, bypass = split_stream(hot, x)
    extra_out, primary_out, p_add = hx_transfer(extra, primary_cold, plant.primary_effectiveness)
    mixed = mix_streams(extra_out, bypass)
    ret, p_loss = pipe_loss(mixed, plant.rack_pipe_ua, room)
    return _RackLoop(t_in, cl, p_d, p_add, p_loss, ret.temperature, drive_out, primary_out)


def solve_rack_loop(plant, x, drive_cold, primary_cold, load, room, t_guess, out_guess=None,
                    rtol=1e-9, max_iter=200) -> _RackLoop:
    """Find the rack inlet temperature that the loop returns to itself.

    The map inlet -> return is increasing with slope below one, so the root
    lies on the side the return points to, at least ``|return - inlet|``
    away. A geometrically widened step brackets it; secant steps then refine
    the bracket, falling back to bisection whenever a step leaves it (the
    exchangers switch off when the rack is colder than their cold side, which
    puts kinks in the map). Iteration stops once the loop's heat imbalance is
    below ``rtol`` of the electric power.
    """
    c = plant.rack_flow * plant.water_cp

    def evaluate(t, guess):
        r = _rack_pass(plant, t, x, drive_cold, primary_cold, load, room, guess)
        return r, r.t_ret - t

    def closed(r, f):
        return c * abs(f) <= rtol * max(r.cl.p_electric, 1.0)

    ra, fa = evaluate(t_guess, out_guess)
    if closed(ra, fa):
        return ra
    rb, fb = evaluate(ra.t_ret, ra.cl.outlet.temperature)
    if closed(rb, fb):
        return rb
    width = fa
    for _ in range(64):
        if (fa > 0.0) != (fb > 0.0):
            break
        ra, fa = rb, fb
        width *= 2.0
        rb, fb = evaluate(ra.t_in + width, ra.cl.outlet.temperature)
        if closed(rb, fb):
            return rb
    else:
        raise NoConvergence("rack loop could not be bracketed")
    a, b = ra.t_in, rb.t_in
    for _ in range(max_iter):
        t = b - fb * (b - a) / (fb - fa)
        lo, hi = min(a, b), max(a, b)
        if not lo < t < hi:
            t = 0.5 * (a + b)
        r, f = evaluate(t, rb.cl.outlet.temperature)
        if closed(r, f) or hi - lo <= 4.0 * math.ulp(hi):
            return r
        # keep the endpoint with the opposite sign
        if (f > 0.0) == (fb > 0.0):
            a_new, fa_new = a, fa
            if abs(f) > 0.5 * abs(fb):
                # Illinois weighting avoids one-sided stalls
                fa_new = 0.5 * fa
            a, fa = a_new, fa_new
        else:
            a, fa = b, fb
        b, fb, rb = t, f, r
    raise NoConvergence("rack loop did not close")


def _central_support(plant: PlantGraph, t_primary: float) -> float:
    """Heat the autonomous central exchanger takes from the primary supply."""
    if t_primary <= plant.support_threshold:
        return 0.0
    c_p = plant.primary_flow * plant.water_cp
    c_c = plant.central_flow * plant.water_cp
    cap = plant.central_effectiveness * min(c_p, c_c) * (t_primary - plant.central_supply_temp)
    return min(cap, c_p * (t_primary - plant.support_threshold))


def _absorb(mass: float, cp: float, t: float, inflow: FluidStream, dt: float) -> tuple[float, float]:
    """Flux-conservative update of a lumped mass; returns (T', storage W)."""
    k = inflow.mass_flow * dt / mass
    if k > 1.0:
        raise StabilityViolation(f"m*dt/M = {k:.3g} > 1 for a {mass} kg mass at dt={dt}")
    t_new = t + k * (inflow.temperature - t)
    return t_new, mass * cp * (t_new - t) / dt


def step(plant: PlantGraph, state: SimState, dt: float) -> StepResult:
    """Advance the plant by ``dt`` seconds (0 < dt <= 10)."""
    if not 0.0 < dt <= DT_MAX:
        raise OutOfRange(f"dt must lie in (0, {DT_MAX}] s, got {dt}")
    wcp, gcp = plant.water_cp, plant.glycol_cp
    room = state.room_temp

    if state.valve_lock is None:
        x, pid = pid_update(state.pid, state.t_rack_in, dt)
    else:
        x, pid = state.valve_lock, state.pid

    # primary supply: central support, then the chiller evaporator
    q_central = _central_support(plant, state.t_primary)
    c_prim = plant.primary_flow * wcp
    chilled_ret = FluidStream(plant.primary_flow, state.t_primary - q_central / c_prim, wcp)
    tank_out = FluidStream(plant.drive_flow, state.t_tank, gcp)
    recool_sup = FluidStream(plant.recool_flow, state.t_recool, gcp)
    ch = chiller_step(plant.chiller, state.chiller, tank_out, chilled_ret, recool_sup,
                      state.chilled_demand, dt)

    # recooling circuit
    recooler = plant.recooler
    if recooler.ambient != state.outdoor_temp:
        recooler = replace(recooler, ambient=state.outdoor_temp)
    fan = plant.fan_policy(recooler, ch.p_reject, ch.recool_out.temperature)
    rec_out, q_rec, p_fan = recooler_step(recooler, ch.recool_out, fan, dt)

    # rack circuit, closed algebraically
    loop = solve_rack_loop(plant, x, ch.drive_out, ch.chilled_out, state.load_fraction, room,
                           state.t_rack_in, state.t_rack_out)
    cl = loop.cl

    p_gpu = plant.gpu_load
    prim_back = loop.primary_out.at(loop.primary_out.temperature + p_gpu / c_prim)

    t_tank, s_tank = _absorb(plant.tank_mass, gcp, state.t_tank, loop.drive_out, dt)
    t_prim, s_prim = _absorb(plant.primary_mass, wcp, state.t_primary, prim_back, dt)
    t_rec, s_rec = _absorb(plant.recool_mass, gcp, state.t_recool, rec_out, dt)

    new_state = SimState(
        time=state.time + dt,
        t_rack_in=loop.t_in,
        t_rack_out=cl.outlet.temperature,
        t_tank=t_tank,
        t_drive_return=ch.drive_out.temperature,
        t_primary=t_prim,
        t_recool=t_rec,
        chiller=ch.state,
        pid=pid,
        valve_fraction=x,
        fan_speed=fan,
        load_fraction=state.load_fraction,
        room_temp=state.room_temp,
        outdoor_temp=state.outdoor_temp,
        valve_lock=state.valve_lock,
        chilled_demand=state.chilled_demand,
    )
    return StepResult(
        state=new_state,
        t_core_mean=cl.t_core_mean,
        cop=ch.cop if ch.cop is not None else math.nan,
        p_electric=cl.p_electric,
        p_r=cl.p_to_water,
        p_to_air=cl.p_to_air,
        p_d=loop.p_d,
        p_d_abs=ch.p_d,
        p_add=loop.p_add,
        p_loss=loop.p_loss,
        p_c=ch.p_c,
        p_reject=ch.p_reject,
        q_central=q_central,
        q_recooler=q_rec,
        p_gpu=p_gpu,
        p_fan=p_fan,
        p_pump=plant.pump_power,
        storage_tank=s_tank,
        storage_primary=s_prim,
        storage_recool=s_rec,
        m_rack=plant.rack_flow,
        m_drive=plant.drive_flow,
        m_primary=plant.primary_flow,
        m_recool=plant.recool_flow,
        throttled=len(cl.throttling),
    )


def energy_audit(result: StepResult) -> float:
    """Relative first-law residual of one step.

    Sources: cluster electric power, GPU load, pump and fan power.
    Sinks: central circuit, recooler, cluster and pipe losses to air, pump and
    fan dissipation, and the storage rate of every lumped mass.
    """
    r = result
    parasitic = r.p_pump + r.p_fan
    sources = r.p_electric + r.p_gpu + parasitic
    sinks = r.q_central + r.q_recooler + r.p_to_air + r.p_loss + parasitic + r.storage
    return abs(sources - sinks) / max(r.p_electric, 1.0)


def rack_identity_residual(result: StepResult) -> float:
    """Relative residual of ``p_r = p_d + p_add + p_loss``."""
    r = result
    return abs(r.p_r - (r.p_d + r.p_add + r.p_loss)) / max(r.p_electric, 1.0)


def result_row(r: StepResult) -> tuple[float, ...]:
    s = r.state
    return (
        s.time, s.t_rack_in, s.t_rack_out, r.t_core_mean, s.t_tank, s.t_drive_return,
        s.t_primary, s.t_recool, s.valve_fraction, s.fan_speed, float(s.chiller.active), r.cop,
        r.p_electric, r.p_r, r.p_to_air, r.p_d, r.p_d_abs, r.p_add, r.p_loss, r.p_c,
        r.p_reject, r.q_central, r.q_recooler, r.p_gpu, r.p_fan, r.p_pump, r.storage,
        r.m_rack, r.m_drive, r.m_primary, r.m_recool, energy_audit(r),
    )


def run(plant: PlantGraph, state0: SimState, duration: float, dt: float,
        scenario=None, record_every: int = 1) -> TimeSeries:
    """Repeat :func:`step` for ``duration`` seconds and record every sample.

    ``scenario`` is an optional sequence of scenario events applied when the
    simulation clock reaches their time.
    """
    if duration < dt:
        raise OutOfRange(f"duration {duration} shorter than dt {dt}")
    from .scenario import apply_event

    n = int(round(duration / dt))
    events = sorted(scenario or (), key=lambda e: e.at)
    ei = 0
    rows = []
    state = state0
    for i in range(n):
        while ei < len(events) and events[ei].at <= state.time + 1e-9:
            state = apply_event(plant, state, events[ei])
            ei += 1
        res = step(plant, state, dt)
        state = res.state
        if (i + 1) % record_every == 0 or i == n - 1:
            rows.append(result_row(res))
    meta = {"seed": plant.cluster.seed, "dt": dt, "duration": duration}
    ts = TimeSeries(COLUMNS, np.array(rows), meta)
    ts.final_state = state
    return ts
