"""Lumped-parameter simulator of a hot-water cooled compute cluster driving an adsorption chiller."""
from .analysis import (
    Equilibrium,
    SweepTable,
    rack_steady,
    solve_equilibrium,
    sweep_temperature,
)
from .chiller import ChillerModel, ChillerState, chiller_cop, chiller_pd_max, chiller_step
from .cluster import ClusterModel, cluster_step, core_temperature, make_cluster, node_power
from .config import PlantConfig, config_hash, load_config, save_config, with_overrides
from .control import PidController, pid_update
from .curves import PiecewiseLinear
from .errors import (
    HotloopError,
    IncompatibleFluid,
    IndexOutOfRange,
    InvalidConfig,
    NoConvergence,
    OutOfRange,
    ParseError,
    SchemaMismatch,
    StabilityViolation,
    TooFewSamples,
    ValidationError,
    VersionError,
    ZeroFlow,
)
from .figures import reproduce_figures, write_bundle
from .manifold import ManifoldModel, manifold_flows
from .plant import (
    PlantGraph,
    SimState,
    StepResult,
    build_plant,
    energy_audit,
    initial_state,
    run,
    step,
)
from .recooler import RecoolerModel, recooler_step
from .scenario import ScenarioEvent, load_scenario
from .telemetry import (
    SensorSpec,
    TimeSeries,
    apply_sensor_noise,
    fit_gaussian,
    read_timeseries,
    write_timeseries,
)
from .thermo import (
    FluidStream,
    ThermalMass,
    advance_thermal_mass,
    hx_transfer,
    mix_streams,
    pipe_loss,
    split_stream,
)

__version__ = "0.1.0"
