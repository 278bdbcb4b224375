"""Datasets mirroring the published measurement figures.

:func:`reproduce_figures` returns a :class:`FigureBundle`: one table per
figure analog plus a manifest. :func:`write_bundle` stores the tables as
delimited files next to ``manifest.json``. Everything is a pure function of
the configuration and seed, so rewriting a bundle reproduces its bytes.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .analysis import SweepTable, sweep_temperature
from .config import config_hash
from .plant import PlantGraph
from .telemetry import TimeSeries, fit_gaussian, write_timeseries

SETPOINTS = (49.0, 52.0, 55.0, 57.0, 60.0, 62.0, 65.0, 67.0, 70.0)
HIST_SETPOINT = 67.0
SUBSET_SIZE = 13
HIST_BINS = 20
# offset keeps the subset draw independent of the per-node offsets
SUBSET_SEED_OFFSET = 13


@dataclass(frozen=True)
class Dataset:
    name: str
    description: str
    series: TimeSeries
    fit: tuple[float, float] | None = None


@dataclass(frozen=True)
class FigureBundle:
    datasets: tuple[Dataset, ...]
    manifest: dict

    def __getitem__(self, name: str) -> Dataset:
        for d in self.datasets:
            if d.name == name:
                return d
        raise KeyError(name)


def node_subset(plant: PlantGraph, size: int = SUBSET_SIZE) -> np.ndarray:
    """Seeded random choice of nodes shown in the per-node figures."""
    n = plant.cluster.n_nodes
    rng = np.random.default_rng(plant.cluster.seed + SUBSET_SEED_OFFSET)
    return np.sort(rng.choice(n, size=min(size, n), replace=False))


def _histogram(samples: np.ndarray, unit: str) -> tuple[TimeSeries, tuple[float, float]]:
    mu, sigma = fit_gaussian(samples)
    counts, edges = np.histogram(samples, bins=HIST_BINS)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    if sigma > 0:
        pdf = np.exp(-0.5 * ((centers - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    else:
        pdf = np.zeros_like(centers)
    fit = pdf * width * samples.size
    data = np.column_stack([centers, counts, fit])
    return TimeSeries((f"bin_center_{unit}", "count", "gaussian_fit"), data), (mu, sigma)


def reproduce_figures(plant: PlantGraph, sweep: SweepTable | None = None,
                      setpoints=SETPOINTS) -> FigureBundle:
    cl = plant.cluster
    sw = sweep or sweep_temperature(plant, setpoints)
    sp = sw.column("setpoint_C")
    t_out = sw.column("t_out_C")
    t_std = sw.column("t_out_std_K")
    subset = node_subset(plant)
    node_cols = tuple(f"node{int(i):03d}" for i in subset)

    cores = np.array([cl.core_temperatures(t)[subset] for t in t_out])
    fig4a = TimeSeries(("setpoint_C", "t_out_C") + tuple(f"{c}_core_C" for c in node_cols),
                       np.column_stack([sp, t_out, cores]))

    hist4b, fit4b = _histogram(cl.core_temperatures(HIST_SETPOINT), "C")
    # node power taken at the common 80 degC core temperature
    p80 = cl.node_powers(np.full(cl.n_nodes, cl.T_core_ref))
    hist5b, fit5b = _histogram(p80, "W")

    ref = cl.node_powers(cl.core_temperatures(cl.T_ref_low))[subset]
    rel = np.array([cl.node_powers(cl.core_temperatures(t))[subset] / ref - 1.0 for t in t_out])
    fig6a = TimeSeries(("setpoint_C", "t_out_C", "mean_rel") + tuple(f"{c}_rel" for c in node_cols),
                       np.column_stack([sp, t_out, sw.column("node_power_rel"), rel]))

    fig6b = TimeSeries(("setpoint_C", "t_out_C", "cop"), np.column_stack([sp, t_out, sw.column("cop")]))
    fig7a = TimeSeries(("setpoint_C", "t_out_C", "t_out_std_K", "heat_in_water"),
                       np.column_stack([sp, t_out, t_std, sw.column("heat_in_water")]))
    fig7b = TimeSeries(("setpoint_C", "t_out_C", "t_out_std_K", "p_d_fraction"),
                       np.column_stack([sp, t_out, t_std, sw.column("p_d_fraction")]))

    datasets = (
        Dataset("fig4a_core_temperature", "core temperature of a 13-node subset vs outlet temperature", fig4a),
        Dataset("fig4b_core_histogram", f"core temperature distribution at outlet {HIST_SETPOINT:g} degC", hist4b, fit4b),
        Dataset("fig5b_power_histogram", "node power distribution at 80 degC core temperature", hist5b, fit5b),
        Dataset("fig6a_relative_power", "relative node power increase vs outlet temperature", fig6a),
        Dataset("fig6b_cop", "chiller COP vs outlet temperature", fig6b),
        Dataset("fig7a_heat_in_water", "heat-in-water fraction vs outlet temperature", fig7a),
        Dataset("fig7b_transferred_power", "transferred power fraction vs outlet temperature", fig7b),
    )
    manifest = {
        "seed": cl.seed,
        "config_hash": config_hash(plant.config) if plant.config is not None else None,
        "subset_nodes": [int(i) for i in subset],
        "datasets": [
            {
                "name": d.name,
                "file": f"{d.name}.csv",
                "description": d.description,
                **({"fit": {"mu": float(f"{d.fit[0]:.6g}"), "sigma": float(f"{d.fit[1]:.6g}")}}
                   if d.fit else {}),
            }
            for d in datasets
        ],
    }
    return FigureBundle(datasets, manifest)


def write_bundle(bundle: FigureBundle, directory) -> list[str]:
    """Write every dataset and ``manifest.json``; returns the file names."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for d in bundle.datasets:
        fn = f"{d.name}.csv"
        write_timeseries(d.series, os.path.join(directory, fn))
        names.append(fn)
    with open(os.path.join(directory, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(bundle.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    names.append("manifest.json")
    return names
