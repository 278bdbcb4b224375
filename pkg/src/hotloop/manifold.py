"""Flow distribution over parallel rack branches.

Each branch path is a branch element plus the header length it traverses.
With reverse-return (Tichelmann) plumbing every path crosses the same number
of header segments; with direct return the path length grows with position.
Pressure drop per element follows ``dp = R*q**2 + r*q`` (bar, l/min).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, OutOfRange

TOPOLOGIES = ("tichelmann", "naive")


@dataclass(frozen=True)
class ManifoldModel:
    """Parallel branches between a supply and a return header.

    Attributes:
        n_branches: number of parallel node connections.
        branch_resistance: quadratic coefficient per branch, bar/(l/min)^2.
            A scalar applies to every branch.
        header_resistance: quadratic coefficient of one header segment.
        topology: ``"tichelmann"`` (reverse return) or ``"naive"`` (direct return).
        linear_resistance: optional laminar term per branch, bar/(l/min).
    """

    n_branches: int = 72
    branch_resistance: float | tuple[float, ...] = 0.08 / 0.36
    header_resistance: float = 0.002
    topology: str = "tichelmann"
    linear_resistance: float = 0.0

    def __post_init__(self):
        if self.n_branches <= 0:
            raise OutOfRange(f"n_branches must be > 0, got {self.n_branches}")
        if self.topology not in TOPOLOGIES:
            raise OutOfRange(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        r = np.broadcast_to(np.asarray(self.branch_resistance, dtype=float), (self.n_branches,))
        if np.any(r <= 0.0):
            raise OutOfRange("branch resistances must be > 0")
        if self.header_resistance < 0.0 or self.linear_resistance < 0.0:
            raise OutOfRange("header and linear resistances must be >= 0")

    def path_resistances(self) -> np.ndarray:
        """Quadratic resistance of each complete branch path."""
        n = self.n_branches
        r = np.broadcast_to(np.asarray(self.branch_resistance, dtype=float), (n,)).copy()
        if self.topology == "tichelmann":
            segments = np.full(n, n + 1.0)
        else:
            segments = 2.0 * np.arange(1, n + 1)
        return r + self.header_resistance * segments


def _branch_flow(dp: float, quad: np.ndarray, lin: float) -> np.ndarray:
    if lin == 0.0:
        return np.sqrt(dp / quad)
    # stable root of quad*q^2 + lin*q - dp = 0
    return 2.0 * dp / (lin + np.sqrt(lin * lin + 4.0 * quad * dp))


def manifold_flows(
    model: ManifoldModel, total_flow: float, rtol: float = 1e-8, max_iter: int = 100
) -> np.ndarray:
    """Per-branch flows (l/min) sharing ``total_flow`` at a common pressure drop.

    Newton iteration on the common pressure drop until the flow residual is
    below ``rtol`` relative to the total.
    """
    if total_flow < 0.0:
        raise OutOfRange(f"total_flow must be >= 0, got {total_flow}")
    n = model.n_branches
    if total_flow == 0.0:
        return np.zeros(n)
    quad = model.path_resistances()
    lin = model.linear_resistance
    # start from the purely quadratic solution
    dp = (total_flow / np.sum(1.0 / np.sqrt(quad))) ** 2
    if lin > 0.0:
        dp += lin * total_flow / n
    for _ in range(max_iter):
        q = _branch_flow(dp, quad, lin)
        resid = q.sum() - total_flow
        if abs(resid) <= rtol * total_flow:
            return q
        dq_ddp = np.sum(1.0 / (2.0 * quad * q + lin))
        step = resid / dq_ddp
        dp = max(dp - step, 0.5 * dp)
    raise NoConvergence(f"manifold solve did not converge for total_flow={total_flow}")


def branch_pressure_drop(model: ManifoldModel, flow: float, index: int = 0) -> float:
    """Pressure drop over the branch element alone (bar)."""
    r = np.broadcast_to(np.asarray(model.branch_resistance, dtype=float), (model.n_branches,))
    return float(r[index]) * flow * flow + model.linear_resistance * flow


def path_pressure_drop(model: ManifoldModel, flows: np.ndarray) -> np.ndarray:
    quad = model.path_resistances()
    return quad * flows * flows + model.linear_resistance * flows


def imbalance(flows: np.ndarray) -> float:
    """max/min branch-flow ratio."""
    lo = float(np.min(flows))
    return math.inf if lo == 0.0 else float(np.max(flows)) / lo
