"""Piecewise-linear lookup tables."""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .errors import OutOfRange


@dataclass(frozen=True)
class PiecewiseLinear:
    """Table ``x -> y`` interpolated linearly and clamped at both ends."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise OutOfRange("a curve needs at least two anchor points")
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise OutOfRange("curve abscissae must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", [y for _, y in pts])

    def __call__(self, x: float) -> float:
        xs, ys = self._xs, self._ys
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, x)
        x0, x1 = xs[i - 1], xs[i]
        return ys[i - 1] + (ys[i] - ys[i - 1]) * (x - x0) / (x1 - x0)

    @property
    def domain(self) -> tuple[float, float]:
        return self._xs[0], self._xs[-1]

    def scaled(self, factor: float) -> PiecewiseLinear:
        return PiecewiseLinear(tuple((x, y * factor) for x, y in self.points))

    def is_non_decreasing(self) -> bool:
        ys = self._ys
        return all(b >= a for a, b in zip(ys, ys[1:]))

    def to_list(self) -> list[list[float]]:
        return [[x, y] for x, y in self.points]
