"""Uniform grids on the delay window [-r, 0] and on the horizon [0, T].

Both grids share one spacing: the time step of every simulator equals the
segment spacing ``r / (n_points - 1)``, so looking up a history value is an
integer index shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ScenarioError

Array = np.ndarray

# relative tolerance for "dt divides T" and grid-alignment checks
ALIGN_RTOL = 1e-9


def _frozen(values) -> Array:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def trapezoid_weights(n: int, h: float) -> Array:
    """Weights of the composite trapezoid rule on ``n`` equispaced nodes."""
    if n < 1:
        raise ValueError("need at least one node")
    w = np.full(n, h)
    if n == 1:
        return np.zeros(1)
    w[0] = w[-1] = 0.5 * h
    return w


def steps_for(length: float, dt: float) -> int:
    """Number of steps of size ``dt`` covering ``length``; rejects misfits."""
    n = int(round(length / dt))
    if n < 1 or abs(n * dt - length) > ALIGN_RTOL * max(length, 1.0):
        raise ScenarioError(
            f"time step {dt!r} does not divide the interval length {length!r}"
        )
    return n


@dataclass(frozen=True, eq=False)
class SegmentPath:
    """A function on [-r, 0] sampled at ``xi_i = -r + i * dxi``."""

    r: float
    values: Array = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.ndim != 1 or vals.size < 2:
            raise ScenarioError("a segment path needs at least two samples")
        if not np.all(np.isfinite(vals)):
            raise ScenarioError("segment path values must be finite")
        if not self.r > 0:
            raise ScenarioError(f"delay window length must be positive, got {self.r}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, r: float, n_points: int, value: float = 0.0) -> SegmentPath:
        return cls(r, np.full(n_points, float(value)))

    @classmethod
    def zeros(cls, r: float, n_points: int) -> SegmentPath:
        return cls.constant(r, n_points, 0.0)

    @classmethod
    def from_function(cls, r: float, n_points: int, f: Callable) -> SegmentPath:
        xi = np.linspace(-r, 0.0, n_points)
        return cls(r, np.broadcast_to(np.asarray(f(xi), dtype=float), xi.shape))

    @classmethod
    def from_table(cls, r: float, n_points: int, xs, ys) -> SegmentPath:
        """Linear interpolation of ``(xs, ys)`` onto the grid, flat beyond the ends."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 1:
            raise ScenarioError("kernel table needs matching, non-empty columns")
        if np.any(np.diff(xs) <= 0):
            raise ScenarioError("kernel table abscissae must be strictly increasing")
        xi = np.linspace(-r, 0.0, n_points)
        return cls(r, np.interp(xi, xs, ys))

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def dxi(self) -> float:
        return self.r / (self.n_points - 1)

    @property
    def xi(self) -> Array:
        return np.linspace(-self.r, 0.0, self.n_points)

    def integral(self) -> float:
        return float(trapezoid_weights(self.n_points, self.dxi) @ self.values)

    def same_grid(self, other: SegmentPath) -> bool:
        return self.n_points == other.n_points and self.r == other.r

    def resampled(self, n_points: int) -> SegmentPath:
        return SegmentPath(self.r, np.interp(np.linspace(-self.r, 0.0, n_points),
                                             self.xi, self.values))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __eq__(self, other):
        if not isinstance(other, SegmentPath):
            return NotImplemented
        return self.r == other.r and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.r, self.values.tobytes()))


@dataclass(frozen=True, eq=False)
class ControlPath:
    """Non-negative spending rate sampled at ``t_k = k * dt``, k = 0..N.

    The rate is held constant on ``[t_k, t_{k+1})``; the last sample is kept
    so that the path can be tabulated on the full closed horizon.
    """

    values: Array = field(repr=False)
    dt: float

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.ndim != 1 or vals.size < 2:
            raise ScenarioError("a control path needs at least two samples")
        if not np.all(np.isfinite(vals)):
            raise ScenarioError("control values must be finite")
        if np.any(vals < 0):
            k = int(np.argmax(vals < 0))
            raise ScenarioError(
                f"control must be non-negative; value {vals[k]!r} at index {k}"
            )
        if not self.dt > 0:
            raise ScenarioError("control time step must be positive")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float, T: float, dt: float) -> ControlPath:
        return cls(np.full(steps_for(T, dt) + 1, float(value)), dt)

    @classmethod
    def from_function(cls, f: Callable, T: float, dt: float) -> ControlPath:
        t = np.arange(steps_for(T, dt) + 1) * dt
        return cls(np.broadcast_to(np.asarray(f(t), dtype=float), t.shape), dt)

    @property
    def n_steps(self) -> int:
        return self.values.size - 1

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt

    @property
    def times(self) -> Array:
        return np.arange(self.values.size) * self.dt

    def scaled(self, factor: float) -> ControlPath:
        return ControlPath(self.values * factor, self.dt)

    def resampled(self, dt: float) -> ControlPath:
        """Linear interpolation onto a grid of step ``dt`` on the same horizon."""
        t = np.arange(steps_for(self.horizon, dt) + 1) * dt
        return ControlPath(np.interp(t, self.times, self.values), dt)

    def __add__(self, other: ControlPath) -> ControlPath:
        if other.values.shape != self.values.shape or other.dt != self.dt:
            raise ScenarioError("control paths live on different grids")
        return ControlPath(self.values + other.values, self.dt)

    def __eq__(self, other):
        if not isinstance(other, ControlPath):
            return NotImplemented
        return self.dt == other.dt and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.dt, self.values.tobytes()))
