"""Model and objective coefficients of the goodwill control problem."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ScenarioError
from .grid import SegmentPath, steps_for


@dataclass(frozen=True)
class PointDelay:
    """Forgetting concentrated at the maximal lag: contributes ``a1 * y(s - r)``."""

    coefficient: float


Kernel = Union[SegmentPath, PointDelay]


@dataclass(frozen=True)
class ScenarioParams:
    """Coefficients of the controlled goodwill equation and its objective.

    Goodwill obeys

        dy = [a0 y(s) + (a1 * y)(s) + b0 z(s) + (b1 * z)(s)] ds + sigma dW

    where ``*`` is the delay convolution over [-r, 0] (or ``a1 y(s - r)`` in
    point-delay mode).  The built-in objective is
    ``E[gamma y(T)] - int_0^T beta z(s)^2 ds``.

    All segment paths share one grid, which also fixes the time step
    ``dt = r / (n_points - 1)``.
    """

    a0: float
    a1: Kernel
    b0: float
    b1: SegmentPath
    sigma: float
    r: float
    T: float
    eta0: float
    eta: SegmentPath
    delta: SegmentPath
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("a0", "b0", "sigma", "r", "T", "eta0", "beta", "gamma"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ScenarioError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.a0 > 0:
            raise ScenarioError(f"a0 must be <= 0 (deterioration), got {self.a0}")
        if self.b0 < 0:
            raise ScenarioError(f"b0 must be >= 0, got {self.b0}")
        if self.sigma < 0:
            raise ScenarioError(f"sigma must be >= 0, got {self.sigma}")
        if not self.r > 0:
            raise ScenarioError(f"r must be > 0, got {self.r}")
        if not self.T > 0:
            raise ScenarioError(f"T must be > 0, got {self.T}")
        if not (self.beta > 0 and self.gamma > 0):
            raise ScenarioError("beta and gamma must be > 0")
        if self.eta0 < 0:
            raise ScenarioError(f"eta0 must be >= 0, got {self.eta0}")
        if not isinstance(self.a1, (SegmentPath, PointDelay)):
            raise ScenarioError("a1 must be a SegmentPath or a PointDelay")

        paths = {"b1": self.b1, "eta": self.eta, "delta": self.delta}
        if isinstance(self.a1, SegmentPath):
            paths["a1"] = self.a1
        for name, path in paths.items():
            if path.r != self.r or path.n_points != self.b1.n_points:
                raise ScenarioError(f"{name} is not sampled on the shared [-r, 0] grid")
        if np.any(self.b1.values < 0):
            raise ScenarioError("b1 must be non-negative")
        if np.any(self.eta.values < 0) or np.any(self.delta.values < 0):
            raise ScenarioError("goodwill and spending histories must be non-negative")
        if abs(self.eta.values[-1] - self.eta0) > 1e-12 * max(1.0, abs(self.eta0)):
            raise ScenarioError(
                f"eta(0) = {self.eta.values[-1]!r} differs from eta0 = {self.eta0!r}"
            )
        steps_for(self.T, self.dt)

    @classmethod
    def build(
        cls,
        *,
        r: float = 1.0,
        T: float = 1.0,
        n_points: int = 101,
        a0: float = 0.0,
        a1=0.0,
        b0: float = 0.0,
        b1=0.0,
        sigma: float = 0.0,
        eta0: float = 0.0,
        eta=None,
        delta=0.0,
        beta: float = 1.0,
        gamma: float = 1.0,
    ) -> ScenarioParams:
        """Convenience constructor.

        Kernels and histories may be given as constants, callables of the lag
        grid, or ready-made :class:`SegmentPath` objects; ``a1`` may also be a
        :class:`PointDelay`.  ``eta`` defaults to the constant ``eta0``.
        """

        def seg(v):
            if isinstance(v, SegmentPath):
                return v
            if callable(v):
                return SegmentPath.from_function(r, n_points, v)
            return SegmentPath.constant(r, n_points, v)

        return cls(
            a0=a0,
            a1=a1 if isinstance(a1, PointDelay) else seg(a1),
            b0=b0,
            b1=seg(b1),
            sigma=sigma,
            r=r,
            T=T,
            eta0=eta0,
            eta=seg(eta0 if eta is None else eta),
            delta=seg(delta),
            beta=beta,
            gamma=gamma,
        )

    @property
    def n_points(self) -> int:
        return self.b1.n_points

    @property
    def dt(self) -> float:
        return self.r / (self.n_points - 1)

    @property
    def n_steps(self) -> int:
        return steps_for(self.T, self.dt)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    @property
    def point_delay(self) -> bool:
        return isinstance(self.a1, PointDelay)

    def replace(self, **changes) -> ScenarioParams:
        return dataclasses.replace(self, **changes)

    def refined(self, factor: int) -> ScenarioParams:
        """Same scenario on a grid ``factor`` times finer (linear resampling)."""
        if factor < 1 or int(factor) != factor:
            raise ScenarioError("refinement factor must be a positive integer")
        n = (self.n_points - 1) * int(factor) + 1
        a1 = self.a1 if self.point_delay else self.a1.resampled(n)
        return self.replace(
            a1=a1,
            b1=self.b1.resampled(n),
            eta=self.eta.resampled(n),
            delta=self.delta.resampled(n),
        )
