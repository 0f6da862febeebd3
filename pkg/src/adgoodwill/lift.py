"""The product space R x L2(-r, 0), its operators, and the lifted dynamics.

A lifted state ``(x0, x1)`` pairs the current goodwill with a function on
the delay window.  Under the lifted dynamics the window function is carried
toward ``xi = 0`` by the truncated right shift and fed by the memory
kernels; the scalar reads it back at ``xi = 0``.  On the shared grid the
shift by one time step is an exact index shift.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ScenarioError, UnsupportedScenario
from .grid import ALIGN_RTOL, ControlPath, SegmentPath, trapezoid_weights
from .noise import NoisePath
from .params import ScenarioParams
from .sdde import check_grid, euler_paths

DOMAIN_TOL = 1e-8


@dataclass(frozen=True)
class LiftedState:
    head: float
    tail: SegmentPath

    def __post_init__(self):
        if not np.isfinite(self.head):
            raise ScenarioError("lifted state head must be finite")
        object.__setattr__(self, "head", float(self.head))

    @classmethod
    def zero(cls, r: float, n_points: int) -> LiftedState:
        return cls(0.0, SegmentPath.zeros(r, n_points))

    def __add__(self, other: LiftedState) -> LiftedState:
        _require_same_grid(self, other)
        return LiftedState(self.head + other.head,
                           SegmentPath(self.tail.r, self.tail.values + other.tail.values))

    def __sub__(self, other: LiftedState) -> LiftedState:
        return self + other * -1.0

    def __mul__(self, alpha: float) -> LiftedState:
        return LiftedState(self.head * alpha, SegmentPath(self.tail.r, self.tail.values * alpha))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class LiftedTrajectory:
    times: np.ndarray
    heads: np.ndarray
    tails: np.ndarray  # shape (len(times), n_points)
    r: float
    control: ControlPath

    @property
    def states(self) -> list[LiftedState]:
        return [self.state(k) for k in range(self.times.size)]

    def state(self, k: int) -> LiftedState:
        return LiftedState(self.heads[k], SegmentPath(self.r, self.tails[k]))


def _require_same_grid(x: LiftedState, y: LiftedState):
    if not x.tail.same_grid(y.tail):
        raise ScenarioError("lifted states are sampled on different grids")


def _require_kernel(params: ScenarioParams, what: str):
    if params.point_delay:
        raise UnsupportedScenario(
            f"{what} needs a square-integrable forgetting kernel; point-delay "
            "forgetting would make the lifted state equation unbounded"
        )


def inner_product(x: LiftedState, y: LiftedState) -> float:
    """``x0 y0 + int x1 y1`` with the trapezoid rule for the integral."""
    _require_same_grid(x, y)
    w = trapezoid_weights(x.tail.n_points, x.tail.dxi)
    return x.head * y.head + float(w @ (x.tail.values * y.tail.values))


def norm(x: LiftedState) -> float:
    return float(np.sqrt(max(inner_product(x, x), 0.0)))


def _windowed_memory(kernel: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    """``m(xi_i) = int_{-r}^{xi_i} kernel(zeta) f(zeta - xi_i) d zeta`` on the grid.

    With ``zeta_j - xi_i`` landing on grid index ``n-1+j-i``, the sum is a
    discrete convolution of the kernel with the reversed function, minus
    half of the two end terms of each trapezoid.
    """
    rev = f[::-1]
    full = np.convolve(kernel, rev)[: kernel.size]
    ends = 0.5 * (kernel[0] * rev + kernel * rev[0])
    return h * (full - ends)


def apply_M(x0: float, x1: SegmentPath, v: SegmentPath, params: ScenarioParams) -> LiftedState:
    """Structural operator: ``(x0, state history, control history) -> X``."""
    _require_kernel(params, "the structural operator")
    for name, path in (("x1", x1), ("v", v)):
        if not path.same_grid(params.b1):
            raise ScenarioError(f"{name} is not on the scenario grid")
    h = params.dt
    m = _windowed_memory(params.a1.values, x1.values, h)
    m += _windowed_memory(params.b1.values, v.values, h)
    return LiftedState(x0, SegmentPath(params.r, m))


def _derivative(path: SegmentPath) -> np.ndarray:
    return np.gradient(path.values, path.dxi, edge_order=2)


def apply_A(x: LiftedState, params: ScenarioParams) -> LiftedState:
    """``(a0 x0 + x1(0), a1 x0 - x1')`` on states with ``x1(-r) = 0``."""
    _require_kernel(params, "the lifted generator")
    if abs(x.tail.values[0]) > DOMAIN_TOL:
        raise DomainError(
            f"state outside the domain of A: x1(-r) = {x.tail.values[0]!r} must vanish"
        )
    head = params.a0 * x.head + x.tail.values[-1]
    tail = params.a1.values * x.head - _derivative(x.tail)
    return LiftedState(head, SegmentPath(params.r, tail))


def apply_Astar(x: LiftedState, params: ScenarioParams) -> LiftedState:
    """``(a0 x0 + <a1, x1>, x1')`` on states with ``x0 = x1(0)``.

    In point-delay mode ``<a1, x1>`` becomes ``a1 x1(-r)``, which is the
    delay-equation generator itself.
    """
    if abs(x.head - x.tail.values[-1]) > DOMAIN_TOL:
        raise DomainError(
            f"state outside the domain of A*: x0 = {x.head!r} must equal "
            f"x1(0) = {x.tail.values[-1]!r}"
        )
    if params.point_delay:
        memory = params.a1.coefficient * x.tail.values[0]
    else:
        w = trapezoid_weights(x.tail.n_points, x.tail.dxi)
        memory = float(w @ (params.a1.values * x.tail.values))
    return LiftedState(params.a0 * x.head + memory, SegmentPath(params.r, _derivative(x.tail)))


def apply_B(z: float, params: ScenarioParams) -> LiftedState:
    """Control operator ``z -> (b0 z, b1 z)``."""
    if z < 0:
        raise ScenarioError(f"spending rate must be non-negative, got {z!r}")
    return LiftedState(params.b0 * z, SegmentPath(params.r, params.b1.values * z))


def initial_datum(params: ScenarioParams) -> LiftedState:
    """The lifted image of the scenario's initial goodwill and histories."""
    return apply_M(params.eta0, params.eta, params.delta, params)


def simulate_lifted(
    params: ScenarioParams,
    control: ControlPath,
    noise: Optional[NoisePath],
    x_init: LiftedState,
    dt: Optional[float] = None,
) -> LiftedTrajectory:
    """Explicit split-step scheme for the lifted equation.

    Each step updates the scalar with the window value at ``xi = 0``, shifts
    the window one cell toward ``xi = 0`` with zero inflow at ``xi = -r``,
    then adds the kernel sources evaluated at the start of the step.
    ``noise=None`` means a deterministic run.
    """
    _require_kernel(params, "the lifted equation")
    check_grid(params, dt, control)
    if not x_init.tail.same_grid(params.b1):
        raise ScenarioError("initial datum is not on the scenario grid")
    N, h = params.n_steps, params.dt
    if noise is None:
        dW = np.zeros(N)
    else:
        if noise.n_steps != N or abs(noise.dt - h) > ALIGN_RTOL * h:
            raise ScenarioError("noise path is not on the simulation grid")
        dW = noise.increments

    a1, b1 = params.a1.values, params.b1.values
    z = control.values
    heads = np.empty(N + 1)
    tails = np.empty((N + 1, params.n_points))
    heads[0] = x_init.head
    tails[0] = x_init.tail.values
    for k in range(N):
        y0, tail = heads[k], tails[k]
        heads[k + 1] = y0 + (params.a0 * y0 + tail[-1] + params.b0 * z[k]) * h + params.sigma * dW[k]
        nxt = tails[k + 1]
        nxt[0] = 0.0
        nxt[1:] = tail[:-1]
        nxt += (a1 * y0 + b1 * z[k]) * h
    return LiftedTrajectory(params.times, heads, tails, params.r, control)


@dataclass(frozen=True)
class EquivalenceResult:
    max_err_state: float
    max_err_structural: float
    structural_checked: bool


def structural_errors(params: ScenarioParams, traj: LiftedTrajectory) -> np.ndarray:
    """``|Y(t_k) - M(Y0(t_k), Y0(t_k + .), z(t_k + .))|_X`` for all ``t_k >= r``."""
    n = params.n_points
    lag = n - 1
    h = params.dt
    w = trapezoid_weights(n, h)
    a1, b1 = params.a1.values, params.b1.values
    out = []
    for k in range(lag, params.n_steps + 1):
        hist = traj.heads[k - lag : k + 1]
        ctrl = traj.control.values[k - lag : k + 1]
        m = _windowed_memory(a1, hist, h) + _windowed_memory(b1, ctrl, h)
        diff = traj.tails[k] - m
        out.append(np.sqrt(w @ diff ** 2))
    return np.array(out)


def check_equivalence(
    params: ScenarioParams,
    control: ControlPath,
    noise: Optional[NoisePath],
    dt: Optional[float] = None,
) -> EquivalenceResult:
    """Compare the SDDE path with the lifted path driven by the same noise.

    The lifted run starts from the structural image of the scenario's
    histories.  The structural identity is only checked once a full delay
    window has elapsed (``t >= r``); shorter horizons skip it with a warning.
    """
    _require_kernel(params, "the equivalence check")
    check_grid(params, dt, control)
    dW = np.zeros(params.n_steps) if noise is None else noise.increments
    y = euler_paths(params, control, dW[None, :])[0]
    traj = simulate_lifted(params, control, noise, initial_datum(params))
    err_state = float(np.max(np.abs(y - traj.heads)))
    if params.T < params.r - ALIGN_RTOL * params.r:
        warnings.warn("horizon shorter than the delay window: structural check skipped")
        return EquivalenceResult(err_state, float("nan"), False)
    err_struct = float(np.max(structural_errors(params, traj)))
    return EquivalenceResult(err_state, err_struct, True)
