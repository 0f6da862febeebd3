"""Euler-Maruyama simulation of the goodwill SDDE and Monte Carlo objectives."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Optional

import numpy as np

from .errors import ScenarioError
from .grid import ALIGN_RTOL, ControlPath, trapezoid_weights
from .noise import NoisePath, increment_matrix
from .params import ScenarioParams

Z975 = NormalDist().inv_cdf(0.975)

# paths per task in the Monte Carlo loop
CHUNK = 2048


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    times: np.ndarray
    goodwill: np.ndarray
    control: ControlPath

    @property
    def terminal(self) -> float:
        return float(self.goodwill[-1])


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    half_width_95: float
    n_paths: int


def check_grid(params: ScenarioParams, dt: Optional[float], control: ControlPath):
    """Validate that ``dt`` and the control live on the scenario grid."""
    if dt is not None and abs(dt - params.dt) > ALIGN_RTOL * params.dt:
        raise ScenarioError(
            f"time step {dt!r} is not aligned with the segment grid: "
            f"need dt = r/(n_points-1) = {params.dt!r}"
        )
    if abs(control.dt - params.dt) > ALIGN_RTOL * params.dt:
        raise ScenarioError(
            f"control step {control.dt!r} differs from the grid step {params.dt!r}"
        )
    if control.n_steps != params.n_steps:
        raise ScenarioError(
            f"control has {control.n_steps} steps, horizon needs {params.n_steps}"
        )


def euler_paths(params: ScenarioParams, control: ControlPath, dW: np.ndarray) -> np.ndarray:
    """Goodwill on the time grid for a batch of increments.

    ``dW`` has shape ``(n_paths, N)``; the result has shape ``(n_paths, N + 1)``.
    Memory delay terms are trapezoid sums over the shared lag grid, read from
    an extended array whose first ``n_points - 1`` slots hold the history.
    """
    check_grid(params, None, control)
    n, N, dt = params.n_points, params.n_steps, params.dt
    dW = np.atleast_2d(dW)
    if dW.shape[1] != N:
        raise ScenarioError(f"noise has {dW.shape[1]} increments, need {N}")
    m = dW.shape[0]
    lag = n - 1

    y = np.empty((m, lag + N + 1))
    y[:, : lag + 1] = params.eta.values
    y[:, lag] = params.eta0

    z = np.concatenate([params.delta.values[:-1], control.values])
    w = trapezoid_weights(n, dt)
    b1w = params.b1.values * w
    # spending memory does not depend on the state: precompute it for all k
    z_mem = np.zeros(N)
    if not params.b1.is_zero():
        z_mem = np.array([b1w @ z[k : k + n] for k in range(N)])
    drift_ctrl = params.b0 * control.values[:N] + z_mem

    point = params.point_delay
    a1w = None if point else params.a1.values * w
    if not point and params.a1.is_zero():
        a1w = None
    noise = params.sigma * dW

    for k in range(N):
        cur = y[:, lag + k]
        drift = params.a0 * cur + drift_ctrl[k]
        if point:
            drift = drift + params.a1.coefficient * y[:, k]
        elif a1w is not None:
            drift = drift + y[:, k : k + n] @ a1w
        y[:, lag + k + 1] = cur + drift * dt + noise[:, k]
    return y[:, lag:]


def simulate_sdde(
    params: ScenarioParams,
    control: ControlPath,
    noise: NoisePath,
    dt: Optional[float] = None,
) -> TrajectorySample:
    """Simulate one goodwill path under ``control`` driven by ``noise``."""
    check_grid(params, dt, control)
    if noise.n_steps != params.n_steps or abs(noise.dt - params.dt) > ALIGN_RTOL * params.dt:
        raise ScenarioError("noise path is not on the simulation grid")
    path = euler_paths(params, control, noise.increments[None, :])[0]
    return TrajectorySample(params.times, path, control)


def _noise_rows(params: ScenarioParams, seed: int, start: int, stop: int, substeps: int):
    if params.sigma == 0.0:
        return np.zeros((stop - start, params.n_steps))
    return increment_matrix(seed, range(start, stop), params.n_steps, params.dt, substeps)


def terminal_goodwill(
    params: ScenarioParams,
    control: ControlPath,
    n_paths: int,
    seed: int,
    *,
    substeps: int = 1,
    workers: int = 1,
) -> np.ndarray:
    """Terminal goodwill ``y(T)`` of paths ``0 .. n_paths-1``, in path order."""

    def task(bounds):
        start, stop = bounds
        return euler_paths(params, control, _noise_rows(params, seed, start, stop, substeps))[:, -1]

    chunks = [(s, min(s + CHUNK, n_paths)) for s in range(0, n_paths, CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, chunks))
    else:
        parts = [task(c) for c in chunks]
    return np.concatenate(parts)


def running_cost(control: ControlPath, beta: float, cost: Optional[Callable] = None) -> float:
    """Left-point sum of the spending cost over ``[0, T)``."""
    z = control.values[:-1]
    h = beta * z ** 2 if cost is None else np.asarray(cost(z), dtype=float)
    return float(np.sum(h) * control.dt)


def objective_samples(
    params: ScenarioParams,
    control: ControlPath,
    n_paths: int,
    seed: int,
    *,
    utility: Optional[Callable] = None,
    cost: Optional[Callable] = None,
    substeps: int = 1,
    workers: int = 1,
) -> np.ndarray:
    """Per-path realisations of ``phi0(y(T)) - int h0(z) ds``.

    Defaults are ``phi0(x) = gamma x`` and ``h0(z) = beta z^2``.  Custom
    ``utility`` / ``cost`` callables must accept arrays (see :func:`tabulated`).
    """
    yT = terminal_goodwill(params, control, n_paths, seed, substeps=substeps, workers=workers)
    reward = params.gamma * yT if utility is None else np.asarray(utility(yT), dtype=float)
    return reward - running_cost(control, params.beta, cost)


def summarize(samples: np.ndarray) -> MCEstimate:
    n = samples.size
    if n < 2:
        raise ScenarioError("need at least two Monte Carlo paths")
    hw = Z975 * float(np.std(samples, ddof=1)) / np.sqrt(n)
    return MCEstimate(float(np.mean(samples)), hw, n)


def mc_estimate_objective(
    params: ScenarioParams,
    control: ControlPath,
    n_paths: int,
    dt: Optional[float] = None,
    seed: int = 0,
    **kwargs,
) -> MCEstimate:
    """Monte Carlo mean and 95% half-width of the objective for ``control``.

    Path ``i`` always uses the noise stream ``(seed, i)``, so results do not
    depend on ``workers`` and two controls estimated with the same seed share
    their random numbers.
    """
    check_grid(params, dt, control)
    if n_paths < 2:
        raise ScenarioError("need at least two Monte Carlo paths")
    return summarize(objective_samples(params, control, n_paths, seed, **kwargs))


def tabulated(xs, ys) -> Callable:
    """Piecewise-linear function through ``(xs, ys)``, flat outside the table."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or np.any(np.diff(xs) <= 0):
        raise ScenarioError("tabulated function needs increasing abscissae")
    return lambda x: np.interp(x, xs, ys)
