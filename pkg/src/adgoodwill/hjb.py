"""Closed-form HJB solution for linear terminal reward and quadratic spending cost.

With reward ``gamma y(T)`` and cost ``beta z^2`` the value function is affine
in the lifted state, ``v(t, x) = <w(t), x> + c(t)``.  The window part of ``w``
is a transport of its scalar part, ``w1(t, xi) = w0(t - xi)`` while
``t - xi <= T`` and zero beyond, so only ``w0`` and ``c`` are stored.  ``w0``
solves an advanced-argument ODE backward from ``w0(T) = gamma``; ``c``
accumulates the Hamiltonian of ``<B, w>``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DomainError, ScenarioError, UnsupportedScenario
from .grid import ALIGN_RTOL, ControlPath, trapezoid_weights
from .lift import DOMAIN_TOL, LiftedState, apply_A
from .params import ScenarioParams


class OffGridWarning(UserWarning):
    """A query fell between grid nodes and was answered by interpolation."""


def hamiltonian(Bp: float, beta: float) -> tuple[float, float]:
    """Maximum and maximiser of ``z -> Bp z - beta z^2`` over ``z >= 0``."""
    if not beta > 0:
        raise ScenarioError("beta must be positive")
    pos = max(Bp, 0.0)
    return pos * pos / (4.0 * beta), pos / (2.0 * beta)


def _h0(Bp: np.ndarray, beta: float) -> np.ndarray:
    pos = np.maximum(Bp, 0.0)
    return pos * pos / (4.0 * beta)


@dataclass(frozen=True, eq=False)
class LinearValueFunction:
    params: ScenarioParams
    w0: np.ndarray
    c: Optional[np.ndarray] = None

    @property
    def times(self) -> np.ndarray:
        return self.params.times

    @property
    def dt(self) -> float:
        return self.params.dt

    def node(self, t: float) -> int:
        k = int(round(t / self.dt))
        if abs(k * self.dt - t) > ALIGN_RTOL * max(1.0, abs(t)) or not 0 <= k <= self.params.n_steps:
            raise ScenarioError(f"time {t!r} is not a node of the solution grid")
        return k

    @property
    def Bw(self) -> np.ndarray:
        """``<B, w(t_k)>`` at every node."""
        return self.params.b0 * self.w0 + np.array(
            [_future_pairing(self.w0, k, self.params.b1.values, self.dt)
             for k in range(self.w0.size)]
        )

    def require_c(self) -> np.ndarray:
        if self.c is None:
            raise ScenarioError("the constant part has not been solved yet (see solve_c)")
        return self.c


def _future_pairing(w0: np.ndarray, k: int, profile: np.ndarray, h: float) -> float:
    """``int_{-r}^0 profile(xi) w1(t_k, xi) d xi`` on the grid.

    The integrand vanishes for ``t_k - xi > T``; the trapezoid runs over the
    remaining support, whose end ``t_k - xi = T`` is a grid node.
    """
    n = profile.size
    m = min(n, w0.size - k)
    if m < 2:
        return 0.0
    return float(trapezoid_weights(m, h) @ (w0[k : k + m] * profile[::-1][:m]))


def _check_supported(params: ScenarioParams):
    if params.point_delay:
        raise UnsupportedScenario(
            "the explicit value function is built on the lifted state space, "
            "which needs a square-integrable forgetting kernel"
        )


def solve_w(params: ScenarioParams) -> LinearValueFunction:
    """Integrate the scalar part of ``w`` backward from ``w0(T) = gamma``.

    ``w0'(t) = -a0 w0(t) - int_{-r}^0 a1(xi) w0(t - xi) 1{t - xi <= T} d xi``
    only looks forward in time, so a backward classical Runge-Kutta sweep has
    every value it needs: stored nodes, linear interpolation between them at
    half steps, and the stage value itself at ``xi = 0``.
    """
    _check_supported(params)
    N, h, n = params.n_steps, params.dt, params.n_points
    a1 = params.a1.values
    a1_rev = a1[::-1]  # a1 at xi = -j h, j = 0..n-1
    w0 = np.empty(N + 1)
    w0[N] = params.gamma
    no_memory = params.a1.is_zero()

    def memory_on_nodes(k):
        # t = t_k; nodes s_j = t_k + j h, j = 1..m-1 (stage value excluded)
        m = min(n, N - k + 1)
        if m < 2:
            return 0.0, 0.0
        wts = trapezoid_weights(m, h)
        rest = float(wts[1:] @ (a1_rev[1:m] * w0[k + 1 : k + m]))
        return rest, wts[0] * a1_rev[0]

    def memory_at_half(k):
        # t = t_k + h/2; nodes s_j = t + j h sit halfway between stored nodes
        j_max = N - k - 1  # last j with s_j <= T
        if j_max >= n - 1:
            s_idx = np.arange(1, n)
            vals = 0.5 * (w0[k + s_idx] + w0[k + s_idx + 1])
            wts = trapezoid_weights(n, h)
            return float(wts[1:] @ (a1_rev[1:] * vals)), wts[0] * a1_rev[0]
        # support ends at s = T, half a cell past the last half-node
        j = np.arange(1, j_max + 1)
        vals = 0.5 * (w0[k + j] + w0[k + j + 1])
        ks = np.concatenate([a1_rev[: j_max + 1], [0.5 * (a1_rev[j_max] + a1_rev[j_max + 1])]])
        fs = np.concatenate([[np.nan], vals, [w0[N]]])
        ds = np.concatenate([np.full(j_max, h), [0.5 * h]])
        wts = np.zeros(j_max + 2)
        wts[:-1] += 0.5 * ds
        wts[1:] += 0.5 * ds
        rest = float(wts[1:] @ (ks[1:] * fs[1:]))
        return rest, wts[0] * ks[0]

    def rhs(w, memory):
        rest, self_weight = memory
        return -params.a0 * w - rest - self_weight * w

    zero = (0.0, 0.0)
    for k in range(N - 1, -1, -1):
        if no_memory:
            m_top = m_mid = m_bot = zero
        else:
            m_top = memory_on_nodes(k + 1)
            m_mid = memory_at_half(k)
            m_bot = memory_on_nodes(k)
        w = w0[k + 1]
        k1 = rhs(w, m_top)
        k2 = rhs(w - 0.5 * h * k1, m_mid)
        k3 = rhs(w - 0.5 * h * k2, m_mid)
        k4 = rhs(w - h * k3, m_bot)
        w0[k] = w - h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return LinearValueFunction(params, w0)


def _cumulative_from_end(f: np.ndarray, h: float) -> np.ndarray:
    """``int_{t_k}^{T} f`` by the trapezoid rule for every node ``k``."""
    out = np.zeros_like(f)
    out[:-1] = np.cumsum((0.5 * h * (f[1:] + f[:-1]))[::-1])[::-1]
    return out


def solve_c(params: ScenarioParams, vf: LinearValueFunction) -> LinearValueFunction:
    """``c(t) = int_t^T (<B, w(s)>^+)^2 / (4 beta) ds``."""
    if vf.params is not params and vf.params != params:
        raise ScenarioError("value function was solved for different parameters")
    c = _cumulative_from_end(_h0(vf.Bw, params.beta), params.dt)
    return replace(vf, c=c)


def solve(params: ScenarioParams) -> LinearValueFunction:
    """Both parts of the value function."""
    return solve_c(params, solve_w(params))


def eval_w1(vf: LinearValueFunction, t: float, xi: float) -> float:
    """Window part of ``w``: ``w0(t - xi)`` while ``t - xi <= T``, else 0."""
    p = vf.params
    if not (-ALIGN_RTOL <= t <= p.T * (1 + ALIGN_RTOL)) or not (-p.r * (1 + ALIGN_RTOL) <= xi <= ALIGN_RTOL):
        raise ScenarioError(f"query ({t!r}, {xi!r}) outside [0, T] x [-r, 0]")
    s = t - xi
    if s > p.T + ALIGN_RTOL * max(1.0, p.T):
        return 0.0
    pos = s / vf.dt
    k = int(round(pos))
    if abs(pos - k) <= ALIGN_RTOL * max(1.0, abs(pos)):
        return float(vf.w0[min(k, p.n_steps)])
    warnings.warn(f"w1({t!r}, {xi!r}) interpolated between grid nodes", OffGridWarning)
    return float(np.interp(s, vf.times, vf.w0))


def value_function(vf: LinearValueFunction, t: float, x: LiftedState) -> float:
    """``v(t, x) = w0(t) x0 + int w1(t, xi) x1(xi) d xi + c(t)``."""
    c = vf.require_c()
    if not x.tail.same_grid(vf.params.b1):
        raise ScenarioError("lifted state is not on the scenario grid")
    k = vf.node(t)
    return vf.w0[k] * x.head + _future_pairing(vf.w0, k, x.tail.values, vf.dt) + c[k]


def optimal_control_path(vf: LinearValueFunction) -> ControlPath:
    """Open-loop optimal spending ``<B, w(t)>^+ / (2 beta)``."""
    return ControlPath(np.maximum(vf.Bw, 0.0) / (2.0 * vf.params.beta), vf.dt)


def integral_residual(
    vf: LinearValueFunction, params: ScenarioParams, t: float, x: LiftedState
) -> float:
    """Left side of the integrated HJB identity at ``(t, x)``.

    ``gamma x0 - v(t, x) + int_t^T [<A x, w(s)> + H0(w(s))] ds`` with the
    second-order term absent since ``v`` is affine in ``x``.
    """
    if abs(x.tail.values[0]) > DOMAIN_TOL:
        raise DomainError(
            f"state outside the domain of A: x1(-r) = {x.tail.values[0]!r} must vanish"
        )
    Ax = apply_A(x, params)
    k0 = vf.node(t)
    h = vf.dt
    N = params.n_steps
    pair = np.array(
        [Ax.head * vf.w0[k] + _future_pairing(vf.w0, k, Ax.tail.values, h) for k in range(k0, N + 1)]
    )
    integrand = pair + _h0(vf.Bw[k0:], params.beta)
    integral = _cumulative_from_end(integrand, h)[0]
    return params.gamma * x.head - value_function(vf, t, x) + integral
