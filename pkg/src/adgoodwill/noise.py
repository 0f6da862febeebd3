"""Reproducible Brownian increments from a counter-based generator.

Every path is its own Philox stream keyed by ``(seed, path_index)``; the
``j``-th fine normal of that path is a pure function of the key and ``j``.
Paths can therefore be generated in any order, on any number of workers,
and a single increment can be regenerated without touching the others.

A path may be built on a coarse grid from a finer base grid
(``substeps > 1``): each coarse increment is the sum of ``substeps`` fine
increments, so coarse and fine simulations see the same Brownian motion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import ndtri

from .errors import ScenarioError

_WORDS_PER_BLOCK = 4  # Philox4x64 emits four 64-bit words per counter value
_TWO_M53 = 2.0 ** -53


def _check_key(seed: int, path_index: int):
    if not (0 <= seed < 2 ** 64 and 0 <= path_index < 2 ** 64):
        raise ScenarioError("seed and path index must fit in an unsigned 64-bit word")


def _normals(seed: int, path_index: int, start: int, count: int) -> np.ndarray:
    _check_key(seed, path_index)
    bitgen = np.random.Philox(key=[seed, path_index])
    block, offset = divmod(start, _WORDS_PER_BLOCK)
    if block:
        bitgen.advance(block)
    raw = bitgen.random_raw(offset + count)[offset:]
    # open-interval uniforms from the top 53 bits, then the inverse normal cdf
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
    return ndtri(u)


def brownian_increments(
    seed: int, path_index: int, n_steps: int, dt: float, substeps: int = 1
) -> np.ndarray:
    """Increments of one Brownian path: ``n_steps`` values, each ~ N(0, dt)."""
    if substeps < 1:
        raise ScenarioError("substeps must be >= 1")
    z = _normals(seed, path_index, 0, n_steps * substeps)
    fine = z * np.sqrt(dt / substeps)
    if substeps == 1:
        return fine
    return fine.reshape(n_steps, substeps).sum(axis=1)


def increment_matrix(
    seed: int, path_indices, n_steps: int, dt: float, substeps: int = 1
) -> np.ndarray:
    """Stack increments of several paths, one row per path index."""
    return np.array(
        [brownian_increments(seed, int(p), n_steps, dt, substeps) for p in path_indices]
    ).reshape(len(path_indices), n_steps)


@dataclass(frozen=True)
class NoisePath:
    """Brownian increments of path ``path_index`` under ``seed``.

    ``increments[k]`` is ``W(t_{k+1}) - W(t_k)`` on a grid of step ``dt``.
    """

    seed: int
    path_index: int
    dt: float
    n_steps: int
    substeps: int = 1

    def __post_init__(self):
        _check_key(self.seed, self.path_index)
        if self.n_steps < 1 or not self.dt > 0 or self.substeps < 1:
            raise ScenarioError("noise path needs n_steps >= 1, dt > 0, substeps >= 1")

    @classmethod
    def zero(cls, dt: float, n_steps: int) -> NoisePath:
        """Placeholder path for deterministic runs (values are still valid draws)."""
        return cls(0, 0, dt, n_steps)

    @cached_property
    def increments(self) -> np.ndarray:
        out = brownian_increments(
            self.seed, self.path_index, self.n_steps, self.dt, self.substeps
        )
        out.setflags(write=False)
        return out

    def increment(self, k: int) -> float:
        """The ``k``-th increment, regenerated directly from its counter."""
        if not 0 <= k < self.n_steps:
            raise IndexError(k)
        fine = _normals(self.seed, self.path_index, k * self.substeps, self.substeps)
        return float(np.sum(fine * np.sqrt(self.dt / self.substeps)))

    def coarsened(self, factor: int) -> NoisePath:
        """Same Brownian path on a grid ``factor`` times coarser."""
        if self.n_steps % factor:
            raise ScenarioError("coarsening factor must divide the number of steps")
        return NoisePath(
            self.seed,
            self.path_index,
            self.dt * factor,
            self.n_steps // factor,
            self.substeps * factor,
        )
