import numpy as np
import pytest

from adgoodwill import ScenarioParams


def canonical(n_points=101, sigma=0.5, **kw):
    """No memory, b0 = gamma = beta = 1, T = 1: z* = 1/2 and c(0) = 1/4."""
    base = dict(r=1.0, T=1.0, n_points=n_points, b0=1.0, gamma=1.0, beta=1.0,
                sigma=sigma, eta0=1.0)
    base.update(kw)
    return ScenarioParams.build(**base)


def generic(n_points=26, sigma=0.2, **kw):
    """Smooth scenario with memory in state and spending; ramp b1 from 0 to 1."""
    base = dict(r=1.0, T=2.0, n_points=n_points, a0=-0.5, a1=0.3, b0=1.0,
                b1=lambda xi: xi + 1.0, sigma=sigma, eta0=1.0, delta=0.5)
    base.update(kw)
    return ScenarioParams.build(**base)


def smooth_control(t):
    return 1.0 + 0.5 * np.sin(3.0 * t)


@pytest.fixture
def canonical_params():
    return canonical()


@pytest.fixture
def generic_params():
    return generic()
