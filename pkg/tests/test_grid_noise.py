import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from adgoodwill import ControlPath, NoisePath, ScenarioError, SegmentPath
from adgoodwill.grid import steps_for, trapezoid_weights
from adgoodwill.noise import brownian_increments, increment_matrix


def test_segment_grid_spacing():
    s = SegmentPath.constant(2.0, 5, 1.5)
    assert s.dxi == 0.5
    np.testing.assert_array_equal(s.xi, [-2.0, -1.5, -1.0, -0.5, 0.0])
    assert s.integral() == pytest.approx(3.0, abs=1e-14)


def test_segment_rejects_bad_input():
    with pytest.raises(ScenarioError):
        SegmentPath(1.0, [1.0])
    with pytest.raises(ScenarioError):
        SegmentPath(1.0, [1.0, np.nan])
    with pytest.raises(ScenarioError):
        SegmentPath(0.0, [1.0, 2.0])


def test_segment_values_are_immutable():
    s = SegmentPath.constant(1.0, 3, 1.0)
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_from_table_interpolates_linearly():
    s = SegmentPath.from_table(1.0, 5, [-1.0, 0.0], [0.0, 1.0])
    np.testing.assert_allclose(s.values, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_trapezoid_weights_integrate_linear_exactly():
    w = trapezoid_weights(11, 0.1)
    x = np.linspace(0, 1, 11)
    assert w @ (3 * x + 1) == pytest.approx(2.5, abs=1e-14)


def test_steps_for_rejects_misaligned_step():
    assert steps_for(1.0, 0.01) == 100
    with pytest.raises(ScenarioError, match="does not divide"):
        steps_for(1.0, 0.3)


def test_control_rejects_negative_values():
    with pytest.raises(ScenarioError, match="non-negative"):
        ControlPath(np.array([0.1, -0.2, 0.3]), 0.5)


def test_control_resampling_keeps_linear_paths():
    c = ControlPath.from_function(lambda t: 1 + 2 * t, 1.0, 0.1)
    fine = c.resampled(0.05)
    np.testing.assert_allclose(fine.values, 1 + 2 * fine.times, atol=1e-13)


def test_noise_is_reproducible_and_order_independent():
    a = brownian_increments(11, 3, 50, 0.02)
    b = brownian_increments(11, 3, 50, 0.02)
    np.testing.assert_array_equal(a, b)
    forward = increment_matrix(11, [0, 1, 2, 3], 50, 0.02)
    backward = increment_matrix(11, [3, 2, 1, 0], 50, 0.02)[::-1]
    np.testing.assert_array_equal(forward, backward)
    np.testing.assert_array_equal(forward[3], a)


def test_streams_differ_between_paths_and_seeds():
    a = brownian_increments(1, 0, 20, 0.1)
    assert not np.array_equal(a, brownian_increments(1, 1, 20, 0.1))
    assert not np.array_equal(a, brownian_increments(2, 0, 20, 0.1))


@settings(max_examples=40, deadline=None)
@given(k=st.integers(0, 99), substeps=st.sampled_from([1, 2, 4]))
def test_single_increment_random_access(k, substeps):
    path = NoisePath(5, 9, 0.01 * substeps, 100, substeps)
    assert path.increment(k) == path.increments[k]


def test_coarsening_sums_fine_increments():
    fine = NoisePath(4, 2, 0.01, 200)
    coarse = fine.coarsened(4)
    assert coarse.dt == pytest.approx(0.04)
    np.testing.assert_allclose(
        coarse.increments, fine.increments.reshape(50, 4).sum(axis=1), rtol=0, atol=1e-15
    )


def test_increments_are_standard_brownian():
    dt = 0.01
    dW = increment_matrix(123, range(200), 100, dt).ravel()
    assert abs(dW.mean()) < 4 * np.sqrt(dt / dW.size)
    assert dW.var() == pytest.approx(dt, rel=0.03)
    assert stats.kstest(dW / np.sqrt(dt), "norm").pvalue > 1e-3
