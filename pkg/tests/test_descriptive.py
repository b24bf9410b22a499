"""Circular summary statistics tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vmkappa.descriptive import (
    circular_median,
    mean_arc_deviation,
    rotated_deviations,
    summarize,
)
from vmkappa.sampling import TWO_PI, TrueParams, sample_von_mises

angles_list = st.lists(
    st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True), min_size=1, max_size=40
)


class TestSummarize:
    def test_antipodal_cancellation(self):
        s = summarize([0.0, math.pi])
        assert abs(s.rbar) <= 1e-15
        assert s.mean_dir == 0.0
        assert s.degenerate

    def test_identical_angles(self):
        theta = 2.2
        s = summarize([theta, theta, theta])
        assert s.rbar == pytest.approx(1.0, abs=1e-15)
        assert s.mean_dir == pytest.approx(theta, abs=1e-12)

    def test_orthogonal_pair(self):
        s = summarize([0.0, math.pi / 2])
        assert s.rbar == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert s.mean_dir == pytest.approx(math.pi / 4, abs=1e-15)

    def test_sums_retained_at_full_precision(self):
        x = np.array([0.1, 1.3, 4.0])
        s = summarize(x)
        assert s.sum_cos == pytest.approx(float(np.cos(x).sum()), abs=2e-15)
        assert s.sum_sin == pytest.approx(float(np.sin(x).sum()), abs=2e-15)
        assert s.n == 3

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize([])

    @settings(max_examples=60, deadline=None)
    @given(angles_list, st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True))
    def test_rotation_equivariance(self, angles, delta):
        base = summarize(angles)
        moved = summarize((np.asarray(angles) + delta) % TWO_PI)
        assert moved.rbar == pytest.approx(base.rbar, abs=1e-12)
        if not base.degenerate and base.rbar > 1e-6:
            diff = (moved.mean_dir - base.mean_dir - delta) % TWO_PI
            assert min(diff, TWO_PI - diff) < 1e-9

    @settings(max_examples=60, deadline=None)
    @given(angles_list)
    def test_rbar_in_unit_interval(self, angles):
        s = summarize(angles)
        assert 0.0 <= s.rbar <= 1.0


class TestCircularMedian:
    def test_single_point(self):
        assert circular_median([1.7]) == 1.7

    def test_majority_point(self):
        assert circular_median([0.0, 0.0, math.pi / 2]) == 0.0

    def test_tie_breaks_to_smallest(self):
        # two points: both are minimizers, the smaller angle wins
        assert circular_median([2.0, 1.0]) == 1.0

    def test_recovers_location(self):
        x = sample_von_mises(TrueParams(mu=1.0, kappa=5.0), 51, seed=11)
        med = circular_median(x)
        diff = abs(med - 1.0) % TWO_PI
        assert min(diff, TWO_PI - diff) < 0.5

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_beats_dense_grid(self, seed):
        x = sample_von_mises(TrueParams(mu=2.0, kappa=0.7), 4 + seed * 4, seed=seed)
        med = circular_median(x)
        grid = np.linspace(0.0, TWO_PI, 10_000, endpoint=False)
        grid_best = min(mean_arc_deviation(x, g) for g in grid)
        assert mean_arc_deviation(x, med) <= grid_best + 1e-12


class TestRotatedDeviations:
    def test_plain(self):
        np.testing.assert_allclose(rotated_deviations([0.1], 0.0), [0.1])

    def test_wrap_below_zero(self):
        np.testing.assert_allclose(rotated_deviations([TWO_PI - 0.1], 0.0), [-0.1], atol=1e-15)

    def test_wrap_across_pi(self):
        np.testing.assert_allclose(
            rotated_deviations([math.pi + 0.2], 0.0), [-(math.pi - 0.2)], atol=1e-15
        )

    def test_pi_itself_stays(self):
        assert rotated_deviations([math.pi], 0.0)[0] == math.pi

    @settings(max_examples=80, deadline=None)
    @given(angles_list, st.floats(min_value=-10.0, max_value=10.0))
    def test_range_property(self, angles, center):
        d = rotated_deviations(angles, center)
        assert np.all(d > -math.pi)
        assert np.all(d <= math.pi)
