"""High/medium landmark verification."""

from __future__ import annotations

import numpy as np
import pytest

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import RopeValueError
from RopeTK.Geometry.cloud import Landmark3D
from RopeTK.Heatmaps.decode import DecodedLandmarks
from RopeTK.Solvers.landmark_filter import filter_landmarks
from RopeTK.Solvers.landmark_filter import FilterConfig
from RopeTK.Solvers.landmark_filter import passthrough_correspondences


# ── Helpers ──────────────────────────────────────────────────────────────

def _decoded(coords, level=PrecisionLevel.High, indices=None) -> DecodedLandmarks:
    coords = np.asarray(coords, dtype=np.float64)
    return DecodedLandmarks(level, coords, np.ones(len(coords)), indices)


def _model(k: int) -> list[Landmark3D]:
    return [Landmark3D(i, (float(i), 2.0 * i, 10.0 + i)) for i in range(k)]


def _pair(shifts: list[float]) -> tuple[DecodedLandmarks, DecodedLandmarks]:
    """High landmarks on a diagonal, medium ones moved right by ``shifts``."""
    high = np.array([[10.0 * i, 5.0 * i] for i in range(len(shifts))])
    medium = high + np.column_stack([shifts, np.zeros(len(shifts))])
    return _decoded(high), _decoded(medium, PrecisionLevel.Medium)


class TestFilterLandmarks:

    def test_all_agree(self):
        high, medium = _pair([0.1] * 6)
        corr = filter_landmarks(high, medium, _model(6))
        assert corr.kept_indices == (0, 1, 2, 3, 4, 5)
        assert not corr.fallback_used
        assert corr.dropped_indices == ()

    def test_drops_disagreeing_landmarks(self):
        high, medium = _pair([0.0, 5.0, 0.2, 0.0, 3.0, 0.5, 0.1])
        corr = filter_landmarks(high, medium, _model(7))
        assert corr.kept_indices == (0, 2, 3, 5, 6)
        assert corr.dropped_indices == (1, 4)
        np.testing.assert_array_equal(corr.image_points, high.coords[[0, 2, 3, 5, 6]])
        np.testing.assert_array_equal(corr.object_points[1], [2.0, 4.0, 12.0])

    def test_threshold_is_inclusive(self):
        high, medium = _pair([1.0, 1.0, 1.0, 1.0, 1.5])
        corr = filter_landmarks(high, medium, _model(5), FilterConfig(epsilon=1.0))
        assert corr.kept_indices == (0, 1, 2, 3)

    def test_exactly_four_is_not_a_fallback(self):
        high, medium = _pair([0.0, 0.0, 9.0, 0.0, 0.0])
        corr = filter_landmarks(high, medium, _model(5))
        assert len(corr) == 4
        assert not corr.fallback_used

    def test_fallback_takes_smallest_disagreements(self):
        high, medium = _pair([0.0, 4.0, 2.0, 0.5, 2.0, 8.0])
        corr = filter_landmarks(high, medium, _model(6))
        assert corr.fallback_used
        # ids 2 and 4 tie at 2.0; the lower id wins
        assert corr.kept_indices == (0, 2, 3, 4)

    def test_fallback_tie_break(self):
        high, medium = _pair([3.0, 3.0, 3.0, 3.0, 3.0])
        corr = filter_landmarks(high, medium, _model(5))
        assert corr.kept_indices == (0, 1, 2, 3)

    def test_unordered_ids_are_aligned(self):
        high = _decoded([[30.0, 0.0], [10.0, 0.0], [20.0, 0.0], [0.0, 0.0]], indices=[3, 1, 2, 0])
        medium = _decoded(
            [[0.0, 0.0], [10.0, 0.0], [20.0, 0.0], [35.0, 0.0]], PrecisionLevel.Medium, indices=[0, 1, 2, 3]
        )
        corr = filter_landmarks(high, medium, list(reversed(_model(4))), FilterConfig(epsilon=1.0))
        assert corr.fallback_used
        assert corr.kept_indices == (0, 1, 2, 3)
        np.testing.assert_array_equal(corr.image_points[:, 0], [0.0, 10.0, 20.0, 30.0])
        np.testing.assert_allclose(corr.disagreement, [0.0, 0.0, 0.0, 5.0])

    def test_pairs(self):
        high, medium = _pair([0.0] * 4)
        first_2d, first_3d = filter_landmarks(high, medium, _model(4)).pairs[0]
        assert first_2d.index == first_3d.index == 0

    def test_too_few_landmarks(self):
        high, medium = _pair([0.0] * 3)
        with pytest.raises(RopeValueError):
            filter_landmarks(high, medium, _model(3))

    def test_mismatched_ids(self):
        high, medium = _pair([0.0] * 4)
        model = _model(3) + [Landmark3D(9, (0.0, 0.0, 0.0))]
        with pytest.raises(RopeValueError):
            filter_landmarks(high, medium, model)

    def test_negative_epsilon(self):
        with pytest.raises(RopeValueError):
            FilterConfig(epsilon=-1.0)


class TestPassthrough:

    def test_keeps_everything(self):
        high, medium = _pair([0.0, 9.0, 0.0, 9.0, 0.0])
        corr = passthrough_correspondences(high, _model(5), medium)
        assert corr.kept_indices == (0, 1, 2, 3, 4)
        assert not corr.fallback_used
        np.testing.assert_allclose(corr.disagreement, [0.0, 9.0, 0.0, 9.0, 0.0])

    def test_without_medium(self):
        high, _ = _pair([0.0] * 4)
        corr = passthrough_correspondences(high, _model(4))
        np.testing.assert_array_equal(corr.disagreement, np.zeros(4))
