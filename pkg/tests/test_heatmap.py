"""Gaussian targets, softmax, JSD loss and landmark decoding."""

from __future__ import annotations

import math

import numpy as np
import pytest

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng
from RopeTK.Heatmaps.decode import decode_argmax
from RopeTK.Heatmaps.decode import decode_expectation
from RopeTK.Heatmaps.decode import DecodedLandmarks
from RopeTK.Heatmaps.decode import off_crop_channels
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import jsd_loss
from RopeTK.Heatmaps.stack import make_gaussian_stack
from RopeTK.Heatmaps.stack import make_multi_precision
from RopeTK.Heatmaps.stack import normalize_channels
from RopeTK.Heatmaps.stack import softmax_channels


CENTRES = np.array([[40.3, 36.7], [50.0, 45.0], [60.5, 41.25]])
SIZE = (96, 80)


# ── Helpers ──────────────────────────────────────────────────────────────

def _one_hot(width: int, height: int, *pixels: tuple[int, int]) -> HeatmapStack:
    values = np.zeros((len(pixels), height, width))
    for k, (u, v) in enumerate(pixels):
        values[k, v, u] = 1.0
    return HeatmapStack(values, normalized=True)


class TestStack:

    def test_gaussian_channels_are_distributions(self):
        stack = make_gaussian_stack(CENTRES, SIZE, 1.5)
        assert stack.values.shape == (3, 80, 96)
        assert stack.size == SIZE
        assert stack.normalized
        np.testing.assert_allclose(stack.flat().sum(axis=1), 1.0, atol=1e-12)

    def test_peak_sits_on_nearest_pixel(self):
        stack = make_gaussian_stack([[12.3, 20.7]], SIZE, 1.5)
        v, u = np.unravel_index(np.argmax(stack.values[0]), (80, 96))
        assert (u, v) == (12, 21)

    def test_far_landmark_keeps_mass(self):
        stack = make_gaussian_stack([[500.0, -300.0]], SIZE, 1.5)
        assert stack.flat().sum() == pytest.approx(1.0)
        assert np.all(np.isfinite(stack.values))

    def test_rejects_bad_sigma(self):
        with pytest.raises(RopeValueError):
            make_gaussian_stack(CENTRES, SIZE, 0.0)

    def test_multi_precision_levels(self):
        stacks = make_multi_precision(CENTRES, SIZE)
        assert set(stacks) == set(PrecisionLevel)
        peaks = {level: stack.flat().max(axis=1) for level, stack in stacks.items()}
        assert np.all(peaks[PrecisionLevel.High] > peaks[PrecisionLevel.Medium])
        assert np.all(peaks[PrecisionLevel.Medium] > peaks[PrecisionLevel.Low])

    def test_false_normalized_flag_is_rejected(self):
        with pytest.raises(RopeValueError):
            HeatmapStack(np.ones((1, 4, 4)), normalized=True)

    def test_bad_shape_is_rejected(self):
        with pytest.raises(RopeValueError):
            HeatmapStack(np.ones((4, 4)))

    def test_softmax_of_constant_is_uniform(self):
        stack = softmax_channels(HeatmapStack(np.full((2, 3, 5), 7.0)))
        np.testing.assert_allclose(stack.values, 1.0 / 15.0)

    def test_softmax_survives_large_logits(self):
        values = np.zeros((1, 4, 4))
        values[0, 1, 2] = 1000.0
        stack = softmax_channels(HeatmapStack(values))
        assert stack.values[0, 1, 2] == pytest.approx(1.0)

    def test_normalize_channels(self):
        stack = normalize_channels(HeatmapStack(np.arange(1.0, 7.0).reshape(1, 2, 3)))
        assert stack.values[0, 1, 2] == pytest.approx(6.0 / 21.0)

    def test_normalize_rejects_negative_and_empty(self):
        with pytest.raises(RopeValueError):
            normalize_channels(HeatmapStack(-np.ones((1, 2, 2))))
        with pytest.raises(RopeValueError):
            normalize_channels(HeatmapStack(np.zeros((1, 2, 2))))


class TestJsd:

    def test_identical_stacks(self):
        stack = make_gaussian_stack(CENTRES, SIZE, 3.0)
        assert jsd_loss(stack, stack) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint_supports_reach_ln2(self):
        p = _one_hot(4, 4, (0, 0), (1, 1))
        q = _one_hot(4, 4, (3, 3), (2, 2))
        assert jsd_loss(p, q) == pytest.approx(np.log(2.0))

    def test_symmetric_and_bounded(self):
        p = make_gaussian_stack(CENTRES, SIZE, 1.5)
        q = make_gaussian_stack(CENTRES + 2.0, SIZE, 3.0)
        assert jsd_loss(p, q) == pytest.approx(jsd_loss(q, p))
        assert 0.0 < jsd_loss(p, q) < np.log(2.0)

    def test_rejects_mismatch_and_raw_maps(self):
        p = make_gaussian_stack(CENTRES, SIZE, 1.5)
        with pytest.raises(RopeValueError):
            jsd_loss(p, make_gaussian_stack(CENTRES[:2], SIZE, 1.5))
        with pytest.raises(RopeValueError):
            jsd_loss(p, HeatmapStack(np.ones_like(p.values)))

    def test_matches_term_by_term_sums(self):
        rng = make_rng(17)
        for _ in range(100):
            raw = rng.random((2, 1, 4, 5)) * (rng.random((2, 1, 4, 5)) > 0.2)
            raw[:, 0, 0, 0] += 0.1
            p_values, q_values = raw / raw.sum(axis=(1, 2, 3), keepdims=True)
            p = HeatmapStack(p_values, normalized=True)
            q = HeatmapStack(q_values, normalized=True)

            expected = 0.0
            for a, b in zip(p_values.ravel().tolist(), q_values.ravel().tolist()):
                m = 0.5 * (a + b)
                if a > 0:
                    expected += 0.5 * a * math.log(a / m)
                if b > 0:
                    expected += 0.5 * b * math.log(b / m)

            assert jsd_loss(p, q) == pytest.approx(expected, abs=1e-10)
            assert abs(jsd_loss(p, q) - jsd_loss(q, p)) <= 1e-12


class TestDecode:

    @pytest.mark.parametrize("sigma", [1.5, 3.0])
    def test_expectation_recovers_subpixel_centres(self, sigma: float):
        decoded = decode_expectation(make_gaussian_stack(CENTRES, SIZE, sigma))
        np.testing.assert_allclose(decoded.coords, CENTRES, atol=1e-6)
        np.testing.assert_array_equal(decoded.indices, [0, 1, 2])

    @pytest.mark.slow
    @pytest.mark.parametrize("level", list(PrecisionLevel))
    def test_expectation_round_trip_on_random_centres(self, level: PrecisionLevel):
        # centres at least 4 sigma inside the frame keep the truncated tails negligible
        margin = 4.0 * level.sigma
        width, height = SIZE
        rng = make_rng(23)
        centres = np.column_stack([
            rng.uniform(margin, width - 1 - margin, 1000),
            rng.uniform(margin, height - 1 - margin, 1000),
        ])
        for start in range(0, len(centres), 100):
            batch = centres[start:start + 100]
            decoded = decode_expectation(make_gaussian_stack(batch, SIZE, level.sigma))
            np.testing.assert_allclose(decoded.coords, batch, atol=0.05)

    def test_argmax_is_integer(self):
        decoded = decode_argmax(make_gaussian_stack(CENTRES, SIZE, 1.5), PrecisionLevel.High)
        np.testing.assert_array_equal(decoded.coords, [[40, 37], [50, 45], [60, 41]])
        assert decoded.level is PrecisionLevel.High

    def test_argmax_ties_take_first_pixel(self):
        decoded = decode_argmax(HeatmapStack(np.ones((1, 3, 3))))
        np.testing.assert_array_equal(decoded.coords, [[0.0, 0.0]])

    def test_raw_maps_are_softmaxed(self):
        raw = HeatmapStack(make_multi_precision(CENTRES, SIZE)[PrecisionLevel.Low].values * 50.0)
        direct = decode_expectation(raw)
        via_softmax = decode_expectation(softmax_channels(raw))
        np.testing.assert_allclose(direct.coords, via_softmax.coords)

    def test_peak_mass(self):
        decoded = decode_expectation(_one_hot(5, 5, (2, 3)))
        np.testing.assert_allclose(decoded.coords, [[2.0, 3.0]])
        assert decoded.peak_mass[0] == pytest.approx(1.0)

    def test_landmarks_carry_ids(self):
        decoded = DecodedLandmarks(None, [[1.0, 2.0], [3.0, 4.0]], [0.5, 0.5], indices=[7, 3])
        assert [lm.index for lm in decoded.landmarks()] == [7, 3]

    def test_duplicate_ids_rejected(self):
        with pytest.raises(RopeValueError):
            DecodedLandmarks(None, [[1.0, 2.0], [3.0, 4.0]], [0.5, 0.5], indices=[1, 1])

    def test_off_crop_flags(self):
        stack = make_gaussian_stack([[0.0, 0.0], [0.0, 0.0]], SIZE, 1.5)
        flags = off_crop_channels([[-5.0, 10.0], [-7.0, 10.0]], stack, 1.5)
        assert flags.tolist() == [False, True]
