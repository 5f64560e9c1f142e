"""Occlude-and-blackout augmentation and batch extension."""

from __future__ import annotations

import numpy as np
import pytest

from RopeTK.Augment.image import BBox
from RopeTK.Augment.image import ImageBuffer
from RopeTK.Augment.image import read_png
from RopeTK.Augment.image import write_png
from RopeTK.Augment.oba import apply_oba
from RopeTK.Augment.oba import extend_batch
from RopeTK.Augment.oba import ObaConfig
from RopeTK.Augment.oba import plan_oba
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng


BOX = BBox(8, 6, 40, 30)


# ── Helpers ──────────────────────────────────────────────────────────────

def _image(seed: int = 0, width: int = 48, height: int = 36) -> ImageBuffer:
    pixels = make_rng(seed).integers(1, 256, size=(height, width, 3), dtype=np.uint8)
    return ImageBuffer(pixels)


def _outside(pixels: np.ndarray, box: BBox) -> np.ndarray:
    mask = np.ones(pixels.shape[:2], dtype=bool)
    mask[box.y0:box.y1, box.x0:box.x1] = False
    return pixels[mask]


class TestObaConfig:

    @pytest.mark.parametrize(
        "kwargs",
        [{"grid_rows": 0}, {"p_occlude": 1.5}, {"p_noise_vs_patch": -0.1}, {"seed": -1}],
    )
    def test_rejects_bad_values(self, kwargs: dict):
        with pytest.raises(RopeValueError):
            ObaConfig(**kwargs)


class TestApplyOba:

    def test_same_seed_same_output(self):
        img = _image()
        a = apply_oba(img, BOX, ObaConfig(seed=4))
        b = apply_oba(img, BOX, ObaConfig(seed=4))
        np.testing.assert_array_equal(a.pixels, b.pixels)

    def test_different_seeds_differ(self):
        img = _image()
        a = apply_oba(img, BOX, ObaConfig(seed=1))
        b = apply_oba(img, BOX, ObaConfig(seed=2))
        assert not np.array_equal(a.pixels, b.pixels)

    def test_outside_is_black(self):
        out = apply_oba(_image(), BOX, ObaConfig(seed=3))
        assert not _outside(out.pixels, BOX).any()

    def test_no_occlusion_keeps_box(self):
        img = _image()
        out = apply_oba(img, BOX, ObaConfig(p_occlude=0.0))
        np.testing.assert_array_equal(out.pixels[6:30, 8:40], img.pixels[6:30, 8:40])

    def test_noise_everywhere(self):
        plans = plan_oba(48, 36, BOX, ObaConfig(p_occlude=1.0, p_noise_vs_patch=1.0))
        assert len(plans) == 16
        assert all(plan.mode == "noise" for plan in plans)

    @pytest.mark.slow
    def test_occlusion_rate_matches_probability(self):
        p = ObaConfig.DEFAULT_P
        draws = [
            plan.occluded
            for seed in range(1000)
            for plan in plan_oba(48, 36, BOX, ObaConfig(p_occlude=p, seed=seed))
        ]
        assert len(draws) == 16000
        # two-sided 99% binomial interval
        half_width = 2.576 * np.sqrt(p * (1.0 - p) / len(draws))
        assert abs(np.mean(draws) - p) <= half_width

    def test_copies_read_the_original(self):
        img = _image(5)
        cfg = ObaConfig(p_occlude=1.0, p_noise_vs_patch=0.0, seed=9)
        out = apply_oba(img, BOX, cfg)
        for plan in plan_oba(img.width, img.height, BOX, cfg):
            sy, sx = plan.source
            np.testing.assert_array_equal(
                out.pixels[plan.y0:plan.y0 + plan.height, plan.x0:plan.x0 + plan.width],
                img.pixels[sy:sy + plan.height, sx:sx + plan.width],
            )

    def test_patches_tile_the_box(self):
        plans = plan_oba(48, 36, BBox(0, 0, 10, 7), ObaConfig(grid_rows=3, grid_cols=4))
        assert sum(p.width * p.height for p in plans) == 70
        assert [p.height for p in plans if p.col == 0] == [2, 2, 3]

    def test_thin_box_skips_empty_patches(self):
        plans = plan_oba(48, 36, BBox(4, 4, 6, 20), ObaConfig(grid_rows=4, grid_cols=4))
        assert len(plans) == 4
        assert all(p.width == 2 for p in plans)

    def test_box_must_fit(self):
        with pytest.raises(RopeValueError):
            apply_oba(_image(), BBox(40, 0, 60, 10), ObaConfig())


class TestExtendBatch:

    def test_appends_copies_after_originals(self):
        images = [_image(i) for i in range(3)]
        boxes = [BOX] * 3
        labels = [{"id": i} for i in range(3)]
        batch = extend_batch(images, boxes, labels, ObaConfig(seed=6))

        assert len(batch) == 6
        for i in range(3):
            assert batch.images[i] is images[i]
            assert batch.labels[i + 3] is labels[i]
            expected = apply_oba(images[i], BOX, ObaConfig(seed=6 ^ i))
            np.testing.assert_array_equal(batch.images[i + 3].pixels, expected.pixels)

    def test_workers_do_not_change_output(self):
        images = [_image(i) for i in range(5)]
        boxes = [BOX] * 5
        labels = list(range(5))
        serial = extend_batch(images, boxes, labels, ObaConfig(seed=2), workers=1)
        threaded = extend_batch(images, boxes, labels, ObaConfig(seed=2), workers=4)
        for a, b in zip(serial.images, threaded.images):
            np.testing.assert_array_equal(a.pixels, b.pixels)

    def test_length_mismatch(self):
        with pytest.raises(RopeValueError):
            extend_batch([_image()], [BOX, BOX], [0], ObaConfig())


class TestImageFiles:

    def test_png_round_trip(self, tmp_path):
        img = _image(8)
        write_png(tmp_path / "img.png", img)
        np.testing.assert_array_equal(read_png(tmp_path / "img.png").pixels, img.pixels)

    def test_unreadable_png(self, tmp_path):
        (tmp_path / "bad.png").write_bytes(b"not a png")
        with pytest.raises(DataError):
            read_png(tmp_path / "bad.png")

    def test_bbox_around(self):
        box = BBox.around(np.array([[10.0, 10.0], [20.0, 30.0]]), 0.1, 64, 64)
        assert box.to_list() == [9, 8, 22, 33]
        assert BBox.from_list(box.to_list()) == box
