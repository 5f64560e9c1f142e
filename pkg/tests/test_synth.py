"""Builtin shapes, synthetic scenes, heatmap corruption and dataset manifests."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Geometry.cloud import diameter
from RopeTK.Geometry.cloud import landmark_array
from RopeTK.Geometry.ply import write_ply
from RopeTK.Geometry.pose import project
from RopeTK.Geometry.pose import rotation_error
from RopeTK.Heatmaps.decode import decode_expectation
from RopeTK.Synth.corruption import corrupt_scene
from RopeTK.Synth.corruption import CorruptionConfig
from RopeTK.Synth.corruption import occluded_count
from RopeTK.Synth.manifest import generate_dataset
from RopeTK.Synth.manifest import load_manifest
from RopeTK.Synth.manifest import Manifest
from RopeTK.Synth.manifest import validate_manifest
from RopeTK.Synth.scene import generate_scene
from RopeTK.Synth.scene import load_cloud
from RopeTK.Synth.scene import SceneConfig
from RopeTK.Synth.shapes import blob
from RopeTK.Synth.shapes import builtin_shape
from RopeTK.Synth.shapes import cube
from RopeTK.Synth.shapes import icosahedron

from conftest import dataset_files


class TestShapes:

    def test_cube(self):
        cloud = cube()
        assert len(cloud) == 98
        assert cloud.symmetric
        assert np.all(np.abs(cloud.points).max(axis=1) == pytest.approx(50.0))

    def test_icosahedron(self):
        cloud = icosahedron()
        radii = np.linalg.norm(cloud.points, axis=1)
        assert len(cloud) == 42
        assert np.sum(np.isclose(radii, 60.0)) == 12
        assert np.all(radii <= 60.0 + 1e-9)

    def test_blob_is_seeded_and_asymmetric(self):
        a, b = blob(seed=1), blob(seed=1)
        assert len(a) == 208
        assert not a.symmetric
        np.testing.assert_array_equal(a.points, b.points)
        assert not np.array_equal(a.points, blob(seed=2).points)

    def test_unknown_shape(self):
        with pytest.raises(RopeValueError):
            builtin_shape("torus")


class TestScene:

    def test_same_seed_same_scene(self):
        a = generate_scene(SceneConfig(seed=4))
        b = generate_scene(SceneConfig(seed=4))
        np.testing.assert_array_equal(a.gt_pose.rotation, b.gt_pose.rotation)
        np.testing.assert_array_equal(a.image.pixels, b.image.pixels)
        assert rotation_error(a.gt_pose, generate_scene(SceneConfig(seed=5)).gt_pose) > 1e-3

    def test_landmarks_are_projected_fps_points(self):
        scene = generate_scene(SceneConfig(seed=2))
        points = landmark_array(list(scene.landmarks3d))
        assert len(points) == SceneConfig.DEFAULT_LANDMARKS
        np.testing.assert_allclose(scene.gt_landmarks2d, project(points, scene.gt_pose, scene.intr))

    def test_landmarks_keep_low_head_margin(self):
        scene = generate_scene(SceneConfig(seed=6))
        margin = 4.0 * PrecisionLevel.Low.sigma
        assert np.all(scene.gt_landmarks2d >= margin)
        assert np.all(scene.gt_landmarks2d <= 127 - margin)

    def test_clean_heatmaps_decode_to_truth(self):
        scene = generate_scene(SceneConfig(seed=8))
        for level in (PrecisionLevel.High, PrecisionLevel.Medium):
            decoded = decode_expectation(scene.heatmaps[level])
            np.testing.assert_allclose(decoded.coords, scene.gt_landmarks2d, atol=1e-6)
        assert scene.observed_heatmaps() is scene.heatmaps

    def test_bbox_covers_landmarks(self):
        scene = generate_scene(SceneConfig(seed=9))
        x, y = scene.gt_landmarks2d[:, 0], scene.gt_landmarks2d[:, 1]
        assert np.all((x >= scene.bbox.x0) & (x < scene.bbox.x1))
        assert np.all((y >= scene.bbox.y0) & (y < scene.bbox.y1))

    def test_cube_scene(self):
        scene = generate_scene(SceneConfig(shape="cube", n_landmarks=8, seed=1))
        assert scene.cloud.symmetric
        assert len(scene.landmarks3d) == 8

    def test_ply_override(self, tmp_path):
        write_ply(tmp_path / "part.ply", icosahedron())
        cloud = load_cloud(SceneConfig(ply_path=str(tmp_path / "part.ply"), symmetric=False))
        assert cloud.name == "part"
        assert not cloud.symmetric
        assert load_cloud(SceneConfig(shape="blob", symmetric=True)).symmetric

    def test_config_round_trip(self):
        cfg = SceneConfig(shape="cube", n_landmarks=9, image_size=(96, 80), seed=3)
        assert SceneConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg

    def test_config_validation(self):
        with pytest.raises(RopeValueError):
            SceneConfig(n_landmarks=3)
        with pytest.raises(RopeValueError):
            SceneConfig(translation_min=(0.0, 0.0, 700.0))


class TestCorruption:

    def test_occluded_count(self):
        assert occluded_count(11, 0.3) == 4
        assert occluded_count(10, 0.3) == 3
        assert occluded_count(5, 0.0) == 0
        assert occluded_count(5, 1.0) == 5

    def test_no_noise_no_occlusion_is_clean(self):
        scene = generate_scene(SceneConfig(seed=1))
        corrupted = corrupt_scene(scene, CorruptionConfig(landmark_noise_sigma=0.0, occluded_fraction=0.0))
        assert corrupted.occluded == ()
        for level in PrecisionLevel:
            np.testing.assert_array_equal(corrupted.corrupted_heatmaps[level].values, scene.heatmaps[level].values)

    def test_corrupted_stacks_stay_normalized(self):
        scene = corrupt_scene(generate_scene(SceneConfig(seed=2)), CorruptionConfig(seed=3))
        assert len(scene.occluded) == 4
        assert list(scene.occluded) == sorted(scene.occluded)
        for stack in scene.corrupted_heatmaps.values():
            assert stack.normalized
            np.testing.assert_allclose(stack.flat().sum(axis=1), 1.0, atol=1e-9)
        assert scene.observed_heatmaps() is scene.corrupted_heatmaps

    def test_disagreement_concentrates_on_occluded(self):
        scene = corrupt_scene(generate_scene(SceneConfig(seed=3)), CorruptionConfig(seed=4))
        high = decode_expectation(scene.corrupted_heatmaps[PrecisionLevel.High]).coords
        medium = decode_expectation(scene.corrupted_heatmaps[PrecisionLevel.Medium]).coords
        gap = np.linalg.norm(high - medium, axis=1)
        occluded = list(scene.occluded)
        visible = [i for i in range(len(gap)) if i not in occluded]
        assert np.all(gap[visible] < 1e-6)
        assert gap[occluded].max() > 1.0

    @pytest.mark.slow
    def test_occluded_disagreement_separates_across_seeds(self):
        occluded_gaps, visible_gaps = [], []
        for seed in range(100):
            scene = corrupt_scene(generate_scene(SceneConfig(seed=seed)), CorruptionConfig(seed=seed))
            high = decode_expectation(scene.corrupted_heatmaps[PrecisionLevel.High]).coords
            medium = decode_expectation(scene.corrupted_heatmaps[PrecisionLevel.Medium]).coords
            gap = np.linalg.norm(high - medium, axis=1)
            mask = np.zeros(len(gap), dtype=bool)
            mask[list(scene.occluded)] = True
            occluded_gaps.extend(gap[mask])
            visible_gaps.extend(gap[~mask])
        assert np.mean(occluded_gaps) >= 5.0 * np.mean(visible_gaps)
        assert np.mean(occluded_gaps) > 1.0

    def test_seeded(self):
        scene = generate_scene(SceneConfig(seed=5))
        a = corrupt_scene(scene, CorruptionConfig(seed=8))
        b = corrupt_scene(scene, CorruptionConfig(seed=8))
        assert a.occluded == b.occluded
        np.testing.assert_array_equal(
            a.corrupted_heatmaps[PrecisionLevel.High].values, b.corrupted_heatmaps[PrecisionLevel.High].values
        )

    def test_config_validation(self):
        with pytest.raises(RopeValueError):
            CorruptionConfig(flatten_factor=1.0)
        with pytest.raises(RopeValueError):
            CorruptionConfig(occluded_fraction=1.2)
        assert CorruptionConfig.from_dict(CorruptionConfig(seed=2).to_dict()) == CorruptionConfig(seed=2)


class TestManifest:

    def test_layout(self, corrupted_dataset: Manifest):
        root = corrupted_dataset.root
        assert (root / "manifest.json").is_file()
        assert (root / "objects" / "blob.ply").is_file()
        entry = corrupted_dataset.scenes[0]
        assert entry.image_id == "000000"
        for level in PrecisionLevel:
            assert (root / entry.heatmap_path(level, corrupted=False)).is_file()
            assert (root / entry.heatmap_path(level, corrupted=True)).name == f"corrupted_{level.value}.rhmp"

    def test_load_back(self, corrupted_dataset: Manifest):
        loaded = load_manifest(corrupted_dataset.root)
        assert [s.image_id for s in loaded.scenes] == [s.image_id for s in corrupted_dataset.scenes]
        for a, b in zip(loaded.scenes, corrupted_dataset.scenes):
            assert rotation_error(a.gt_pose, b.gt_pose) < 1e-12
            assert a.occluded == b.occluded
            assert a.bbox == b.bbox
        obj = loaded.objects["blob"]
        assert not obj.symmetric
        assert obj.diameter_mm == pytest.approx(diameter(loaded.object_cloud("blob")))
        assert loaded.corruption_config["seed"] == 5

    def test_heatmaps_load(self, corrupted_dataset: Manifest):
        entry = corrupted_dataset.scenes[1]
        clean = corrupted_dataset.load_heatmaps(entry, corrupted=False)
        decoded = decode_expectation(clean[PrecisionLevel.High])
        np.testing.assert_allclose(decoded.coords, np.asarray(entry.gt_landmarks), atol=1e-3)

    def test_workers_write_identical_trees(self, tmp_path):
        cfg = SceneConfig(seed=0)
        generate_dataset(tmp_path / "a", 3, cfg, CorruptionConfig(), seed=2, workers=1)
        generate_dataset(tmp_path / "b", 3, cfg, CorruptionConfig(), seed=2, workers=3)
        assert dataset_files(tmp_path / "a") == dataset_files(tmp_path / "b")

    def test_empty_dataset(self, tmp_path):
        with pytest.raises(RopeValueError, match="empty dataset"):
            generate_dataset(tmp_path, 0)

    def test_unknown_lookups(self, clean_dataset: Manifest):
        with pytest.raises(DataError):
            clean_dataset.scene("999999")
        with pytest.raises(DataError):
            clean_dataset.object_cloud("teapot")

    def test_missing_heatmap_file(self, tmp_path):
        manifest = generate_dataset(tmp_path, 1)
        entry = manifest.scenes[0]
        (tmp_path / entry.heatmap_path(PrecisionLevel.Medium, corrupted=False)).unlink()
        with pytest.raises(DataError):
            manifest.load_heatmaps(entry, corrupted=False)

    def test_validation(self, clean_dataset: Manifest):
        data = clean_dataset.to_dict()
        validate_manifest(data)

        broken = json.loads(json.dumps(data))
        broken["scenes"].append(broken["scenes"][0])
        with pytest.raises(DataError, match="Duplicate"):
            validate_manifest(broken)

        broken = json.loads(json.dumps(data))
        broken["scenes"][0]["object_id"] = "teapot"
        with pytest.raises(DataError):
            validate_manifest(broken)

        broken = json.loads(json.dumps(data))
        del broken["scenes"][0]["gt_pose"]
        with pytest.raises(DataError):
            validate_manifest(broken)

        with pytest.raises(DataError):
            validate_manifest({"format": "other", "version": 1, "objects": [], "scenes": []})

    def test_malformed_manifest_file(self, tmp_path: Path):
        (tmp_path / "manifest.json").write_text("{not json")
        with pytest.raises(DataError):
            load_manifest(tmp_path)
