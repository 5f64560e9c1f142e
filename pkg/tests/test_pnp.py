"""Minimal solver, Levenberg-Marquardt refinement and RANSAC."""

from __future__ import annotations

import numpy as np
import pytest

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import NumericalError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng
from RopeTK.Geometry.cloud import diameter
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import project
from RopeTK.Geometry.pose import rotation_error
from RopeTK.Geometry.pose import transform
from RopeTK.Geometry.pose import translation_error
from RopeTK.Heatmaps.decode import decode_expectation
from RopeTK.Metrics.distances import model_distance
from RopeTK.Metrics.distances import pose_correct
from RopeTK.Solvers.landmark_filter import filter_landmarks
from RopeTK.Solvers.landmark_filter import FilteredCorrespondences
from RopeTK.Solvers.p3p import align_points
from RopeTK.Solvers.p3p import minimal_pnp
from RopeTK.Solvers.ransac import ransac_pnp
from RopeTK.Solvers.ransac import RansacConfig
from RopeTK.Solvers.ransac import reprojection_errors
from RopeTK.Solvers.ransac import required_iterations
from RopeTK.Solvers.refine import perturb_pose
from RopeTK.Solvers.refine import refine_pose
from RopeTK.Solvers.refine import reprojection_jacobian
from RopeTK.Solvers.refine import reprojection_residuals
from RopeTK.Synth.scene import generate_scene
from RopeTK.Synth.scene import SceneConfig
from RopeTK.Synth.shapes import builtin_shape

from conftest import random_points
from conftest import random_pose


# ── Helpers ──────────────────────────────────────────────────────────────

def _correspondences(world: np.ndarray, pixels: np.ndarray) -> FilteredCorrespondences:
    n = len(world)
    return FilteredCorrespondences(
        image_points=pixels,
        object_points=world,
        kept_indices=tuple(range(n)),
        fallback_used=False,
        disagreement=np.zeros(n),
        all_indices=tuple(range(n)),
    )


def _cost(pose: Pose, world: np.ndarray, pixels: np.ndarray, intr: CameraIntrinsics) -> float:
    residual = reprojection_residuals(pose, world, pixels, intr)
    return float(residual @ residual)


class TestMinimalPnp:

    @pytest.mark.parametrize("seed", range(8))
    def test_recovers_exact_pose(self, intr: CameraIntrinsics, seed: int):
        gt = random_pose(seed)
        world = random_points(100 + seed, 4)
        candidates = minimal_pnp(project(world, gt, intr), world, intr)
        assert 1 <= len(candidates) <= 4
        assert rotation_error(candidates[0], gt) < 1e-6
        assert translation_error(candidates[0], gt) < 1e-4

    def test_candidates_are_in_front(self, intr: CameraIntrinsics):
        gt = random_pose(11)
        world = random_points(12, 4)
        for pose in minimal_pnp(project(world, gt, intr), world, intr):
            assert np.all(transform(pose, world)[:, 2] > 0)

    def test_collinear_points_give_nothing(self, intr: CameraIntrinsics):
        world = np.array([[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [20.0, 0.0, 0.0], [30.0, 0.0, 0.0]])
        pose = Pose(np.eye(3), [0.0, 0.0, 500.0])
        assert minimal_pnp(project(world, pose, intr), world, intr) == []

    def test_needs_exactly_four(self, intr: CameraIntrinsics):
        world = random_points(1, 5)
        pixels = project(world, random_pose(1), intr)
        with pytest.raises(RopeValueError):
            minimal_pnp(pixels, world, intr)

    def test_align_points(self):
        gt = random_pose(21)
        world = random_points(22, 6)
        pose = align_points(world, transform(gt, world))
        assert rotation_error(pose, gt) < 1e-9
        assert translation_error(pose, gt) < 1e-7


class TestRefine:

    def test_residual_layout(self, small_intr: CameraIntrinsics):
        world = np.array([[0.0, 0.0, 100.0], [10.0, 0.0, 100.0]])
        pixels = np.array([[49.0, 41.0], [60.0, 40.0]])
        residual = reprojection_residuals(Pose.identity(), world, pixels, small_intr)
        np.testing.assert_allclose(residual, [1.0, -1.0, 0.0, 0.0])

    @pytest.mark.parametrize("seed", range(50))
    def test_jacobian_matches_finite_differences(self, intr: CameraIntrinsics, seed: int):
        pose = random_pose(100 + seed)
        world = random_points(200 + seed, 6)
        pixels = project(world, pose, intr) + 3.0
        analytic = reprojection_jacobian(pose, world, intr)

        h = 1e-6
        numeric = np.empty_like(analytic)
        for j in range(6):
            step = np.zeros(6)
            step[j] = h
            plus = reprojection_residuals(perturb_pose(pose, step), world, pixels, intr)
            minus = reprojection_residuals(perturb_pose(pose, -step), world, pixels, intr)
            numeric[:, j] = (plus - minus) / (2.0 * h)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-5)

    def test_perturb_keeps_rotation_proper(self):
        pose = perturb_pose(random_pose(33), [0.3, -0.2, 0.1, 1.0, 2.0, 3.0])
        np.testing.assert_allclose(pose.rotation @ pose.rotation.T, np.eye(3), atol=1e-12)

    def test_converges_from_nearby_pose(self, intr: CameraIntrinsics):
        gt = random_pose(41)
        world = random_points(42, 20)
        pixels = project(world, gt, intr)
        start = perturb_pose(gt, [0.05, -0.03, 0.04, 5.0, -4.0, 10.0])
        refined = refine_pose(start, world, pixels, intr)
        assert rotation_error(refined, gt) < 1e-6
        assert translation_error(refined, gt) < 1e-3

    def test_never_increases_cost(self, intr: CameraIntrinsics):
        gt = random_pose(43)
        world = random_points(44, 12)
        pixels = project(world, gt, intr) + make_rng(45).normal(0.0, 2.0, size=(12, 2))
        refined = refine_pose(gt, world, pixels, intr)
        assert _cost(refined, world, pixels, intr) <= _cost(gt, world, pixels, intr)

    def test_zero_iterations_returns_start(self, intr: CameraIntrinsics):
        gt = random_pose(46)
        world = random_points(47, 6)
        start = perturb_pose(gt, [0.01, 0.0, 0.0, 0.0, 0.0, 0.0])
        assert refine_pose(start, world, project(world, gt, intr), intr, max_iters=0) is start

    def test_needs_four_points(self, intr: CameraIntrinsics):
        world = random_points(48, 3)
        gt = random_pose(48)
        with pytest.raises(RopeValueError):
            refine_pose(gt, world, project(world, gt, intr), intr)

    def test_start_behind_camera(self, intr: CameraIntrinsics):
        world = random_points(49, 5)
        pixels = project(world, random_pose(49), intr)
        behind = Pose(np.eye(3), [0.0, 0.0, -500.0])
        with pytest.raises(NumericalError):
            refine_pose(behind, world, pixels, intr)


class TestRansac:

    def test_required_iterations(self):
        assert required_iterations(1.0, 0.99, 1000) == 0
        assert required_iterations(0.0, 0.99, 1000) == 1000
        assert required_iterations(0.5, 0.99, 1000) == 72
        assert required_iterations(0.05, 0.999, 500) == 500

    def test_reprojection_errors_flag_points_behind(self, intr: CameraIntrinsics):
        world = np.array([[0.0, 0.0, 100.0], [0.0, 0.0, -100.0]])
        pixels = np.array([[319.5, 239.5], [0.0, 0.0]])
        errors = reprojection_errors(Pose.identity(), world, pixels, intr)
        assert errors[0] == 0.0
        assert errors[1] == np.inf

    def test_forty_percent_outliers(self, intr: CameraIntrinsics):
        rng = make_rng(51)
        gt = random_pose(52)
        world = random_points(53, 30)
        pixels = project(world, gt, intr) + rng.normal(0.0, 0.3, size=(30, 2))
        outliers = np.arange(18, 30)
        angles = rng.uniform(0.0, 2.0 * np.pi, size=len(outliers))
        lengths = rng.uniform(20.0, 80.0, size=len(outliers))
        pixels[outliers] += lengths[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])

        result = ransac_pnp(_correspondences(world, pixels), intr, RansacConfig(seed=7))
        assert result.valid
        assert result.inlier_indices == tuple(range(18))
        assert rotation_error(result.pose, gt) < 0.01
        assert translation_error(result.pose, gt) < 5.0
        assert result.mean_reproj_error < 1.5
        assert result.iterations_run < 1000

    def test_clean_data_is_exact(self, intr: CameraIntrinsics):
        gt = random_pose(61)
        world = random_points(62, 12)
        result = ransac_pnp(_correspondences(world, project(world, gt, intr)), intr)
        assert result.valid
        assert len(result.inlier_indices) == 12
        assert rotation_error(result.pose, gt) < 1e-6
        assert result.mean_reproj_error < 1e-4

    def test_seed_reproduces(self, intr: CameraIntrinsics):
        rng = make_rng(71)
        world = random_points(72, 15)
        pixels = project(world, random_pose(73), intr)
        pixels[:5] += rng.uniform(-60.0, 60.0, size=(5, 2))
        corr = _correspondences(world, pixels)
        a = ransac_pnp(corr, intr, RansacConfig(seed=3))
        b = ransac_pnp(corr, intr, RansacConfig(seed=3))
        np.testing.assert_array_equal(a.pose.rotation, b.pose.rotation)
        np.testing.assert_array_equal(a.pose.translation, b.pose.translation)
        assert a.iterations_run == b.iterations_run
        assert a.inlier_indices == b.inlier_indices

    def test_degenerate_input_is_invalid(self, intr: CameraIntrinsics):
        world = np.array([[10.0 * i, 0.0, 0.0] for i in range(6)])
        pixels = project(world, Pose(np.eye(3), [0.0, 0.0, 500.0]), intr)
        result = ransac_pnp(_correspondences(world, pixels), intr, RansacConfig(max_iterations=20))
        assert not result.valid
        assert result.iterations_run == 20
        assert result.inlier_indices == ()
        assert result.to_dict()["mean_reproj_error"] is None

    def test_needs_four_correspondences(self, intr: CameraIntrinsics):
        world = random_points(81, 3)
        pixels = project(world, random_pose(81), intr)
        with pytest.raises(RopeValueError):
            ransac_pnp(_correspondences(world, pixels), intr)

    def test_without_refinement(self, intr: CameraIntrinsics):
        gt = random_pose(91)
        world = random_points(92, 10)
        result = ransac_pnp(
            _correspondences(world, project(world, gt, intr)), intr, RansacConfig(refine_iterations=0)
        )
        assert result.valid
        assert not result.refined

    def test_config_round_trip(self):
        cfg = RansacConfig(reproj_threshold=2.0, seed=4)
        assert RansacConfig.from_dict(cfg.to_dict()) == cfg

    @pytest.mark.parametrize(
        "kwargs", [{"reproj_threshold": 0.0}, {"confidence": 1.0}, {"max_iterations": 0}]
    )
    def test_config_validation(self, kwargs: dict):
        with pytest.raises(RopeValueError):
            RansacConfig(**kwargs)


@pytest.mark.slow
class TestAcceptance:

    def test_ransac_recovers_pose_with_forty_percent_outliers(self, intr: CameraIntrinsics):
        recovered = 0
        for trial in range(500):
            rng = make_rng(1000 + trial)
            gt = random_pose(2000 + trial)
            world = random_points(3000 + trial, 11)
            pixels = project(world, gt, intr)
            outliers = rng.choice(11, size=4, replace=False)
            pixels[outliers] = rng.uniform((0.0, 0.0), (639.0, 479.0), size=(4, 2))
            result = ransac_pnp(_correspondences(world, pixels), intr, RansacConfig(seed=trial))
            recovered += result.valid and rotation_error(result.pose, gt) < 1e-4
        assert recovered >= 495

    def test_noiseless_scenes_end_to_end(self):
        cloud = builtin_shape("blob")
        diam = diameter(cloud)
        for seed in range(200):
            scene = generate_scene(SceneConfig(seed=seed), cloud)
            high = decode_expectation(scene.heatmaps[PrecisionLevel.High], PrecisionLevel.High)
            medium = decode_expectation(scene.heatmaps[PrecisionLevel.Medium], PrecisionLevel.Medium)
            corr = filter_landmarks(high, medium, list(scene.landmarks3d))
            assert not corr.fallback_used
            result = ransac_pnp(corr, scene.intr, RansacConfig(seed=seed))
            assert result.valid
            assert rotation_error(result.pose, scene.gt_pose) < 1e-3
            assert translation_error(result.pose, scene.gt_pose) < 0.1
            assert pose_correct(model_distance(result.pose, scene.gt_pose, cloud), diam)
