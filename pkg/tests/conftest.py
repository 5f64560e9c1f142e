"""Shared fixtures: cameras, poses, clouds and small on-disk datasets."""

from __future__ import annotations

import os

# must be set before any Qt module creates a platform integration
os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")

from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from RopeTK.Core.rng import make_rng
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import Pose
from RopeTK.Synth.corruption import CorruptionConfig
from RopeTK.Synth.manifest import generate_dataset
from RopeTK.Synth.manifest import Manifest
from RopeTK.Synth.scene import SceneConfig


# ── Helpers ──────────────────────────────────────────────────────────────

def random_pose(seed: int, depth: float = 500.0) -> Pose:
    """A random rotation in front of the camera at roughly ``depth`` mm."""
    rng = make_rng(seed)
    rotation = Rotation.random(None, rng).as_matrix()
    translation = np.array([rng.uniform(-20, 20), rng.uniform(-20, 20), depth + rng.uniform(-30, 30)])
    return Pose(rotation, translation)


def random_points(seed: int, n: int, half: float = 50.0) -> np.ndarray:
    return make_rng(seed).uniform(-half, half, size=(n, 3))


# ── Fixtures ─────────────────────────────────────────────────────────────

@pytest.fixture
def intr() -> CameraIntrinsics:
    """A VGA-like camera used by the solver tests."""
    return CameraIntrinsics(500.0, 500.0, 319.5, 239.5)


@pytest.fixture
def small_intr() -> CameraIntrinsics:
    return CameraIntrinsics(100.0, 100.0, 50.0, 40.0)


@pytest.fixture
def random_cloud() -> PointCloud:
    return PointCloud(random_points(7, 300), symmetric=False, name="random")


@pytest.fixture(scope="session")
def clean_dataset(tmp_path_factory: pytest.TempPathFactory) -> Manifest:
    """Four clean scenes of the builtin blob."""
    root = tmp_path_factory.mktemp("clean")
    return generate_dataset(root, 4, SceneConfig(), None, seed=3)


@pytest.fixture(scope="session")
def corrupted_dataset(tmp_path_factory: pytest.TempPathFactory) -> Manifest:
    """Six scenes with occlusion-corrupted heatmaps alongside the clean ones."""
    root = tmp_path_factory.mktemp("corrupted")
    return generate_dataset(root, 6, SceneConfig(), CorruptionConfig(seed=5), seed=11)


@pytest.fixture(scope="session")
def qapp():
    pytest.importorskip("PySide6.QtWidgets")
    from RopeTK.QtWrappers.app import init_application

    return init_application()


def dataset_files(root: Path) -> dict[str, bytes]:
    """Every file below ``root`` keyed by its relative POSIX path."""
    return {
        path.relative_to(root).as_posix(): path.read_bytes()
        for path in sorted(root.rglob("*"))
        if path.is_file()
    }
