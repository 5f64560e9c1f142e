"""
# Synthetic Scenes

* Description:

    Samples a groundtruth pose for an object model, projects its FPS
    landmarks, and builds the clean multi-precision heatmaps a perfect
    network would output, plus a flat-shaded preview image.

* Notes:

    Heatmaps cover the whole image, so heatmap pixel coordinates and image
    pixel coordinates coincide.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from pathlib import Path
from typing import Any
from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from RopeTK.Augment.image import BBox
from RopeTK.Augment.image import ImageBuffer
from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import NumericalError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Core.types_ import SIZE_TYPE
from RopeTK.Geometry.cloud import fps_select
from RopeTK.Geometry.cloud import Landmark3D
from RopeTK.Geometry.cloud import landmark_array
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.ply import read_ply
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import project
from RopeTK.Geometry.pose import project_camera_points
from RopeTK.Geometry.pose import transform
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import make_multi_precision
from RopeTK.Synth.shapes import builtin_shape


logger = logging.getLogger(__name__)

MAX_POSE_TRIES = 1000
BBOX_PAD = 0.1
BACKGROUND = 64


@dataclass(frozen=True)
class SceneConfig(object):
    """
    Scene sampling parameters.

    Args:
        shape (str): Builtin shape name, used when ``ply_path`` is empty.
        ply_path (str): ASCII PLY object model; overrides ``shape``.
        symmetric (bool | None): Symmetry flag; ``None`` keeps the cloud's own.
        n_landmarks (int): FPS landmarks per object.
        image_size (SIZE_TYPE): ``(W, H)`` in pixels.
        intrinsics (CameraIntrinsics): Camera model.
        translation_min (tuple): Lower corner of the translation box (mm).
        translation_max (tuple): Upper corner of the translation box (mm).
        min_depth (float): Minimum camera depth of every cloud point (mm).
        in_frame (bool): Keep every landmark ``4 sigma_low`` inside the image
            and every cloud point inside it.
        seed (int): Generator seed.
    """

    DEFAULT_LANDMARKS = 11
    DEFAULT_SIZE = (128, 128)

    shape: str = "blob"
    ply_path: str = ""
    symmetric: Optional[bool] = None
    n_landmarks: int = DEFAULT_LANDMARKS
    image_size: SIZE_TYPE = DEFAULT_SIZE
    intrinsics: CameraIntrinsics = CameraIntrinsics(120.0, 120.0, 63.5, 63.5)
    translation_min: tuple[float, float, float] = (-40.0, -40.0, 450.0)
    translation_max: tuple[float, float, float] = (40.0, 40.0, 650.0)
    min_depth: float = 100.0
    in_frame: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_landmarks < 4:
            raise RopeValueError(f"n_landmarks must be >= 4, got {self.n_landmarks}.")
        if min(self.image_size) < 1:
            raise RopeValueError(f"image_size must be positive, got {self.image_size}.")
        if any(lo > hi for lo, hi in zip(self.translation_min, self.translation_max)):
            raise RopeValueError("translation_min must not exceed translation_max.")
        if self.seed < 0:
            raise RopeValueError("seed must be non-negative.")
        object.__setattr__(self, "image_size", tuple(int(v) for v in self.image_size))
        object.__setattr__(self, "translation_min", tuple(float(v) for v in self.translation_min))
        object.__setattr__(self, "translation_max", tuple(float(v) for v in self.translation_max))

    def with_seed(self, seed: int) -> SceneConfig:
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "shape": self.shape,
            "ply_path": self.ply_path,
            "symmetric": self.symmetric,
            "n_landmarks": self.n_landmarks,
            "image_size": list(self.image_size),
            "intrinsics": self.intrinsics.to_dict(),
            "translation_min": list(self.translation_min),
            "translation_max": list(self.translation_max),
            "min_depth": self.min_depth,
            "in_frame": self.in_frame,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SceneConfig:
        data = dict(data)
        if "intrinsics" in data:
            data["intrinsics"] = CameraIntrinsics.from_dict(data["intrinsics"])
        for key in ("image_size", "translation_min", "translation_max"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


@dataclass(frozen=True, eq=False)
class SyntheticScene(object):
    """
    One synthetic observation of an object.

    Attributes:
        cloud: The object model.
        landmarks3d: FPS landmarks, ids ``0..K-1``.
        gt_pose: Object-to-camera groundtruth.
        intr: Camera intrinsics.
        gt_landmarks2d: ``(K, 2)`` projections of ``landmarks3d``.
        bbox: Box around the projected cloud, padded by 10%.
        heatmaps: Clean stacks per precision level.
        image: Flat-shaded preview image.
        corrupted_heatmaps: Stacks after ``corrupt_scene``, else None.
        occluded: Landmark ids corrupted as occluded, ascending.
        seed: Seed the scene was drawn with.
    """

    cloud: PointCloud
    landmarks3d: tuple[Landmark3D, ...]
    gt_pose: Pose
    intr: CameraIntrinsics
    gt_landmarks2d: FLOAT_ARRAY
    bbox: BBox
    heatmaps: dict[PrecisionLevel, HeatmapStack]
    image: ImageBuffer
    corrupted_heatmaps: Optional[dict[PrecisionLevel, HeatmapStack]] = None
    occluded: tuple[int, ...] = field(default=())
    seed: int = 0

    @property
    def image_size(self) -> SIZE_TYPE:
        return self.image.width, self.image.height

    def observed_heatmaps(self) -> dict[PrecisionLevel, HeatmapStack]:
        """Corrupted heatmaps if present, else the clean ones."""
        return self.corrupted_heatmaps if self.corrupted_heatmaps is not None else self.heatmaps


def load_cloud(cfg: SceneConfig) -> PointCloud:
    """The object model named by ``cfg``, with its symmetry flag applied."""
    if cfg.ply_path:
        cloud = read_ply(Path(cfg.ply_path), symmetric=bool(cfg.symmetric))
    else:
        cloud = builtin_shape(cfg.shape)
    if cfg.symmetric is not None and cloud.symmetric != cfg.symmetric:
        cloud = PointCloud(cloud.points, cfg.symmetric, cloud.name)
    return cloud


def _in_frame(pixels: FLOAT_ARRAY, size: SIZE_TYPE, margin: float) -> bool:
    width, height = size
    return bool(
        np.all(pixels[:, 0] >= margin)
        and np.all(pixels[:, 1] >= margin)
        and np.all(pixels[:, 0] <= width - 1 - margin)
        and np.all(pixels[:, 1] <= height - 1 - margin)
    )


def sample_pose(cfg: SceneConfig, cloud: PointCloud, landmarks: FLOAT_ARRAY, rng: np.random.Generator) -> Pose:
    """
    Draw a rotation uniformly over SO(3) (uniform unit quaternion) and a
    translation uniformly in the configured box until the constraints hold.

    Raises:
        NumericalError: If ``MAX_POSE_TRIES`` draws all fail.
    """
    low = np.array(cfg.translation_min)
    high = np.array(cfg.translation_max)
    margin = 4.0 * PrecisionLevel.Low.sigma
    for _ in range(MAX_POSE_TRIES):
        rotation = Rotation.random(None, rng).as_matrix()
        translation = rng.uniform(low, high)
        pose = Pose(rotation, translation)

        cam = transform(pose, cloud.points)
        if np.any(cam[:, 2] < cfg.min_depth):
            continue
        if cfg.in_frame:
            if not _in_frame(project(landmarks, pose, cfg.intrinsics), cfg.image_size, margin):
                continue
            if not _in_frame(project_camera_points(cam, cfg.intrinsics), cfg.image_size, 0.0):
                continue
        return pose
    raise NumericalError(f"No valid pose after {MAX_POSE_TRIES} draws; widen the translation box.")


def render_points(pixels: FLOAT_ARRAY, depths: FLOAT_ARRAY, size: SIZE_TYPE) -> ImageBuffer:
    """
    Splat projected points as 3x3 squares on a grey background, far to
    near, shaded by depth.
    """
    width, height = size
    canvas = np.full((height, width, 3), BACKGROUND, dtype=np.uint8)
    near, far = float(depths.min()), float(depths.max())
    span = max(far - near, 1e-9)
    for i in np.argsort(-depths, kind="stable"):
        shade = 1.0 - 0.6 * (depths[i] - near) / span
        colour = (np.array([230.0, 180.0, 90.0]) * shade).astype(np.uint8)
        x, y = int(round(pixels[i, 0])), int(round(pixels[i, 1]))
        canvas[max(y - 1, 0):min(y + 2, height), max(x - 1, 0):min(x + 2, width)] = colour
    return ImageBuffer(canvas)


def generate_scene(cfg: SceneConfig, cloud: Optional[PointCloud] = None) -> SyntheticScene:
    """
    Build a clean synthetic scene; a pure function of ``cfg``.

    Args:
        cfg (SceneConfig): Sampling parameters and seed.
        cloud (PointCloud | None): Preloaded object model; loaded from
            ``cfg`` when omitted.

    Returns:
        SyntheticScene: Groundtruth, clean heatmaps and preview image.

    Raises:
        NumericalError: If no pose satisfies the constraints.
    """
    cloud = cloud if cloud is not None else load_cloud(cfg)
    landmarks3d = tuple(fps_select(cloud, cfg.n_landmarks))
    points3d = landmark_array(list(landmarks3d))

    rng = make_rng(cfg.seed)
    pose = sample_pose(cfg, cloud, points3d, rng)

    gt2d = project(points3d, pose, cfg.intrinsics)
    gt2d.setflags(write=False)
    cam = transform(pose, cloud.points)
    cloud2d = project_camera_points(cam, cfg.intrinsics)
    bbox = BBox.around(cloud2d, BBOX_PAD, *cfg.image_size)

    return SyntheticScene(
        cloud=cloud,
        landmarks3d=landmarks3d,
        gt_pose=pose,
        intr=cfg.intrinsics,
        gt_landmarks2d=gt2d,
        bbox=bbox,
        heatmaps=make_multi_precision(gt2d, cfg.image_size),
        image=render_points(cloud2d, cam[:, 2], cfg.image_size),
        seed=cfg.seed,
    )
