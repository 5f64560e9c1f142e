"""
# Rigid Poses and Pinhole Projection

* Description:

    Rigid transforms mapping the object frame into the camera frame, the
    pinhole camera model, and the handful of operations built on them.

* Notes:

    3D quantities are in millimetres and 2D quantities in pixels. Image
    coordinates have their origin at the centre of the top-left pixel,
    +x to the right and +y down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.spatial.transform import Rotation

from RopeTK.Core.errors import PointBehindCameraError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import ARRAY_LIKE
from RopeTK.Core.types_ import FLOAT_ARRAY


ORTHONORMAL_TOL = 1e-9
MIN_DEPTH = 1e-6


def _frozen(array: ARRAY_LIKE, shape: tuple[int, ...]) -> FLOAT_ARRAY:
    out = np.array(array, dtype=np.float64)
    if out.shape != shape:
        raise RopeValueError(f"Expected shape {shape}, got {out.shape}.")
    out.setflags(write=False)
    return out


def as_points(points: ARRAY_LIKE, dim: int = 3) -> FLOAT_ARRAY:
    """Coerce ``points`` into an ``(N, dim)`` float64 array."""
    out = np.asarray(points, dtype=np.float64)
    if out.ndim == 1 and out.size == dim:
        out = out.reshape(1, dim)
    if out.ndim != 2 or out.shape[1] != dim:
        raise RopeValueError(f"Expected an (N, {dim}) array, got {out.shape}.")
    return out


@dataclass(frozen=True, eq=False)
class Pose(object):
    """
    Rigid transform from the object frame to the camera frame.

    Args:
        rotation (FLOAT_ARRAY): 3x3 rotation matrix, orthonormal with det +1.
        translation (FLOAT_ARRAY): 3-vector in millimetres.

    Raises:
        RopeValueError: If the rotation is not a proper rotation within
            ``ORTHONORMAL_TOL`` per entry.
    """

    rotation: FLOAT_ARRAY
    translation: FLOAT_ARRAY

    def __post_init__(self) -> None:
        rotation = _frozen(self.rotation, (3, 3))
        translation = _frozen(self.translation, (3,))
        if not np.all(np.isfinite(rotation)) or not np.all(np.isfinite(translation)):
            raise RopeValueError("Pose contains non-finite values.")
        gram = rotation.T @ rotation
        if np.max(np.abs(gram - np.eye(3))) > ORTHONORMAL_TOL:
            raise RopeValueError("Rotation is not orthonormal.")
        if abs(np.linalg.det(rotation) - 1.0) > ORTHONORMAL_TOL:
            raise RopeValueError("Rotation determinant is not +1.")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> Pose:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_rotvec(cls, rotvec: ARRAY_LIKE, translation: ARRAY_LIKE) -> Pose:
        """Build a pose from an axis-angle vector (radians) and translation."""
        matrix = Rotation.from_rotvec(np.asarray(rotvec, dtype=np.float64)).as_matrix()
        return cls(matrix, translation)

    @classmethod
    def from_matrix(cls, matrix: ARRAY_LIKE) -> Pose:
        matrix = np.asarray(matrix, dtype=np.float64)
        return cls(matrix[:3, :3], matrix[:3, 3])

    def as_matrix(self) -> FLOAT_ARRAY:
        """Return the homogeneous 4x4 matrix."""
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    def rotvec(self) -> FLOAT_ARRAY:
        return Rotation.from_matrix(self.rotation).as_rotvec()

    def to_dict(self) -> dict[str, Any]:
        """Serialize as ``{"rotation": 9 floats row-major, "translation": 3 floats}``."""
        return {
            "rotation": [float(v) for v in self.rotation.reshape(-1)],
            "translation": [float(v) for v in self.translation],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Pose:
        try:
            rotation = np.asarray(data["rotation"], dtype=np.float64).reshape(3, 3)
            translation = np.asarray(data["translation"], dtype=np.float64)
        except (KeyError, ValueError, TypeError) as err:
            raise RopeValueError(f"Malformed pose record: {err!r}") from err
        return cls(rotation, translation)

    def __repr__(self) -> str:
        return f"Pose(rotvec={self.rotvec().round(6).tolist()}, t={self.translation.round(4).tolist()})"


@dataclass(frozen=True)
class CameraIntrinsics(object):
    """
    Pinhole intrinsics, no distortion.

    Args:
        fx (float): Horizontal focal length in pixels.
        fy (float): Vertical focal length in pixels.
        cx (float): Principal point x in pixels.
        cy (float): Principal point y in pixels.
    """

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self) -> None:
        if not (self.fx > 0 and self.fy > 0):
            raise RopeValueError(f"Focal lengths must be positive, got {self.fx}, {self.fy}.")

    def matrix(self) -> FLOAT_ARRAY:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def bearings(self, pixels: ARRAY_LIKE) -> FLOAT_ARRAY:
        """Unit-length viewing rays for ``(N, 2)`` pixel coordinates."""
        pixels = as_points(pixels, 2)
        rays = np.column_stack(
            [
                (pixels[:, 0] - self.cx) / self.fx,
                (pixels[:, 1] - self.cy) / self.fy,
                np.ones(len(pixels)),
            ]
        )
        return rays / np.linalg.norm(rays, axis=1, keepdims=True)

    def to_dict(self) -> dict[str, float]:
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CameraIntrinsics:
        try:
            return cls(float(data["fx"]), float(data["fy"]), float(data["cx"]), float(data["cy"]))
        except (KeyError, TypeError, ValueError) as err:
            raise RopeValueError(f"Malformed intrinsics record: {err!r}") from err


def transform(pose: Pose, points: ARRAY_LIKE) -> FLOAT_ARRAY:
    """
    Apply ``pose`` to object-frame points.

    Args:
        pose (Pose): The rigid transform.
        points (ARRAY_LIKE): ``(N, 3)`` points in millimetres.

    Returns:
        FLOAT_ARRAY: ``R @ p + t`` for every point, shape ``(N, 3)``.
    """
    points = as_points(points, 3)
    return points @ pose.rotation.T + pose.translation


def compose(a: Pose, b: Pose) -> Pose:
    """Pose equivalent to applying ``a`` first and then ``b``."""
    return Pose(b.rotation @ a.rotation, b.rotation @ a.translation + b.translation)


def invert(pose: Pose) -> Pose:
    rotation_t = pose.rotation.T
    return Pose(rotation_t, -rotation_t @ pose.translation)


def camera_points(points: ARRAY_LIKE, pose: Pose) -> FLOAT_ARRAY:
    """
    Transform points into the camera frame and enforce cheirality.

    Raises:
        PointBehindCameraError: For the first point with depth <= ``MIN_DEPTH``.
    """
    cam = transform(pose, points)
    behind = np.flatnonzero(cam[:, 2] <= MIN_DEPTH)
    if behind.size:
        index = int(behind[0])
        raise PointBehindCameraError(index, float(cam[index, 2]))
    return cam


def project(points: ARRAY_LIKE, pose: Pose, intr: CameraIntrinsics) -> FLOAT_ARRAY:
    """
    Project object-frame points into the image.

    Args:
        points (ARRAY_LIKE): ``(N, 3)`` object-frame points in millimetres.
        pose (Pose): Object-to-camera transform.
        intr (CameraIntrinsics): Pinhole intrinsics.

    Returns:
        FLOAT_ARRAY: ``(N, 2)`` pixel coordinates
        ``(fx * X / Z + cx, fy * Y / Z + cy)``.

    Raises:
        PointBehindCameraError: If any point has camera depth <= 1e-6 mm.
    """
    cam = camera_points(points, pose)
    return project_camera_points(cam, intr)


def project_camera_points(cam: FLOAT_ARRAY, intr: CameraIntrinsics) -> FLOAT_ARRAY:
    """Pinhole projection of points already expressed in the camera frame."""
    u = intr.fx * cam[:, 0] / cam[:, 2] + intr.cx
    v = intr.fy * cam[:, 1] / cam[:, 2] + intr.cy
    return np.column_stack([u, v])


def unproject(pixels: ARRAY_LIKE, depths: ARRAY_LIKE, intr: CameraIntrinsics) -> FLOAT_ARRAY:
    """
    Lift pixels back to camera-frame points at known depth.

    Args:
        pixels (ARRAY_LIKE): ``(N, 2)`` pixel coordinates.
        depths (ARRAY_LIKE): ``(N,)`` camera-frame depths in millimetres.
        intr (CameraIntrinsics): Pinhole intrinsics.

    Returns:
        FLOAT_ARRAY: ``(N, 3)`` camera-frame points.
    """
    pixels = as_points(pixels, 2)
    depths = np.asarray(depths, dtype=np.float64).reshape(-1)
    x = (pixels[:, 0] - intr.cx) / intr.fx * depths
    y = (pixels[:, 1] - intr.cy) / intr.fy * depths
    return np.column_stack([x, y, depths])


def rotation_error(a: Pose, b: Pose) -> float:
    """Geodesic angle between the two rotations, in radians."""
    return float(Rotation.from_matrix(a.rotation @ b.rotation.T).magnitude())


def translation_error(a: Pose, b: Pose) -> float:
    """Euclidean distance between the two translations, in millimetres."""
    return float(np.linalg.norm(a.translation - b.translation))
