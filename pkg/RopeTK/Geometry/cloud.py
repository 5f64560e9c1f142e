"""
# Point Clouds and Landmark Selection

* Description:

    Object point clouds, their diameter, and farthest point sampling used
    to pick the 3D landmarks of an object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import distance

from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import ARRAY_LIKE
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.pose import as_points


COPLANAR_TOL = 1e-9


@dataclass(frozen=True)
class Landmark3D(object):
    """A 3D model landmark: contiguous id and object-frame coordinates (mm)."""

    index: int
    coords: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {"index": self.index, "coords": list(self.coords)}

    @classmethod
    def from_dict(cls, data: dict) -> Landmark3D:
        x, y, z = (float(v) for v in data["coords"])
        return cls(int(data["index"]), (x, y, z))


@dataclass(frozen=True)
class Landmark2D(object):
    """A 2D landmark: contiguous id and pixel coordinates (x right, y down)."""

    index: int
    coords: tuple[float, float]


@dataclass(frozen=True, eq=False)
class PointCloud(object):
    """
    An object model as a point set in its own frame.

    Args:
        points (FLOAT_ARRAY): ``(N, 3)`` coordinates in millimetres.
        symmetric (bool): Whether the object is symmetric; selects ADD-S
            over ADD during evaluation.
        name (str): Free-form label, e.g. the builtin shape or PLY stem.
    """

    points: FLOAT_ARRAY
    symmetric: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        points = np.array(as_points(self.points, 3))
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)

    def centroid(self) -> FLOAT_ARRAY:
        return self.points.mean(axis=0)

    def is_pose_solvable(self) -> bool:
        """Return True if there are >= 4 points spanning all three dimensions."""
        if len(self.points) < 4:
            return False
        centered = self.points - self.centroid()
        singular = np.linalg.svd(centered, compute_uv=False)
        return bool(singular[-1] > COPLANAR_TOL * max(singular[0], 1.0))


def landmark_array(landmarks: list[Landmark3D]) -> FLOAT_ARRAY:
    """Stack landmark coordinates into an ``(K, 3)`` array ordered by index."""
    ordered = sorted(landmarks, key=lambda lm: lm.index)
    return np.array([lm.coords for lm in ordered], dtype=np.float64).reshape(-1, 3)


def diameter(cloud: PointCloud) -> float:
    """
    Maximum pairwise Euclidean distance between cloud points.

    Raises:
        RopeValueError: If the cloud has fewer than 2 points.
    """
    if len(cloud) < 2:
        raise RopeValueError("Diameter needs at least 2 points.")
    return float(np.max(distance.pdist(cloud.points)))


def fps_select(cloud: PointCloud, k: int) -> list[Landmark3D]:
    """
    Farthest point sampling over the cloud points.

    The seed is the point farthest from the centroid; every further pick
    maximizes its distance to the already selected set. Ties resolve to
    the lowest point index, so the result is a pure function of the cloud.

    Args:
        cloud (PointCloud): Source points.
        k (int): Number of landmarks, ``1 <= k <= len(cloud)``.

    Returns:
        list[Landmark3D]: Landmarks in selection order, indexed ``0..k-1``.

    Raises:
        RopeValueError: If ``k`` is out of range.
    """
    if k < 1:
        raise RopeValueError(f"k must be >= 1, got {k}.")
    if k > len(cloud):
        raise RopeValueError(f"Cannot select {k} landmarks from {len(cloud)} points.")

    points = cloud.points
    first = int(np.argmax(np.linalg.norm(points - cloud.centroid(), axis=1)))
    selected = [first]
    nearest = np.linalg.norm(points - points[first], axis=1)
    nearest[first] = -1.0
    for _ in range(k - 1):
        pick = int(np.argmax(nearest))
        selected.append(pick)
        nearest = np.minimum(nearest, np.linalg.norm(points - points[pick], axis=1))
        # duplicates must never be picked twice
        nearest[selected] = -1.0

    return [
        Landmark3D(i, (float(points[j, 0]), float(points[j, 1]), float(points[j, 2])))
        for i, j in enumerate(selected)
    ]


def min_pairwise_distance(points: ARRAY_LIKE) -> float:
    """Smallest distance between any two of ``points`` (diagnostic for FPS spread)."""
    points = as_points(points, 3)
    if len(points) < 2:
        return float("inf")
    return float(np.min(distance.pdist(points)))
