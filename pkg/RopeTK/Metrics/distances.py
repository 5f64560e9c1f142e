"""
# Pose Distances

* Description:

    ADD and ADD-S model-point distances between two poses, the
    fraction-of-diameter correctness test, and the area under the
    accuracy-vs-threshold curve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable
from typing import Sequence

import numpy as np
from scipy import spatial

from RopeTK.Core.enums import DistanceKind
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import transform


logger = logging.getLogger(__name__)

DEFAULT_FRACTION = 0.1
AUC_MAX_THRESHOLD = 100.0
KDTREE_MIN_POINTS = 1000
_BRUTE_CHUNK = 256


@dataclass(frozen=True)
class PoseDistance(object):
    """A model-point distance in millimetres and the metric that produced it."""

    value: float
    kind: DistanceKind

    def __post_init__(self) -> None:
        if not self.value >= 0:
            raise RopeValueError(f"Pose distance must be >= 0, got {self.value}.")


def add_distance(pred: Pose, gt: Pose, cloud: PointCloud) -> PoseDistance:
    """Mean of ``||T_pred(p) - T_gt(p)||`` over the cloud points."""
    if len(cloud) == 0:
        raise RopeValueError("ADD needs a non-empty cloud.")
    diff = transform(pred, cloud.points) - transform(gt, cloud.points)
    return PoseDistance(float(np.linalg.norm(diff, axis=1).mean()), DistanceKind.ADD)


def _nearest_brute(query: FLOAT_ARRAY, reference: FLOAT_ARRAY) -> np.ndarray:
    best = np.empty(len(query), dtype=np.int64)
    for start in range(0, len(query), _BRUTE_CHUNK):
        block = query[start:start + _BRUTE_CHUNK]
        dists = np.linalg.norm(block[:, None, :] - reference[None, :, :], axis=2)
        best[start:start + len(block)] = np.argmin(dists, axis=1)
    return best


def _nearest_kdtree(query: FLOAT_ARRAY, reference: FLOAT_ARRAY) -> np.ndarray:
    _, index = spatial.cKDTree(reference).query(query, k=1)
    return np.asarray(index, dtype=np.int64)


def adds_distance(pred: Pose, gt: Pose, cloud: PointCloud, method: str = "auto") -> PoseDistance:
    """
    Mean closest-point distance from the predicted model to the groundtruth model.

    Args:
        pred (Pose): Predicted pose.
        gt (Pose): Groundtruth pose.
        cloud (PointCloud): Object model.
        method (str): ``"brute"`` for the O(n^2) scan, ``"kdtree"`` for
            ``scipy.spatial.cKDTree``, ``"auto"`` picks by cloud size.
            Both paths measure the matched pairs with the same formula.
    """
    if len(cloud) == 0:
        raise RopeValueError("ADD-S needs a non-empty cloud.")
    if method == "auto":
        method = "kdtree" if len(cloud) >= KDTREE_MIN_POINTS else "brute"
    if method not in ("brute", "kdtree"):
        raise RopeValueError(f"Unknown nearest-neighbour method {method!r}.")

    est = transform(pred, cloud.points)
    ref = transform(gt, cloud.points)
    nearest = _nearest_brute(est, ref) if method == "brute" else _nearest_kdtree(est, ref)
    dists = np.linalg.norm(est - ref[nearest], axis=1)
    return PoseDistance(float(dists.mean()), DistanceKind.ADDS)


def model_distance(pred: Pose, gt: Pose, cloud: PointCloud) -> PoseDistance:
    """ADD-S for symmetric clouds, ADD otherwise."""
    if cloud.symmetric:
        return adds_distance(pred, gt, cloud)
    return add_distance(pred, gt, cloud)


def pose_correct(dist: PoseDistance | float, diameter: float, fraction: float = DEFAULT_FRACTION) -> bool:
    """
    Return True if the distance is strictly below ``fraction * diameter``.

    Raises:
        RopeValueError: If ``diameter`` is not positive.
    """
    if not diameter > 0:
        raise RopeValueError(f"diameter must be > 0, got {diameter}.")
    value = dist.value if isinstance(dist, PoseDistance) else float(dist)
    return bool(value < fraction * diameter)


def _checked(distances: Iterable[float]) -> FLOAT_ARRAY:
    values = np.asarray(list(distances), dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise RopeValueError("Distance list is empty.")
    if np.any(np.isnan(values)) or np.any(values < 0):
        raise RopeValueError("Distances must be >= 0.")
    return values


def auc(distances: Sequence[float], max_threshold: float = AUC_MAX_THRESHOLD) -> float:
    """
    Exact area under the accuracy-vs-threshold step curve on ``[0, max_threshold]``,
    divided by ``max_threshold``.

    Accuracy at ``t`` is the fraction of distances below ``t``, so each
    sample contributes ``max(0, max_threshold - d) / (N * max_threshold)``.
    Missing predictions enter as ``inf`` and contribute nothing.
    """
    if not max_threshold > 0:
        raise RopeValueError(f"max_threshold must be > 0, got {max_threshold}.")
    values = _checked(distances)
    area = np.clip(max_threshold - values, 0.0, None)
    return float(area.sum() / (values.size * max_threshold))


def accuracy_curve(distances: Sequence[float], thresholds: Sequence[float]) -> FLOAT_ARRAY:
    """Fraction of distances strictly below each threshold."""
    values = np.sort(_checked(distances))
    thresholds = np.asarray(thresholds, dtype=np.float64)
    return np.searchsorted(values, thresholds, side="left") / values.size
