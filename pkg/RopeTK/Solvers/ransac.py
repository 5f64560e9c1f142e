"""
# Robust Pose Solving

* Description:

    RANSAC over minimal four-point solves with inlier scoring by
    reprojection error, an adaptive iteration bound, and a final
    Levenberg-Marquardt refinement on the best inlier set.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from typing import Any
from typing import Optional

import numpy as np

from RopeTK.Core.errors import NumericalError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import MIN_DEPTH
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import project_camera_points
from RopeTK.Geometry.pose import transform
from RopeTK.Solvers.landmark_filter import FilteredCorrespondences
from RopeTK.Solvers.p3p import minimal_pnp
from RopeTK.Solvers.refine import DEFAULT_MAX_ITERS
from RopeTK.Solvers.refine import refine_pose


logger = logging.getLogger(__name__)

SAMPLE_SIZE = 4


@dataclass(frozen=True)
class RansacConfig(object):
    """
    Args:
        reproj_threshold (float): Inlier threshold in pixels.
        confidence (float): Desired probability of drawing one clean sample.
        max_iterations (int): Hard cap on sampled hypotheses.
        seed (int): Generator seed.
        refine_iterations (int): Levenberg-Marquardt step cap; 0 disables refinement.
    """

    DEFAULT_THRESHOLD = 3.0
    DEFAULT_CONFIDENCE = 0.999
    DEFAULT_MAX_ITERATIONS = 1000

    reproj_threshold: float = DEFAULT_THRESHOLD
    confidence: float = DEFAULT_CONFIDENCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    seed: int = 0
    refine_iterations: int = DEFAULT_MAX_ITERS

    def __post_init__(self) -> None:
        if not self.reproj_threshold > 0:
            raise RopeValueError(f"reproj_threshold must be > 0, got {self.reproj_threshold}.")
        if not 0.0 < self.confidence < 1.0:
            raise RopeValueError(f"confidence must be in (0, 1), got {self.confidence}.")
        if self.max_iterations < 1:
            raise RopeValueError("max_iterations must be >= 1.")
        if self.seed < 0:
            raise RopeValueError("seed must be non-negative.")
        if self.refine_iterations < 0:
            raise RopeValueError("refine_iterations must be >= 0.")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RansacConfig:
        return cls(**data)


@dataclass(frozen=True, eq=False)
class PnpResult(object):
    """
    Outcome of ``ransac_pnp``.

    Attributes:
        pose: Final pose; a best-effort guess when ``valid`` is False.
        inlier_indices: Landmark ids of the inliers, ascending.
        mean_reproj_error: Mean inlier reprojection error in pixels
            (``inf`` without inliers).
        iterations_run: Hypotheses sampled.
        valid: At least 4 inliers support ``pose``.
        refined: Whether refinement changed the reported pose.
    """

    pose: Pose
    inlier_indices: tuple[int, ...]
    mean_reproj_error: float
    iterations_run: int
    valid: bool = True
    refined: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "pose": self.pose.to_dict(),
            "inlier_indices": list(self.inlier_indices),
            "mean_reproj_error": self.mean_reproj_error if math.isfinite(self.mean_reproj_error) else None,
            "iterations_run": self.iterations_run,
            "valid": self.valid,
            "refined": self.refined,
        }


@dataclass(frozen=True, eq=False)
class _Hypothesis(object):
    pose: Pose
    mask: np.ndarray
    count: int
    mean_error: float

    def beats(self, other: Optional[_Hypothesis]) -> bool:
        if other is None:
            return True
        if self.count != other.count:
            return self.count > other.count
        return self.mean_error < other.mean_error


def reprojection_errors(
    pose: Pose, object_points: FLOAT_ARRAY, image_points: FLOAT_ARRAY, intr: CameraIntrinsics
) -> FLOAT_ARRAY:
    """Per-point pixel error; points behind the camera score ``inf``."""
    cam = transform(pose, object_points)
    errors = np.full(len(cam), np.inf)
    front = cam[:, 2] > MIN_DEPTH
    if np.any(front):
        pixels = project_camera_points(cam[front], intr)
        errors[front] = np.linalg.norm(pixels - image_points[front], axis=1)
    return errors


def required_iterations(inlier_ratio: float, confidence: float, cap: int) -> int:
    """``ceil(log(1 - confidence) / log(1 - w^4))`` clipped to ``[0, cap]``."""
    clean = inlier_ratio ** SAMPLE_SIZE
    if clean >= 1.0:
        return 0
    if clean <= 0.0:
        return cap
    needed = math.log(1.0 - confidence) / math.log(1.0 - clean)
    return int(min(cap, math.ceil(needed)))


def _score(
    pose: Pose, world: FLOAT_ARRAY, pixels: FLOAT_ARRAY, intr: CameraIntrinsics, threshold: float
) -> _Hypothesis:
    errors = reprojection_errors(pose, world, pixels, intr)
    mask = errors <= threshold
    count = int(mask.sum())
    mean_error = float(errors[mask].mean()) if count else float("inf")
    return _Hypothesis(pose, mask, count, mean_error)


def ransac_pnp(
    corr: FilteredCorrespondences, intr: CameraIntrinsics, cfg: RansacConfig = RansacConfig()
) -> PnpResult:
    """
    Estimate a pose robustly from filtered 2D-3D correspondences.

    Each iteration draws 4 distinct correspondences, solves the minimal
    problem and scores every candidate by its inlier count (ties go to the
    lower mean inlier error). The iteration bound shrinks adaptively with
    the best inlier ratio. The winner is refined on its inliers and the
    inlier set recomputed once; if refinement would leave fewer than 4
    inliers, the unrefined hypothesis is reported.

    Args:
        corr (FilteredCorrespondences): At least 4 correspondences.
        intr (CameraIntrinsics): Pinhole intrinsics.
        cfg (RansacConfig): Threshold, confidence, caps and seed.

    Returns:
        PnpResult: The estimate. ``valid`` is False if no hypothesis
        reached 4 inliers.

    Raises:
        RopeValueError: With fewer than 4 correspondences.
    """
    world = np.asarray(corr.object_points, dtype=np.float64)
    pixels = np.asarray(corr.image_points, dtype=np.float64)
    ids = np.asarray(corr.kept_indices, dtype=np.int64)
    n = len(world)
    if n < SAMPLE_SIZE:
        raise RopeValueError(f"RANSAC needs at least {SAMPLE_SIZE} correspondences, got {n}.")

    rng = make_rng(cfg.seed)
    best: Optional[_Hypothesis] = None
    bound = cfg.max_iterations
    iterations = 0
    while iterations < bound:
        iterations += 1
        sample = rng.choice(n, size=SAMPLE_SIZE, replace=False)
        for pose in minimal_pnp(pixels[sample], world[sample], intr):
            hypothesis = _score(pose, world, pixels, intr, cfg.reproj_threshold)
            if hypothesis.beats(best):
                best = hypothesis
        if best is not None and best.count >= SAMPLE_SIZE:
            bound = min(bound, required_iterations(best.count / n, cfg.confidence, cfg.max_iterations))

    if best is None or best.count < SAMPLE_SIZE:
        logger.debug("RANSAC found no hypothesis with %d inliers in %d iterations", SAMPLE_SIZE, iterations)
        pose = best.pose if best is not None else Pose.identity()
        inliers = tuple(int(i) for i in ids[best.mask]) if best is not None else ()
        mean_error = best.mean_error if best is not None else float("inf")
        return PnpResult(pose, inliers, mean_error, iterations, valid=False)

    final, refined = best, False
    if cfg.refine_iterations > 0:
        try:
            pose = refine_pose(
                best.pose, world[best.mask], pixels[best.mask], intr, cfg.refine_iterations
            )
            rescored = _score(pose, world, pixels, intr, cfg.reproj_threshold)
            if rescored.count >= SAMPLE_SIZE:
                final, refined = rescored, pose is not best.pose
        except NumericalError as err:
            logger.warning("Pose refinement failed, keeping the RANSAC hypothesis: %s", err)

    logger.debug(
        "RANSAC: %d/%d inliers after %d iterations, mean error %.4f px",
        final.count, n, iterations, final.mean_error,
    )
    return PnpResult(
        pose=final.pose,
        inlier_indices=tuple(int(i) for i in ids[final.mask]),
        mean_reproj_error=final.mean_error,
        iterations_run=iterations,
        valid=True,
        refined=refined,
    )
