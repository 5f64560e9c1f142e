"""
# Landmark Verification

* Description:

    Cross-checks the high-precision landmarks against the medium-precision
    ones and keeps only those both heads agree on, before handing the
    2D-3D correspondences to the pose solver.
"""

from __future__ import annotations

import logging
from dataclasses import asdict
from dataclasses import dataclass
from typing import Any
from typing import Sequence

import numpy as np

from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.cloud import Landmark2D
from RopeTK.Geometry.cloud import Landmark3D
from RopeTK.Heatmaps.decode import DecodedLandmarks


logger = logging.getLogger(__name__)

MIN_POINTS = 4


@dataclass(frozen=True)
class FilterConfig(object):
    """
    Args:
        epsilon (float): Verification threshold in pixels.
        min_points (int): Minimum correspondences for PnP; fixed at 4.
    """

    DEFAULT_EPSILON = 1.0

    epsilon: float = DEFAULT_EPSILON
    min_points: int = MIN_POINTS

    def __post_init__(self) -> None:
        if not self.epsilon >= 0:
            raise RopeValueError(f"epsilon must be >= 0, got {self.epsilon}.")
        if self.min_points != MIN_POINTS:
            raise RopeValueError("min_points is fixed at 4.")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class FilteredCorrespondences(object):
    """
    Correspondences selected for the pose solver.

    Attributes:
        image_points: ``(M, 2)`` high-precision 2D landmarks.
        object_points: ``(M, 3)`` matching 3D model landmarks.
        kept_indices: Landmark ids of the rows, ascending.
        fallback_used: True if fewer than 4 passed and the 4 smallest
            disagreements were taken instead.
        disagreement: ``(K,)`` high vs medium distance of every input
            landmark, ordered like the input ids.
        all_indices: Input landmark ids, aligned with ``disagreement``.
    """

    image_points: FLOAT_ARRAY
    object_points: FLOAT_ARRAY
    kept_indices: tuple[int, ...]
    fallback_used: bool
    disagreement: FLOAT_ARRAY
    all_indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.kept_indices)

    @property
    def pairs(self) -> list[tuple[Landmark2D, Landmark3D]]:
        return [
            (
                Landmark2D(i, (float(x[0]), float(x[1]))),
                Landmark3D(i, (float(z[0]), float(z[1]), float(z[2]))),
            )
            for i, x, z in zip(self.kept_indices, self.image_points, self.object_points)
        ]

    @property
    def dropped_indices(self) -> tuple[int, ...]:
        kept = set(self.kept_indices)
        return tuple(i for i in self.all_indices if i not in kept)


def _aligned_inputs(
    high: DecodedLandmarks, medium: DecodedLandmarks, model_points: Sequence[Landmark3D]
) -> tuple[np.ndarray, FLOAT_ARRAY, FLOAT_ARRAY, FLOAT_ARRAY]:
    """Sort all three inputs by landmark id and check the ids match."""
    k = len(high)
    if k < MIN_POINTS:
        raise RopeValueError(f"Need at least {MIN_POINTS} landmarks, got {k}.")
    if len(medium) != k or len(model_points) != k:
        raise RopeValueError(
            f"Landmark count mismatch: high {k}, medium {len(medium)}, model {len(model_points)}."
        )

    order_h = np.argsort(high.indices, kind="stable")
    order_m = np.argsort(medium.indices, kind="stable")
    model_sorted = sorted(model_points, key=lambda lm: lm.index)
    ids = high.indices[order_h]
    model_ids = np.array([lm.index for lm in model_sorted])
    if not (np.array_equal(ids, medium.indices[order_m]) and np.array_equal(ids, model_ids)):
        raise RopeValueError("Landmark indices of high, medium and model points do not match.")

    xyz = np.array([lm.coords for lm in model_sorted], dtype=np.float64)
    return ids, high.coords[order_h], medium.coords[order_m], xyz


def filter_landmarks(
    high: DecodedLandmarks,
    medium: DecodedLandmarks,
    model_points: Sequence[Landmark3D],
    cfg: FilterConfig = FilterConfig(),
) -> FilteredCorrespondences:
    """
    Keep landmark ``i`` iff ``||x_i - x_i^m||_2 <= epsilon``.

    If fewer than 4 survive, the 4 landmarks with the smallest
    disagreement are used instead (ties by lower id). Exactly 4 survivors
    do not trigger the fallback. Output rows carry the high-precision
    coordinates.

    Args:
        high (DecodedLandmarks): High-precision decoded landmarks.
        medium (DecodedLandmarks): Medium-precision decoded landmarks.
        model_points (Sequence[Landmark3D]): 3D landmarks with the same ids.
        cfg (FilterConfig): Threshold.

    Returns:
        FilteredCorrespondences: The selection.

    Raises:
        RopeValueError: If ``K < 4`` or the landmark ids disagree.
    """
    ids, x_high, x_medium, xyz = _aligned_inputs(high, medium, model_points)
    disagreement = np.linalg.norm(x_high - x_medium, axis=1)

    keep = np.flatnonzero(disagreement <= cfg.epsilon)
    fallback = len(keep) < cfg.min_points
    if fallback:
        # stable sort keeps lower ids first among equal disagreements
        keep = np.sort(np.argsort(disagreement, kind="stable")[: cfg.min_points])
        logger.debug("Verification kept fewer than %d landmarks; using fallback %s", cfg.min_points, ids[keep])

    return FilteredCorrespondences(
        image_points=x_high[keep],
        object_points=xyz[keep],
        kept_indices=tuple(int(i) for i in ids[keep]),
        fallback_used=bool(fallback),
        disagreement=disagreement,
        all_indices=tuple(int(i) for i in ids),
    )


def passthrough_correspondences(
    high: DecodedLandmarks,
    model_points: Sequence[Landmark3D],
    medium: DecodedLandmarks | None = None,
) -> FilteredCorrespondences:
    """
    Hand every landmark to the solver, skipping verification.

    Disagreement is still reported when ``medium`` is given, else zeros.
    """
    other = medium if medium is not None else high
    ids, x_high, x_medium, xyz = _aligned_inputs(high, other, model_points)
    return FilteredCorrespondences(
        image_points=x_high,
        object_points=xyz,
        kept_indices=tuple(int(i) for i in ids),
        fallback_used=False,
        disagreement=np.linalg.norm(x_high - x_medium, axis=1),
        all_indices=tuple(int(i) for i in ids),
    )
