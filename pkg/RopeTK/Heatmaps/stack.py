"""
# Heatmap Stacks

* Description:

    Per-landmark 2D scalar fields over an image crop, the Gaussian targets
    of the three precision heads, channel-wise softmax, and the
    Jensen-Shannon loss between predicted and target maps.

* Notes:

    Pixel ``(u, v)`` is column ``u`` and row ``v`` of a channel; the value
    array has shape ``(K, H, W)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import ARRAY_LIKE
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Core.types_ import SIZE_TYPE
from RopeTK.Geometry.pose import as_points


NORMALIZED_TOL = 1e-6
DEFAULT_SIZE = (64, 64)


@dataclass(frozen=True, eq=False)
class HeatmapStack(object):
    """
    A ``K x H x W`` stack of heatmaps, one channel per landmark.

    Args:
        values (FLOAT_ARRAY): The channel values.
        normalized (bool): Whether every channel is a probability
            distribution over its pixels.

    Raises:
        RopeValueError: On a bad shape, or if ``normalized`` is claimed
            but a channel is negative or does not sum to 1 within 1e-6.
    """

    values: FLOAT_ARRAY
    normalized: bool = False

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 3 or min(values.shape[1:]) < 1:
            raise RopeValueError(f"Heatmap values must be (K, H, W), got {values.shape}.")
        if not np.all(np.isfinite(values)):
            raise RopeValueError("Heatmap values must be finite.")
        if self.normalized:
            sums = values.reshape(len(values), -1).sum(axis=1)
            if np.any(values < 0) or np.any(np.abs(sums - 1.0) > NORMALIZED_TOL):
                raise RopeValueError("Stack flagged normalized but channels are not distributions.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    @property
    def size(self) -> SIZE_TYPE:
        """(width, height) of every channel."""
        return self.width, self.height

    def flat(self) -> FLOAT_ARRAY:
        return self.values.reshape(self.channels, -1)


def pixel_grid(size: SIZE_TYPE) -> tuple[FLOAT_ARRAY, FLOAT_ARRAY]:
    """Return ``(us, vs)`` coordinate arrays of shape ``(H, W)`` for ``size=(W, H)``."""
    width, height = size
    vs, us = np.mgrid[0:height, 0:width]
    return us.astype(np.float64), vs.astype(np.float64)


def make_gaussian_stack(landmarks: ARRAY_LIKE, size: SIZE_TYPE, sigma: float) -> HeatmapStack:
    """
    Build normalized Gaussian target maps centred on 2D landmarks.

    Each channel is ``exp(-((u - x)^2 + (v - y)^2) / (2 sigma^2))`` over the
    crop, normalized to sum to 1. Landmarks may lie outside the crop; the
    visible tail is what gets normalized, so the computation runs in log
    space and a far-away landmark never produces an all-zero channel.

    Args:
        landmarks (ARRAY_LIKE): ``(K, 2)`` pixel coordinates.
        size (SIZE_TYPE): Crop ``(W, H)``.
        sigma (float): Gaussian spread in pixels.

    Returns:
        HeatmapStack: Normalized stack of ``K`` channels.
    """
    if sigma <= 0:
        raise RopeValueError(f"sigma must be positive, got {sigma}.")
    width, height = size
    if width < 1 or height < 1:
        raise RopeValueError(f"Heatmap size must be >= 1, got {size}.")

    centres = as_points(landmarks, 2)
    us, vs = pixel_grid(size)
    dx = us[None, :, :] - centres[:, 0, None, None]
    dy = vs[None, :, :] - centres[:, 1, None, None]
    logits = -(dx * dx + dy * dy) / (2.0 * sigma * sigma)
    return _softmax_values(logits)


def make_multi_precision(
    landmarks: ARRAY_LIKE, size: SIZE_TYPE = DEFAULT_SIZE
) -> dict[PrecisionLevel, HeatmapStack]:
    """Gaussian targets for the low, medium and high precision heads."""
    return {level: make_gaussian_stack(landmarks, size, level.sigma) for level in PrecisionLevel}


def _softmax_values(values: FLOAT_ARRAY) -> HeatmapStack:
    k, h, w = values.shape
    probs = special.softmax(values.reshape(k, h * w), axis=1).reshape(k, h, w)
    return HeatmapStack(probs, normalized=True)


def softmax_channels(stack: HeatmapStack) -> HeatmapStack:
    """
    Channel-wise softmax, ``exp(v - max v) / sum exp(v - max v)``.

    Returns:
        HeatmapStack: A normalized stack of the same shape.
    """
    return _softmax_values(stack.values)


def normalize_channels(stack: HeatmapStack) -> HeatmapStack:
    """
    Rescale each non-negative channel to sum to 1.

    Raises:
        RopeValueError: If a channel has negative values or zero mass.
    """
    flat = stack.flat()
    if np.any(flat < 0):
        raise RopeValueError("Cannot sum-normalize channels with negative values.")
    sums = flat.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise RopeValueError("Cannot sum-normalize a channel with zero mass.")
    return HeatmapStack((flat / sums).reshape(stack.values.shape), normalized=True)


def as_distribution(stack: HeatmapStack) -> HeatmapStack:
    """Return ``stack`` if normalized, else its channel-wise softmax."""
    return stack if stack.normalized else softmax_channels(stack)


def channel_jsd(p: FLOAT_ARRAY, q: FLOAT_ARRAY) -> FLOAT_ARRAY:
    """
    Jensen-Shannon divergence of matching rows of two ``(K, N)`` arrays.

    Natural logarithm, with the ``0 * log 0 = 0`` convention of
    ``scipy.special.rel_entr``.
    """
    m = 0.5 * (p + q)
    left = special.rel_entr(p, m).sum(axis=1)
    right = special.rel_entr(q, m).sum(axis=1)
    return np.clip(0.5 * (left + right), 0.0, np.log(2.0))


def jsd_loss(pred: HeatmapStack, gt: HeatmapStack) -> float:
    """
    Mean Jensen-Shannon divergence across channels.

    Args:
        pred (HeatmapStack): Normalized prediction (softmax of raw maps).
        gt (HeatmapStack): Normalized groundtruth targets.

    Returns:
        float: Value in ``[0, ln 2]``.

    Raises:
        RopeValueError: If shapes differ or either stack is not normalized.
    """
    if pred.values.shape != gt.values.shape:
        raise RopeValueError(f"Shape mismatch: {pred.values.shape} vs {gt.values.shape}.")
    if not (pred.normalized and gt.normalized):
        raise RopeValueError("jsd_loss expects normalized stacks.")
    return float(np.mean(channel_jsd(pred.flat(), gt.flat())))
