"""
# Heatmap Decoding

* Description:

    Turns heatmap stacks into 2D landmark coordinates, either by the
    spatial expectation of each normalized channel (continuous, robust to
    stray pixels) or by the per-channel argmax (the discrete baseline).
"""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from typing import Optional

import numpy as np

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.cloud import Landmark2D
from RopeTK.Heatmaps.stack import as_distribution
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import pixel_grid


@dataclass(frozen=True, eq=False)
class DecodedLandmarks(object):
    """
    2D landmarks decoded from one precision head.

    Args:
        level (PrecisionLevel | None): Head the stack came from, if known.
        coords (FLOAT_ARRAY): ``(K, 2)`` sub-pixel coordinates.
        peak_mass (FLOAT_ARRAY): Max probability of each normalized channel.
        indices (FLOAT_ARRAY): Landmark ids, ``0..K-1`` unless given.
    """

    level: Optional[PrecisionLevel]
    coords: FLOAT_ARRAY
    peak_mass: FLOAT_ARRAY
    indices: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=np.float64).reshape(-1, 2)
        peak = np.array(self.peak_mass, dtype=np.float64).reshape(-1)
        if self.indices is None:
            indices = np.arange(len(coords))
        else:
            indices = np.array(self.indices, dtype=np.int64).reshape(-1)
        if not (len(coords) == len(peak) == len(indices)):
            raise RopeValueError("coords, peak_mass and indices must have equal length.")
        if len(np.unique(indices)) != len(indices):
            raise RopeValueError("Landmark indices must be unique.")
        for name, arr in (("coords", coords), ("peak_mass", peak), ("indices", indices)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.coords)

    def landmarks(self) -> list[Landmark2D]:
        return [
            Landmark2D(int(i), (float(x), float(y)))
            for i, (x, y) in zip(self.indices, self.coords)
        ]

    @classmethod
    def from_coords(
        cls, coords: FLOAT_ARRAY, level: Optional[PrecisionLevel] = None
    ) -> DecodedLandmarks:
        """Wrap raw coordinates (e.g. read back from a predictions file)."""
        coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
        return cls(level, coords, np.full(len(coords), np.nan))


def decode_expectation(
    stack: HeatmapStack, level: Optional[PrecisionLevel] = None
) -> DecodedLandmarks:
    """
    Decode each channel to the expectation of its pixel distribution.

    A stack that is not yet normalized is passed through the channel-wise
    softmax first.

    Args:
        stack (HeatmapStack): Heatmaps of one precision head.
        level (PrecisionLevel | None): Head tag carried on the result.

    Returns:
        DecodedLandmarks: ``sum p(u, v) * (u, v)`` per channel.
    """
    probs = as_distribution(stack).values
    us, vs = pixel_grid(stack.size)
    x = np.einsum("khw,hw->k", probs, us)
    y = np.einsum("khw,hw->k", probs, vs)
    peak = probs.reshape(stack.channels, -1).max(axis=1)
    return DecodedLandmarks(level, np.column_stack([x, y]), peak)


def decode_argmax(
    stack: HeatmapStack, level: Optional[PrecisionLevel] = None
) -> DecodedLandmarks:
    """
    Decode each channel to the pixel of its maximum value.

    Ties resolve to the first occurrence in row-major order.
    """
    flat = stack.flat()
    best = np.argmax(flat, axis=1)
    rows, cols = np.unravel_index(best, (stack.height, stack.width))
    coords = np.column_stack([cols, rows]).astype(np.float64)
    peak = as_distribution(stack).flat().max(axis=1)
    return DecodedLandmarks(level, coords, peak)


def off_crop_channels(landmarks: FLOAT_ARRAY, stack: HeatmapStack, sigma: float) -> np.ndarray:
    """
    Flag channels whose groundtruth landmark lies more than ``4 sigma``
    outside the crop; their maps only hold a truncated Gaussian tail.
    """
    landmarks = np.asarray(landmarks, dtype=np.float64).reshape(-1, 2)
    margin = 4.0 * sigma
    return (
        (landmarks[:, 0] < -margin)
        | (landmarks[:, 1] < -margin)
        | (landmarks[:, 0] > stack.width - 1 + margin)
        | (landmarks[:, 1] > stack.height - 1 + margin)
    )
