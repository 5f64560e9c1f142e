"""
# Heatmap Corruption

* Description:

    Imitates the failure mode of a heatmap network on occluded landmarks:
    the selected channels get a displaced, flattened peak drowned in a
    uniform floor and distractor blobs, while the remaining channels only
    jitter around the truth.

* Notes:

    Visible-landmark jitter is shared by all precision heads. Occluded
    channels use the same selection in every head; with
    ``decorrelate_medium`` the medium head draws its own shifts and
    distractors, so high/medium disagreement concentrates on the occluded
    landmarks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import replace
from typing import Any

import numpy as np

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Core.types_ import SIZE_TYPE
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import make_gaussian_stack
from RopeTK.Synth.scene import SyntheticScene


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorruptionConfig(object):
    """
    Args:
        landmark_noise_sigma (float): Std-dev of the centre jitter of
            visible landmarks, pixels.
        occluded_fraction (float): Fraction of landmarks treated as occluded.
        occluded_shift (float): Magnitude of the displacement of an occluded
            landmark's peak, pixels.
        distractor_blobs (int): Spurious blobs per occluded channel.
        flatten_factor (float): Weight left on the displaced peak, ``[0, 1)``.
        decorrelate_medium (bool): Draw medium-head shifts independently.
        seed (int): Generator seed.
    """

    DEFAULT_SHIFT = 15.0

    landmark_noise_sigma: float = 1.0
    occluded_fraction: float = 0.3
    occluded_shift: float = DEFAULT_SHIFT
    distractor_blobs: int = 1
    flatten_factor: float = 0.5
    decorrelate_medium: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.occluded_fraction <= 1.0:
            raise RopeValueError(f"occluded_fraction must be in [0, 1], got {self.occluded_fraction}.")
        if not 0.0 <= self.flatten_factor < 1.0:
            raise RopeValueError(f"flatten_factor must be in [0, 1), got {self.flatten_factor}.")
        if self.landmark_noise_sigma < 0 or self.occluded_shift < 0:
            raise RopeValueError("Noise sigma and shift must be >= 0.")
        if self.distractor_blobs < 0:
            raise RopeValueError("distractor_blobs must be >= 0.")
        if self.seed < 0:
            raise RopeValueError("seed must be non-negative.")

    def with_seed(self, seed: int) -> CorruptionConfig:
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CorruptionConfig:
        return cls(**data)


@dataclass(frozen=True, eq=False)
class _OcclusionDraw(object):
    shifts: FLOAT_ARRAY
    distractors: FLOAT_ARRAY


def _draw_occlusion(rng: np.random.Generator, count: int, cfg: CorruptionConfig, size: SIZE_TYPE) -> _OcclusionDraw:
    angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
    shifts = cfg.occluded_shift * np.column_stack([np.cos(angles), np.sin(angles)])
    width, height = size
    distractors = rng.uniform(
        (0.0, 0.0), (width - 1.0, height - 1.0), size=(count, cfg.distractor_blobs, 2)
    )
    return _OcclusionDraw(shifts, distractors)


def _corrupt_level(
    centres: FLOAT_ARRAY,
    occluded: np.ndarray,
    draw: _OcclusionDraw,
    cfg: CorruptionConfig,
    size: SIZE_TYPE,
    sigma: float,
) -> HeatmapStack:
    """Corrupted stack of one precision level around the jittered ``centres``."""
    values = np.array(make_gaussian_stack(centres, size, sigma).values)
    if len(occluded) == 0:
        return HeatmapStack(values, normalized=True)

    width, height = size
    uniform = np.full((height, width), 1.0 / (width * height))
    peaks = make_gaussian_stack(centres[occluded] + draw.shifts, size, sigma).values
    for row, channel in enumerate(occluded):
        if cfg.distractor_blobs:
            blobs = make_gaussian_stack(draw.distractors[row], size, sigma).values.mean(axis=0)
            background = 0.5 * uniform + 0.5 * blobs
        else:
            background = uniform
        values[channel] = cfg.flatten_factor * peaks[row] + (1.0 - cfg.flatten_factor) * background
    # the mixture sums to 1 only up to rounding
    values /= values.reshape(len(values), -1).sum(axis=1)[:, None, None]
    return HeatmapStack(values, normalized=True)


def occluded_count(k: int, fraction: float) -> int:
    """``ceil(fraction * k)`` with float noise removed."""
    return min(k, int(math.ceil(round(fraction * k, 9))))


def corrupt_scene(scene: SyntheticScene, cfg: CorruptionConfig) -> SyntheticScene:
    """
    Return ``scene`` with ``corrupted_heatmaps`` and ``occluded`` filled in.

    Random draws, in order: the occluded channel ids, the visible-landmark
    jitter, the high-head occlusion draw, then (with
    ``decorrelate_medium``) the medium-head occlusion draw. The low head
    shares the high-head draw.
    """
    gt = np.asarray(scene.gt_landmarks2d, dtype=np.float64)
    k = len(gt)
    size = scene.image_size
    rng = make_rng(cfg.seed)

    m = occluded_count(k, cfg.occluded_fraction)
    occluded = np.sort(rng.choice(k, size=m, replace=False)) if m else np.empty(0, dtype=np.int64)
    jitter = rng.normal(0.0, cfg.landmark_noise_sigma, size=(k, 2))
    jitter[occluded] = 0.0
    centres = gt + jitter

    high_draw = _draw_occlusion(rng, m, cfg, size)
    medium_draw = _draw_occlusion(rng, m, cfg, size) if cfg.decorrelate_medium else high_draw
    draws = {
        PrecisionLevel.Low: high_draw,
        PrecisionLevel.Medium: medium_draw,
        PrecisionLevel.High: high_draw,
    }

    corrupted = {
        level: _corrupt_level(centres, occluded, draws[level], cfg, size, level.sigma)
        for level in PrecisionLevel
    }
    logger.debug("Corrupted scene %d: occluded landmarks %s", scene.seed, occluded.tolist())
    return replace(scene, corrupted_heatmaps=corrupted, occluded=tuple(int(i) for i in occluded))
