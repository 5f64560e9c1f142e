"""
# Occlude-and-Blackout Augmentation

* Description:

    Patch-wise occlusion inside the object bounding box followed by
    zeroing everything outside it, plus the batch extension that appends
    an augmented copy of every image under the same labels.

* Notes:

    Random draws happen in a fixed order so a seed reproduces the output
    bit for bit: patches are visited row-major and, per patch, the
    occlusion coin is drawn first, then (only if occluded) the
    noise-vs-copy coin, then the noise values or the copy source.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from dataclasses import dataclass
from typing import Any
from typing import Optional
from typing import Sequence

import numpy as np

from RopeTK.Augment.image import BBox
from RopeTK.Augment.image import ImageBuffer
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import derive_seed
from RopeTK.Core.rng import make_rng


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObaConfig(object):
    """
    Occlude-and-blackout parameters.

    Args:
        grid_rows (int): Patch rows over the bbox.
        grid_cols (int): Patch columns over the bbox.
        p_occlude (float): Probability that a patch is replaced.
        p_noise_vs_patch (float): Given replacement, probability of noise
            rather than a copied patch.
        seed (int): Generator seed.
    """

    DEFAULT_GRID = 4
    DEFAULT_P = 0.5

    grid_rows: int = DEFAULT_GRID
    grid_cols: int = DEFAULT_GRID
    p_occlude: float = DEFAULT_P
    p_noise_vs_patch: float = DEFAULT_P
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise RopeValueError("OBA grid dimensions must be >= 1.")
        for name in ("p_occlude", "p_noise_vs_patch"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise RopeValueError(f"{name} must be in [0, 1], got {value}.")
        if self.seed < 0:
            raise RopeValueError("seed must be non-negative.")

    def with_seed(self, seed: int) -> ObaConfig:
        return ObaConfig(self.grid_rows, self.grid_cols, self.p_occlude, self.p_noise_vs_patch, seed)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PatchPlan(object):
    """
    What happens to one grid patch.

    Attributes:
        row, col: Grid position.
        y0, x0, height, width: Patch rectangle in image pixels.
        occluded: Whether the patch is replaced.
        mode: ``"noise"``, ``"copy"`` or ``None`` when not occluded.
        source: Top-left ``(y, x)`` of the copy source.
        noise: ``(height, width, 3)`` noise values.
    """

    row: int
    col: int
    y0: int
    x0: int
    height: int
    width: int
    occluded: bool
    mode: Optional[str] = None
    source: Optional[tuple[int, int]] = None
    noise: Optional[np.ndarray] = None


def _splits(start: int, length: int, parts: int) -> list[tuple[int, int]]:
    """Cut ``[start, start + length)`` into ``parts`` spans; the last absorbs the remainder."""
    base = length // parts
    spans = []
    for i in range(parts):
        size = base if i < parts - 1 else length - base * (parts - 1)
        spans.append((start + i * base, size))
    return spans


def plan_oba(width: int, height: int, bbox: BBox, cfg: ObaConfig) -> list[PatchPlan]:
    """
    Draw all random decisions of one OBA application.

    Args:
        width (int): Image width.
        height (int): Image height.
        bbox (BBox): Object box; must fit the image.
        cfg (ObaConfig): Parameters and seed.

    Returns:
        list[PatchPlan]: One plan per non-empty patch, row-major.
    """
    bbox.validate_for(width, height)
    rng = make_rng(cfg.seed)
    plans: list[PatchPlan] = []
    for row, (y0, ph) in enumerate(_splits(bbox.y0, bbox.height, cfg.grid_rows)):
        for col, (x0, pw) in enumerate(_splits(bbox.x0, bbox.width, cfg.grid_cols)):
            if ph == 0 or pw == 0:
                continue
            if not rng.random() < cfg.p_occlude:
                plans.append(PatchPlan(row, col, y0, x0, ph, pw, False))
                continue
            if rng.random() < cfg.p_noise_vs_patch:
                noise = rng.integers(0, 256, size=(ph, pw, 3), dtype=np.uint8)
                plans.append(PatchPlan(row, col, y0, x0, ph, pw, True, "noise", noise=noise))
            else:
                sy = int(rng.integers(0, height - ph + 1))
                sx = int(rng.integers(0, width - pw + 1))
                plans.append(PatchPlan(row, col, y0, x0, ph, pw, True, "copy", source=(sy, sx)))
    return plans


def apply_oba(img: ImageBuffer, bbox: BBox, cfg: ObaConfig) -> ImageBuffer:
    """
    Occlude patches inside ``bbox`` and black out everything outside it.

    Copy sources are read from the original image, never from patches
    already replaced, so the visiting order does not leak into the output.

    Args:
        img (ImageBuffer): Input image.
        bbox (BBox): Object bounding box.
        cfg (ObaConfig): Grid, probabilities and seed.

    Returns:
        ImageBuffer: The augmented image.
    """
    original = img.pixels
    out = np.zeros_like(original)
    out[bbox.y0:bbox.y1, bbox.x0:bbox.x1] = original[bbox.y0:bbox.y1, bbox.x0:bbox.x1]

    for plan in plan_oba(img.width, img.height, bbox, cfg):
        if not plan.occluded:
            continue
        target = (slice(plan.y0, plan.y0 + plan.height), slice(plan.x0, plan.x0 + plan.width))
        if plan.mode == "noise":
            out[target] = plan.noise
        else:
            sy, sx = plan.source
            out[target] = original[sy:sy + plan.height, sx:sx + plan.width]
    return ImageBuffer(out)


@dataclass(frozen=True, eq=False)
class AugmentedBatch(object):
    """
    Originals followed by their OBA copies.

    Attributes:
        images: ``2N`` images, ``images[i + N]`` is the copy of ``images[i]``.
        bboxes: ``2N`` boxes, shared the same way.
        labels: ``2N`` label references; ``labels[i] is labels[i + N]``.
    """

    images: tuple[ImageBuffer, ...]
    bboxes: tuple[BBox, ...]
    labels: tuple[Any, ...]

    def __len__(self) -> int:
        return len(self.images)


def extend_batch(
    images: Sequence[ImageBuffer],
    bboxes: Sequence[BBox],
    labels: Sequence[Any],
    cfg: ObaConfig,
    workers: int = 1,
) -> AugmentedBatch:
    """
    Extend a batch by an OBA-augmented copy of itself.

    Image ``i`` is augmented with seed ``cfg.seed XOR i``, so the result
    does not depend on ``workers``.

    Raises:
        RopeValueError: If the three sequences differ in length.
    """
    if not (len(images) == len(bboxes) == len(labels)):
        raise RopeValueError(
            f"Batch length mismatch: {len(images)} images, {len(bboxes)} boxes, {len(labels)} labels."
        )

    def _augment(i: int) -> ImageBuffer:
        return apply_oba(images[i], bboxes[i], cfg.with_seed(derive_seed(cfg.seed, i)))

    indices = range(len(images))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            copies = list(pool.map(_augment, indices))
    else:
        copies = [_augment(i) for i in indices]

    logger.debug("Extended batch of %d with OBA copies", len(images))
    return AugmentedBatch(
        tuple(images) + tuple(copies),
        tuple(bboxes) + tuple(bboxes),
        tuple(labels) + tuple(labels),
    )
