"""
# Pose Pipeline

* Description:

    Per-scene pipeline of the ``run`` command: load heatmaps, decode the
    high and medium heads, verify, solve with RANSAC, and record the
    outcome. The ablation switches swap single stages out.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Any

from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import derive_seed
from RopeTK.Heatmaps.decode import decode_argmax
from RopeTK.Heatmaps.decode import decode_expectation
from RopeTK.Metrics.evaluate import PredictionRecord
from RopeTK.Solvers.landmark_filter import filter_landmarks
from RopeTK.Solvers.landmark_filter import FilterConfig
from RopeTK.Solvers.landmark_filter import passthrough_correspondences
from RopeTK.Solvers.ransac import ransac_pnp
from RopeTK.Solvers.ransac import RansacConfig
from RopeTK.Synth.manifest import Manifest
from RopeTK.Synth.manifest import SceneEntry


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig(object):
    """
    Args:
        filter (FilterConfig): Verification threshold.
        ransac (RansacConfig): RANSAC parameters; scene ``i`` runs with
            seed ``ransac.seed XOR i``.
        no_filter (bool): Hand every landmark to RANSAC.
        argmax_decode (bool): Decode by argmax instead of expectation.
        single_precision (bool): Use the high head only, for coordinates
            and verification alike. With no medium head to check against
            every landmark reaches RANSAC, so poses match ``no_filter``;
            only ``landmarks_medium`` differs, as it repeats the high head.
        clean (bool): Read the clean heatmaps even if corrupted ones exist.
    """

    filter: FilterConfig = field(default_factory=FilterConfig)
    ransac: RansacConfig = field(default_factory=RansacConfig)
    no_filter: bool = False
    argmax_decode: bool = False
    single_precision: bool = False
    clean: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "filter": self.filter.to_dict(),
            "ransac": self.ransac.to_dict(),
            "no_filter": self.no_filter,
            "argmax_decode": self.argmax_decode,
            "single_precision": self.single_precision,
            "clean": self.clean,
        }


def process_scene(manifest: Manifest, entry: SceneEntry, index: int, cfg: RunConfig) -> PredictionRecord:
    """
    Run the pipeline on one scene.

    A missing or malformed heatmap file becomes a failed record (null
    pose, ``error`` set) instead of an exception.
    """
    try:
        stacks = manifest.load_heatmaps(entry, corrupted=not cfg.clean)
        model = manifest.objects[entry.object_id].landmarks
    except (DataError, KeyError) as err:
        logger.warning("Scene %s skipped: %s", entry.image_id, err)
        return PredictionRecord(entry.image_id, None, valid=False, error=str(err))

    decode = decode_argmax if cfg.argmax_decode else decode_expectation
    high = decode(stacks[PrecisionLevel.High], PrecisionLevel.High)
    medium = high if cfg.single_precision else decode(stacks[PrecisionLevel.Medium], PrecisionLevel.Medium)

    try:
        if cfg.no_filter or cfg.single_precision:
            corr = passthrough_correspondences(high, model, medium)
        else:
            corr = filter_landmarks(high, medium, model, cfg.filter)
        result = ransac_pnp(
            corr, entry.intrinsics, replace(cfg.ransac, seed=derive_seed(cfg.ransac.seed, index))
        )
    except RopeValueError as err:
        logger.warning("Scene %s failed: %s", entry.image_id, err)
        return PredictionRecord(
            entry.image_id, None, high.coords, medium.coords, valid=False, error=str(err)
        )

    return PredictionRecord(
        image_id=entry.image_id,
        pose=result.pose,
        landmarks_high=high.coords,
        landmarks_medium=medium.coords,
        fallback_used=corr.fallback_used,
        inliers=result.inlier_indices,
        kept_indices=corr.kept_indices,
        valid=result.valid,
        mean_reproj_error=result.mean_reproj_error,
    )


def run_pipeline(manifest: Manifest, cfg: RunConfig = RunConfig(), workers: int = 1) -> list[PredictionRecord]:
    """Process every scene; records come back in manifest order for any ``workers``."""
    jobs = list(enumerate(manifest.scenes))

    def _job(item: tuple[int, SceneEntry]) -> PredictionRecord:
        index, entry = item
        return process_scene(manifest, entry, index, cfg)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_job, jobs))
    else:
        records = [_job(item) for item in jobs]

    failed = sum(record.pose is None for record in records)
    logger.info("Processed %d scenes (%d failed)", len(records), failed)
    return records
