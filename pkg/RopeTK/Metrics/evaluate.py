"""
# Dataset Evaluation

* Description:

    Scores a predictions file against a dataset manifest: ADD for
    asymmetric objects and ADD-S for symmetric ones, pass rates at a
    fraction of the model diameter, AUC per object and pooled, and the
    residual/incoherence analysis of the high-precision landmarks.

* Notes:

    A scene without a prediction, or with a null pose, scores an infinite
    distance: never correct, no contribution to the AUC.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import Any
from typing import Optional
from typing import Sequence

import numpy as np

from RopeTK.Core.enums import DistanceKind
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.cloud import diameter
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.pose import Pose
from RopeTK.Metrics.coherence import coherence
from RopeTK.Metrics.distances import accuracy_curve
from RopeTK.Metrics.distances import auc
from RopeTK.Metrics.distances import AUC_MAX_THRESHOLD
from RopeTK.Metrics.distances import DEFAULT_FRACTION
from RopeTK.Metrics.distances import model_distance
from RopeTK.Metrics.distances import pose_correct
from RopeTK.Synth.manifest import Manifest
from RopeTK.Synth.manifest import read_json
from RopeTK.Synth.manifest import SceneEntry


logger = logging.getLogger(__name__)

PREDICTIONS_FORMAT = "ropetk-predictions"
CURVE_STEPS = 101


def _finite_or_none(value: float) -> Optional[float]:
    return value if value is not None and math.isfinite(value) else None


def _coords_or_none(values: Any) -> Optional[FLOAT_ARRAY]:
    if values is None:
        return None
    return np.asarray(values, dtype=np.float64).reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class PredictionRecord(object):
    """
    One line of a predictions file.

    Attributes:
        image_id: Scene the prediction belongs to.
        pose: Estimated pose, None if the scene failed.
        landmarks_high: ``(K, 2)`` decoded high-precision landmarks.
        landmarks_medium: ``(K, 2)`` decoded medium-precision landmarks.
        fallback_used: Whether the verification fallback kicked in.
        inliers: RANSAC inlier landmark ids.
        kept_indices: Landmark ids handed to RANSAC.
        valid: Whether RANSAC reached 4 inliers.
        mean_reproj_error: Mean inlier reprojection error, pixels.
        error: Failure message for scenes that could not be processed.
    """

    image_id: str
    pose: Optional[Pose]
    landmarks_high: Optional[FLOAT_ARRAY] = None
    landmarks_medium: Optional[FLOAT_ARRAY] = None
    fallback_used: bool = False
    inliers: tuple[int, ...] = ()
    kept_indices: tuple[int, ...] = ()
    valid: bool = True
    mean_reproj_error: Optional[float] = None
    error: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "image_id": self.image_id,
            "pose": self.pose.to_dict() if self.pose is not None else None,
            "landmarks_high": self.landmarks_high.tolist() if self.landmarks_high is not None else None,
            "landmarks_medium": (
                self.landmarks_medium.tolist() if self.landmarks_medium is not None else None
            ),
            "fallback_used": self.fallback_used,
            "inliers": list(self.inliers),
            "kept_indices": list(self.kept_indices),
            "valid": self.valid,
            "mean_reproj_error": _finite_or_none(self.mean_reproj_error),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PredictionRecord:
        try:
            pose = Pose.from_dict(data["pose"]) if data.get("pose") is not None else None
            return cls(
                image_id=str(data["image_id"]),
                pose=pose,
                landmarks_high=_coords_or_none(data.get("landmarks_high")),
                landmarks_medium=_coords_or_none(data.get("landmarks_medium")),
                fallback_used=bool(data.get("fallback_used", False)),
                inliers=tuple(int(i) for i in data.get("inliers", [])),
                kept_indices=tuple(int(i) for i in data.get("kept_indices", [])),
                valid=bool(data.get("valid", pose is not None)),
                mean_reproj_error=data.get("mean_reproj_error"),
                error=str(data.get("error") or ""),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"Malformed prediction record: {err!r}") from err


def predictions_to_dict(records: Sequence[PredictionRecord], config: Optional[dict] = None) -> dict[str, Any]:
    return {
        "format": PREDICTIONS_FORMAT,
        "config": config or {},
        "predictions": [record.to_dict() for record in records],
    }


def load_predictions(path: Path) -> list[PredictionRecord]:
    """
    Read a predictions file: either a bare JSON list of records or the
    object written by the ``run`` command.

    Raises:
        DataError: If the file is missing or malformed.
    """
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get("predictions")
    if not isinstance(data, list):
        raise DataError(f"{path} does not hold a list of predictions.")
    return [PredictionRecord.from_dict(item) for item in data]


@dataclass(frozen=True)
class ImageResult(object):
    image_id: str
    object_id: str
    distance_mm: float
    kind: DistanceKind
    correct: bool
    missing: bool
    fallback_used: bool = False
    inliers: int = 0
    mean_r: Optional[float] = None
    mean_c: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "image_id": self.image_id,
            "object_id": self.object_id,
            "distance_mm": _finite_or_none(self.distance_mm),
            "kind": self.kind.value,
            "correct": self.correct,
            "missing": self.missing,
            "fallback_used": self.fallback_used,
            "inliers": self.inliers,
            "mean_r": self.mean_r,
            "mean_c": self.mean_c,
        }


@dataclass(frozen=True)
class ObjectSummary(object):
    """
    Per-object scores. ``pass_rate`` and ``auc`` are percentages.
    ``mean_r``/``mean_c`` average the per-image means over images with
    decoded landmarks (None when there are none).
    """

    object_id: str
    kind: DistanceKind
    n_images: int
    pass_rate: float
    auc: float
    distances: tuple[float, ...]
    mean_r: Optional[float]
    mean_c: Optional[float]
    n_coherence: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "object_id": self.object_id,
            "kind": self.kind.value,
            "n_images": self.n_images,
            "pass_rate": self.pass_rate,
            "auc": self.auc,
            "distances_mm": [_finite_or_none(d) for d in self.distances],
            "mean_r": self.mean_r,
            "mean_c": self.mean_c,
            "n_coherence": self.n_coherence,
        }


@dataclass(frozen=True, eq=False)
class EvaluationReport(object):
    """
    Attributes:
        images: Per-image results in manifest order.
        objects: Per-object summaries, sorted by object id.
        mean_pass_rate: Average of the per-object pass rates (%).
        mean_auc: Average of the per-object AUCs (%).
        pooled_pass_rate: Pass rate over all images (%).
        pooled_auc: AUC over all images (%).
        curve: ``(thresholds_mm, accuracy)`` over all images.
        notes: Human-readable remarks, e.g. missing predictions.
    """

    images: tuple[ImageResult, ...]
    objects: tuple[ObjectSummary, ...]
    mean_pass_rate: float
    mean_auc: float
    pooled_pass_rate: float
    pooled_auc: float
    curve: tuple[FLOAT_ARRAY, FLOAT_ARRAY]
    fraction: float = DEFAULT_FRACTION
    max_threshold: float = AUC_MAX_THRESHOLD
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "fraction": self.fraction,
            "max_threshold_mm": self.max_threshold,
            "mean_pass_rate": self.mean_pass_rate,
            "mean_auc": self.mean_auc,
            "pooled_pass_rate": self.pooled_pass_rate,
            "pooled_auc": self.pooled_auc,
            "notes": list(self.notes),
            "objects": [obj.to_dict() for obj in self.objects],
            "images": [img.to_dict() for img in self.images],
        }


def _score_scene(
    entry: SceneEntry,
    pred: Optional[PredictionRecord],
    cloud: PointCloud,
    diam: float,
    fraction: float,
) -> ImageResult:
    kind = DistanceKind.ADDS if cloud.symmetric else DistanceKind.ADD
    if pred is None or pred.pose is None:
        return ImageResult(
            entry.image_id, entry.object_id, math.inf, kind, correct=False, missing=True,
            fallback_used=bool(pred.fallback_used) if pred is not None else False,
        )

    dist = model_distance(pred.pose, entry.gt_pose, cloud)
    mean_r = mean_c = None
    if pred.landmarks_high is not None and entry.gt_landmarks and len(pred.landmarks_high) == len(entry.gt_landmarks):
        report = coherence(pred.landmarks_high, np.asarray(entry.gt_landmarks))
        mean_r, mean_c = report.mean_r, report.mean_c
    return ImageResult(
        image_id=entry.image_id,
        object_id=entry.object_id,
        distance_mm=dist.value,
        kind=dist.kind,
        correct=pose_correct(dist, diam, fraction),
        missing=False,
        fallback_used=pred.fallback_used,
        inliers=len(pred.inliers),
        mean_r=mean_r,
        mean_c=mean_c,
    )


def _summarize(object_id: str, results: list[ImageResult], max_threshold: float) -> ObjectSummary:
    distances = [r.distance_mm for r in results]
    coherent = [r for r in results if r.mean_r is not None]
    return ObjectSummary(
        object_id=object_id,
        kind=results[0].kind,
        n_images=len(results),
        pass_rate=100.0 * sum(r.correct for r in results) / len(results),
        auc=100.0 * auc(distances, max_threshold),
        distances=tuple(distances),
        mean_r=float(np.mean([r.mean_r for r in coherent])) if coherent else None,
        mean_c=float(np.mean([r.mean_c for r in coherent])) if coherent else None,
        n_coherence=len(coherent),
    )


def evaluate_dataset(
    predictions: Sequence[PredictionRecord],
    manifest: Manifest,
    fraction: float = DEFAULT_FRACTION,
    max_threshold: float = AUC_MAX_THRESHOLD,
    workers: int = 1,
) -> EvaluationReport:
    """
    Evaluate predictions against the groundtruth of ``manifest``.

    Args:
        predictions (Sequence[PredictionRecord]): At most one per image id.
        manifest (Manifest): Groundtruth dataset.
        fraction (float): Pass threshold as a fraction of the diameter.
        max_threshold (float): Upper bound of the AUC integral, mm.
        workers (int): Threads used for per-image scoring.

    Returns:
        EvaluationReport: Deterministic, independent of ``workers``.

    Raises:
        DataError: If predictions reference unknown or duplicate image ids,
            or a scene references an unknown object.
        RopeValueError: If the manifest holds no scenes.
    """
    if not manifest.scenes:
        raise RopeValueError("Manifest holds no scenes.")

    known = {entry.image_id for entry in manifest.scenes}
    by_id: dict[str, PredictionRecord] = {}
    duplicates = []
    for record in predictions:
        if record.image_id in by_id:
            duplicates.append(record.image_id)
        by_id[record.image_id] = record
    unknown = sorted(set(by_id) - known)
    if unknown:
        raise DataError(f"Predictions reference unknown image ids: {', '.join(unknown)}")
    if duplicates:
        raise DataError(f"Duplicate predictions for image ids: {', '.join(sorted(set(duplicates)))}")

    clouds: dict[str, tuple[PointCloud, float]] = {}
    for entry in manifest.scenes:
        if entry.object_id not in clouds:
            cloud = manifest.object_cloud(entry.object_id)
            clouds[entry.object_id] = (cloud, manifest.objects[entry.object_id].diameter_mm or diameter(cloud))

    def _score(entry: SceneEntry) -> ImageResult:
        cloud, diam = clouds[entry.object_id]
        return _score_scene(entry, by_id.get(entry.image_id), cloud, diam, fraction)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            images = list(pool.map(_score, manifest.scenes))
    else:
        images = [_score(entry) for entry in manifest.scenes]

    per_object: dict[str, list[ImageResult]] = {}
    for result in images:
        per_object.setdefault(result.object_id, []).append(result)
    objects = tuple(_summarize(oid, per_object[oid], max_threshold) for oid in sorted(per_object))

    all_distances = [r.distance_mm for r in images]
    thresholds = np.linspace(0.0, max_threshold, CURVE_STEPS)
    missing = sum(r.missing for r in images)
    notes = []
    if missing == len(images):
        notes.append("all predictions missing")
    elif missing:
        notes.append(f"{missing} of {len(images)} predictions missing")

    report = EvaluationReport(
        images=tuple(images),
        objects=objects,
        mean_pass_rate=float(np.mean([o.pass_rate for o in objects])),
        mean_auc=float(np.mean([o.auc for o in objects])),
        pooled_pass_rate=100.0 * sum(r.correct for r in images) / len(images),
        pooled_auc=100.0 * auc(all_distances, max_threshold),
        curve=(thresholds, accuracy_curve(all_distances, thresholds)),
        fraction=fraction,
        max_threshold=max_threshold,
        notes=tuple(notes),
    )
    logger.info(
        "Evaluated %d images: pass rate %.2f%%, AUC %.2f%%",
        len(images), report.pooled_pass_rate, report.pooled_auc,
    )
    return report


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


def write_report_json(path: Path, report: EvaluationReport, config: Optional[dict] = None) -> None:
    data = report.to_dict()
    data["config"] = config or {}
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_report_csv(path: Path, report: EvaluationReport) -> None:
    """One row per image plus a header."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["image_id", "object_id", "distance_mm", "correct", "fallback_used", "inliers", "mean_r", "mean_c"]
        )
        for img in report.images:
            writer.writerow(
                [
                    img.image_id,
                    img.object_id,
                    _fmt(img.distance_mm),
                    int(img.correct),
                    int(img.fallback_used),
                    img.inliers,
                    _fmt(img.mean_r),
                    _fmt(img.mean_c),
                ]
            )


def write_bubble_csv(path: Path, report: EvaluationReport) -> None:
    """Residual vs incoherence per object: ``object_id, mean_r, mean_c, n``."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["object_id", "mean_r", "mean_c", "n"])
        for obj in report.objects:
            writer.writerow([obj.object_id, _fmt(obj.mean_r), _fmt(obj.mean_c), obj.n_coherence])


def write_curve_csv(path: Path, report: EvaluationReport) -> None:
    """ADD(-S) accuracy against threshold: ``threshold_mm, accuracy``."""
    thresholds, accuracy = report.curve
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["threshold_mm", "accuracy"])
        for t, a in zip(thresholds, accuracy):
            writer.writerow([_fmt(t), _fmt(a)])
