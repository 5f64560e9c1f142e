"""
# CLI Commands

* Description:

    One function per subcommand. Each takes the parsed ``argparse``
    namespace, does its work through the library, prints a short summary
    to stdout and returns an ``ExitCode``. Library errors propagate to
    ``RopeTK.Cli.main`` which maps them to exit codes.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any

from RopeTK.Augment.image import BBox
from RopeTK.Augment.image import read_png
from RopeTK.Augment.image import write_png
from RopeTK.Augment.oba import apply_oba
from RopeTK.Augment.oba import ObaConfig
from RopeTK.Core.enums import ExitCode
from RopeTK.Core.errors import RopeValueError
from RopeTK.Geometry.cloud import diameter
from RopeTK.Geometry.cloud import fps_select
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import Pose
from RopeTK.Metrics.distances import add_distance
from RopeTK.Metrics.distances import adds_distance
from RopeTK.Metrics.distances import pose_correct
from RopeTK.Metrics.evaluate import evaluate_dataset
from RopeTK.Metrics.evaluate import load_predictions
from RopeTK.Metrics.evaluate import predictions_to_dict
from RopeTK.Metrics.evaluate import write_bubble_csv
from RopeTK.Metrics.evaluate import write_curve_csv
from RopeTK.Metrics.evaluate import write_report_csv
from RopeTK.Metrics.evaluate import write_report_json
from RopeTK.Cli.pipeline import run_pipeline
from RopeTK.Cli.pipeline import RunConfig
from RopeTK.Solvers.landmark_filter import FilterConfig
from RopeTK.Solvers.ransac import RansacConfig
from RopeTK.Synth.corruption import CorruptionConfig
from RopeTK.Synth.manifest import dump_json
from RopeTK.Synth.manifest import generate_dataset
from RopeTK.Synth.manifest import load_manifest
from RopeTK.Synth.manifest import read_json
from RopeTK.Synth.scene import load_cloud
from RopeTK.Synth.scene import SceneConfig


logger = logging.getLogger(__name__)


def _out(args: argparse.Namespace, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


def _cloud_from_args(args: argparse.Namespace) -> PointCloud:
    cfg = SceneConfig(
        shape=args.shape,
        ply_path=args.ply or "",
        symmetric=True if args.symmetric else None,
    )
    return load_cloud(cfg)


def scene_config_from_args(args: argparse.Namespace) -> SceneConfig:
    width, height = args.width, args.height
    focal = args.focal
    return SceneConfig(
        shape=args.shape,
        ply_path=args.ply or "",
        symmetric=True if args.symmetric else None,
        n_landmarks=args.landmarks,
        image_size=(width, height),
        intrinsics=CameraIntrinsics(focal, focal, (width - 1) / 2.0, (height - 1) / 2.0),
        seed=args.seed,
    )


def corruption_from_args(args: argparse.Namespace) -> CorruptionConfig:
    return CorruptionConfig(
        landmark_noise_sigma=args.noise_sigma,
        occluded_fraction=args.occluded_fraction,
        occluded_shift=args.occluded_shift,
        distractor_blobs=args.distractors,
        flatten_factor=args.flatten,
        decorrelate_medium=not args.correlated_medium,
        seed=args.seed,
    )


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        filter=FilterConfig(epsilon=args.epsilon),
        ransac=RansacConfig(
            reproj_threshold=args.ransac_thresh,
            confidence=args.ransac_conf,
            max_iterations=args.ransac_iters,
            seed=args.seed,
            refine_iterations=args.refine_iters,
        ),
        no_filter=args.no_filter,
        argmax_decode=args.argmax_decode,
        single_precision=args.single_precision,
        clean=args.clean,
    )


def cmd_synth(args: argparse.Namespace) -> ExitCode:
    """Generate a synthetic dataset: manifest, PLY model, images and heatmaps."""
    out = _out(args, "dataset")
    scene_cfg = scene_config_from_args(args)
    corruption = corruption_from_args(args) if args.corrupt else None
    manifest = generate_dataset(out, args.scenes, scene_cfg, corruption, args.seed, args.threads)

    print(f"scenes: {len(manifest.scenes)}")
    print(f"objects: {', '.join(sorted(manifest.objects))}")
    if corruption is None:
        print("corruption: none")
    else:
        params = ", ".join(f"{k}={v}" for k, v in corruption.to_dict().items() if k != "seed")
        print(f"corruption: {params}")
    print(f"manifest: {out / 'manifest.json'}")
    return ExitCode.Success


def cmd_run(args: argparse.Namespace) -> ExitCode:
    """Run decode, verification and RANSAC-PnP over every scene of a manifest."""
    manifest = load_manifest(Path(args.manifest))
    cfg = run_config_from_args(args)
    records = run_pipeline(manifest, cfg, args.threads)

    out = _out(args, "predictions.json")
    dump_json(out, predictions_to_dict(records, cfg.to_dict()))
    failed = sum(r.pose is None for r in records)
    fallbacks = sum(r.fallback_used for r in records)
    print(f"scenes: {len(records)}  failed: {failed}  fallback: {fallbacks}")
    print(f"predictions: {out}")
    return ExitCode.Success


def cmd_eval(args: argparse.Namespace) -> ExitCode:
    """Score predictions: ``<out>.json``, ``<out>.csv``, ``<out>_bubble.csv``, ``<out>_curve.csv``."""
    manifest = load_manifest(Path(args.manifest))
    records = load_predictions(Path(args.predictions))
    report = evaluate_dataset(records, manifest, args.fraction, args.max_threshold, args.threads)

    prefix = _out(args, "report")
    stem = prefix.with_suffix("") if prefix.suffix in (".json", ".csv") else prefix
    config = {"fraction": args.fraction, "max_threshold": args.max_threshold}
    write_report_json(stem.with_name(stem.name + ".json"), report, config)
    write_report_csv(stem.with_name(stem.name + ".csv"), report)
    write_bubble_csv(stem.with_name(stem.name + "_bubble.csv"), report)
    write_curve_csv(stem.with_name(stem.name + "_curve.csv"), report)

    for obj in report.objects:
        print(
            f"{obj.object_id}: {obj.kind.value} pass rate {obj.pass_rate:.2f}  "
            f"AUC {obj.auc:.2f}  ({obj.n_images} images)"
        )
    print(f"pooled: pass rate {report.pooled_pass_rate:.2f}  AUC {report.pooled_auc:.2f}")
    for note in report.notes:
        print(f"note: {note}")
    return ExitCode.Success


def cmd_oba(args: argparse.Namespace) -> ExitCode:
    """Apply occlude-and-blackout to one image."""
    image = read_png(Path(args.image))
    bbox = BBox(*args.bbox)
    cfg = ObaConfig(args.grid_rows, args.grid_cols, args.p_occlude, args.p_noise, args.seed)
    out = _out(args, "oba.png")
    write_png(out, apply_oba(image, bbox, cfg))
    print(f"wrote {out}")
    return ExitCode.Success


def cmd_fps(args: argparse.Namespace) -> ExitCode:
    """Select landmarks by farthest point sampling and emit them as JSON."""
    cloud = _cloud_from_args(args)
    landmarks = fps_select(cloud, args.k)
    data: dict[str, Any] = {
        "object": cloud.name,
        "k": args.k,
        "diameter_mm": diameter(cloud),
        "landmarks": [lm.to_dict() for lm in landmarks],
    }
    if args.out:
        dump_json(Path(args.out), data)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(data, indent=2, sort_keys=True))
    return ExitCode.Success


def cmd_metrics(args: argparse.Namespace) -> ExitCode:
    """ADD, ADD-S and the pass decision for one predicted/groundtruth pose pair."""
    pred = Pose.from_dict(read_json(Path(args.pred)))
    gt = Pose.from_dict(read_json(Path(args.gt)))
    cloud = _cloud_from_args(args)
    diam = diameter(cloud)
    add = add_distance(pred, gt, cloud)
    adds = adds_distance(pred, gt, cloud)
    selected = adds if cloud.symmetric else add
    data = {
        "add_mm": add.value,
        "adds_mm": adds.value,
        "diameter_mm": diam,
        "kind": selected.kind.value,
        "fraction": args.fraction,
        "correct": pose_correct(selected, diam, args.fraction),
    }
    if args.out:
        dump_json(Path(args.out), data)
    print(json.dumps(data, indent=2, sort_keys=True))
    return ExitCode.Success


def cmd_view(args: argparse.Namespace) -> ExitCode:
    """Open the Qt inspector on one scene of a manifest."""
    from RopeTK.QtWrappers.viewer import run_viewer

    manifest = load_manifest(Path(args.manifest))
    if not manifest.scenes:
        raise RopeValueError("Manifest holds no scenes.")
    image_id = args.image_id or manifest.scenes[0].image_id
    predictions = load_predictions(Path(args.predictions)) if args.predictions else []
    run_viewer(manifest, manifest.scene(image_id), predictions)
    return ExitCode.Success
