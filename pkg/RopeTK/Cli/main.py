"""
# RopeTK Command Line

* Description:

    ``ropetk <subcommand> [options]``. Subcommands: ``synth``, ``run``,
    ``eval``, ``oba``, ``fps``, ``metrics`` and ``view``. The shared flags
    ``--seed``, ``--out``, ``--threads``, ``-v`` and ``-q`` are accepted
    after any subcommand.

    Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
    Any other toolkit error also exits with 2.
"""

import argparse
import logging
import sys
from typing import Optional
from typing import Sequence

import RopeTK
from RopeTK.Cli import commands
from RopeTK.Core.enums import ExitCode
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import NumericalError
from RopeTK.Core.errors import RopeError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.log import configure_logging
from RopeTK.Metrics.distances import AUC_MAX_THRESHOLD
from RopeTK.Metrics.distances import DEFAULT_FRACTION
from RopeTK.Solvers.landmark_filter import FilterConfig
from RopeTK.Solvers.ransac import RansacConfig
from RopeTK.Synth.corruption import CorruptionConfig
from RopeTK.Synth.scene import SceneConfig
from RopeTK.Synth.shapes import BUILTIN_SHAPES


logger = logging.getLogger(__name__)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Random seed (default 0).")
    common.add_argument("--out", default=None, help="Output path; each command has its own default.")
    common.add_argument("--threads", type=int, default=1, help="Worker threads (default 1).")
    common.add_argument("-v", "--verbose", action="count", default=0, help="Debug logging.")
    common.add_argument("-q", "--quiet", action="count", default=0, help="Warnings and errors only.")
    return common


def _object_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--shape", choices=sorted(BUILTIN_SHAPES), default="blob", help="Builtin object model.")
    parser.add_argument("--ply", default=None, help="ASCII PLY object model (overrides --shape).")
    parser.add_argument("--symmetric", action="store_true", help="Flag the object as symmetric (ADD-S).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ropetk",
        description="Landmark-based object pose estimation toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {RopeTK.__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    common = _common_flags()

    synth = sub.add_parser("synth", parents=[common], help="Generate a synthetic dataset.")
    synth.add_argument("--scenes", type=int, default=10, help="Number of scenes (default 10).")
    _object_flags(synth)
    synth.add_argument("--landmarks", type=int, default=SceneConfig.DEFAULT_LANDMARKS, help="FPS landmarks per object.")
    synth.add_argument("--width", type=int, default=SceneConfig.DEFAULT_SIZE[0])
    synth.add_argument("--height", type=int, default=SceneConfig.DEFAULT_SIZE[1])
    synth.add_argument("--focal", type=float, default=120.0, help="Focal length in pixels.")
    synth.add_argument("--corrupt", action="store_true", help="Also write occlusion-corrupted heatmaps.")
    synth.add_argument("--noise-sigma", type=float, default=CorruptionConfig.landmark_noise_sigma)
    synth.add_argument("--occluded-fraction", type=float, default=CorruptionConfig.occluded_fraction)
    synth.add_argument("--occluded-shift", type=float, default=CorruptionConfig.DEFAULT_SHIFT)
    synth.add_argument("--distractors", type=int, default=CorruptionConfig.distractor_blobs)
    synth.add_argument("--flatten", type=float, default=CorruptionConfig.flatten_factor)
    synth.add_argument(
        "--correlated-medium", action="store_true",
        help="Corrupt the medium head with the same draws as the high head.",
    )
    synth.set_defaults(handler=commands.cmd_synth)

    run = sub.add_parser("run", parents=[common], help="Estimate poses for a dataset.")
    run.add_argument("manifest", help="Dataset manifest or its directory.")
    run.add_argument("--epsilon", type=float, default=FilterConfig.DEFAULT_EPSILON, help="Verification threshold, px.")
    run.add_argument("--ransac-thresh", type=float, default=RansacConfig.DEFAULT_THRESHOLD)
    run.add_argument("--ransac-conf", type=float, default=RansacConfig.DEFAULT_CONFIDENCE)
    run.add_argument("--ransac-iters", type=int, default=RansacConfig.DEFAULT_MAX_ITERATIONS)
    run.add_argument("--refine-iters", type=int, default=RansacConfig.refine_iterations)
    run.add_argument("--no-filter", action="store_true", help="Skip landmark verification.")
    run.add_argument("--argmax-decode", action="store_true", help="Decode heatmaps by argmax.")
    run.add_argument("--single-precision", action="store_true", help="Use the high-precision head only.")
    run.add_argument("--clean", action="store_true", help="Read clean heatmaps even if corrupted ones exist.")
    run.set_defaults(handler=commands.cmd_run)

    evaluate = sub.add_parser("eval", parents=[common], help="Score predictions against a dataset.")
    evaluate.add_argument("predictions", help="Predictions JSON.")
    evaluate.add_argument("manifest", help="Dataset manifest or its directory.")
    evaluate.add_argument("--fraction", type=float, default=DEFAULT_FRACTION, help="Pass threshold / diameter.")
    evaluate.add_argument("--max-threshold", type=float, default=AUC_MAX_THRESHOLD, help="AUC range, mm.")
    evaluate.set_defaults(handler=commands.cmd_eval)

    oba = sub.add_parser("oba", parents=[common], help="Occlude-and-blackout one image.")
    oba.add_argument("image", help="Input image.")
    oba.add_argument("--bbox", type=int, nargs=4, metavar=("X0", "Y0", "X1", "Y1"), required=True)
    oba.add_argument("--grid-rows", type=int, default=4)
    oba.add_argument("--grid-cols", type=int, default=4)
    oba.add_argument("--p-occlude", type=float, default=0.5)
    oba.add_argument("--p-noise", type=float, default=0.5, help="Noise vs copied patch probability.")
    oba.set_defaults(handler=commands.cmd_oba)

    fps = sub.add_parser("fps", parents=[common], help="Farthest point sampling of landmarks.")
    _object_flags(fps)
    fps.add_argument("-k", type=int, default=SceneConfig.DEFAULT_LANDMARKS, help="Number of landmarks.")
    fps.set_defaults(handler=commands.cmd_fps)

    metrics = sub.add_parser("metrics", parents=[common], help="ADD / ADD-S for a pose pair.")
    metrics.add_argument("--pred", required=True, help="Predicted pose JSON.")
    metrics.add_argument("--gt", required=True, help="Groundtruth pose JSON.")
    _object_flags(metrics)
    metrics.add_argument("--fraction", type=float, default=DEFAULT_FRACTION)
    metrics.set_defaults(handler=commands.cmd_metrics)

    view = sub.add_parser("view", parents=[common], help="Inspect a scene in a Qt window.")
    view.add_argument("manifest", help="Dataset manifest or its directory.")
    view.add_argument("--image-id", default=None)
    view.add_argument("--predictions", default=None, help="Predictions JSON to overlay.")
    view.set_defaults(handler=commands.cmd_view)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(ExitCode.Success if not exc.code else ExitCode.Usage)

    configure_logging(args.verbose - args.quiet)
    try:
        return int(args.handler(args))
    except RopeValueError as err:
        logger.error("%s", err)
        return int(ExitCode.Usage)
    except (DataError, OSError) as err:
        logger.error("%s", err)
        return int(ExitCode.Data)
    except NumericalError as err:
        logger.error("%s", err)
        return int(ExitCode.Numerical)
    except RopeError as err:
        logger.error("%s", err)
        return int(ExitCode.Data)


if __name__ == "__main__":
    sys.exit(main())
