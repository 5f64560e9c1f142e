"""
# Dataset Manifests

* Description:

    Writes synthetic datasets to disk and reads them back.

    Layout under the dataset root::

        manifest.json
        objects/<object_id>.ply
        scenes/<image_id>/image.png
        scenes/<image_id>/<level>.rhmp             clean heatmaps
        scenes/<image_id>/corrupted_<level>.rhmp   when corruption is on

    ``manifest.json``::

        {"format": "ropetk-manifest", "version": 1, "seed": int,
         "scene_config": {...}, "corruption_config": {...} | null,
         "objects": [{"id", "builtin", "ply_path", "symmetric",
                      "diameter_mm", "landmarks": [{"index", "coords"}]}],
         "scenes": [{"image_id", "object_id", "gt_pose", "intrinsics",
                     "bbox", "image_size", "image_path", "gt_landmarks",
                     "occluded", "heatmap_paths": {level: path},
                     "corrupted_heatmap_paths": {level: path} | null}]}

    Paths are relative to the manifest directory, POSIX separators.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from typing import Optional

from RopeTK.Augment.image import BBox
from RopeTK.Augment.image import write_png
from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import derive_seed
from RopeTK.Geometry.cloud import diameter
from RopeTK.Geometry.cloud import Landmark3D
from RopeTK.Geometry.cloud import PointCloud
from RopeTK.Geometry.ply import read_ply
from RopeTK.Geometry.ply import write_ply
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import Pose
from RopeTK.Heatmaps.codec import load_stack
from RopeTK.Heatmaps.codec import save_stack
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Synth.corruption import corrupt_scene
from RopeTK.Synth.corruption import CorruptionConfig
from RopeTK.Synth.scene import generate_scene
from RopeTK.Synth.scene import load_cloud
from RopeTK.Synth.scene import SceneConfig
from RopeTK.Synth.scene import SyntheticScene
from RopeTK.Synth.shapes import builtin_shape


logger = logging.getLogger(__name__)

MANIFEST_FORMAT = "ropetk-manifest"
MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


def dump_json(path: Path, data: Any) -> None:
    """Write ``data`` as stable, human-readable JSON (sorted keys, trailing newline)."""
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json(path: Path) -> Any:
    """
    Raises:
        DataError: If the file is missing or not valid JSON.
    """
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as err:
        raise DataError(f"Cannot read {path}: {err!r}") from err
    except json.JSONDecodeError as err:
        raise DataError(f"{path} is not valid JSON: {err}") from err


@dataclass(frozen=True, eq=False)
class ObjectEntry(object):
    id: str
    symmetric: bool
    diameter_mm: float
    landmarks: tuple[Landmark3D, ...]
    builtin: str = ""
    ply_path: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "builtin": self.builtin or None,
            "ply_path": self.ply_path or None,
            "symmetric": self.symmetric,
            "diameter_mm": self.diameter_mm,
            "landmarks": [lm.to_dict() for lm in self.landmarks],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ObjectEntry:
        return cls(
            id=str(data["id"]),
            symmetric=bool(data["symmetric"]),
            diameter_mm=float(data["diameter_mm"]),
            landmarks=tuple(Landmark3D.from_dict(lm) for lm in data.get("landmarks", [])),
            builtin=data.get("builtin") or "",
            ply_path=data.get("ply_path") or "",
        )


@dataclass(frozen=True, eq=False)
class SceneEntry(object):
    image_id: str
    object_id: str
    gt_pose: Pose
    intrinsics: CameraIntrinsics
    bbox: BBox
    image_size: tuple[int, int]
    image_path: str
    gt_landmarks: tuple[tuple[float, float], ...]
    heatmap_paths: dict[str, str]
    corrupted_heatmap_paths: Optional[dict[str, str]] = None
    occluded: tuple[int, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "image_id": self.image_id,
            "object_id": self.object_id,
            "gt_pose": self.gt_pose.to_dict(),
            "intrinsics": self.intrinsics.to_dict(),
            "bbox": self.bbox.to_list(),
            "image_size": list(self.image_size),
            "image_path": self.image_path,
            "gt_landmarks": [list(xy) for xy in self.gt_landmarks],
            "occluded": list(self.occluded),
            "heatmap_paths": dict(self.heatmap_paths),
            "corrupted_heatmap_paths": (
                dict(self.corrupted_heatmap_paths) if self.corrupted_heatmap_paths else None
            ),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SceneEntry:
        width, height = (int(v) for v in data["image_size"])
        return cls(
            image_id=str(data["image_id"]),
            object_id=str(data["object_id"]),
            gt_pose=Pose.from_dict(data["gt_pose"]),
            intrinsics=CameraIntrinsics.from_dict(data["intrinsics"]),
            bbox=BBox.from_list(data["bbox"]),
            image_size=(width, height),
            image_path=str(data.get("image_path", "")),
            gt_landmarks=tuple((float(x), float(y)) for x, y in data.get("gt_landmarks", [])),
            heatmap_paths={str(k): str(v) for k, v in data["heatmap_paths"].items()},
            corrupted_heatmap_paths=(
                {str(k): str(v) for k, v in data["corrupted_heatmap_paths"].items()}
                if data.get("corrupted_heatmap_paths")
                else None
            ),
            occluded=tuple(int(i) for i in data.get("occluded", [])),
        )

    def heatmap_path(self, level: PrecisionLevel, corrupted: bool = True) -> str:
        """Relative path of the stack the pipeline should read for ``level``."""
        if corrupted and self.corrupted_heatmap_paths:
            return self.corrupted_heatmap_paths[level.value]
        return self.heatmap_paths[level.value]


@dataclass(frozen=True, eq=False)
class Manifest(object):
    """A loaded dataset manifest; ``root`` is the directory holding it."""

    root: Path
    objects: dict[str, ObjectEntry]
    scenes: tuple[SceneEntry, ...]
    seed: int = 0
    scene_config: Optional[dict[str, Any]] = None
    corruption_config: Optional[dict[str, Any]] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "seed": self.seed,
            "scene_config": self.scene_config,
            "corruption_config": self.corruption_config,
            "objects": [self.objects[k].to_dict() for k in sorted(self.objects)],
            "scenes": [scene.to_dict() for scene in self.scenes],
        }

    def scene(self, image_id: str) -> SceneEntry:
        for entry in self.scenes:
            if entry.image_id == image_id:
                return entry
        raise DataError(f"Unknown image id {image_id!r}.")

    def object_cloud(self, object_id: str) -> PointCloud:
        """
        Load the model of ``object_id`` (PLY preferred, builtin otherwise).

        Raises:
            DataError: For an unknown object id or unreadable model.
        """
        try:
            entry = self.objects[object_id]
        except KeyError:
            raise DataError(f"Unknown object id {object_id!r}.") from None
        if entry.ply_path:
            return read_ply(self.root / entry.ply_path, symmetric=entry.symmetric)
        try:
            cloud = builtin_shape(entry.builtin)
        except RopeValueError as err:
            raise DataError(str(err)) from err
        return PointCloud(cloud.points, entry.symmetric, cloud.name)

    def load_heatmaps(self, entry: SceneEntry, corrupted: bool = True) -> dict[PrecisionLevel, HeatmapStack]:
        """
        Raises:
            DataError: If a heatmap file is missing or malformed.
        """
        return {
            level: load_stack(self.root / entry.heatmap_path(level, corrupted))
            for level in PrecisionLevel
        }


def _require(data: dict[str, Any], keys: tuple[str, ...], where: str) -> None:
    missing = [k for k in keys if k not in data]
    if missing:
        raise DataError(f"{where} is missing keys {missing}.")


def validate_manifest(data: Any) -> None:
    """
    Check the documented manifest schema.

    Raises:
        DataError: On the first violation found.
    """
    if not isinstance(data, dict):
        raise DataError("Manifest must be a JSON object.")
    _require(data, ("format", "version", "objects", "scenes"), "Manifest")
    if data["format"] != MANIFEST_FORMAT or data["version"] != MANIFEST_VERSION:
        raise DataError(f"Unsupported manifest {data['format']!r} v{data['version']}.")

    object_ids = set()
    for i, obj in enumerate(data["objects"]):
        _require(obj, ("id", "symmetric", "diameter_mm"), f"objects[{i}]")
        if not (obj.get("builtin") or obj.get("ply_path")):
            raise DataError(f"objects[{i}] needs a builtin name or a ply_path.")
        if not float(obj["diameter_mm"]) > 0:
            raise DataError(f"objects[{i}] has a non-positive diameter.")
        object_ids.add(str(obj["id"]))

    image_ids = set()
    for i, scene in enumerate(data["scenes"]):
        _require(
            scene,
            ("image_id", "object_id", "gt_pose", "intrinsics", "bbox", "image_size", "heatmap_paths"),
            f"scenes[{i}]",
        )
        if str(scene["object_id"]) not in object_ids:
            raise DataError(f"scenes[{i}] references unknown object {scene['object_id']!r}.")
        if scene["image_id"] in image_ids:
            raise DataError(f"Duplicate image id {scene['image_id']!r}.")
        image_ids.add(scene["image_id"])
        missing = [lvl.value for lvl in PrecisionLevel if lvl.value not in scene["heatmap_paths"]]
        if missing:
            raise DataError(f"scenes[{i}] lacks heatmaps for {missing}.")


def load_manifest(path: Path) -> Manifest:
    """
    Read and validate ``manifest.json`` (or the directory holding it).

    Raises:
        DataError: If the file is missing or violates the schema.
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    data = read_json(path)
    validate_manifest(data)
    try:
        objects = {str(o["id"]): ObjectEntry.from_dict(o) for o in data["objects"]}
        scenes = tuple(SceneEntry.from_dict(s) for s in data["scenes"])
    except (KeyError, TypeError, ValueError) as err:
        raise DataError(f"Malformed manifest record in {path}: {err!r}") from err
    return Manifest(
        root=path.parent,
        objects=objects,
        scenes=scenes,
        seed=int(data.get("seed", 0)),
        scene_config=data.get("scene_config"),
        corruption_config=data.get("corruption_config"),
    )


def save_manifest(manifest: Manifest) -> Path:
    path = manifest.root / MANIFEST_NAME
    dump_json(path, manifest.to_dict())
    return path


def _write_scene(
    root: Path, image_id: str, object_id: str, scene: SyntheticScene
) -> SceneEntry:
    rel = Path("scenes") / image_id
    (root / rel).mkdir(parents=True, exist_ok=True)

    image_path = (rel / "image.png").as_posix()
    write_png(root / image_path, scene.image)

    clean_paths = {}
    for level, stack in scene.heatmaps.items():
        clean_paths[level.value] = (rel / f"{level.value}.rhmp").as_posix()
        save_stack(root / clean_paths[level.value], stack)

    corrupted_paths = None
    if scene.corrupted_heatmaps is not None:
        corrupted_paths = {}
        for level, stack in scene.corrupted_heatmaps.items():
            corrupted_paths[level.value] = (rel / f"corrupted_{level.value}.rhmp").as_posix()
            save_stack(root / corrupted_paths[level.value], stack)

    return SceneEntry(
        image_id=image_id,
        object_id=object_id,
        gt_pose=scene.gt_pose,
        intrinsics=scene.intr,
        bbox=scene.bbox,
        image_size=scene.image_size,
        image_path=image_path,
        gt_landmarks=tuple((float(x), float(y)) for x, y in scene.gt_landmarks2d),
        heatmap_paths=clean_paths,
        corrupted_heatmap_paths=corrupted_paths,
        occluded=scene.occluded,
    )


def generate_dataset(
    out_dir: Path,
    n_scenes: int,
    scene_cfg: SceneConfig = SceneConfig(),
    corruption: Optional[CorruptionConfig] = None,
    seed: int = 0,
    workers: int = 1,
) -> Manifest:
    """
    Generate ``n_scenes`` synthetic scenes of one object and write them out.

    Scene ``i`` uses seed ``seed XOR i`` (and corruption seed
    ``corruption.seed XOR i``), so the written tree is byte-identical for
    any ``workers``.

    Args:
        out_dir (Path): Dataset root; created if missing.
        n_scenes (int): Number of scenes, ``>= 1``.
        scene_cfg (SceneConfig): Object and pose sampling parameters.
        corruption (CorruptionConfig | None): Occlusion model; None for
            clean heatmaps only.
        seed (int): Base seed.
        workers (int): Threads used for generation.

    Returns:
        Manifest: The written manifest.

    Raises:
        RopeValueError: If ``n_scenes < 1`` ("empty dataset").
    """
    if n_scenes < 1:
        raise RopeValueError("empty dataset: --scenes must be >= 1.")

    root = Path(out_dir)
    (root / "objects").mkdir(parents=True, exist_ok=True)
    cloud = load_cloud(scene_cfg)
    object_id = cloud.name or "object"
    ply_rel = (Path("objects") / f"{object_id}.ply").as_posix()
    write_ply(root / ply_rel, cloud)

    def _build(i: int) -> tuple[SyntheticScene, SceneEntry]:
        scene = generate_scene(scene_cfg.with_seed(derive_seed(seed, i)), cloud)
        if corruption is not None:
            scene = corrupt_scene(scene, corruption.with_seed(derive_seed(corruption.seed, i)))
        return scene, _write_scene(root, f"{i:06d}", object_id, scene)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            built = list(pool.map(_build, range(n_scenes)))
    else:
        built = [_build(i) for i in range(n_scenes)]

    first_scene = built[0][0]
    objects = {
        object_id: ObjectEntry(
            id=object_id,
            symmetric=cloud.symmetric,
            diameter_mm=diameter(cloud),
            landmarks=first_scene.landmarks3d,
            builtin="" if scene_cfg.ply_path else scene_cfg.shape,
            ply_path=ply_rel,
        )
    }
    manifest = Manifest(
        root=root,
        objects=objects,
        scenes=tuple(entry for _, entry in built),
        seed=seed,
        scene_config=scene_cfg.to_dict(),
        corruption_config=corruption.to_dict() if corruption is not None else None,
    )
    save_manifest(manifest)
    logger.info("Wrote %d scenes of %r to %s", n_scenes, object_id, root)
    return manifest
