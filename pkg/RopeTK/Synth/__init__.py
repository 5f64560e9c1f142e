from RopeTK.Synth.corruption import corrupt_scene
from RopeTK.Synth.corruption import CorruptionConfig
from RopeTK.Synth.manifest import generate_dataset
from RopeTK.Synth.manifest import load_manifest
from RopeTK.Synth.manifest import Manifest
from RopeTK.Synth.manifest import ObjectEntry
from RopeTK.Synth.manifest import SceneEntry
from RopeTK.Synth.manifest import validate_manifest
from RopeTK.Synth.scene import generate_scene
from RopeTK.Synth.scene import load_cloud
from RopeTK.Synth.scene import SceneConfig
from RopeTK.Synth.scene import SyntheticScene
from RopeTK.Synth.shapes import blob
from RopeTK.Synth.shapes import builtin_shape
from RopeTK.Synth.shapes import cube
from RopeTK.Synth.shapes import icosahedron
