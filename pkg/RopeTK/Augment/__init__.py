from RopeTK.Augment.image import BBox
from RopeTK.Augment.image import ImageBuffer
from RopeTK.Augment.image import image_to_qimage
from RopeTK.Augment.image import qimage_to_image
from RopeTK.Augment.image import read_png
from RopeTK.Augment.image import write_png
from RopeTK.Augment.oba import apply_oba
from RopeTK.Augment.oba import AugmentedBatch
from RopeTK.Augment.oba import extend_batch
from RopeTK.Augment.oba import ObaConfig
from RopeTK.Augment.oba import PatchPlan
from RopeTK.Augment.oba import plan_oba
