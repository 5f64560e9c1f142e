from RopeTK.Heatmaps.codec import decode
from RopeTK.Heatmaps.codec import encode
from RopeTK.Heatmaps.codec import load_stack
from RopeTK.Heatmaps.codec import save_stack
from RopeTK.Heatmaps.decode import decode_argmax
from RopeTK.Heatmaps.decode import decode_expectation
from RopeTK.Heatmaps.decode import DecodedLandmarks
from RopeTK.Heatmaps.decode import off_crop_channels
from RopeTK.Heatmaps.stack import as_distribution
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import jsd_loss
from RopeTK.Heatmaps.stack import make_gaussian_stack
from RopeTK.Heatmaps.stack import make_multi_precision
from RopeTK.Heatmaps.stack import normalize_channels
from RopeTK.Heatmaps.stack import softmax_channels
