from RopeTK.Core.enums import DistanceKind
from RopeTK.Core.enums import ExitCode
from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import NumericalError
from RopeTK.Core.errors import PointBehindCameraError
from RopeTK.Core.errors import RopeError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.log import configure_logging
from RopeTK.Core.rng import derive_seed
from RopeTK.Core.rng import make_rng
from RopeTK.Core.types_ import ARRAY_LIKE
from RopeTK.Core.types_ import FLOAT_ARRAY
