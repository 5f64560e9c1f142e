from typing import Union

import numpy as np
import numpy.typing as npt


FLOAT_ARRAY = npt.NDArray[np.float64]
UINT8_ARRAY = npt.NDArray[np.uint8]
ARRAY_LIKE = Union[npt.ArrayLike, FLOAT_ARRAY]
SIZE_TYPE = tuple[int, int]
