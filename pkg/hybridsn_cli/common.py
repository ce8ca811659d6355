from typing import Optional, TypeAlias

import numpy as np

ErrorMessage: TypeAlias = Optional[str]

# Dense N-dimensional array, row-major, last index fastest.
Tensor: TypeAlias = np.ndarray
