"""
# Random Generators

* Description:

    Every stochastic routine in the toolkit draws from a PCG64 bit
    generator wrapped in ``numpy.random.Generator``. PCG64 is portable and
    its stream is fixed by numpy's documented algorithm, so a seed
    reproduces bit-identical outputs across machines.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Return the toolkit generator for ``seed`` (must be a non-negative int)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def derive_seed(seed: int, index: int) -> int:
    """Per-item seed used for batch and dataset fan-out: ``seed XOR index``."""
    return int(seed) ^ int(index)
