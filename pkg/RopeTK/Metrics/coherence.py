"""
# Landmark Coherence

* Description:

    Per-landmark residuals and incoherence of a set of 2D predictions.
    Incoherence measures how far each error vector strays from the mean
    error vector, so a prediction that is a pure translation of the
    groundtruth shape is perfectly coherent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any
from typing import Sequence

import numpy as np

from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.cloud import Landmark2D


@dataclass(frozen=True, eq=False)
class CoherenceReport(object):
    """
    Attributes:
        residuals: ``r_i = ||x_i - x_i*||`` per landmark, pixels.
        mean_error_vector: ``m = mean_i (x_i - x_i*)``.
        incoherence: ``c_i = ||(x_i - x_i*) - m||`` per landmark, pixels.
        mean_r: Arithmetic mean of ``residuals``.
        mean_c: Arithmetic mean of ``incoherence``.
    """

    residuals: FLOAT_ARRAY
    mean_error_vector: FLOAT_ARRAY
    incoherence: FLOAT_ARRAY
    mean_r: float
    mean_c: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "residuals": self.residuals.tolist(),
            "mean_error_vector": self.mean_error_vector.tolist(),
            "incoherence": self.incoherence.tolist(),
            "mean_r": self.mean_r,
            "mean_c": self.mean_c,
        }


def _coords(landmarks: Sequence[Landmark2D] | FLOAT_ARRAY) -> FLOAT_ARRAY:
    if len(landmarks) and isinstance(landmarks[0], Landmark2D):
        ordered = sorted(landmarks, key=lambda lm: lm.index)
        return np.array([lm.coords for lm in ordered], dtype=np.float64)
    return np.asarray(landmarks, dtype=np.float64).reshape(-1, 2)


def coherence(
    pred: Sequence[Landmark2D] | FLOAT_ARRAY, gt: Sequence[Landmark2D] | FLOAT_ARRAY
) -> CoherenceReport:
    """
    Residual and incoherence analysis of predicted against groundtruth landmarks.

    ``Landmark2D`` inputs are paired by index; raw ``(K, 2)`` arrays by row.

    Raises:
        RopeValueError: On empty input or a length mismatch.
    """
    x_pred = _coords(pred)
    x_gt = _coords(gt)
    if len(x_pred) == 0 or len(x_pred) != len(x_gt):
        raise RopeValueError(
            f"coherence needs equal non-empty landmark sets, got {len(x_pred)} and {len(x_gt)}."
        )

    errors = x_pred - x_gt
    mean_vec = errors.mean(axis=0)
    residuals = np.linalg.norm(errors, axis=1)
    incoherence = np.linalg.norm(errors - mean_vec, axis=1)
    return CoherenceReport(
        residuals=residuals,
        mean_error_vector=mean_vec,
        incoherence=incoherence,
        mean_r=float(residuals.mean()),
        mean_c=float(incoherence.mean()),
    )
