"""
# Pose Refinement

* Description:

    Levenberg-Marquardt minimization of the squared reprojection error
    over a 6-parameter pose update: an axis-angle increment applied on the
    left of the rotation and an additive translation increment.
"""

import logging

import numpy as np
from scipy.spatial.transform import Rotation

from RopeTK.Core.errors import NumericalError
from RopeTK.Core.errors import PointBehindCameraError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import ARRAY_LIKE
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.pose import as_points
from RopeTK.Geometry.pose import camera_points
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import project_camera_points


logger = logging.getLogger(__name__)

STEP_TOL = 1e-10
DEFAULT_MAX_ITERS = 50
_LAMBDA_INIT = 1e-3
_LAMBDA_MAX = 1e12
_LAMBDA_MIN = 1e-12


def perturb_pose(pose: Pose, delta: ARRAY_LIKE) -> Pose:
    """
    Apply a 6-vector update ``(w, dt)``: ``R' = exp([w]) R``, ``t' = t + dt``.
    """
    delta = np.asarray(delta, dtype=np.float64).reshape(6)
    rotation = Rotation.from_rotvec(delta[:3]).as_matrix() @ pose.rotation
    # project back onto SO(3) so repeated updates never drift
    rotation = Rotation.from_matrix(rotation).as_matrix()
    return Pose(rotation, pose.translation + delta[3:])


def reprojection_residuals(
    pose: Pose, object_points: ARRAY_LIKE, image_points: ARRAY_LIKE, intr: CameraIntrinsics
) -> FLOAT_ARRAY:
    """
    Stacked residuals ``project(z_i) - x_i`` as ``[du_0, dv_0, du_1, ...]``.

    Raises:
        PointBehindCameraError: If a point falls behind the camera.
    """
    cam = camera_points(object_points, pose)
    pixels = as_points(image_points, 2)
    return (project_camera_points(cam, intr) - pixels).reshape(-1)


def reprojection_jacobian(
    pose: Pose, object_points: ARRAY_LIKE, intr: CameraIntrinsics
) -> FLOAT_ARRAY:
    """
    Jacobian of ``reprojection_residuals`` w.r.t. the update of ``perturb_pose``
    evaluated at zero, shape ``(2N, 6)``.

    With ``X = R z + t`` the camera point, ``dX/dw = -[R z]x`` and
    ``dX/dt = I``; the projection contributes
    ``[[fx/Z, 0, -fx X/Z^2], [0, fy/Z, -fy Y/Z^2]]``.
    """
    world = as_points(object_points, 3)
    rotated = world @ pose.rotation.T
    cam = rotated + pose.translation
    x, y, z = cam[:, 0], cam[:, 1], cam[:, 2]
    n = len(world)

    d_proj = np.zeros((n, 2, 3))
    d_proj[:, 0, 0] = intr.fx / z
    d_proj[:, 0, 2] = -intr.fx * x / (z * z)
    d_proj[:, 1, 1] = intr.fy / z
    d_proj[:, 1, 2] = -intr.fy * y / (z * z)

    # -[a]x for every rotated point a
    neg_skew = np.zeros((n, 3, 3))
    neg_skew[:, 0, 1] = rotated[:, 2]
    neg_skew[:, 0, 2] = -rotated[:, 1]
    neg_skew[:, 1, 0] = -rotated[:, 2]
    neg_skew[:, 1, 2] = rotated[:, 0]
    neg_skew[:, 2, 0] = rotated[:, 1]
    neg_skew[:, 2, 1] = -rotated[:, 0]

    jac = np.empty((n, 2, 6))
    jac[:, :, :3] = d_proj @ neg_skew
    jac[:, :, 3:] = d_proj
    return jac.reshape(2 * n, 6)


def _cost(
    pose: Pose, object_points: FLOAT_ARRAY, image_points: FLOAT_ARRAY, intr: CameraIntrinsics
) -> tuple[float, FLOAT_ARRAY]:
    try:
        residual = reprojection_residuals(pose, object_points, image_points, intr)
    except PointBehindCameraError:
        return float("inf"), np.empty(0)
    return float(residual @ residual), residual


def refine_pose(
    initial: Pose,
    object_points: ARRAY_LIKE,
    image_points: ARRAY_LIKE,
    intr: CameraIntrinsics,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> Pose:
    """
    Locally minimize ``sum_i ||project(z_i) - x_i||^2`` starting at ``initial``.

    Only steps that lower the cost are accepted, so the returned pose is
    never worse than ``initial``. Iteration stops when the step norm drops
    below ``1e-10``, the damping saturates, or ``max_iters`` is reached.

    Args:
        initial (Pose): Starting pose with every point in front of the camera.
        object_points (ARRAY_LIKE): ``(N, 3)`` model points, ``N >= 4``.
        image_points (ARRAY_LIKE): ``(N, 2)`` observed pixels.
        intr (CameraIntrinsics): Pinhole intrinsics.
        max_iters (int): Maximum number of accepted steps.

    Returns:
        Pose: The refined pose.

    Raises:
        RopeValueError: With fewer than 4 correspondences.
        NumericalError: If the initial cost is not finite.
    """
    world = as_points(object_points, 3)
    pixels = as_points(image_points, 2)
    if len(world) < 4 or len(world) != len(pixels):
        raise RopeValueError(
            f"Refinement needs >= 4 matched correspondences, got {len(world)} and {len(pixels)}."
        )

    pose = initial
    cost, residual = _cost(pose, world, pixels, intr)
    if not np.isfinite(cost):
        raise NumericalError("Initial reprojection cost is not finite.")

    damping = _LAMBDA_INIT
    for iteration in range(max_iters):
        jac = reprojection_jacobian(pose, world, intr)
        hessian = jac.T @ jac
        gradient = jac.T @ residual
        scale = np.maximum(np.diag(hessian), _LAMBDA_MIN)

        accepted = False
        while damping <= _LAMBDA_MAX:
            try:
                step = np.linalg.solve(hessian + damping * np.diag(scale), -gradient)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(hessian + damping * np.diag(scale), -gradient, rcond=None)[0]
            if not np.all(np.isfinite(step)):
                raise NumericalError("Refinement step is not finite.")
            if np.linalg.norm(step) < STEP_TOL:
                logger.debug("Refinement converged after %d steps, cost %.3e", iteration, cost)
                return pose

            candidate = perturb_pose(pose, step)
            new_cost, new_residual = _cost(candidate, world, pixels, intr)
            if new_cost < cost:
                pose, cost, residual = candidate, new_cost, new_residual
                damping = max(damping / 10.0, _LAMBDA_MIN)
                accepted = True
                break
            damping *= 10.0

        if not accepted:
            logger.debug("Refinement stalled after %d steps, cost %.3e", iteration, cost)
            return pose

    return pose
