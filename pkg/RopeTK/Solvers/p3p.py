"""
# Minimal Pose Solver

* Description:

    Grunert's three-point solution of the perspective-three-point problem
    (a quartic in the depth ratio, up to four real roots) with the fourth
    correspondence used to rank the candidates.
"""

import itertools
import logging

import numpy as np

from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import ARRAY_LIKE
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.pose import as_points
from RopeTK.Geometry.pose import CameraIntrinsics
from RopeTK.Geometry.pose import MIN_DEPTH
from RopeTK.Geometry.pose import Pose
from RopeTK.Geometry.pose import project_camera_points
from RopeTK.Geometry.pose import transform


logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-9
_IMAG_TOL = 1e-6
_EPS = 1e-12


def _best_triangle(points: FLOAT_ARRAY) -> tuple[tuple[int, int, int], float]:
    """Triple of the 4 points spanning the largest triangle, and its relative area."""
    scale = max(float(np.max(np.ptp(points, axis=0))), _EPS)
    best, best_area = (0, 1, 2), -1.0
    for triple in itertools.combinations(range(4), 3):
        a, b, c = points[list(triple)]
        area = 0.5 * np.linalg.norm(np.cross(b - a, c - a)) / (scale * scale)
        if area > best_area:
            best, best_area = triple, area
    return best, best_area


def _polish_root(coeffs: FLOAT_ARRAY, root: float, iters: int = 8) -> float:
    deriv = np.polyder(coeffs)
    for _ in range(iters):
        slope = np.polyval(deriv, root)
        if abs(slope) < _EPS:
            break
        delta = np.polyval(coeffs, root) / slope
        root -= delta
        if abs(delta) <= 1e-15 * max(1.0, abs(root)):
            break
    return root


def _refine_depths(
    depths: FLOAT_ARRAY, cosines: FLOAT_ARRAY, sq_dists: FLOAT_ARRAY, iters: int = 5
) -> FLOAT_ARRAY:
    """
    Gauss-Newton on the three law-of-cosines constraints
    ``l_i^2 + l_j^2 - 2 l_i l_j cos_ij = d_ij^2`` for pairs (0,1), (0,2), (1,2).
    """
    pairs = ((0, 1), (0, 2), (1, 2))
    lam = depths.copy()
    for _ in range(iters):
        residual = np.empty(3)
        jac = np.zeros((3, 3))
        for row, (i, j) in enumerate(pairs):
            residual[row] = lam[i] ** 2 + lam[j] ** 2 - 2.0 * lam[i] * lam[j] * cosines[row] - sq_dists[row]
            jac[row, i] = 2.0 * lam[i] - 2.0 * lam[j] * cosines[row]
            jac[row, j] = 2.0 * lam[j] - 2.0 * lam[i] * cosines[row]
        step = np.linalg.lstsq(jac, -residual, rcond=None)[0]
        lam = lam + step
        if np.linalg.norm(step) <= 1e-14 * np.linalg.norm(lam):
            break
    return lam


def align_points(world: FLOAT_ARRAY, cam: FLOAT_ARRAY) -> Pose:
    """
    Least-squares rigid alignment ``cam ~ R @ world + t`` (Kabsch / Arun).

    Args:
        world (FLOAT_ARRAY): ``(N, 3)`` object-frame points, N >= 3, not collinear.
        cam (FLOAT_ARRAY): ``(N, 3)`` corresponding camera-frame points.
    """
    world_c = world.mean(axis=0)
    cam_c = cam.mean(axis=0)
    cov = (world - world_c).T @ (cam - cam_c)
    u, _, vt = np.linalg.svd(cov)
    fix = np.diag([1.0, 1.0, np.sign(np.linalg.det(vt.T @ u.T))])
    rotation = vt.T @ fix @ u.T
    return Pose(rotation, cam_c - rotation @ world_c)


def _grunert_depths(bearings: FLOAT_ARRAY, world: FLOAT_ARRAY) -> list[FLOAT_ARRAY]:
    """Candidate depths ``(s1, s2, s3)`` along the three bearings."""
    a_sq = float(np.sum((world[1] - world[2]) ** 2))
    b_sq = float(np.sum((world[0] - world[2]) ** 2))
    c_sq = float(np.sum((world[0] - world[1]) ** 2))
    cos_alpha = float(bearings[1] @ bearings[2])
    cos_beta = float(bearings[0] @ bearings[2])
    cos_gamma = float(bearings[0] @ bearings[1])

    amc = (a_sq - c_sq) / b_sq
    apc = (a_sq + c_sq) / b_sq
    bmc = (b_sq - c_sq) / b_sq
    bma = (b_sq - a_sq) / b_sq

    a4 = (amc - 1.0) ** 2 - 4.0 * c_sq / b_sq * cos_alpha ** 2
    a3 = 4.0 * (
        amc * (1.0 - amc) * cos_beta
        - (1.0 - apc) * cos_alpha * cos_gamma
        + 2.0 * c_sq / b_sq * cos_alpha ** 2 * cos_beta
    )
    a2 = 2.0 * (
        amc ** 2
        - 1.0
        + 2.0 * amc ** 2 * cos_beta ** 2
        + 2.0 * bmc * cos_alpha ** 2
        - 4.0 * apc * cos_alpha * cos_beta * cos_gamma
        + 2.0 * bma * cos_gamma ** 2
    )
    a1 = 4.0 * (
        -amc * (1.0 + amc) * cos_beta
        + 2.0 * a_sq / b_sq * cos_gamma ** 2 * cos_beta
        - (1.0 - apc) * cos_alpha * cos_gamma
    )
    a0 = (1.0 + amc) ** 2 - 4.0 * a_sq / b_sq * cos_gamma ** 2

    coeffs = np.array([a4, a3, a2, a1, a0])
    if not np.all(np.isfinite(coeffs)) or np.allclose(coeffs, 0.0):
        return []
    roots = np.roots(np.trim_zeros(coeffs, "f"))

    cosines = np.array([cos_gamma, cos_beta, cos_alpha])
    sq_dists = np.array([c_sq, b_sq, a_sq])
    solutions = []
    for root in roots:
        if abs(root.imag) > _IMAG_TOL * (1.0 + abs(root.real)):
            continue
        v = _polish_root(coeffs, float(root.real))
        denom = 2.0 * (cos_gamma - v * cos_alpha)
        if abs(denom) < _EPS:
            continue
        u = ((amc - 1.0) * v * v - 2.0 * amc * cos_beta * v + 1.0 + amc) / denom
        base = 1.0 + u * u - 2.0 * u * cos_gamma
        if base <= _EPS or u <= 0.0 or v <= 0.0:
            continue
        s1 = np.sqrt(c_sq / base)
        depths = _refine_depths(np.array([s1, u * s1, v * s1]), cosines, sq_dists)
        if np.all(depths > 0.0) and np.all(np.isfinite(depths)):
            solutions.append(depths)
    return solutions


def minimal_pnp(
    image_points: ARRAY_LIKE, object_points: ARRAY_LIKE, intr: CameraIntrinsics
) -> list[Pose]:
    """
    Solve the pose from exactly four 2D-3D correspondences.

    Three points (the ones spanning the largest triangle) feed the P3P
    quartic; the remaining one ranks the candidates by reprojection error.

    Args:
        image_points (ARRAY_LIKE): ``(4, 2)`` pixel coordinates.
        object_points (ARRAY_LIKE): ``(4, 3)`` object-frame points (mm).
        intr (CameraIntrinsics): Pinhole intrinsics.

    Returns:
        list[Pose]: 0 to 4 candidates, best first. Each places all four
        points in front of the camera. Empty for degenerate input.
    """
    pixels = as_points(image_points, 2)
    world = as_points(object_points, 3)
    if len(pixels) != 4 or len(world) != 4:
        raise RopeValueError("minimal_pnp takes exactly 4 correspondences.")

    triple, area = _best_triangle(world)
    if area <= DEGENERATE_TOL:
        return []
    check = ({0, 1, 2, 3} - set(triple)).pop()
    idx = list(triple)

    bearings = intr.bearings(pixels)
    scored: list[tuple[float, int, Pose]] = []
    for depths in _grunert_depths(bearings[idx], world[idx]):
        cam = bearings[idx] * depths[:, None]
        try:
            pose = align_points(world[idx], cam)
        except RopeValueError:
            continue
        all_cam = transform(pose, world)
        if np.any(all_cam[:, 2] <= MIN_DEPTH):
            continue
        reproj = project_camera_points(all_cam[check:check + 1], intr)
        error = float(np.linalg.norm(reproj[0] - pixels[check]))
        scored.append((error, len(scored), pose))

    scored.sort(key=lambda item: (item[0], item[1]))
    return [pose for _, _, pose in scored]
