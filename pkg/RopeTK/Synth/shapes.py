"""
# Builtin Shapes

* Description:

    Small procedural object models for synthetic scenes. All are centred
    on the origin and measured in millimetres.
"""

from typing import Callable

import numpy as np

from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.rng import make_rng
from RopeTK.Geometry.cloud import PointCloud


BLOB_POINTS = 200
BLOB_RADIUS = 50.0
BLOB_CORNER = 35.0
CUBE_HALF = 50.0
CUBE_GRID = 5
ICOSAHEDRON_RADIUS = 60.0


def cube(half: float = CUBE_HALF, grid: int = CUBE_GRID) -> PointCloud:
    """Surface samples of an axis-aligned cube on a ``grid x grid`` lattice per face."""
    ticks = np.linspace(-half, half, grid)
    uu, vv = np.meshgrid(ticks, ticks, indexing="ij")
    uu, vv = uu.reshape(-1), vv.reshape(-1)
    faces = []
    for axis in range(3):
        for sign in (-1.0, 1.0):
            face = np.empty((len(uu), 3))
            others = [a for a in range(3) if a != axis]
            face[:, axis] = sign * half
            face[:, others[0]] = uu
            face[:, others[1]] = vv
            faces.append(face)
    points = np.unique(np.round(np.concatenate(faces), 9), axis=0)
    return PointCloud(points, symmetric=True, name="cube")


def icosahedron(radius: float = ICOSAHEDRON_RADIUS) -> PointCloud:
    """The 12 vertices of a regular icosahedron plus its 30 edge midpoints."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            verts.extend([(0.0, a, b), (a, b, 0.0), (b, 0.0, a)])
    verts = np.array(verts)
    verts *= radius / np.linalg.norm(verts[0])

    edge = np.min(np.linalg.norm(verts[1:] - verts[0], axis=1))
    mids = []
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            if abs(np.linalg.norm(verts[i] - verts[j]) - edge) < 1e-6 * radius:
                mids.append(0.5 * (verts[i] + verts[j]))
    return PointCloud(np.vstack([verts, np.array(mids)]), symmetric=True, name="icosahedron")


def blob(
    n_points: int = BLOB_POINTS,
    radius: float = BLOB_RADIUS,
    corner: float = BLOB_CORNER,
    seed: int = 0,
) -> PointCloud:
    """
    ``n_points`` uniform samples inside a ball plus the 8 corners of a cube
    of half-size ``corner``; the corners keep the landmark selection spread
    out whatever the random draw.
    """
    rng = make_rng(seed)
    directions = rng.normal(size=(n_points, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * np.cbrt(rng.random(n_points))
    inside = directions * radii[:, None]
    signs = np.array([(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], dtype=np.float64)
    return PointCloud(np.vstack([inside, corner * signs]), symmetric=False, name="blob")


BUILTIN_SHAPES: dict[str, Callable[[], PointCloud]] = {
    "blob": blob,
    "cube": cube,
    "icosahedron": icosahedron,
}


def builtin_shape(name: str) -> PointCloud:
    """
    Raises:
        RopeValueError: For an unknown shape name.
    """
    try:
        return BUILTIN_SHAPES[name]()
    except KeyError:
        raise RopeValueError(
            f"Unknown builtin shape {name!r}; choose from {sorted(BUILTIN_SHAPES)}."
        ) from None
