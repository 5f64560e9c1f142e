"""
# ASCII PLY

* Description:

    Reader and writer for the ASCII PLY subset used for object models: a
    header declaring ``element vertex N`` with float ``x``, ``y``, ``z``
    properties. Other vertex properties are skipped, other elements are
    ignored. Coordinates are taken to be millimetres.
"""

import logging
from pathlib import Path

import numpy as np

from RopeTK.Core.errors import DataError
from RopeTK.Geometry.cloud import PointCloud


logger = logging.getLogger(__name__)


def _parse_header(lines: list[str]) -> tuple[int, list[str], int, int]:
    """
    Walk the header.

    Returns:
        tuple: (header line count, vertex property names, vertex count,
        number of data lines belonging to elements declared before vertex).
    """
    if not lines or lines[0].strip() != "ply":
        raise DataError("Missing 'ply' magic line.")

    vertex_count = -1
    vertex_props: list[str] = []
    lines_before_vertex = 0
    current = None
    for i, raw in enumerate(lines[1:], start=1):
        tokens = raw.split()
        if not tokens:
            continue
        keyword = tokens[0]
        if keyword == "format":
            if len(tokens) < 2 or tokens[1] != "ascii":
                raise DataError(f"Only ASCII PLY is supported, got {raw.strip()!r}.")
        elif keyword == "element":
            current = tokens[1]
            count = int(tokens[2])
            if current == "vertex":
                vertex_count = count
            elif vertex_count < 0:
                lines_before_vertex += count
        elif keyword == "property" and current == "vertex":
            vertex_props.append(tokens[-1])
        elif keyword == "end_header":
            if vertex_count < 0:
                raise DataError("PLY header declares no vertex element.")
            return i + 1, vertex_props, vertex_count, lines_before_vertex
    raise DataError("PLY header is not terminated by 'end_header'.")


def read_ply(path: Path, symmetric: bool = False) -> PointCloud:
    """
    Load the vertex positions of an ASCII PLY file.

    Args:
        path (Path): File to read.
        symmetric (bool): Symmetry flag stored on the returned cloud.

    Returns:
        PointCloud: The vertices, named after the file stem.

    Raises:
        DataError: On a malformed header or body.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="ascii").splitlines()
    except (OSError, UnicodeDecodeError) as err:
        raise DataError(f"Cannot read PLY {path}: {err!r}") from err

    start, props, count, skip = _parse_header(lines)
    try:
        cols = [props.index(axis) for axis in ("x", "y", "z")]
    except ValueError as err:
        raise DataError(f"PLY {path} lacks x/y/z vertex properties.") from err

    body = lines[start + skip:start + skip + count]
    if len(body) != count:
        raise DataError(f"PLY {path} declares {count} vertices, found {len(body)}.")
    try:
        rows = [[float(line.split()[c]) for c in cols] for line in body]
    except (IndexError, ValueError) as err:
        raise DataError(f"Malformed vertex line in {path}: {err!r}") from err

    logger.debug("Read %d vertices from %s", count, path)
    return PointCloud(np.array(rows, dtype=np.float64).reshape(-1, 3), symmetric, path.stem)


def write_ply(path: Path, cloud: PointCloud) -> None:
    """
    Write the cloud as an ASCII PLY with float x, y, z vertex properties.

    Args:
        path (Path): Destination file.
        cloud (PointCloud): Points to write.
    """
    header = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(cloud)}",
        "property float x",
        "property float y",
        "property float z",
        "end_header",
    ]
    body = [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in cloud.points]
    Path(path).write_text("\n".join(header + body) + "\n", encoding="ascii")
