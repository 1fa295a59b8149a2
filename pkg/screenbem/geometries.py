# -*- coding: utf-8 -*-
"""
Builtin multiscreen geometries.

Spec strings have the form ``name`` or ``name:key=value,key=value``, e.g.
``plus:n=5`` for the plus-shaped screen with five segments per arm.

"""
import logging

import numpy as np

from screenbem.exc import MeshParseError
from screenbem.mesh import SurfaceMesh

logger = logging.getLogger(__name__)


def _arms(directions, n, size):
    """Star of straight arms leaving the origin, ``n`` segments per arm."""
    vertices = [np.zeros(2)]
    facets = []
    for d in directions:
        prev = 0
        for k in range(1, n + 1):
            vertices.append(size * k / float(n) * np.asarray(d, dtype=float))
            facets.append((prev, len(vertices) - 1))
            prev = len(vertices) - 1
    tags = np.repeat(np.arange(len(directions)), n)
    return np.array(vertices), facets, tags


def plus(n=1, size=1.0):
    """The cross ``[-s,s] x {0}`` union ``{0} x [-s,s]``.

    Vertex 0 is the junction; arms run east, north, west and south.
    """
    v, f, t = _arms([(1, 0), (0, 1), (-1, 0), (0, -1)], n, size)
    return SurfaceMesh(v, f, tags=t)


def threefold(n=1, size=1.0):
    """Three segments joining an equilateral triangle's centroid to its vertices."""
    angles = np.deg2rad([90.0, 210.0, 330.0])
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    # Snap the exact values so the geometry stays mirror symmetric.
    dirs[0] = (0.0, 1.0)
    dirs[1] = (-np.sqrt(3.0) / 2.0, -0.5)
    dirs[2] = (np.sqrt(3.0) / 2.0, -0.5)
    v, f, t = _arms(dirs, n, size)
    return SurfaceMesh(v, f, tags=t)


def slit(n=2, size=1.0):
    """The segment ``[-s, s] x {0}`` split into ``n`` pieces."""
    x = np.linspace(-size, size, n + 1)
    v = np.stack([x, np.zeros_like(x)], axis=1)
    f = [(k, k + 1) for k in range(n)]
    return SurfaceMesh(v, f)


def bowtie(size=1.0):
    """Two perpendicular equilateral triangles intersecting along a common median.

    Each triangle has side ``2 * size`` and is split along the median, so the
    four facets all share the edge from the apex to the origin.
    """
    s = float(size)
    v = np.array(
        [
            (0.0, 0.0, np.sqrt(3.0) * s),  # apex
            (-s, 0.0, 0.0),
            (s, 0.0, 0.0),
            (0.0, -s, 0.0),
            (0.0, s, 0.0),
            (0.0, 0.0, 0.0),  # foot of the median
        ]
    )
    f = [(0, 1, 5), (0, 5, 2), (0, 3, 5), (0, 5, 4)]
    return SurfaceMesh(v, f, tags=[0, 0, 1, 1])


def square(size=1.0):
    """Flat square screen ``[-s,s]^2 x {0}`` in a union-jack triangulation."""
    s = float(size)
    v = np.array([((i - 1) * s, (j - 1) * s, 0.0) for j in range(3) for i in range(3)])

    def vid(i, j):
        return 3 * j + i

    f = []
    for i0 in (0, 1):
        for j0 in (0, 1):
            c00, c10 = vid(i0, j0), vid(i0 + 1, j0)
            c01, c11 = vid(i0, j0 + 1), vid(i0 + 1, j0 + 1)
            if i0 == j0:
                f.extend([(c00, c10, c11), (c00, c11, c01)])
            else:
                f.extend([(c00, c10, c01), (c10, c11, c01)])
    return SurfaceMesh(v, f)


def octahedron(size=1.0):
    """Closed surface of the regular octahedron, outward oriented."""
    s = float(size)
    v = np.array(
        [(s, 0, 0), (-s, 0, 0), (0, s, 0), (0, -s, 0), (0, 0, s), (0, 0, -s)], dtype=float
    )
    f = []
    for sx, x in ((1, 0), (-1, 1)):
        for sy, y in ((1, 2), (-1, 3)):
            for sz, z in ((1, 4), (-1, 5)):
                f.append((x, y, z) if sx * sy * sz > 0 else (x, z, y))
    return SurfaceMesh(v, f)


BUILTINS = {
    "plus": plus,
    "threefold": threefold,
    "slit": slit,
    "bowtie": bowtie,
    "square": square,
    "octahedron": octahedron,
}

_PARAM_TYPES = {"n": int, "size": float}


def parse_spec(spec):
    """Split ``name:key=value,...`` into the name and a parameter dict."""
    name, _, rest = spec.strip().partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key not in _PARAM_TYPES:
            raise MeshParseError("Bad builtin parameter {0!r} in {1!r}.".format(item, spec))
        try:
            params[key] = _PARAM_TYPES[key](value)
        except ValueError:
            raise MeshParseError("Bad value for {0} in {1!r}.".format(key, spec))
    return name, params


def builtin(spec):
    """Build a builtin geometry from its spec string.

    Args:
        spec (str): e.g. ``"plus"``, ``"plus:n=5"``, ``"bowtie:size=0.5"``.

    Returns:
        A validated :class:`~screenbem.mesh.SurfaceMesh`.

    """
    name, params = parse_spec(spec)
    if name not in BUILTINS:
        raise MeshParseError(
            "Unknown builtin geometry {0!r}; choose from {1}.".format(name, sorted(BUILTINS))
        )
    if "n" in params and name not in ("plus", "threefold", "slit"):
        raise MeshParseError("Geometry {0!r} takes no 'n' parameter.".format(name))
    if params.get("n", 1) < 1 or params.get("size", 1.0) <= 0:
        raise MeshParseError("Builtin parameters must be positive: {0!r}.".format(spec))
    mesh = BUILTINS[name](**params)
    logger.debug("Built {0} -> {1!r}".format(spec, mesh))
    return mesh


def corners(mesh):
    """Boundary vertex coordinates, the grading targets of 2D screens."""
    from screenbem.mesh import boundary_vertices

    return mesh.vertices[boundary_vertices(mesh)]
