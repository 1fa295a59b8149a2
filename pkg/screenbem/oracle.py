# -*- coding: utf-8 -*-
"""
Volume construction of generalized vertices.

A simplicial mesh of a box around the screen is built so that every screen
facet is a union of cell faces. The cells around a screen vertex, glued
across faces that do not lie on the screen, fall into connected components;
each component touches a set of oriented screen facets. These sets must
coincide with the branches computed from edge fans.

Three hand made constructions cover the builtin geometries:

* 2D screens star shaped from one vertex: a polar web of rays and rings.
* 3D screens on an axis aligned lattice: cubes split into six tetrahedra
  along diagonals through even lattice points, so neighbouring cubes agree
  on their shared faces.
* Closed 3D surfaces star shaped from their centroid: cones inside and a
  prism shell outside.

"""
import itertools
import logging
from collections import namedtuple

import numpy as np

from screenbem.exc import ScreenBemValidationError
from screenbem.mesh import boundary
from screenbem.utils import DisjointSet

logger = logging.getLogger(__name__)

TOL = 1e-9

VolumeBranches = namedtuple("VolumeBranches", ["count", "alphas"])


class BoxTetMesh(object):
    """Simplicial box mesh conforming to a screen.

    Attributes:
        points (numpy.ndarray): ``(n, dim)`` coordinates.
        cells (numpy.ndarray): ``(m, dim + 1)`` vertex ids.
        screen (SurfaceMesh): The screen.
        screen_vertex (numpy.ndarray): Box vertex id of every screen vertex.
        screen_faces (dict): Sorted cell face tuple -> screen facet id.

    Raises:
        ScreenBemValidationError: a screen facet is not a union of cell faces.

    """

    def __init__(self, points, cells, screen, screen_vertex):
        self.points = np.asarray(points, dtype=float)
        self.cells = np.asarray(cells, dtype=np.int64)
        self.screen = screen
        self.screen_vertex = np.asarray(screen_vertex, dtype=np.int64)
        self.screen_faces = self._mark_screen_faces()

    def __repr__(self):
        return "<BoxTetMesh points={0} cells={1} screen_faces={2}>".format(
            len(self.points), len(self.cells), len(self.screen_faces)
        )

    @property
    def dim(self):
        return self.points.shape[1]

    def faces(self):
        """Unique cell faces as a sorted ``(k, dim)`` id array."""
        d = self.dim
        local = list(itertools.combinations(range(d + 1), d))
        f = np.sort(self.cells[:, local].reshape(-1, d), axis=1)
        return np.unique(f, axis=0)

    def _face_measures(self, faces):
        p = self.points[faces]
        if self.dim == 2:
            return np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
        return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)

    def _mark_screen_faces(self):
        screen = self.screen
        faces = self.faces()
        d = self.dim
        tol = TOL * max(screen.diameter, 1.0)
        pts = self.points[faces].reshape(-1, d)
        marked = {}
        measures = self._face_measures(faces)
        covered = np.zeros(screen.n_facets)
        for f in range(screen.n_facets):
            lam, dist = screen.barycentric(np.full(len(pts), f), pts)
            inside = ((lam.min(axis=1) >= -TOL) & (dist <= tol)).reshape(-1, d).all(axis=1)
            for k in np.flatnonzero(inside):
                marked[tuple(int(v) for v in faces[k])] = f
            covered[f] = measures[inside].sum()
        expected = screen.facet_measures()
        if not np.allclose(covered, expected, rtol=1e-8, atol=0.0):
            bad = int(np.argmax(np.abs(covered - expected)))
            raise ScreenBemValidationError(
                "Box mesh does not conform to screen facet {0}.".format(bad)
            )
        return marked


def _polar_box(screen):
    """Rays and rings around the vertex of highest degree."""
    vf = screen.vertex_facets()
    center = max(sorted(vf), key=lambda v: len(vf[v]))
    rel = screen.vertices - screen.vertices[center]
    radius = np.linalg.norm(rel, axis=1)
    theta = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi)
    for a, b in screen.facets.tolist():
        if center not in (a, b) and abs(theta[a] - theta[b]) > TOL:
            raise ScreenBemValidationError("Screen is not star shaped from vertex {0}.".format(center))
    others = np.array([v for v in range(screen.n_vertices) if v != center])
    arm_angles = np.unique(np.round(theta[others], 9))
    rays = []
    for k, a in enumerate(arm_angles):
        gap = (arm_angles[(k + 1) % len(arm_angles)] - a) % (2 * np.pi) or 2 * np.pi
        m = int(np.ceil(gap / (0.5 * np.pi) - TOL))
        rays.extend(a + gap * np.arange(m) / m)
    rays = np.array(rays)
    rings = np.unique(np.round(radius[others], 9))
    rings = np.append(rings, 1.5 * rings[-1])
    nr, nk = len(rings), len(rays)

    def pid(k, j):
        return 1 + (k % nk) * nr + j

    points = [screen.vertices[center]]
    for a in rays:
        direction = np.array([np.cos(a), np.sin(a)])
        points.extend(screen.vertices[center] + r * direction for r in rings)
    cells = []
    for k in range(nk):
        cells.append((0, pid(k, 0), pid(k + 1, 0)))
        for j in range(nr - 1):
            cells.append((pid(k, j), pid(k, j + 1), pid(k + 1, j + 1)))
            cells.append((pid(k, j), pid(k + 1, j + 1), pid(k + 1, j)))
    screen_vertex = np.zeros(screen.n_vertices, dtype=np.int64)
    for v in others:
        k = int(np.argmin(np.abs(np.angle(np.exp(1j * (rays - theta[v]))))))
        j = int(np.argmin(np.abs(rings - radius[v])))
        screen_vertex[v] = pid(k, j)
    return BoxTetMesh(np.array(points), cells, screen, screen_vertex)


def _lattice_steps(vertices):
    gaps = []
    for a in range(vertices.shape[1]):
        vals = np.unique(np.round(vertices[:, a], 12))
        gaps.append(np.diff(vals).min() if len(vals) > 1 else np.nan)
    gaps = np.array(gaps)
    if np.all(np.isnan(gaps)):
        raise ScreenBemValidationError("Screen has no extent.")
    gaps[np.isnan(gaps)] = np.nanmin(gaps)
    return 0.5 * gaps


def _lattice_box(screen):
    """Cubes split into six tetrahedra around the diagonal from their even corner."""
    origin = screen.vertices.min(axis=0)
    step = _lattice_steps(screen.vertices)
    g = (screen.vertices - origin) / step
    gi = np.round(g).astype(np.int64)
    if np.abs(g - gi).max() > 1e-8 or np.any(gi % 2):
        raise ScreenBemValidationError("Screen vertices are not on an axis aligned lattice.")
    lo = gi.min(axis=0) - 2
    hi = gi.max(axis=0) + 2
    shape = hi - lo + 1
    axes = [np.arange(lo[a], hi[a] + 1) for a in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    points = origin + grid * step

    def pid(idx):
        rel = idx - lo
        return (rel[..., 0] * shape[1] + rel[..., 1]) * shape[2] + rel[..., 2]

    lower = np.stack(
        np.meshgrid(*[np.arange(lo[a], hi[a]) for a in range(3)], indexing="ij"), axis=-1
    ).reshape(-1, 3)
    u = lower + np.mod(lower, 2)
    opposite = lower + 1 - np.mod(lower, 2)
    d = opposite - u
    cells = []
    eye = np.eye(3, dtype=np.int64)
    for perm in itertools.permutations(range(3)):
        v1 = u + d[:, perm[0], None] * eye[perm[0]]
        v2 = v1 + d[:, perm[1], None] * eye[perm[1]]
        cells.append(np.stack([pid(u), pid(v1), pid(v2), pid(opposite)], axis=1))
    cells = np.concatenate(cells)
    return BoxTetMesh(points, cells, screen, pid(gi))


def _shell_box(screen):
    """Cones from the centroid inside a closed surface and a prism layer outside."""
    c = screen.vertices.mean(axis=0)
    normals = screen.facet_normals()
    heights = np.einsum("fd,fd->f", screen.vertices[screen.facets[:, 0]] - c, normals)
    if not (np.all(heights > TOL) or np.all(heights < -TOL)):
        raise ScreenBemValidationError("Closed screen is not star shaped from its centroid.")
    n = screen.n_vertices
    points = np.concatenate([screen.vertices, c[None, :], c + 2.0 * (screen.vertices - c)])
    cells = []
    for tri in screen.facets.tolist():
        v0, v1, v2 = sorted(tri)
        t0, t1, t2 = (n + 1 + v for v in (v0, v1, v2))
        cells.append((n, v0, v1, v2))
        cells.extend([(v0, v1, v2, t2), (v0, v1, t1, t2), (v0, t0, t1, t2)])
    return BoxTetMesh(points, cells, screen, np.arange(n))


def box_mesh(screen):
    """Build a conforming box mesh for a builtin style screen.

    Raises:
        ScreenBemValidationError: no construction fits the screen.

    """
    if screen.dim == 2:
        box = _polar_box(screen)
    elif not boundary(screen):
        box = _shell_box(screen)
    else:
        box = _lattice_box(screen)
    logger.debug("Built {0!r} for {1!r}".format(box, screen))
    return box


def volume_branches(box, vertex_id):
    """Components of the cell star of a screen vertex, split by the screen.

    Args:
        box (BoxTetMesh): The box mesh.
        vertex_id (int): Screen vertex id.

    Returns:
        A :class:`VolumeBranches` with the component count and, per
        component, the frozenset of oriented facet ids it touches, ordered
        by smallest id.

    Raises:
        ScreenBemValidationError: ``vertex_id`` is not a screen vertex.

    """
    if not 0 <= int(vertex_id) < box.screen.n_vertices:
        raise ScreenBemValidationError("{0} is not a screen vertex.".format(vertex_id))
    b = int(box.screen_vertex[int(vertex_id)])
    star = np.flatnonzero(np.any(box.cells == b, axis=1))
    if not len(star):
        raise ScreenBemValidationError("Vertex {0} is not in the box mesh.".format(vertex_id))
    x = box.points[b]
    normals = box.screen.facet_normals()
    by_face = {}
    for k, cell in enumerate(box.cells[star].tolist()):
        for drop in cell:
            if drop == b:
                continue
            face = tuple(sorted(v for v in cell if v != drop))
            by_face.setdefault(face, []).append(k)
    ds = DisjointSet(len(star))
    touches = [set() for _ in star]
    for face, ks in by_face.items():
        facet = box.screen_faces.get(face)
        if facet is None:
            for k in ks[1:]:
                ds.union(ks[0], k)
            continue
        for k in ks:
            centroid = box.points[box.cells[star[k]]].mean(axis=0)
            side = 0 if np.dot(centroid - x, normals[facet]) < 0 else 1
            touches[k].add(2 * facet + side)
    alphas = []
    for group in ds.groups(range(len(star))):
        alpha = frozenset(oid for k in group for oid in touches[k])
        if alpha:
            alphas.append(alpha)
    alphas.sort(key=min)
    return VolumeBranches(len(alphas), alphas)


def volume_generalized_vertices(box):
    """Map every screen vertex to its :func:`volume_branches` alpha sets."""
    return {v: volume_branches(box, v).alphas for v in range(box.screen.n_vertices)}
