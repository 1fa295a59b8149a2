# -*- coding: utf-8 -*-
"""
Simplicial screen meshes: segments in the plane, triangles in space.

A :class:`SurfaceMesh` is immutable after construction. Refinement returns
new meshes; uniform refinement additionally returns the parent map in a
:class:`MeshLevelPair`.

"""
import logging
from collections import defaultdict

import numpy as np
from scipy.spatial import cKDTree

from screenbem.exc import MeshParseError, MeshValidationError

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-12
CONTAINMENT_TOL = 1e-12
# Clipped intersections of touching facets land up to a few pad widths
# (more near thin corners) from the shared vertices.
HULL_SLACK = 1e3


def _readonly(a):
    a.setflags(write=False)
    return a


class SurfaceMesh(object):
    """A simplicial multiscreen mesh.

    Args:
        vertices: ``(n_vertices, dim)`` coordinates, ``dim`` in ``{2, 3}``.
        facets: ``(n_facets, dim)`` vertex ids, two per segment in 2D and
            three per triangle in 3D.
        tags: Optional per-facet integer labels.
        validate (bool): Run :meth:`validate` on construction.

    """

    def __init__(self, vertices, facets, tags=None, validate=True):
        vertices = np.array(vertices, dtype=float)
        facets = np.array(facets, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] not in (2, 3):
            raise MeshValidationError(
                "Vertices must be an (n, 2) or (n, 3) array, got shape {0}.".format(
                    vertices.shape
                )
            )
        if facets.ndim != 2 or facets.shape[1] != vertices.shape[1]:
            raise MeshValidationError(
                "A {0}D mesh needs {0} vertex ids per facet, got shape {1}.".format(
                    vertices.shape[1], facets.shape
                )
            )
        self.vertices = _readonly(vertices)
        self.facets = _readonly(facets)
        if tags is None:
            tags = np.zeros(len(facets), dtype=np.int64)
        self.tags = _readonly(np.array(tags, dtype=np.int64))
        self._cache = {}
        if validate:
            self.validate()

    def __repr__(self):
        return "<SurfaceMesh dim={0} vertices={1} facets={2} h={3:.4g}>".format(
            self.dim, self.n_vertices, self.n_facets, self.h
        )

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_facets(self):
        return self.facets.shape[0]

    @property
    def n_local(self):
        """Vertices per facet."""
        return self.facets.shape[1]

    # Geometry

    def facet_points(self):
        """Coordinates of facet vertices, shape ``(n_facets, n_local, dim)``."""
        return self.vertices[self.facets]

    def facet_normals(self):
        """Unit normals of the side-0 copy of each facet.

        In 2D the normal of segment ``a -> b`` is the tangent turned clockwise;
        in 3D it is the right-hand normal of ``(a, b, c)``.
        """
        if "normals" not in self._cache:
            p = self.facet_points()
            if self.dim == 2:
                t = p[:, 1] - p[:, 0]
                n = np.stack([t[:, 1], -t[:, 0]], axis=1)
            else:
                n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
            norm = np.linalg.norm(n, axis=1)
            norm[norm == 0] = 1.0
            self._cache["normals"] = _readonly(n / norm[:, None])
        return self._cache["normals"]

    def facet_measures(self):
        """Length (2D) or area (3D) of every facet."""
        if "measures" not in self._cache:
            p = self.facet_points()
            if self.dim == 2:
                m = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
            else:
                m = 0.5 * np.linalg.norm(
                    np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1
                )
            self._cache["measures"] = _readonly(m)
        return self._cache["measures"]

    def facet_diameters(self):
        if "diameters" not in self._cache:
            p = self.facet_points()
            d = np.zeros(self.n_facets)
            for a in range(self.n_local):
                for b in range(a + 1, self.n_local):
                    d = np.maximum(d, np.linalg.norm(p[:, a] - p[:, b], axis=1))
            self._cache["diameters"] = _readonly(d)
        return self._cache["diameters"]

    def centroids(self):
        return self.facet_points().mean(axis=1)

    @property
    def h(self):
        """Mesh size: the largest facet diameter."""
        if self.n_facets == 0:
            return 0.0
        return float(self.facet_diameters().max())

    @property
    def diameter(self):
        """Diameter of the bounding box of all vertices."""
        if self.n_vertices == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices.max(0) - self.vertices.min(0)))

    def barycentric(self, facet_ids, points):
        """Barycentric coordinates of ``points`` with respect to facets.

        Args:
            facet_ids: ``(n,)`` facet ids.
            points: ``(n, dim)`` coordinates.

        Returns:
            Tuple ``(lam, dist)`` with ``lam`` of shape ``(n, n_local)`` and
            ``dist`` the distance of each point from the facet's line/plane.

        """
        facet_ids = np.asarray(facet_ids)
        points = np.asarray(points, dtype=float)
        p = self.vertices[self.facets[facet_ids]]
        rel = points - p[:, 0]
        if self.dim == 2:
            t = p[:, 1] - p[:, 0]
            s = np.einsum("ij,ij->i", rel, t) / np.einsum("ij,ij->i", t, t)
            lam = np.stack([1.0 - s, s], axis=1)
            foot = p[:, 0] + s[:, None] * t
        else:
            e1 = p[:, 1] - p[:, 0]
            e2 = p[:, 2] - p[:, 0]
            g11 = np.einsum("ij,ij->i", e1, e1)
            g12 = np.einsum("ij,ij->i", e1, e2)
            g22 = np.einsum("ij,ij->i", e2, e2)
            r1 = np.einsum("ij,ij->i", rel, e1)
            r2 = np.einsum("ij,ij->i", rel, e2)
            det = g11 * g22 - g12 * g12
            s = (g22 * r1 - g12 * r2) / det
            t = (g11 * r2 - g12 * r1) / det
            lam = np.stack([1.0 - s - t, s, t], axis=1)
            foot = p[:, 0] + s[:, None] * e1 + t[:, None] * e2
        return lam, np.linalg.norm(points - foot, axis=1)

    # Topology

    def vertex_facets(self):
        """Map vertex id -> sorted list of incident facet ids."""
        if "vertex_facets" not in self._cache:
            out = defaultdict(list)
            for f, ids in enumerate(self.facets.tolist()):
                for v in ids:
                    out[v].append(f)
            self._cache["vertex_facets"] = dict(out)
        return self._cache["vertex_facets"]

    def hinges(self):
        """Map sub-facet -> incident facet ids.

        Sub-facets are sorted vertex id tuples: single vertices in 2D, edges
        in 3D.
        """
        if "hinges" not in self._cache:
            out = defaultdict(list)
            for f, ids in enumerate(self.facets.tolist()):
                if self.dim == 2:
                    for v in ids:
                        out[(v,)].append(f)
                else:
                    a, b, c = ids
                    for e in ((a, b), (b, c), (a, c)):
                        out[tuple(sorted(e))].append(f)
            self._cache["hinges"] = dict(out)
        return self._cache["hinges"]

    # Validation

    def validate(self):
        """Check vertex ids, degeneracy, duplicates and conformity.

        Raises:
            MeshValidationError: on the first violation found.

        """
        nv = self.n_vertices
        if not np.all(np.isfinite(self.vertices)):
            raise MeshValidationError("Mesh has non-finite vertex coordinates.")
        if self.n_facets == 0:
            raise MeshValidationError("Mesh has no facets.")
        if self.facets.min() < 0 or self.facets.max() >= nv:
            raise MeshValidationError("Facet refers to a vertex id outside 0..{0}.".format(nv - 1))
        for f, ids in enumerate(self.facets.tolist()):
            if len(set(ids)) != len(ids):
                raise MeshValidationError("Facet {0} repeats a vertex: {1}.".format(f, ids))
        scale = max(self.diameter, 1e-300)
        tol = DEGENERACY_TOL * scale ** (self.dim - 1)
        bad = np.flatnonzero(self.facet_measures() <= tol)
        if len(bad):
            raise MeshValidationError(
                "Facet {0} is degenerate (measure {1:.3e}).".format(
                    int(bad[0]), self.facet_measures()[bad[0]]
                )
            )
        seen = {}
        for f, ids in enumerate(self.facets.tolist()):
            key = tuple(sorted(ids))
            if key in seen:
                raise MeshValidationError(
                    "Facets {0} and {1} are duplicates.".format(seen[key], f)
                )
            seen[key] = f
        self._check_conformity()
        logger.debug("Validated {0!r}".format(self))

    def _check_conformity(self):
        cent = self.centroids()
        radius = np.linalg.norm(
            self.facet_points() - cent[:, None, :], axis=2
        ).max(axis=1)
        tree = cKDTree(cent)
        tol = 1e-10 * self.diameter
        candidates = tree.query_pairs(2.0 * radius.max() + tol, output_type="ndarray")
        pts = self.facet_points()
        facets = self.facets.tolist()
        for i, j in candidates:
            if np.linalg.norm(cent[i] - cent[j]) > radius[i] + radius[j] + tol:
                continue
            shared = set(facets[i]) & set(facets[j])
            hull = self.vertices[sorted(shared)]
            if not (
                _edges_within(pts[i], pts[j], hull, tol)
                and _edges_within(pts[j], pts[i], hull, tol)
            ):
                raise MeshValidationError(
                    "Facets {0} and {1} intersect outside their shared vertices.".format(
                        int(i), int(j)
                    )
                )


def _edges_within(p, q, hull, tol):
    """True when every edge of simplex ``p`` meets simplex ``q`` only inside ``hull``."""
    n = len(p)
    edges = [(p[0], p[1])] if n == 2 else [(p[0], p[1]), (p[1], p[2]), (p[0], p[2])]
    for a, b in edges:
        for x in _segment_simplex_intersection(a, b, q, tol):
            if not _in_hull(x, hull, HULL_SLACK * tol):
                return False
    return True


def _in_hull(x, hull, tol):
    if len(hull) == 0:
        return False
    if len(hull) == 1:
        return np.linalg.norm(x - hull[0]) <= tol
    a, b = hull[0], hull[1]
    t = np.clip(np.dot(x - a, b - a) / np.dot(b - a, b - a), 0.0, 1.0)
    return np.linalg.norm(x - (a + t * (b - a))) <= tol


def _clip_segment(a, b, halfplanes, tol):
    """Clip segment ``a-b`` by half-spaces ``n.x <= c``; returns endpoints or []."""
    t0, t1 = 0.0, 1.0
    d = b - a
    for n, c in halfplanes:
        num = c - np.dot(n, a)
        den = np.dot(n, d)
        if abs(den) < 1e-300:
            if num < -tol:
                return []
            continue
        t = num / den
        if den > 0:
            t1 = min(t1, t)
        else:
            t0 = max(t0, t)
        if t0 > t1 + 1e-14:
            return []
    return [a + t0 * d, a + t1 * d]


def _segment_simplex_intersection(a, b, q, tol):
    """Points bounding the intersection of segment ``a-b`` with simplex ``q``."""
    if len(q) == 2:
        # Segment against segment, in the plane.
        e = q[1] - q[0]
        normal = np.array([e[1], -e[0]])
        normal = normal / np.linalg.norm(normal)
        da, db = np.dot(a - q[0], normal), np.dot(b - q[0], normal)
        if (da > tol and db > tol) or (da < -tol and db < -tol):
            return []
        if abs(da) <= tol and abs(db) <= tol:
            u = e / np.linalg.norm(e)
            planes = [(u, np.dot(u, q[1]) + tol), (-u, -np.dot(u, q[0]) + tol)]
            return _clip_segment(a, b, planes, tol)
        t = da / (da - db)
        x = a + t * (b - a)
        s = np.dot(x - q[0], e) / np.dot(e, e)
        if -tol <= s * np.linalg.norm(e) and (s - 1.0) * np.linalg.norm(e) <= tol:
            return [x]
        return []
    n = np.cross(q[1] - q[0], q[2] - q[0])
    n = n / np.linalg.norm(n)
    da, db = np.dot(a - q[0], n), np.dot(b - q[0], n)
    if (da > tol and db > tol) or (da < -tol and db < -tol):
        return []
    planes = []
    for k in range(3):
        u, v = q[k], q[(k + 1) % 3]
        w = q[(k + 2) % 3]
        m = np.cross(v - u, n)
        m = m / np.linalg.norm(m)
        if np.dot(w - u, m) > 0:
            m = -m
        planes.append((m, np.dot(m, u) + tol))
    if abs(da) <= tol and abs(db) <= tol:
        return _clip_segment(a, b, planes, tol)
    t = da / (da - db)
    x = a + t * (b - a)
    if all(np.dot(m, x) <= c for m, c in planes):
        return [x]
    return []


class MeshLevelPair(object):
    """Nested coarse/fine meshes with the fine-to-coarse facet parent map.

    Fine vertex ids ``0..coarse.n_vertices-1`` coincide with the coarse
    vertices.
    """

    def __init__(self, coarse, fine, parent):
        self.coarse = coarse
        self.fine = fine
        self.parent = _readonly(np.asarray(parent, dtype=np.int64))
        if len(self.parent) != fine.n_facets:
            raise MeshValidationError("Parent map length does not match the fine mesh.")

    def __repr__(self):
        return "<MeshLevelPair H={0:.4g} h={1:.4g}>".format(self.H, self.h)

    @property
    def H(self):
        return self.coarse.h

    @property
    def h(self):
        return self.fine.h

    @classmethod
    def identity(cls, mesh):
        return cls(mesh, mesh, np.arange(mesh.n_facets))

    def compose(self, finer):
        """Chain with a pair whose coarse mesh is this pair's fine mesh."""
        if finer.coarse is not self.fine:
            raise MeshValidationError("Pairs do not chain: meshes differ.")
        return MeshLevelPair(self.coarse, finer.fine, self.parent[finer.parent])

    def check_containment(self):
        """Assert every fine facet lies inside its parent.

        Raises:
            MeshValidationError: when a fine vertex lies outside its parent.

        """
        fine = self.fine
        ids = np.repeat(self.parent, fine.n_local)
        pts = fine.vertices[fine.facets.ravel()]
        lam, dist = self.coarse.barycentric(ids, pts)
        tol = CONTAINMENT_TOL * max(self.coarse.diameter, 1.0) * 10
        if lam.min() < -1e-10 or dist.max() > tol:
            raise MeshValidationError("A fine facet is not contained in its parent.")
        return True


def _midpoint_ids(mesh, vertices, key_fn):
    index = {}

    def get(a, b):
        key = key_fn(a, b)
        if key not in index:
            index[key] = len(vertices)
            vertices.append(0.5 * (mesh.vertices[a] + mesh.vertices[b]))
        return index[key]

    return get


def refine_uniform(mesh, validate=False):
    """Split segments at midpoints (2D) or triangles into four (3D).

    Children keep their parent's orientation, so side-0 normals agree.

    Args:
        mesh (SurfaceMesh): The coarse mesh.
        validate (bool): Re-run the full conformity check on the result.

    Returns:
        A :class:`MeshLevelPair` with ``h_fine = h_coarse / 2``.

    """
    vertices = [v for v in mesh.vertices]
    mid = _midpoint_ids(mesh, vertices, lambda a, b: (min(a, b), max(a, b)))
    facets, parent = [], []
    for f, ids in enumerate(mesh.facets.tolist()):
        if mesh.dim == 2:
            a, b = ids
            m = mid(a, b)
            children = [(a, m), (m, b)]
        else:
            a, b, c = ids
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            children = [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        facets.extend(children)
        parent.extend([f] * len(children))
    fine = SurfaceMesh(
        np.array(vertices), facets, tags=mesh.tags[parent], validate=validate
    )
    logger.debug("Refined {0!r} -> {1!r}".format(mesh, fine))
    return MeshLevelPair(mesh, fine, parent)


def refine_levels(mesh, k):
    """Apply :func:`refine_uniform` ``k`` times and compose the parent maps."""
    pair = MeshLevelPair.identity(mesh)
    for _ in range(int(k)):
        pair = pair.compose(refine_uniform(pair.fine))
    return pair


def boundary(mesh):
    """Sub-facets of the mesh that belong to exactly one facet.

    Returns:
        Sorted list of vertex id tuples: ``(v,)`` in 2D, ``(a, b)`` in 3D.

    """
    return sorted(k for k, fs in mesh.hinges().items() if len(fs) == 1)


def boundary_vertices(mesh):
    return sorted(set(v for sub in boundary(mesh) for v in sub))


def _arms(mesh):
    """Maximal vertex chains whose inner vertices have exactly two segments."""
    vf = mesh.vertex_facets()
    facets = mesh.facets.tolist()
    degree = {v: len(fs) for v, fs in vf.items()}
    used = set()
    arms = []
    starts = sorted(v for v, d in degree.items() if d != 2)
    for s in starts:
        for f in vf[s]:
            if f in used:
                continue
            chain, segs = [s], []
            cur, seg = s, f
            while True:
                used.add(seg)
                segs.append(seg)
                a, b = facets[seg]
                nxt = b if a == cur else a
                chain.append(nxt)
                if degree[nxt] != 2:
                    break
                seg = [g for g in vf[nxt] if g != seg][0]
                cur = nxt
            arms.append(chain)
    return arms


def refine_graded(mesh, corners, exponent):
    """Grade the nodes of a 2D mesh algebraically toward boundary corners.

    Along every arm (a chain of segments between vertices of degree other
    than two) ending in a corner, the node at arclength fraction ``t`` from
    the corner moves to fraction ``t ** exponent``. Arms with corners at both
    ends are graded symmetrically from each end. Topology is unchanged.

    Args:
        mesh (SurfaceMesh): A 2D mesh, typically uniformly refined.
        corners: Points that must coincide with boundary vertices.
        exponent (float): Grading exponent, ``>= 1``.

    Returns:
        A new :class:`SurfaceMesh`.

    Raises:
        MeshValidationError: for 3D input, ``exponent < 1`` or a corner that
            is not a boundary vertex.

    """
    if mesh.dim != 2:
        raise MeshValidationError("Graded refinement is implemented for 2D meshes only.")
    if exponent < 1:
        raise MeshValidationError("Grading exponent must be >= 1, got {0}.".format(exponent))
    bverts = boundary_vertices(mesh)
    tol = 1e-10 * max(mesh.diameter, 1.0)
    corner_ids = set()
    for c in np.atleast_2d(np.asarray(corners, dtype=float)):
        d = np.linalg.norm(mesh.vertices[bverts] - c, axis=1) if bverts else np.array([np.inf])
        k = int(np.argmin(d))
        if d[k] > tol:
            raise MeshValidationError("Corner {0} is not on the mesh boundary.".format(c.tolist()))
        corner_ids.add(bverts[k])

    vertices = np.array(mesh.vertices)
    for chain in _arms(mesh):
        first, last = chain[0] in corner_ids, chain[-1] in corner_ids
        if not (first or last) or len(chain) < 3:
            continue
        if last and not first:
            chain = chain[::-1]
        xy = mesh.vertices[chain]
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(xy, axis=0), axis=1))])
        t = s / s[-1]
        if first and last:
            near = np.minimum(t, 1.0 - t)
            g = 2.0 ** (exponent - 1) * near ** exponent
            tn = np.where(t <= 0.5, g, 1.0 - g)
        else:
            tn = t ** exponent
        for k in range(1, len(chain) - 1):
            vertices[chain[k]] = [
                np.interp(tn[k] * s[-1], s, xy[:, 0]),
                np.interp(tn[k] * s[-1], s, xy[:, 1]),
            ]
    return SurfaceMesh(vertices, mesh.facets, tags=mesh.tags, validate=False)


def load_mesh(path, format="off"):
    """Load and validate a mesh.

    Args:
        path (str): File path for ``format="off"``; a builtin spec string such
            as ``"plus"`` or ``"plus:n=5"`` for ``format="builtin"``.
        format (str): ``"off"`` (ASCII ``dim n_vertices n_facets`` header,
            coordinate lines, 0-based facet lines) or ``"builtin"``.

    Returns:
        A validated :class:`SurfaceMesh`.

    """
    if format == "builtin":
        from screenbem.geometries import builtin

        return builtin(path)
    if format != "off":
        raise MeshParseError("Unknown mesh format {0!r}.".format(format))
    try:
        with open(path, "r") as f:
            lines = [ln.split("#")[0].strip() for ln in f]
    except OSError as e:
        raise MeshParseError("Cannot read mesh file {0}: {1}".format(path, e))
    lines = [ln for ln in lines if ln]
    try:
        dim, nv, nf = (int(x) for x in lines[0].split())
        if dim not in (2, 3) or len(lines) < 1 + nv + nf:
            raise ValueError("bad header")
        vertices = [[float(x) for x in ln.split()] for ln in lines[1: 1 + nv]]
        facets = [[int(x) for x in ln.split()] for ln in lines[1 + nv: 1 + nv + nf]]
    except (ValueError, IndexError) as e:
        raise MeshParseError("Malformed mesh file {0}: {1}".format(path, e))
    if any(len(v) != dim for v in vertices) or any(len(f) != dim for f in facets):
        raise MeshParseError("Malformed mesh file {0}: wrong row width.".format(path))
    return SurfaceMesh(np.array(vertices).reshape(nv, dim), np.array(facets).reshape(nf, dim))


def save_mesh(mesh, path):
    with open(path, "w") as f:
        f.write("{0} {1} {2}\n".format(mesh.dim, mesh.n_vertices, mesh.n_facets))
        for v in mesh.vertices:
            f.write(" ".join("{0:.17g}".format(x) for x in v) + "\n")
        for ids in mesh.facets:
            f.write(" ".join(str(int(i)) for i in ids) + "\n")
