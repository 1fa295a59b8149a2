# -*- coding: utf-8 -*-
"""
Inflation of a multiscreen mesh.

Every facet is doubled into two oriented copies. Around every sub-facet
(an edge in 3D, a vertex in 2D) the incident facets are sorted by angle and
angularly adjacent sides are glued. The connected sheets of oriented facets
around a vertex are its branches, the generalized vertices of the screen.

Oriented facet ids are ``2 * facet_id + side``. Side 0 carries the facet's
right-hand normal (see :meth:`SurfaceMesh.facet_normals`), side 1 the
opposite one. The normal of an oriented facet points away from the region
whose trace lives on it.

"""
import logging
from collections import namedtuple

import numpy as np

from screenbem.exc import MeshValidationError, PointContactError
from screenbem.utils import DisjointSet

logger = logging.getLogger(__name__)

ANGLE_TIE_TOL = 1e-10

OrientedFacet = namedtuple("OrientedFacet", ["facet_id", "side", "normal"])
OrientedFacet.id = property(lambda self: 2 * self.facet_id + self.side)

GeneralizedVertex = namedtuple("GeneralizedVertex", ["vertex_id", "branch_index", "alpha"])
GeneralizedVertex.__doc__ = """Branch ``branch_index`` (1-based) of vertex ``vertex_id``.

``alpha`` is the frozenset of oriented facet ids forming the branch.
"""


def oriented_id(facet_id, side):
    return 2 * facet_id + side


class EdgeFan(object):
    """Angularly sorted facets around one sub-facet and the matching of their sides.

    Attributes:
        hinge (tuple): Sorted vertex ids of the edge (3D) or the vertex (2D).
        facets (tuple): Incident facet ids in increasing angle.
        angles (tuple): Angles in ``[0, 2 pi)`` relative to the first facet.
        pairs (tuple): Matched ``(oriented_id, oriented_id)`` pairs.

    """

    def __init__(self, hinge, facets, angles, pairs):
        self.hinge = tuple(hinge)
        self.facets = tuple(facets)
        self.angles = tuple(angles)
        self.pairs = tuple(pairs)
        self._partner = {}
        for a, b in self.pairs:
            self._partner[a] = b
            self._partner[b] = a

    def __repr__(self):
        return "<EdgeFan {0} facets={1}>".format(self.hinge, self.facets)

    @property
    def slots(self):
        return sorted(self._partner)

    def partner(self, oid):
        """The oriented facet glued to ``oid`` across this fan."""
        try:
            return self._partner[oid]
        except KeyError:
            raise KeyError("Oriented facet {0} is not incident to {1}.".format(oid, self.hinge))


def _fan_directions(mesh, hinge, facets):
    """Unit in-facet directions leaving the hinge and the rotation axis, if any."""
    verts = mesh.vertices
    ids = mesh.facets
    if mesh.dim == 2:
        p = verts[hinge[0]]
        dirs = []
        for f in facets:
            a, b = ids[f]
            other = b if a == hinge[0] else a
            d = verts[other] - p
            dirs.append(d / np.linalg.norm(d))
        return np.array(dirs), None
    p, q = verts[hinge[0]], verts[hinge[1]]
    tau = (q - p) / np.linalg.norm(q - p)
    dirs = []
    for f in facets:
        r = [v for v in ids[f] if v not in hinge][0]
        d = verts[r] - p
        d = d - np.dot(d, tau) * tau
        dirs.append(d / np.linalg.norm(d))
    return np.array(dirs), tau


def build_fan(mesh, hinge, facets):
    """Sort the facets around ``hinge`` and glue angularly adjacent sides.

    Raises:
        MeshValidationError: when two facets leave the hinge at the same angle.

    """
    normals = mesh.facet_normals()
    dirs, tau = _fan_directions(mesh, hinge, facets)
    e1 = dirs[0]
    if tau is None:
        e2 = np.array([-e1[1], e1[0]])
        ccw = np.stack([-dirs[:, 1], dirs[:, 0]], axis=1)
    else:
        e2 = np.cross(tau, e1)
        ccw = np.cross(tau[None, :], dirs)
    theta = np.mod(np.arctan2(dirs @ e2, dirs @ e1), 2 * np.pi)
    order = np.argsort(theta, kind="stable")
    sorted_theta = theta[order]
    gaps = np.diff(np.concatenate([sorted_theta, [sorted_theta[0] + 2 * np.pi]]))
    if len(facets) > 1 and gaps.min() < ANGLE_TIE_TOL:
        raise MeshValidationError(
            "Coplanar overlapping facets at {0}: angular tie among {1}.".format(
                hinge, sorted(facets)
            )
        )
    facets = [facets[k] for k in order]
    ccw = ccw[order]
    # Side facing increasing angle: its normal points against the rotation.
    ccw_side = [0 if np.dot(normals[f], w) < 0 else 1 for f, w in zip(facets, ccw)]
    pairs = []
    n = len(facets)
    for k in range(n):
        nxt = (k + 1) % n
        pairs.append(
            (oriented_id(facets[k], ccw_side[k]), oriented_id(facets[nxt], 1 - ccw_side[nxt]))
        )
    return EdgeFan(hinge, facets, sorted_theta - sorted_theta[0], pairs)


def _check_point_contact(mesh):
    """Facets meeting at a vertex must be connected through edges at that vertex."""
    if mesh.dim != 3:
        return
    hinges = mesh.hinges()
    for v, facets in sorted(mesh.vertex_facets().items()):
        local = {f: k for k, f in enumerate(facets)}
        ds = DisjointSet(len(facets))
        for f in facets:
            for w in mesh.facets[f]:
                if w == v:
                    continue
                for g in hinges[tuple(sorted((v, int(w))))]:
                    ds.union(local[f], local[g])
        if len(ds.groups(range(len(facets)))) > 1:
            raise PointContactError(v)


class InflatedMesh(object):
    """A surface mesh with doubled facets, edge fans and generalized vertices.

    Attributes:
        base (SurfaceMesh): The underlying mesh.
        oriented_facets (list): :class:`OrientedFacet`, indexed by oriented id.
        fans (list): :class:`EdgeFan` per sub-facet, sorted by hinge.
        gvertices (list): :class:`GeneralizedVertex`, grouped by vertex.
        q (numpy.ndarray): Branch count per vertex.
        jump_dofs (list): ``(i, j)`` with ``1 <= j < q_i``, ordered by vertex.
        branch_of (numpy.ndarray): ``(2 n_facets, n_local)`` generalized
            vertex index of every oriented facet corner.

    """

    def __init__(self, base, oriented_facets, fans):
        self.base = base
        self.oriented_facets = oriented_facets
        self.fans = fans
        self.fan_index = {fan.hinge: k for k, fan in enumerate(fans)}
        self.gvertices = []
        self.q = np.zeros(base.n_vertices, dtype=np.int64)
        self.jump_dofs = []
        self.branch_of = None
        self.gvertex_index = {}
        self.dof_index = {}
        self._cache = {}

    def __repr__(self):
        return "<InflatedMesh facets={0} gvertices={1} dofs={2}>".format(
            self.base.n_facets, len(self.gvertices), self.n_dofs
        )

    @property
    def dim(self):
        return self.base.dim

    @property
    def n_dofs(self):
        return len(self.jump_dofs)

    def _attach(self, gvertices, q):
        self.gvertices = gvertices
        self.q = np.asarray(q, dtype=np.int64)
        self.gvertex_index = {(g.vertex_id, g.branch_index): k for k, g in enumerate(gvertices)}
        self.jump_dofs = [
            (i, j) for i in range(len(q)) for j in range(1, int(q[i]))
        ]
        self.dof_index = {d: k for k, d in enumerate(self.jump_dofs)}
        facets = self.base.facets
        branch_of = -np.ones((2 * self.base.n_facets, self.base.n_local), dtype=np.int64)
        for k, g in enumerate(gvertices):
            for oid in g.alpha:
                local = np.flatnonzero(facets[oid // 2] == g.vertex_id)
                branch_of[oid, local] = k
        self.branch_of = branch_of

    def branches(self, vertex_id):
        """Generalized vertices of ``vertex_id`` in branch order."""
        return [
            self.gvertices[self.gvertex_index[(vertex_id, j)]]
            for j in range(1, int(self.q[vertex_id]) + 1)
        ]

    def fan(self, hinge):
        return self.fans[self.fan_index[tuple(sorted(hinge))]]

    def components(self):
        """Connected sheets of oriented facets glued across all fans.

        Returns:
            List of sorted oriented id lists, ordered by smallest id.

        """
        n = len(self.oriented_facets)
        ds = DisjointSet(n)
        for fan in self.fans:
            for a, b in fan.pairs:
                ds.union(a, b)
        return ds.groups(range(n))


def generalized_vertices(inflated):
    """Branches of every vertex under fan adjacency at sub-facets through it.

    Branches are ordered by their smallest oriented facet id; the last one
    is the reference branch of the jump basis.

    Returns:
        Tuple ``(gvertices, q)``.

    """
    mesh = inflated.base
    by_vertex = {}
    for fan in inflated.fans:
        for v in fan.hinge:
            by_vertex.setdefault(v, []).append(fan)
    gvertices = []
    q = np.zeros(mesh.n_vertices, dtype=np.int64)
    for v, facets in sorted(mesh.vertex_facets().items()):
        members = sorted(oriented_id(f, s) for f in facets for s in (0, 1))
        local = {oid: k for k, oid in enumerate(members)}
        ds = DisjointSet(len(members))
        for fan in by_vertex.get(v, []):
            for a, b in fan.pairs:
                ds.union(local[a], local[b])
        groups = ds.groups(range(len(members)))
        q[v] = len(groups)
        for j, group in enumerate(groups, start=1):
            alpha = frozenset(members[k] for k in group)
            gvertices.append(GeneralizedVertex(v, j, alpha))
    return gvertices, q


def inflate(mesh):
    """Build the inflated mesh of a conforming multiscreen mesh.

    Args:
        mesh (SurfaceMesh): A validated mesh.

    Returns:
        An :class:`InflatedMesh`.

    Raises:
        PointContactError: two facet groups touch only at a vertex.
        MeshValidationError: overlapping coplanar facets at a sub-facet.

    """
    _check_point_contact(mesh)
    normals = mesh.facet_normals()
    oriented = []
    for f in range(mesh.n_facets):
        oriented.append(OrientedFacet(f, 0, normals[f]))
        oriented.append(OrientedFacet(f, 1, -normals[f]))
    fans = [build_fan(mesh, h, fs) for h, fs in sorted(mesh.hinges().items())]
    inflated = InflatedMesh(mesh, oriented, fans)
    inflated._attach(*generalized_vertices(inflated))
    logger.debug("Inflated {0!r} -> {1!r}".format(mesh, inflated))
    return inflated


def jump_dof_count(inflated):
    """Number of jump degrees of freedom, the sum of ``q_i - 1``."""
    return int(np.sum(np.maximum(inflated.q - 1, 0)))


def q_histogram(inflated):
    """Map branch count -> number of vertices with that count."""
    values, counts = np.unique(inflated.q, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}
