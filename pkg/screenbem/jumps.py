# -*- coding: utf-8 -*-
"""
Discrete jump space on an inflated mesh.

A :class:`TraceField` holds one coefficient per generalized vertex; on each
oriented facet it is the linear interpolant of the coefficients of the
branches containing that oriented facet. Jump degrees of freedom ``(i, j)``
with ``j < q_i`` are the differences ``phi_{i,j} - phi_{i,q_i}`` of branch
hats.

All maps are stored as :mod:`scipy.sparse` matrices:

* ``E``: jump coordinates -> generalized vertex coefficients,
* ``J``: jump coordinates -> nodal jumps ``side 0 - side 1`` per facet
  corner, rows ordered ``facet * n_local + corner``.

"""
import logging

import numpy as np
import scipy.sparse as sp

from screenbem.exc import MeshValidationError, ScreenBemValidationError
from screenbem.mesh import boundary_vertices

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-10


def gvertex_map(inflated):
    """Sparse ``E`` mapping jump coordinates to generalized vertex coefficients."""
    if "E" not in inflated._cache:
        rows, cols, vals = [], [], []
        for nu, (i, j) in enumerate(inflated.jump_dofs):
            rows.extend([inflated.gvertex_index[(i, j)], inflated.gvertex_index[(i, int(inflated.q[i]))]])
            cols.extend([nu, nu])
            vals.extend([1.0, -1.0])
        shape = (len(inflated.gvertices), inflated.n_dofs)
        inflated._cache["E"] = sp.csr_matrix((vals, (rows, cols)), shape=shape)
    return inflated._cache["E"]


def side_selection(inflated, side):
    """Sparse map generalized vertex coefficients -> nodal values on one side."""
    branch = inflated.branch_of[side::2]
    n_f, n_loc = branch.shape
    rows = np.arange(n_f * n_loc)
    return sp.csr_matrix(
        (np.ones(n_f * n_loc), (rows, branch.ravel())),
        shape=(n_f * n_loc, len(inflated.gvertices)),
    )


class TraceField(object):
    """Piecewise linear field on the oriented facets of an inflated mesh.

    Args:
        inflated (InflatedMesh): The inflated mesh.
        coefficients: One value per generalized vertex.

    """

    def __init__(self, inflated, coefficients):
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (len(inflated.gvertices),):
            raise ScreenBemValidationError(
                "Trace field needs {0} coefficients, got {1}.".format(
                    len(inflated.gvertices), coefficients.shape
                )
            )
        self.inflated = inflated
        self.coefficients = coefficients

    @classmethod
    def from_nodal(cls, inflated, nodal, tol=CONSISTENCY_TOL):
        """Build a field from per-oriented-facet nodal values.

        Args:
            nodal: ``(2 n_facets, n_local)`` values.

        Raises:
            ScreenBemValidationError: corners of one branch disagree.

        """
        nodal = np.asarray(nodal, dtype=float)
        idx = inflated.branch_of.ravel()
        n_g = len(inflated.gvertices)
        counts = np.bincount(idx, minlength=n_g)
        coef = np.bincount(idx, weights=nodal.ravel(), minlength=n_g) / np.maximum(counts, 1)
        spread = np.abs(nodal.ravel() - coef[idx])
        if spread.size and spread.max() > tol * max(1.0, np.abs(nodal).max()):
            raise ScreenBemValidationError(
                "Nodal values are not single-valued on a branch (spread {0:.3e}).".format(
                    spread.max()
                )
            )
        return cls(inflated, coef)

    def nodal_values(self):
        """Values at the corners of every oriented facet, ``(2 n_facets, n_local)``."""
        return self.coefficients[self.inflated.branch_of]

    def nodal_jumps(self):
        """Side 0 minus side 1 corner values, ``(n_facets, n_local)``."""
        nodal = self.nodal_values()
        return nodal[0::2] - nodal[1::2]

    def evaluate(self, oid, barycentric):
        """Evaluate on oriented facet ``oid`` at barycentric coordinates.

        Args:
            oid (int): Oriented facet id.
            barycentric: ``(n_local,)`` or ``(n, n_local)``.

        """
        return np.asarray(barycentric) @ self.nodal_values()[oid]

    def is_single_trace(self, tol=1e-12):
        return bool(np.all(np.abs(self.nodal_jumps()) <= tol))


class JumpVector(object):
    """Coefficients of a jump in the basis of an inflated mesh."""

    def __init__(self, inflated, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (inflated.n_dofs,):
            raise ScreenBemValidationError(
                "Jump vector needs {0} values, got {1}.".format(inflated.n_dofs, values.shape)
            )
        self.inflated = inflated
        self.values = values

    def __array__(self, dtype=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, dof):
        """Value of DOF ``(i, j)`` or of position ``dof``."""
        if isinstance(dof, tuple):
            return self.values[self.inflated.dof_index[dof]]
        return self.values[dof]


def basis_trace(dof, inflated):
    """The trace field of jump basis function ``dof = (i, j)``.

    Raises:
        ScreenBemValidationError: ``dof`` is not a jump DOF.

    """
    dof = tuple(int(x) for x in dof)
    if dof not in inflated.dof_index:
        raise ScreenBemValidationError("{0} is not a jump DOF.".format(dof))
    coef = np.zeros(len(inflated.gvertices))
    coef[inflated.gvertex_index[dof]] = 1.0
    coef[inflated.gvertex_index[(dof[0], int(inflated.q[dof[0]]))]] = -1.0
    return TraceField(inflated, coef)


def expand(v, inflated):
    """Trace field of jump coordinates ``v``."""
    values = np.asarray(v, dtype=float)
    if values.shape != (inflated.n_dofs,):
        raise ScreenBemValidationError(
            "Expected {0} jump coordinates, got {1}.".format(inflated.n_dofs, values.shape)
        )
    return TraceField(inflated, gvertex_map(inflated) @ values)


def coordinate_map(inflated):
    """Sparse left inverse of ``E``: generalized vertex coefficients -> jump coordinates.

    Coefficients equal on all branches of a vertex (single traces) map to zero.
    """
    if "C" not in inflated._cache:
        rows, cols, vals = [], [], []
        for nu, (i, j) in enumerate(inflated.jump_dofs):
            q = int(inflated.q[i])
            rows.append(nu)
            cols.append(inflated.gvertex_index[(i, j)])
            vals.append(1.0)
            for b in range(1, q + 1):
                rows.append(nu)
                cols.append(inflated.gvertex_index[(i, b)])
                vals.append(-1.0 / q)
        shape = (inflated.n_dofs, len(inflated.gvertices))
        inflated._cache["C"] = sp.csr_matrix((vals, (rows, cols)), shape=shape)
    return inflated._cache["C"]


def coordinates(field):
    """Jump coordinates of a trace field, modulo single traces."""
    return JumpVector(field.inflated, coordinate_map(field.inflated) @ field.coefficients)


class DiscreteSpace(object):
    """A finite element space described by its nodal jump map.

    Attributes:
        name (str): ``"jump"`` or ``"naive"``.
        inflated (InflatedMesh): The underlying inflated mesh.
        jump_map: Sparse ``(n_facets * n_local, n_dofs)`` map to corner jumps.

    """

    def __init__(self, name, inflated, jump_map):
        self.name = name
        self.inflated = inflated
        self.jump_map = sp.csr_matrix(jump_map)

    def __repr__(self):
        return "<DiscreteSpace {0} dofs={1}>".format(self.name, self.n_dofs)

    @property
    def mesh(self):
        return self.inflated.base

    @property
    def n_dofs(self):
        return self.jump_map.shape[1]

    def nodal_jumps(self, v):
        """Corner jumps ``(n_facets, n_local)`` of coefficient vector ``v``."""
        return (self.jump_map @ np.asarray(v, dtype=float)).reshape(
            self.mesh.n_facets, self.mesh.n_local
        )


def jump_space(inflated):
    """The jump space spanned by the differences of branch hats."""
    if "space" not in inflated._cache:
        jmap = (side_selection(inflated, 0) - side_selection(inflated, 1)) @ gvertex_map(inflated)
        jmap.eliminate_zeros()
        inflated._cache["space"] = DiscreteSpace("jump", inflated, jmap)
    return inflated._cache["space"]


def naive_space(inflated):
    """One-sided continuous P1 space: one DOF per vertex off the screen boundary.

    The density lives on the side-0 copy only. Its jump is discontinuous at
    junctions, so it cannot represent multi-valued jumps.
    """
    mesh = inflated.base

    interior = np.setdiff1d(np.arange(mesh.n_vertices), boundary_vertices(mesh))
    col = -np.ones(mesh.n_vertices, dtype=np.int64)
    col[interior] = np.arange(len(interior))
    ids = mesh.facets.ravel()
    rows = np.flatnonzero(col[ids] >= 0)
    jmap = sp.csr_matrix(
        (np.ones(len(rows)), (rows, col[ids[rows]])), shape=(len(ids), len(interior))
    )
    return DiscreteSpace("naive", inflated, jmap)


def as_space(obj):
    """Accept an :class:`InflatedMesh` or a :class:`DiscreteSpace`."""
    if isinstance(obj, DiscreteSpace):
        return obj
    return jump_space(obj)


class Prolongation(object):
    """Sparse coarse-to-fine map of jump coordinates."""

    def __init__(self, matrix, coarse, fine):
        self.matrix = sp.csr_matrix(matrix)
        self.coarse = coarse
        self.fine = fine

    def __repr__(self):
        return "<Prolongation {0} -> {1}>".format(*self.matrix.shape[::-1])

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, v):
        return self.matrix @ v

    def toarray(self):
        return self.matrix.toarray()


def _coarse_side(pair, fine_oids, inflated_coarse, inflated_fine):
    """Coarse oriented facet whose normal agrees with each fine oriented facet."""
    parent = pair.parent[fine_oids // 2]
    n_f = inflated_fine.base.facet_normals()[fine_oids // 2]
    n_c = inflated_coarse.base.facet_normals()[parent]
    sign = np.einsum("ij,ij->i", n_f, n_c) * np.where(fine_oids % 2 == 0, 1.0, -1.0)
    if np.any(np.abs(sign) < 0.5):
        bad = int(fine_oids[np.argmin(np.abs(sign))])
        raise MeshValidationError(
            "Fine oriented facet {0} has no coarse parent with a matching normal.".format(bad)
        )
    return 2 * parent + np.where(sign > 0, 0, 1)


def build_prolongation(pair, inflated_coarse, inflated_fine, tol=CONSISTENCY_TOL):
    """Embed coarse jump coordinates into the fine jump space.

    Each fine oriented facet reads the coarse basis traces on the parent
    oriented facet with the same normal, interpolated at its corners; the
    resulting fine trace fields are re-expressed in fine jump coordinates.

    Args:
        pair (MeshLevelPair): Nested meshes.
        inflated_coarse (InflatedMesh): Inflation of ``pair.coarse``.
        inflated_fine (InflatedMesh): Inflation of ``pair.fine``.

    Returns:
        A :class:`Prolongation` of shape ``(fine dofs, coarse dofs)``.

    Raises:
        MeshValidationError: broken nesting or branch counts that change at
            a surviving vertex.

    """
    fine, coarse = pair.fine, pair.coarse
    nc = coarse.n_vertices
    if not np.array_equal(inflated_fine.q[:nc], inflated_coarse.q):
        raise MeshValidationError("Branch counts differ at vertices kept by refinement.")
    n_loc = fine.n_local
    oids = np.repeat(np.arange(2 * fine.n_facets), n_loc)
    corners = np.tile(np.arange(n_loc), 2 * fine.n_facets)
    coarse_oids = _coarse_side(pair, oids, inflated_coarse, inflated_fine)
    points = fine.vertices[fine.facets[oids // 2, corners]]
    lam, dist = coarse.barycentric(coarse_oids // 2, points)
    if lam.min() < -1e-10 or dist.max() > 1e-10 * max(coarse.diameter, 1.0):
        raise MeshValidationError("Fine vertex outside its parent facet.")
    lam[np.abs(lam) < 1e-14] = 0.0

    # Fine corner values of every coarse basis trace.
    E_c = gvertex_map(inflated_coarse).tocsr()
    rows = np.repeat(np.arange(len(oids)), n_loc)
    gcols = inflated_coarse.branch_of[coarse_oids].ravel()
    P = sp.csr_matrix(
        (lam.ravel(), (rows, gcols)), shape=(len(oids), len(inflated_coarse.gvertices))
    ) @ E_c

    # Average per fine generalized vertex and check single-valuedness.
    g = inflated_fine.branch_of.ravel()
    n_g = len(inflated_fine.gvertices)
    A = sp.csr_matrix((np.ones(len(g)), (g, np.arange(len(g)))), shape=(n_g, len(g)))
    counts = np.asarray(A.sum(axis=1)).ravel()
    Cf = sp.diags(1.0 / np.maximum(counts, 1)) @ A @ P
    mismatch = P - A.T @ Cf
    if mismatch.nnz and np.abs(mismatch.data).max() > tol:
        raise MeshValidationError("Coarse jump basis is not single-valued on fine branches.")
    R = coordinate_map(inflated_fine) @ Cf
    R = sp.csr_matrix(R)
    R.data[np.abs(R.data) < 1e-14] = 0.0
    R.eliminate_zeros()
    logger.debug("Prolongation {0} -> {1} dofs".format(R.shape[1], R.shape[0]))
    return Prolongation(R, inflated_coarse, inflated_fine)
