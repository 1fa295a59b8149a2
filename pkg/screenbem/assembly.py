# -*- coding: utf-8 -*-
"""
Galerkin matrix of the hypersingular form and the Neumann load vector.

The hypersingular form is evaluated through its curl-curl representation

    a(u, v) = sum_{t, t'} int_t int_t' G(x, y) curl_t u(x) . curl_t' v(y)

with ``curl_t = n_t x grad`` (3D) or the tangential derivative turned by
``n_t`` (2D). On a piecewise linear field the curl is constant per oriented
facet and flips sign with the side, so the sum over both copies of a facet
only sees the corner jumps. With ``D_k`` mapping coefficients to the
``k``-th curl component per facet and ``V`` the piecewise constant single
layer matrix, ``W = sum_k D_k^T V D_k``.

"""
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from screenbem.backends import get_integrator
from screenbem.config import QuadratureConfig
from screenbem.exc import FactorizationError, QuadratureError
from screenbem.jumps import DiscreteSpace, as_space, side_selection

logger = logging.getLogger(__name__)


class GalerkinMatrix(object):
    """Dense symmetric matrix ``W[nu, nu'] = a(phi_nu, phi_nu')``."""

    def __init__(self, values, space):
        self.values = values
        self.space = space

    def __repr__(self):
        return "<GalerkinMatrix n={0} space={1}>".format(self.n, self.space.name)

    def __array__(self, dtype=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __matmul__(self, other):
        return self.values @ other

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape

    def eigenvalues(self):
        return scipy.linalg.eigvalsh(self.values)

    def cholesky(self):
        """Lower Cholesky factor.

        Raises:
            FactorizationError: when the matrix is not positive definite.

        """
        try:
            return scipy.linalg.cholesky(self.values, lower=True)
        except np.linalg.LinAlgError as e:
            raise FactorizationError("Galerkin matrix is not positive definite: {0}".format(e))


class RhsVector(object):
    """Load vector ``L[nu] = l_g(phi_nu)``."""

    def __init__(self, values, space):
        self.values = values
        self.space = space

    def __array__(self, dtype=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return len(self.values)


def surface_curl(t, trace):
    """Constant surface curl of a trace field on one oriented facet.

    Args:
        t: An :class:`~screenbem.multiscreen.OrientedFacet` or oriented id.
        trace (TraceField): The field.

    Returns:
        A 3-vector in 3D, a float in 2D.

    """
    oid = t if isinstance(t, (int, np.integer)) else 2 * t.facet_id + t.side
    facet, side = divmod(int(oid), 2)
    curls = get_integrator(trace.inflated.base).local_curls()[facet]
    value = (1.0 - 2.0 * side) * (trace.nodal_values()[oid] @ curls)
    if trace.inflated.dim == 2:
        return float(value[0])
    return value


def curl_operators(mesh, jump_map):
    """Sparse maps coefficients -> side-0 curl components per facet.

    Args:
        mesh (SurfaceMesh): The screen mesh.
        jump_map: ``(n_facets * n_local, n)`` map to corner jumps.

    Returns:
        List of ``(n_facets, n)`` sparse matrices, one per curl component.

    """
    curls = get_integrator(mesh).local_curls()
    n_f, n_loc, n_comp = curls.shape
    rows = np.repeat(np.arange(n_f), n_loc)
    cols = np.arange(n_f * n_loc)
    out = []
    for k in range(n_comp):
        C = sp.csr_matrix((curls[:, :, k].ravel(), (rows, cols)), shape=(n_f, n_f * n_loc))
        out.append((C @ jump_map).tocsc())
    return out


def _project(V, operators):
    W = np.zeros((operators[0].shape[1],) * 2)
    for D in operators:
        Dd = D.toarray()
        W += Dd.T @ (V @ Dd)
    return np.triu(W) + np.triu(W, 1).T


def single_layer(mesh, config=None, threads=1):
    """Piecewise constant single layer matrix of ``mesh``, cached per config."""
    config = config or QuadratureConfig()
    key = ("single_layer", config)
    if key not in mesh._cache:
        mesh._cache[key] = get_integrator(mesh).single_layer_matrix(config, threads=threads)
    return mesh._cache[key]


def assemble_W(inflated, config=None, threads=1):
    """Assemble the Galerkin matrix of the hypersingular form.

    Args:
        inflated: An :class:`~screenbem.multiscreen.InflatedMesh` (jump
            space) or a :class:`~screenbem.jumps.DiscreteSpace`.
        config (QuadratureConfig): Quadrature orders.
        threads (int): Worker threads for the pair integrals.

    Returns:
        A :class:`GalerkinMatrix`, exactly symmetric.

    Raises:
        QuadratureError: on non-finite entries.

    """
    space = as_space(inflated)
    V = single_layer(space.mesh, config, threads)
    W = _project(V, curl_operators(space.mesh, space.jump_map))
    if not np.all(np.isfinite(W)):
        raise QuadratureError("Non-finite Galerkin matrix entries.")
    logger.info("Assembled W: {0} dofs on {1} facets".format(W.shape[0], space.mesh.n_facets))
    return GalerkinMatrix(W, space)


def gvertex_form(inflated, config=None, threads=1):
    """The hypersingular form on all generalized vertex coefficients.

    Single traces (equal coefficients on every branch of a vertex) span
    its kernel.
    """
    jmap = side_selection(inflated, 0) - side_selection(inflated, 1)
    V = single_layer(inflated.base, config, threads)
    space = DiscreteSpace("gvertex", inflated, jmap)
    return GalerkinMatrix(_project(V, curl_operators(inflated.base, jmap)), space)


def _evaluate_field(g, points):
    if callable(g):
        values = np.asarray(g(points), dtype=float)
    else:
        values = np.broadcast_to(np.asarray(g, dtype=float), points.shape)
    if values.shape != points.shape:
        raise QuadratureError(
            "Field returned shape {0}, expected {1}.".format(values.shape, points.shape)
        )
    if not np.all(np.isfinite(values)):
        raise QuadratureError("Field returned non-finite values at quadrature points.")
    return values


def assemble_rhs(inflated, g, config=None):
    """Assemble ``L[nu] = sum_t int_t (g . n_t) phi_nu^t``.

    Args:
        inflated: An inflated mesh or a discrete space.
        g: Callable mapping ``(n, dim)`` points to ``(n, dim)`` vectors, or
            a constant vector.
        config (QuadratureConfig): ``far_order`` sets the rule.

    Returns:
        A :class:`RhsVector`.

    Raises:
        QuadratureError: when ``g`` is not finite at quadrature points.

    """
    config = config or QuadratureConfig()
    space = as_space(inflated)
    mesh = space.mesh
    integrator = get_integrator(mesh)
    bary, w = integrator.facet_rule(config.far_order + 1)
    pts = integrator.quadrature_points(bary)
    values = _evaluate_field(g, pts.reshape(-1, mesh.dim)).reshape(pts.shape)
    gn = np.einsum("fqd,fd->fq", values, integrator.normals)
    local = np.einsum("q,fq,qa->fa", w, gn, bary) * integrator.measures[:, None]
    L = space.jump_map.T @ local.ravel()
    return RhsVector(np.asarray(L).ravel(), space)
