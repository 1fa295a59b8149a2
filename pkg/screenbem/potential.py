# -*- coding: utf-8 -*-
"""
Double layer potential of jump densities and the exact plus-shape solution.

With ``phi^t`` the trace on oriented facet ``t`` and ``n_t`` its normal,

    U(x) = sum_t int_t n_t . (y - x) / (c_d |x - y|^d) phi^t(y) dy,

``c_2 = 2 pi`` and ``c_3 = 4 pi``. Across a facet, the value on the side
facing away from ``n_0`` minus the value on the other side is the side-0
minus side-1 jump.

"""
import logging

import numpy as np

from screenbem.backends import get_integrator
from screenbem.config import GridSpec, QuadratureConfig
from screenbem.exc import ScreenBemValidationError
from screenbem.jumps import as_space

logger = logging.getLogger(__name__)

SLIT_TOL = 1e-14


class EvaluationGrid(object):
    """Points off the screen.

    Args:
        points: ``(n, dim)`` coordinates.
        mesh (SurfaceMesh): Optional screen; when given, points closer than
            ``mask`` are rejected.
        mask (float): Exclusion distance, defaults to ``h / 2``.

    Raises:
        ScreenBemValidationError: a point lies within ``mask`` of the screen.

    """

    def __init__(self, points, mesh=None, mask=None):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.mask = mask
        if mesh is not None:
            self.mask = 0.5 * mesh.h if mask is None else float(mask)
            dist = get_integrator(mesh).distance(self.points)
            if np.any(dist <= self.mask):
                raise ScreenBemValidationError(
                    "{0} evaluation points lie within {1:.3g} of the screen.".format(
                        int(np.sum(dist <= self.mask)), self.mask
                    )
                )

    def __len__(self):
        return len(self.points)

    @classmethod
    def cartesian(cls, mesh, spec=None):
        """Tensor grid ``[-extent, extent]^dim`` minus the mask around the screen."""
        spec = spec or GridSpec()
        axis = np.linspace(-spec.extent, spec.extent, spec.points_for(mesh.dim))
        mesh_grid = np.meshgrid(*([axis] * mesh.dim), indexing="ij")
        points = np.stack([g.ravel() for g in mesh_grid], axis=1)
        mask = 0.5 * mesh.h if spec.mask is None else spec.mask
        dist = get_integrator(mesh).distance(points)
        kept = points[dist > mask]
        logger.debug("Grid: kept {0} of {1} points".format(len(kept), len(points)))
        return cls(kept, mask=mask)


def _points(points):
    if isinstance(points, EvaluationGrid):
        return points.points
    return np.atleast_2d(np.asarray(points, dtype=float))


def eval_DL(v, inflated, points, config=None):
    """Double layer potential of the jump with coordinates ``v``.

    Args:
        v: Jump coordinates (array or :class:`~screenbem.jumps.JumpVector`).
        inflated: Inflated mesh or discrete space of ``v``.
        points: :class:`EvaluationGrid` or ``(n, dim)`` array.
        config (QuadratureConfig): Base rule order of the 3D quadrature.

    Returns:
        ``(n,)`` potential values.

    Raises:
        ScreenBemValidationError: a point lies on the screen.

    """
    config = config or QuadratureConfig()
    space = as_space(inflated)
    x = _points(points)
    integrator = get_integrator(space.mesh)
    if not isinstance(points, EvaluationGrid):
        dist = integrator.distance(x)
        if np.any(dist <= 1e-12 * max(space.mesh.diameter, 1.0)):
            raise ScreenBemValidationError("Cannot evaluate the potential on the screen.")
    jumps = space.nodal_jumps(np.asarray(v, dtype=float))
    return integrator.double_layer(jumps, x, config)


def _plus_map(points):
    """Exterior conformal coordinate ``w`` with ``z = (w + 1/w) / 2``, ``|w| >= 1``."""
    x = _points(points)
    if x.shape[1] != 2:
        raise ScreenBemValidationError("The plus-shape solution is two dimensional.")
    z = x[:, 0] + 1j * x[:, 1]
    on_slit = (np.abs(x[:, 1]) <= SLIT_TOL) & (np.abs(x[:, 0]) <= 1.0)
    if np.any(on_slit):
        raise ScreenBemValidationError("Point on the slit [-1, 1] x {0}.")
    w = z + np.sqrt((z - 1.0) * (z + 1.0))
    flip = np.abs(w) < 1.0
    w[flip] = z[flip] - np.sqrt((z[flip] - 1.0) * (z[flip] + 1.0))
    return w


def exact_plus_solution(points):
    """``U = Re(i / (2 w))``, harmonic off the slit, jump ``sqrt(1 - x^2)`` across it.

    Raises:
        ScreenBemValidationError: a point lies on the slit.

    """
    return np.real(0.5j / _plus_map(points))


def plus_neumann_field(points):
    """Gradient of :func:`exact_plus_solution`, finite on the screen.

    Points on the slit take the limit from above, where ``U_y = -1/2``.
    """
    x = _points(points)
    z = x[:, 0] + 1j * x[:, 1]
    on_slit = (np.abs(x[:, 1]) <= SLIT_TOL) & (np.abs(x[:, 0]) < 1.0)
    w = np.empty(len(x), dtype=complex)
    if np.any(~on_slit):
        w[~on_slit] = _plus_map(x[~on_slit])
    w[on_slit] = x[on_slit, 0] + 1j * np.sqrt(1.0 - x[on_slit, 0] ** 2)
    dz = -1j / (w * w - 1.0)
    return np.stack([dz.real, -dz.imag], axis=1)


def grid_error(computed, exact):
    """Root mean square difference.

    Raises:
        ScreenBemValidationError: on length mismatch.

    """
    computed = np.asarray(computed, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if computed.shape != exact.shape:
        raise ScreenBemValidationError(
            "Length mismatch: {0} vs {1}.".format(computed.shape, exact.shape)
        )
    if computed.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((computed - exact) ** 2)))
