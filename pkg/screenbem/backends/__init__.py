# -*- coding: utf-8 -*-
"""
Facet integrators, one per ambient dimension.

"""
from screenbem.backends.integrator import BaseScreenIntegrator  # noqa
from screenbem.exc import ScreenBemValidationError


def get_integrator(mesh):
    """The integrator for the dimension of ``mesh``.

    Integrators are cached on the mesh, which is immutable.
    """
    cached = mesh._cache.get("integrator")
    if cached is not None:
        return cached
    if mesh.dim == 2:
        from screenbem.backends.planar.integrator import PlanarIntegrator as Integrator
    elif mesh.dim == 3:
        from screenbem.backends.spatial.integrator import SpatialIntegrator as Integrator
    else:
        raise ScreenBemValidationError("No integrator for dimension {0}.".format(mesh.dim))
    integrator = Integrator(mesh)
    mesh._cache["integrator"] = integrator
    return integrator
