# -*- coding: utf-8 -*-


class ScreenBemError(Exception):
    """Base Exception for screenbem."""

    pass


class ScreenBemValidationError(ScreenBemError):
    """Invalid input: a mesh, a configuration or an argument failed validation."""

    exit_code = 2


class MeshParseError(ScreenBemValidationError):
    """A mesh file or builtin geometry spec could not be parsed."""

    pass


class MeshValidationError(ScreenBemValidationError):
    """A mesh is degenerate, has duplicate facets or is not conforming."""

    pass


class PointContactError(ScreenBemValidationError):
    """Two sheets of the multiscreen touch in a single vertex.

    Args:
        vertex_id (int): The offending vertex.

    """

    def __init__(self, vertex_id, message=None):
        self.vertex_id = vertex_id
        super(PointContactError, self).__init__(
            message
            or "Point contact at vertex {0} is not supported.".format(vertex_id)
        )


class ConfigError(ScreenBemValidationError):
    """Invalid configuration value."""

    pass


class ScreenBemNumericalError(ScreenBemError):
    """A numerical routine failed."""

    exit_code = 3


class QuadratureError(ScreenBemNumericalError):
    """Quadrature produced non-finite values, usually from degenerate geometry."""

    pass


class FactorizationError(ScreenBemNumericalError):
    """A matrix expected to be symmetric positive definite could not be factorized."""

    pass


class SolverBreakdownError(ScreenBemNumericalError):
    """The conjugate gradient iteration met a direction of non-positive curvature."""

    pass
