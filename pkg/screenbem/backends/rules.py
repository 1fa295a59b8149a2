# -*- coding: utf-8 -*-
"""
Reference quadrature rules shared by the integrators.

Rules on the reference triangle are returned in barycentric form: points
``(n, 3)`` and weights ``(n,)`` summing to one, so that the integral over a
physical triangle is ``area * sum(w * f(x))``.

"""
import functools

import numpy as np
from scipy.special import roots_legendre


@functools.lru_cache(maxsize=None)
def gauss_legendre(n):
    """Gauss-Legendre rule on ``[0, 1]``.

    Returns:
        Tuple ``(points, weights)``, weights summing to one.

    """
    x, w = roots_legendre(int(n))
    return _freeze(0.5 * (x + 1.0)), _freeze(0.5 * w)


@functools.lru_cache(maxsize=None)
def collapsed_gauss(n):
    """Conical product rule on the reference triangle ``{u, v >= 0, u + v <= 1}``.

    Returns:
        Tuple ``(uv, weights)``; ``uv`` has shape ``(n*n, 2)`` and the
        weights sum to ``1/2``, the area of the reference triangle.

    """
    x, wx = gauss_legendre(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(wx, wx) * (1.0 - X)
    uv = np.stack([X.ravel(), ((1.0 - X) * Y).ravel()], axis=1)
    return _freeze(uv), _freeze(W.ravel())


# Degree 4 symmetric rule with six points.
_D6_A, _D6_B = 0.816847572980459, 0.091576213509771
_D6_C, _D6_D = 0.108103018168070, 0.445948490915965
_D6_V, _D6_W = 0.109951743655322, 0.223381589678011


@functools.lru_cache(maxsize=None)
def dunavant6():
    """Six point, degree 4 rule in barycentric form."""
    a, b, c, d = _D6_A, _D6_B, _D6_C, _D6_D
    bary = np.array(
        [(a, b, b), (b, a, b), (b, b, a), (c, d, d), (d, c, d), (d, d, c)]
    )
    w = np.array([_D6_V] * 3 + [_D6_W] * 3)
    return _freeze(bary), _freeze(w / w.sum())


@functools.lru_cache(maxsize=None)
def triangle_rule(n):
    """Collapsed Gauss rule with ``n`` points per direction, barycentric form."""
    uv, w = collapsed_gauss(n)
    bary = np.stack([1.0 - uv[:, 0] - uv[:, 1], uv[:, 0], uv[:, 1]], axis=1)
    return _freeze(bary), _freeze(2.0 * w)


@functools.lru_cache(maxsize=None)
def segment_rule(n):
    """Gauss-Legendre rule on a segment in barycentric form."""
    x, w = gauss_legendre(n)
    return _freeze(np.stack([1.0 - x, x], axis=1)), w


def _split_triangle(corners):
    a, b, c = corners
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    return [np.array(t) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]


@functools.lru_cache(maxsize=None)
def subdivided_triangle_rule(n, level):
    """Triangle rule applied on the ``4**level`` children of red refinement."""
    base, w = triangle_rule(n)
    pieces = [np.eye(3)]
    for _ in range(int(level)):
        pieces = [child for p in pieces for child in _split_triangle(p)]
    bary = np.concatenate([base @ p for p in pieces])
    weights = np.concatenate([w / len(pieces)] * len(pieces))
    return _freeze(bary), _freeze(weights)


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a
