#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.potential` module."""

import numpy as np
import pytest

from screenbem.backends import get_integrator
from screenbem.config import GridSpec
from screenbem.exc import ScreenBemValidationError
from screenbem.geometries import builtin
from screenbem.jumps import jump_space
from screenbem.mesh import refine_uniform
from screenbem.multiscreen import inflate
from screenbem.potential import (
    EvaluationGrid,
    eval_DL,
    exact_plus_solution,
    grid_error,
    plus_neumann_field,
)


def test_exact_solution_jump():
    x = np.linspace(-0.9, 0.9, 7)
    eps = 1e-9
    upper = exact_plus_solution(np.stack([x, np.full_like(x, eps)], axis=1))
    lower = exact_plus_solution(np.stack([x, np.full_like(x, -eps)], axis=1))
    np.testing.assert_allclose(upper - lower, np.sqrt(1.0 - x ** 2), atol=1e-6)


def test_exact_solution_is_harmonic():
    h = 1e-3
    p = np.array([0.5, 0.8])
    stencil = np.array([p, p + [h, 0], p - [h, 0], p + [0, h], p - [0, h]])
    u = exact_plus_solution(stencil)
    assert abs(u[1:].sum() - 4.0 * u[0]) / h ** 2 < 1e-4
    assert abs(exact_plus_solution([[100.0, 30.0]])[0]) < 1e-2


def test_exact_solution_rejects_slit():
    with pytest.raises(ScreenBemValidationError):
        exact_plus_solution([[0.5, 0.0]])
    with pytest.raises(ScreenBemValidationError):
        exact_plus_solution([[0.5, 0.0, 0.0]])


def test_neumann_field():
    x = np.array([-0.6, 0.0, 0.3])
    g = plus_neumann_field(np.stack([x, np.zeros_like(x)], axis=1))
    np.testing.assert_allclose(g[:, 1], -0.5)
    np.testing.assert_allclose(g[:, 0], -x / (2.0 * np.sqrt(1.0 - x ** 2)))

    p, h = np.array([0.3, 0.7]), 1e-6
    fd = [
        (exact_plus_solution([p + e])[0] - exact_plus_solution([p - e])[0]) / (2 * h)
        for e in (np.array([h, 0.0]), np.array([0.0, h]))
    ]
    np.testing.assert_allclose(plus_neumann_field([p])[0], fd, rtol=1e-6)


def test_double_layer_jump(slit):
    inflated = inflate(slit)
    eps = 1e-8
    u = eval_DL([1.0], inflated, [[0.3, eps], [0.3, -eps]])
    # Upper minus lower equals the side 0 minus side 1 jump, 2 (1 - |x|).
    assert u[0] - u[1] == pytest.approx(1.4, abs=1e-6)
    assert abs(eval_DL([1.0], inflated, [[100.0, 0.0]])[0]) < 1e-3


def test_double_layer_of_closed_surface():
    inflated = inflate(builtin("octahedron"))
    v = np.full(inflated.n_dofs, 0.5)
    u = eval_DL(v, inflated, [[0.0, 0.0, 0.0], [0.1, -0.2, 0.1], [3.0, 0.5, 0.2]])
    np.testing.assert_allclose(u, [1.0, 1.0, 0.0], atol=1e-10)


def test_eval_on_screen_raises(plus):
    with pytest.raises(ScreenBemValidationError):
        eval_DL([1.0, 0.0, 0.0], inflate(plus), [[0.5, 0.0]])


def test_cartesian_grid(plus):
    grid = EvaluationGrid.cartesian(plus, GridSpec(points=11))
    assert 0 < len(grid) < 121
    assert grid.mask == pytest.approx(0.5)
    assert np.all(np.abs(grid.points) <= 2.0)
    assert np.all(get_integrator(plus).distance(grid.points) > 0.5)
    assert len(EvaluationGrid.cartesian(plus)) > 0.5 * 100 * 100


def test_grid_rejects_close_points(plus):
    with pytest.raises(ScreenBemValidationError):
        EvaluationGrid([[0.5, 0.1]], mesh=plus)
    assert len(EvaluationGrid([[0.7, 0.8]], mesh=plus)) == 1


def test_grid_error():
    assert grid_error([1.0, 3.0], [1.0, 1.0]) == pytest.approx(np.sqrt(2.0))
    assert grid_error([], []) == 0.0
    with pytest.raises(ScreenBemValidationError):
        grid_error([1.0], [1.0, 2.0])


def test_double_layer_is_linear(plus_fine, rng):
    inflated = inflate(plus_fine.fine)
    x = [[0.7, 0.8], [-1.5, 0.3], [0.2, -1.9]]
    a, b = rng.randn(inflated.n_dofs), rng.randn(inflated.n_dofs)
    np.testing.assert_allclose(
        eval_DL(2.0 * a - b, inflated, x),
        2.0 * eval_DL(a, inflated, x) - eval_DL(b, inflated, x),
        rtol=1e-10,
        atol=1e-13,
    )


def test_jump_relation_in_space(square, rng):
    mesh = refine_uniform(square).fine
    space = jump_space(inflate(mesh))
    v = rng.randn(space.n_dofs)
    facets = np.arange(0, mesh.n_facets, 3)[:10]
    c = mesh.centroids()[facets]
    n = mesh.facet_normals()[facets]
    eps = 1e-3 * mesh.h
    above = eval_DL(v, space, c - eps * n)
    below = eval_DL(v, space, c + eps * n)
    expected = space.nodal_jumps(v)[facets].mean(axis=1)
    np.testing.assert_allclose(above - below, expected, atol=1e-2 * np.abs(v).max())


def test_far_field_decay(plus_fine, rng):
    inflated = inflate(plus_fine.fine)
    v = rng.randn(inflated.n_dofs)
    direction = np.array([0.6, 0.8])
    r = np.array([10.0, 20.0, 40.0])
    scaled = np.abs(eval_DL(v, inflated, r[:, None] * direction)) * r
    assert scaled.max() <= 1.5 * scaled[0] + 1e-12
