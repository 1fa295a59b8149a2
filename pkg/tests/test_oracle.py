#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.oracle` module."""

import pytest

from screenbem.exc import ScreenBemValidationError
from screenbem.geometries import builtin
from screenbem.mesh import SurfaceMesh, refine_uniform
from screenbem.multiscreen import inflate
from screenbem.oracle import box_mesh, volume_branches, volume_generalized_vertices


def _fine(spec):
    return refine_uniform(builtin(spec)).fine


@pytest.mark.parametrize(
    "mesh",
    [
        builtin("plus"),
        builtin("threefold:n=2"),
        builtin("slit:n=2"),
        _fine("square"),
        _fine("bowtie"),
        builtin("octahedron"),
    ],
    ids=["plus", "threefold", "slit", "square", "bowtie", "octahedron"],
)
def test_volume_branches_match_fans(mesh):
    inflated = inflate(mesh)
    volume = volume_generalized_vertices(box_mesh(mesh))
    for v in range(mesh.n_vertices):
        assert volume[v] == [g.alpha for g in inflated.branches(v)], v


def test_junction_of_the_plus(plus):
    branches = volume_branches(box_mesh(plus), 0)
    assert branches.count == 4
    assert all(len(alpha) == 2 for alpha in branches.alphas)


def test_off_lattice_screen():
    mesh = SurfaceMesh([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 0.7, 0.0]], [[0, 1, 2]])
    with pytest.raises(ScreenBemValidationError):
        box_mesh(mesh)


def test_unknown_vertex(slit):
    with pytest.raises(ScreenBemValidationError):
        volume_branches(box_mesh(slit), slit.n_vertices)
