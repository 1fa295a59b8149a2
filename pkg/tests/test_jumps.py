#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.jumps` module."""

import numpy as np
import pytest

from screenbem.exc import ScreenBemValidationError
from screenbem.jumps import (
    JumpVector,
    TraceField,
    basis_trace,
    build_prolongation,
    coordinate_map,
    coordinates,
    expand,
    gvertex_map,
    jump_space,
    naive_space,
)
from screenbem.geometries import builtin
from screenbem.mesh import refine_levels, refine_uniform
from screenbem.multiscreen import inflate


def test_coordinate_map_inverts_gvertex_map(plus_fine):
    inflated = inflate(plus_fine.fine)
    CE = (coordinate_map(inflated) @ gvertex_map(inflated)).toarray()
    np.testing.assert_allclose(CE, np.eye(inflated.n_dofs), atol=1e-14)


def test_basis_trace(plus):
    inflated = inflate(plus)
    field = basis_trace((0, 1), inflated)
    coef = field.coefficients
    assert coef[inflated.gvertex_index[(0, 1)]] == 1.0
    assert coef[inflated.gvertex_index[(0, 4)]] == -1.0
    assert np.count_nonzero(coef) == 2
    np.testing.assert_array_equal(expand([1.0, 0.0, 0.0], inflated).coefficients, coef)
    with pytest.raises(ScreenBemValidationError):
        basis_trace((1, 1), inflated)


def test_single_traces_have_no_coordinates(plus_fine, rng):
    inflated = inflate(plus_fine.fine)
    values = rng.randn(inflated.base.n_vertices)
    field = TraceField(inflated, [values[g.vertex_id] for g in inflated.gvertices])
    assert field.is_single_trace()
    np.testing.assert_allclose(np.asarray(coordinates(field)), 0.0, atol=1e-14)


def test_from_nodal(plus):
    inflated = inflate(plus)
    field = expand([1.0, 2.0, 3.0], inflated)
    again = TraceField.from_nodal(inflated, field.nodal_values())
    np.testing.assert_allclose(again.coefficients, field.coefficients)
    broken = field.nodal_values().copy()
    broken[0, 0] += 1.0
    with pytest.raises(ScreenBemValidationError):
        TraceField.from_nodal(inflated, broken)


def test_evaluate_interpolates(slit):
    inflated = inflate(slit)
    field = expand([1.0], inflated)
    # Side 0 of the left segment: 0 at x=-1, 1 at the middle vertex.
    assert field.evaluate(0, [0.5, 0.5]) == pytest.approx(0.5)
    assert field.evaluate(1, [0.5, 0.5]) == pytest.approx(-0.5)
    np.testing.assert_allclose(field.nodal_jumps(), [[0.0, 2.0], [2.0, 0.0]])


def test_jump_vector(plus):
    inflated = inflate(plus)
    v = JumpVector(inflated, [1.0, 2.0, 3.0])
    assert v[(0, 2)] == 2.0
    assert v[2] == 3.0
    assert len(v) == 3
    np.testing.assert_array_equal(np.asarray(v), [1.0, 2.0, 3.0])
    with pytest.raises(ScreenBemValidationError):
        JumpVector(inflated, [1.0])
    with pytest.raises(ScreenBemValidationError):
        TraceField(inflated, [1.0])
    with pytest.raises(ScreenBemValidationError):
        expand([1.0, 2.0], inflated)


def test_spaces(plus):
    inflated = inflate(plus)
    space = jump_space(inflated)
    assert space.name == "jump"
    assert space.n_dofs == 3
    assert jump_space(inflated) is space
    naive = naive_space(inflated)
    assert naive.name == "naive"
    assert naive.n_dofs == 1
    # The naive density lives on side 0: unit jump at the junction only.
    np.testing.assert_allclose(naive.nodal_jumps([1.0]), [[1.0, 0.0]] * 4)


def _interpolated_jumps(pair, coarse_jumps):
    fine = pair.fine
    ids = np.repeat(pair.parent, fine.n_local)
    lam, _ = pair.coarse.barycentric(ids, fine.vertices[fine.facets.ravel()])
    return np.einsum("ka,ka->k", lam, coarse_jumps[ids]).reshape(fine.n_facets, fine.n_local)


@pytest.mark.parametrize(
    "spec,start,levels",
    [("plus", 0, 2), ("threefold:n=2", 0, 1), ("square", 0, 1), ("bowtie", 1, 1), ("octahedron", 0, 1)],
)
def test_prolongation_preserves_jumps(spec, start, levels, rng):
    pair = refine_levels(refine_levels(builtin(spec), start).fine, levels)
    coarse, fine = inflate(pair.coarse), inflate(pair.fine)
    R = build_prolongation(pair, coarse, fine)
    assert R.shape == (fine.n_dofs, coarse.n_dofs)
    v = rng.randn(coarse.n_dofs)
    expected = _interpolated_jumps(pair, jump_space(coarse).nodal_jumps(v))
    np.testing.assert_allclose(jump_space(fine).nodal_jumps(R @ v), expected, atol=1e-12)


def test_prolongation_of_plus(plus):
    pair = refine_uniform(plus)
    R = build_prolongation(pair, inflate(plus), inflate(pair.fine)).toarray()
    assert R.shape == (7, 3)
    # The junction keeps its coordinates.
    np.testing.assert_allclose(R[:3], np.eye(3), atol=1e-14)
