#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.precond` module."""

import numpy as np
import pytest

from screenbem.assembly import assemble_W
from screenbem.exc import FactorizationError, MeshValidationError, ScreenBemValidationError
from screenbem.geometries import builtin
from screenbem.jumps import build_prolongation
from screenbem.mesh import MeshLevelPair, SurfaceMesh, refine_levels
from screenbem.multiscreen import inflate
from screenbem.precond import (
    DofPartition,
    ExactPreconditioner,
    SchwarzPreconditioner,
    build,
    condition_number,
    partition_dofs,
)

from .conftest import slow


@pytest.fixture
def two_level(plus_fine):
    coarse, fine = inflate(plus_fine.coarse), inflate(plus_fine.fine)
    W = assemble_W(fine)
    partition = partition_dofs(plus_fine, fine)
    R = build_prolongation(plus_fine, coarse, fine)
    return W, partition, R


def test_partition_of_refined_plus(two_level):
    W, partition, _ = two_level
    assert partition.n_dofs == W.n == 15
    assert sorted(partition.face_sets) == [0, 1, 2, 3]
    assert all(len(idx) == 3 for idx in partition.face_sets.values())
    # The junction's three DOFs sit on the wire basket.
    np.testing.assert_array_equal(partition.wirebasket, [0, 1, 2])
    names = [name for name, _ in partition.blocks()]
    assert names == ["face-0", "face-1", "face-2", "face-3", "wirebasket"]
    covered = np.sort(np.concatenate([idx for _, idx in partition.blocks()]))
    np.testing.assert_array_equal(covered, np.arange(15))


def test_partition_of_refined_bowtie():
    pair = refine_levels(builtin("bowtie"), 2)
    partition = partition_dofs(pair, inflate(pair.fine))
    # Interior face vertices form face sets, the median vertices the wire basket.
    assert sum(len(v) for v in partition.face_sets.values()) == 12
    assert len(partition.wirebasket) == 9


def test_partition_requires_nesting(plus_fine):
    fine = plus_fine.fine
    moved = SurfaceMesh(fine.vertices + [0.0, 0.1], fine.facets)
    pair = MeshLevelPair(plus_fine.coarse, moved, plus_fine.parent)
    with pytest.raises(MeshValidationError):
        partition_dofs(pair, inflate(moved))


def test_schwarz_is_symmetric_positive_definite(two_level):
    W, partition, R = two_level
    prec = build(W, partition, R)
    M = prec.as_dense()
    np.testing.assert_allclose(M, M.T, atol=1e-14)
    assert np.linalg.eigvalsh(M)[0] > 0
    assert prec.n_subspaces == 6
    r = np.arange(W.n, dtype=float)
    np.testing.assert_allclose(prec.apply(r), M @ r, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(prec(r), prec.apply(r))
    np.testing.assert_allclose(prec.coarse_matrix, R.toarray().T @ W.values @ R.toarray(), rtol=1e-10, atol=1e-12)
    assert all(p > 0 for p in prec.min_pivots().values())


def test_threads_give_identical_results(two_level, rng):
    W, partition, R = two_level
    r = rng.randn(W.n)
    one = SchwarzPreconditioner(W, partition, R, threads=1).apply(r)
    many = SchwarzPreconditioner(W, partition, R, threads=4).apply(r)
    np.testing.assert_array_equal(one, many)


def test_spectrum_bounds(two_level):
    W, partition, R = two_level
    prec = build(W, partition, R)
    spec = condition_number(W, prec)
    assert spec.kappa >= 1.0
    assert spec.lambda_min > 0
    # Sum of A-orthogonal projections.
    assert spec.lambda_max <= prec.n_subspaces + 1e-8
    assert spec.kappa == pytest.approx(spec.lambda_max / spec.lambda_min)


def test_single_block_is_exact(two_level):
    W, _, _ = two_level
    whole = DofPartition({0: np.arange(W.n)}, [], W.n)
    spec = condition_number(W, SchwarzPreconditioner(W, whole))
    assert spec.kappa == pytest.approx(1.0, abs=1e-8)
    assert condition_number(W, ExactPreconditioner(W)).kappa == pytest.approx(1.0, abs=1e-8)


def test_one_level_identity_pair():
    mesh = builtin("threefold")
    inflated = inflate(mesh)
    W = assemble_W(inflated)
    pair = MeshLevelPair.identity(mesh)
    partition = partition_dofs(pair, inflated)
    assert partition.face_sets == {}
    prec = build(W, partition, build_prolongation(pair, inflated, inflated))
    # Wire basket and coarse space both equal the whole space.
    np.testing.assert_allclose(prec.as_dense(), 2.0 * np.linalg.inv(W.values), rtol=1e-8)
    spec = condition_number(W, prec)
    assert spec.kappa == pytest.approx(1.0, abs=1e-8)
    assert spec.lambda_min >= 1.0 - 1e-10


def test_errors(two_level):
    W, partition, R = two_level
    with pytest.raises(FactorizationError):
        SchwarzPreconditioner(-W.values, partition)
    with pytest.raises(ScreenBemValidationError):
        build(W, partition, R).apply(np.ones(3))
    with pytest.raises(ScreenBemValidationError):
        SchwarzPreconditioner(W.values[:5, :5], partition)
    with pytest.raises(FactorizationError):
        condition_number(-W.values, ExactPreconditioner(np.eye(W.n)))
    with pytest.raises(ScreenBemValidationError):
        condition_number(np.zeros((0, 0)))


@slow
def test_preconditioner_beats_plain_conditioning():
    pair = refine_levels(refine_levels(builtin("plus"), 2).fine, 4)
    coarse, fine = inflate(pair.coarse), inflate(pair.fine)
    W = assemble_W(fine)
    prec = build(W, partition_dofs(pair, fine), build_prolongation(pair, coarse, fine))
    assert condition_number(W, prec).kappa < condition_number(W).kappa
