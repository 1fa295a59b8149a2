#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.solver` module."""

import logging

import numpy as np
import pytest

from screenbem.assembly import assemble_rhs, assemble_W
from screenbem.exc import FactorizationError, ScreenBemValidationError, SolverBreakdownError
from screenbem.jumps import JumpVector
from screenbem.multiscreen import inflate
from screenbem.precond import ExactPreconditioner
from screenbem.solver import direct_solve, energy_bound, lanczos_kappa, pcg


@pytest.fixture
def spd(rng):
    """A 30 x 30 matrix with eigenvalues spread over [1, 100]."""
    Q, _ = np.linalg.qr(rng.randn(30, 30))
    return (Q * np.linspace(1.0, 100.0, 30)) @ Q.T


def test_pcg_solves(spd, rng):
    b = rng.randn(30)
    report = pcg(spd, None, b, tol=1e-12)
    assert report.converged
    np.testing.assert_allclose(report.solution, np.linalg.solve(spd, b), rtol=1e-8, atol=1e-10)
    assert report.residual_history[-1] <= 1e-12 * report.residual_history[0]
    assert len(report.residual_history) == report.iterations + 1


def test_kappa_estimate(spd, rng):
    report = pcg(spd, None, rng.randn(30), tol=1e-12)
    assert report.kappa_estimate <= 100.0 * (1.0 + 1e-6)
    assert report.kappa_estimate == pytest.approx(100.0, rel=1e-2)
    assert report.ritz_values == sorted(report.ritz_values)
    assert report.to_dict()["kappa_estimate_approximate"] is True


def test_energy_error_is_monotone_and_bounded(spd, rng):
    x = rng.randn(30)
    report = pcg(spd, None, spd @ x, tol=1e-10, x_exact=x)
    e = np.array(report.energy_error_history)
    assert np.all(np.diff(e) <= 1e-10 * e[0])
    k = np.arange(len(e))
    assert np.all(e <= energy_bound(100.0, k) * e[0] * (1.0 + 1e-8))


def test_exact_preconditioner_converges_at_once(spd, rng):
    report = pcg(spd, ExactPreconditioner(spd), rng.randn(30), tol=1e-8)
    assert report.iterations == 1
    assert report.kappa_estimate == pytest.approx(1.0)


def test_callable_preconditioner(spd, rng):
    b = rng.randn(30)
    d = 1.0 / np.diag(spd)
    report = pcg(spd, lambda r: d * r, b, tol=1e-10)
    np.testing.assert_allclose(spd @ report.solution, b, atol=1e-7)


def test_maxit_warns(spd, rng, caplog):
    with caplog.at_level(logging.WARNING, logger="screenbem.solver"):
        report = pcg(spd, None, rng.randn(30), tol=1e-14, maxit=2)
    assert not report.converged
    assert report.iterations == 2
    assert "maxit" in caplog.text


def test_zero_rhs():
    report = pcg(np.eye(3), None, np.zeros(3))
    assert report.iterations == 0
    assert report.converged
    np.testing.assert_array_equal(report.solution, np.zeros(3))


def test_initial_guess(rng):
    b = rng.randn(5)
    report = pcg(np.eye(5), None, b, x0=b)
    assert report.iterations == 0
    np.testing.assert_array_equal(report.solution, b)


def test_breakdown():
    with pytest.raises(SolverBreakdownError):
        pcg(np.diag([1.0, -1.0]), None, np.ones(2))
    with pytest.raises(SolverBreakdownError):
        pcg(np.eye(2), lambda r: -r, np.ones(2))


def test_bad_arguments(spd):
    with pytest.raises(ScreenBemValidationError):
        pcg(spd, None, np.ones(3))
    with pytest.raises(ScreenBemValidationError):
        pcg(spd, None, np.ones(30), tol=0.0)


def test_galerkin_systems_return_jump_vectors(plus_fine):
    inflated = inflate(plus_fine.fine)
    W = assemble_W(inflated)
    L = assemble_rhs(inflated, [1.0, 2.0])
    report = pcg(W, None, L, tol=1e-12)
    assert isinstance(report.solution, JumpVector)
    direct = direct_solve(W, L)
    assert isinstance(direct, JumpVector)
    np.testing.assert_allclose(np.asarray(report.solution), np.asarray(direct), rtol=1e-8, atol=1e-10)


def test_direct_solve_failure():
    with pytest.raises(FactorizationError):
        direct_solve(-np.eye(2), np.ones(2))


def test_lanczos_kappa():
    assert lanczos_kappa([], [])[0] == 1.0
    # A single step with alpha = 1 / lambda recovers lambda.
    kappa, ritz = lanczos_kappa([0.25], [])
    assert kappa == 1.0
    np.testing.assert_allclose(ritz, [4.0])


def test_energy_bound():
    assert energy_bound(1.0, 3) == 0.0
    assert energy_bound(9.0, 0) == 2.0
    assert energy_bound(9.0, 1) == pytest.approx(1.0)
