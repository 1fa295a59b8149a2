# -*- coding: utf-8 -*-
"""
Preconditioned conjugate gradients with a Lanczos condition estimate.

The CG coefficients define the Lanczos tridiagonal matrix of the
preconditioned operator ``M W``; its extreme eigenvalues approximate the
spectrum without extra matrix products.

"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from screenbem.exc import (
    FactorizationError,
    ScreenBemValidationError,
    SolverBreakdownError,
)
from screenbem.jumps import JumpVector

logger = logging.getLogger(__name__)


@dataclass
class PcgReport:
    """Outcome of a :func:`pcg` run.

    Attributes:
        solution: :class:`~screenbem.jumps.JumpVector` for jump-space
            systems, else the coefficient array.
        iterations (int): CG steps taken.
        residual_history (list): ``sqrt(r^T M r)`` per iterate, starting
            with the initial residual.
        energy_error_history (list): ``sqrt(e^T W e)`` per iterate when an
            exact solution was supplied.
        kappa_estimate (float): Ratio of extreme Ritz values, an
            approximation from below.
        converged (bool): Whether the relative residual reached ``tol``.

    """

    solution: object
    iterations: int
    residual_history: List[float] = field(default_factory=list)
    energy_error_history: Optional[List[float]] = None
    kappa_estimate: float = 1.0
    converged: bool = False
    ritz_values: Optional[List[float]] = None

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_history": list(self.residual_history),
            "energy_error_history": self.energy_error_history,
            "kappa_estimate": self.kappa_estimate,
            "kappa_estimate_approximate": True,
        }


def _matrix(W):
    return np.asarray(W, dtype=float)


def _wrap(W, x):
    space = getattr(W, "space", None)
    if space is not None and space.name == "jump":
        return JumpVector(space.inflated, x)
    return x


def lanczos_kappa(alphas, betas):
    """Condition estimate from CG step lengths and direction updates.

    Args:
        alphas: Step lengths ``alpha_0 .. alpha_{k-1}``.
        betas: Direction updates ``beta_0 .. beta_{k-2}``.

    Returns:
        Tuple ``(kappa, ritz_values)``.

    """
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)[: max(len(alphas) - 1, 0)]
    if not len(alphas):
        return 1.0, np.array([])
    diag = 1.0 / alphas
    diag[1:] += betas / alphas[:-1]
    off = np.sqrt(betas) / alphas[:-1]
    if len(diag) == 1:
        ritz = diag
    else:
        ritz = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    if ritz[0] <= 0:
        raise SolverBreakdownError("Lanczos matrix has a non-positive Ritz value.")
    return max(float(ritz[-1] / ritz[0]), 1.0), ritz


def pcg(W, prec, rhs, tol=1e-8, maxit=1000, x_exact=None, x0=None):
    """Solve ``W x = rhs`` by preconditioned conjugate gradients.

    Args:
        W: Symmetric positive definite matrix (or :class:`GalerkinMatrix`).
        prec: Preconditioner with ``apply``, a callable, or ``None``.
        rhs: Right-hand side.
        tol (float): Stop once ``sqrt(r^T M r)`` drops below ``tol`` times
            its initial value.
        maxit (int): Iteration cap; reaching it is logged, not raised.
        x_exact: Optional exact solution for the energy error history.
        x0: Optional initial guess, zero by default.

    Returns:
        A :class:`PcgReport`.

    Raises:
        SolverBreakdownError: a search direction with ``p^T W p <= 0``.

    """
    A = _matrix(W)
    b = np.asarray(rhs, dtype=float)
    n = A.shape[0]
    if b.shape != (n,):
        raise ScreenBemValidationError(
            "Right-hand side of length {0} for a system of size {1}.".format(b.shape, n)
        )
    if not tol > 0:
        raise ScreenBemValidationError("tol must be positive, got {0}.".format(tol))
    if prec is None:
        precondition = np.copy
    elif hasattr(prec, "apply"):
        precondition = prec.apply
    else:
        precondition = prec

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    z = precondition(r)
    rz = float(r @ z)
    if rz < 0:
        raise SolverBreakdownError("Preconditioner is not positive definite (r^T M r < 0).")
    res0 = np.sqrt(rz)
    residuals = [res0]
    energy = None
    if x_exact is not None:
        x_exact = np.asarray(x_exact, dtype=float)
        e = x_exact - x
        energy = [float(np.sqrt(max(e @ (A @ e), 0.0)))]
    if res0 == 0:
        return PcgReport(_wrap(W, x), 0, residuals, energy, 1.0, True, [])

    p = z.copy()
    alphas, betas = [], []
    converged = False
    k = 0
    while k < maxit:
        Ap = A @ p
        curvature = float(p @ Ap)
        if curvature <= 0:
            raise SolverBreakdownError(
                "Non-positive curvature p^T W p = {0:.3e} at iteration {1}.".format(curvature, k)
            )
        alpha = rz / curvature
        x += alpha * p
        r -= alpha * Ap
        z = precondition(r)
        rz_new = float(r @ z)
        alphas.append(alpha)
        k += 1
        residuals.append(np.sqrt(max(rz_new, 0.0)))
        if energy is not None:
            e = x_exact - x
            energy.append(float(np.sqrt(max(e @ (A @ e), 0.0))))
        if residuals[-1] <= tol * res0:
            converged = True
            break
        beta = rz_new / rz
        betas.append(beta)
        p = z + beta * p
        rz = rz_new

    if not converged:
        logger.warning(
            "PCG stopped at maxit={0} with relative residual {1:.3e}".format(
                maxit, residuals[-1] / res0
            )
        )
    kappa, ritz = lanczos_kappa(alphas, betas)
    logger.debug("PCG: {0} iterations, kappa~{1:.4g}".format(k, kappa))
    return PcgReport(
        _wrap(W, x),
        k,
        [float(v) for v in residuals],
        energy,
        kappa,
        converged,
        [float(v) for v in ritz],
    )


def direct_solve(W, rhs):
    """Cholesky solve of ``W x = rhs``.

    Raises:
        FactorizationError: ``W`` is not positive definite.

    """
    A = _matrix(W)
    b = np.asarray(rhs, dtype=float)
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as e:
        raise FactorizationError("Galerkin matrix is not positive definite: {0}".format(e))
    x = scipy.linalg.cho_solve(factor, b)
    res = np.linalg.norm(A @ x - b)
    scale = np.linalg.norm(b)
    if res > 1e-10 * max(scale, np.finfo(float).tiny):
        logger.warning("Direct solve residual {0:.3e} (rhs norm {1:.3e})".format(res, scale))
    return _wrap(W, x)


def energy_bound(kappa, n):
    """``2 rho^n`` with ``rho = (sqrt(kappa) - 1) / (sqrt(kappa) + 1)``."""
    s = np.sqrt(kappa)
    rho = (s - 1.0) / (s + 1.0)
    return 2.0 * rho ** np.asarray(n)
