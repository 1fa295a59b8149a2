# -*- coding: utf-8 -*-
"""
Two-level substructuring preconditioner for the jump space.

Fine jump DOFs are split into one face space per coarse facet (vertices
strictly inside it) and the wire basket (vertices on coarse edges and
vertices). Together with the coarse jump space embedded by prolongation
they form an additive Schwarz decomposition

    M = sum_F E_F W_FF^-1 E_F^T + E_W W_WW^-1 E_W^T + R (R^T W R)^-1 R^T.

"""
import abc
import logging
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.linalg

from screenbem.exc import FactorizationError, MeshValidationError, ScreenBemValidationError

logger = logging.getLogger(__name__)

INTERIOR_TOL = 1e-10

Spectrum = namedtuple("Spectrum", ["kappa", "lambda_min", "lambda_max"])


class DofPartition(object):
    """Face sets and wire basket of the fine jump DOFs.

    Attributes:
        face_sets (dict): Coarse facet id -> sorted DOF index array, non-empty
            sets only.
        wirebasket (numpy.ndarray): Sorted DOF indices.

    """

    def __init__(self, face_sets, wirebasket, n_dofs):
        self.face_sets = dict(sorted(face_sets.items()))
        self.wirebasket = np.asarray(wirebasket, dtype=np.int64)
        self.n_dofs = int(n_dofs)

    def __repr__(self):
        return "<DofPartition faces={0} wirebasket={1} dofs={2}>".format(
            len(self.face_sets), len(self.wirebasket), self.n_dofs
        )

    def blocks(self):
        """``(name, indices)`` of all non-empty local spaces in a fixed order."""
        out = [("face-{0}".format(f), idx) for f, idx in self.face_sets.items()]
        if len(self.wirebasket):
            out.append(("wirebasket", self.wirebasket))
        return out


def partition_dofs(pair, inflated_fine):
    """Assign every fine jump DOF to a coarse face interior or the wire basket.

    Raises:
        MeshValidationError: a fine vertex cannot be located on its parent.

    """
    fine = pair.fine
    vf = fine.vertex_facets()
    vertices = np.arange(fine.n_vertices)
    parents = np.array([pair.parent[vf[v][0]] for v in vertices])
    lam, dist = pair.coarse.barycentric(parents, fine.vertices)
    if lam.min() < -INTERIOR_TOL or dist.max() > INTERIOR_TOL * max(pair.coarse.diameter, 1.0):
        raise MeshValidationError("Fine vertex not located on its coarse parent facet.")
    interior = np.all(lam > INTERIOR_TOL, axis=1)
    faces, wirebasket = {}, []
    for nu, (i, _) in enumerate(inflated_fine.jump_dofs):
        if interior[i]:
            faces.setdefault(int(parents[i]), []).append(nu)
        else:
            wirebasket.append(nu)
    faces = {f: np.array(d, dtype=np.int64) for f, d in faces.items()}
    partition = DofPartition(faces, wirebasket, inflated_fine.n_dofs)
    logger.debug("Partitioned {0!r}".format(partition))
    return partition


def _factorize(name, block):
    try:
        return scipy.linalg.cho_factor(block, lower=True)
    except np.linalg.LinAlgError as e:
        raise FactorizationError("Block {0} is not positive definite: {1}".format(name, e))


class BasePreconditioner(abc.ABC):
    """A symmetric positive definite approximation of ``W^-1``."""

    n = None

    @abc.abstractmethod
    def apply(self, r):
        """Apply to a vector ``(n,)`` or the columns of ``(n, k)``."""
        raise NotImplementedError()

    def as_dense(self):
        return self.apply(np.eye(self.n))

    def __call__(self, r):
        return self.apply(r)

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        if r.shape[0] != self.n:
            raise ScreenBemValidationError(
                "Preconditioner of size {0} applied to length {1}.".format(self.n, r.shape[0])
            )
        return r


class ExactPreconditioner(BasePreconditioner):
    """``W^-1`` through a Cholesky factorization."""

    def __init__(self, W):
        W = np.asarray(W, dtype=float)
        self.n = W.shape[0]
        self._factor = _factorize("W", W)

    def apply(self, r):
        return scipy.linalg.cho_solve(self._factor, self._check(r))


class SchwarzPreconditioner(BasePreconditioner):
    """Additive two-level Schwarz preconditioner.

    Args:
        W: Fine Galerkin matrix.
        partition (DofPartition): Local spaces.
        R: Prolongation (sparse or dense, ``(n_fine, n_coarse)``) or ``None``
            for a one-level method.
        threads (int): Workers for factorization and application.

    Raises:
        FactorizationError: a block is not positive definite.

    """

    def __init__(self, W, partition, R=None, threads=1):
        W = np.asarray(W, dtype=float)
        self.n = W.shape[0]
        if partition.n_dofs != self.n:
            raise ScreenBemValidationError("Partition does not match the matrix size.")
        self.threads = int(threads)
        self.local = partition.blocks()
        self.R = None
        if R is not None:
            R = getattr(R, "matrix", R)
            self.R = R.toarray() if hasattr(R, "toarray") else np.asarray(R, dtype=float)
        jobs = [(name, W[np.ix_(idx, idx)]) for name, idx in self.local]
        if self.R is not None and self.R.shape[1]:
            WH = self.R.T @ W @ self.R
            jobs.append(("coarse", 0.5 * (WH + WH.T)))
        self.factors = self._map(lambda job: _factorize(*job), jobs)
        self.names = [name for name, _ in jobs]
        logger.debug(
            "Built Schwarz preconditioner: {0} local blocks, coarse={1}".format(
                len(self.local), self.R is not None
            )
        )

    def __repr__(self):
        return "<SchwarzPreconditioner n={0} subspaces={1}>".format(self.n, self.n_subspaces)

    def _map(self, fn, items):
        if self.threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    @property
    def n_subspaces(self):
        return len(self.factors)

    @property
    def coarse_matrix(self):
        """``R^T W R`` reconstructed from its factor."""
        if "coarse" not in self.names:
            return None
        c, lower = self.factors[-1]
        L = np.tril(c) if lower else np.triu(c).T
        return L @ L.T

    def min_pivots(self):
        """Smallest squared Cholesky diagonal per block."""
        return {
            name: float(np.min(np.diag(c)) ** 2) for name, (c, _) in zip(self.names, self.factors)
        }

    def _contributions(self, r):
        def local(k):
            if k < len(self.local):
                idx = self.local[k][1]
                return idx, scipy.linalg.cho_solve(self.factors[k], r[idx])
            return None, self.R @ scipy.linalg.cho_solve(self.factors[k], self.R.T @ r)

        return self._map(local, list(range(len(self.factors))))

    def apply(self, r):
        r = self._check(r)
        out = np.zeros_like(r)
        for idx, value in self._contributions(r):
            if idx is None:
                out += value
            else:
                out[idx] += value
        return out

    def as_dense(self):
        """The preconditioner matrix assembled from inverted blocks."""
        M = np.zeros((self.n, self.n))
        for k, (name, factor) in enumerate(zip(self.names, self.factors)):
            size = factor[0].shape[0]
            inv = scipy.linalg.cho_solve(factor, np.eye(size))
            if name == "coarse":
                M += self.R @ inv @ self.R.T
            else:
                idx = self.local[k][1]
                M[np.ix_(idx, idx)] += inv
        return 0.5 * (M + M.T)


def build(W, partition, R=None, threads=1):
    """Factorize the local and coarse blocks; see :class:`SchwarzPreconditioner`."""
    return SchwarzPreconditioner(W, partition, R, threads=threads)


def apply(prec, r):
    return prec.apply(r)


def condition_number(W, prec=None):
    """Spectral condition number of ``M W`` (or ``W`` without preconditioner).

    With ``W = L L^T`` the eigenvalues of ``M W`` are those of the symmetric
    matrix ``L^T M L``.

    Returns:
        A :class:`Spectrum`.

    Raises:
        ScreenBemValidationError: ``W`` is empty.
        FactorizationError: ``W`` is not positive definite.

    """
    W = np.asarray(W, dtype=float)
    if W.size == 0:
        raise ScreenBemValidationError("Condition number of an empty system is undefined.")
    if prec is None:
        ev = scipy.linalg.eigvalsh(W)
    else:
        try:
            L = scipy.linalg.cholesky(W, lower=True)
        except np.linalg.LinAlgError as e:
            raise FactorizationError("Galerkin matrix is not positive definite: {0}".format(e))
        A = L.T @ prec.as_dense() @ L
        ev = scipy.linalg.eigvalsh(0.5 * (A + A.T))
    lo, hi = float(ev[0]), float(ev[-1])
    if lo <= 0:
        raise FactorizationError("Operator is not positive definite (lambda_min={0:.3e}).".format(lo))
    return Spectrum(hi / lo, lo, hi)
