# -*- coding: utf-8 -*-
"""
Base class for the dimension specific facet integrators.

An integrator owns the geometry of one :class:`~screenbem.mesh.SurfaceMesh`
and computes the piecewise constant single layer matrix

    V[T, T'] = int_T int_T' G(x, y) dy dx

that the curl-curl representation of the hypersingular form is built on,
the double layer potential of corner jumps, and distances to the screen.

Facet pairs are classified by shared vertices (identical, shared edge,
shared vertex) and, when disjoint, by their separation relative to the
larger diameter:

* ``near``   separation < near_threshold: outer Gauss rule, exact inner integral,
* ``far``    separation < 4 * near_threshold: tensor Gauss rule of ``far_order``,
* ``remote`` otherwise: the cheap :meth:`remote_rule` on both facets.

"""
import abc
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp

from screenbem.exc import QuadratureError, ScreenBemValidationError
from screenbem.utils import chunks

logger = logging.getLogger(__name__)

# Kernel evaluations held in memory per block.
BLOCK_BUDGET = 4000000


class BaseScreenIntegrator(abc.ABC):
    """The interface for integrator backends to implement.

    Args:
        mesh (SurfaceMesh): The screen mesh.

    """

    dim = None
    # Whether far pairs get a finer rule than remote ones.
    tiered = True

    def __init__(self, mesh):
        if mesh.dim != self.dim:
            raise ScreenBemValidationError(
                "{0} needs a {1}D mesh, got {2}D.".format(
                    self.__class__.__name__, self.dim, mesh.dim
                )
            )
        self.mesh = mesh
        self.points = mesh.facet_points()
        self.normals = mesh.facet_normals()
        self.measures = mesh.facet_measures()
        self.diameters = mesh.facet_diameters()
        self.centroids = mesh.centroids()
        self.radii = np.linalg.norm(self.points - self.centroids[:, None, :], axis=2).max(1)
        incidence = sp.csr_matrix(
            (
                np.ones(mesh.facets.size),
                (np.repeat(np.arange(mesh.n_facets), mesh.n_local), mesh.facets.ravel()),
            ),
            shape=(mesh.n_facets, mesh.n_vertices),
        )
        self._incidence = incidence

    def __repr__(self):
        return "<{0} facets={1}>".format(self.__class__.__name__, self.mesh.n_facets)

    @property
    def n_local(self):
        return self.mesh.n_local

    # Kernel and rules

    @abc.abstractmethod
    def kernel(self, r):
        """Fundamental solution as a function of the distance ``r``."""
        raise NotImplementedError()

    @abc.abstractmethod
    def facet_rule(self, order):
        """Reference rule in barycentric form, weights summing to one."""
        raise NotImplementedError()

    @abc.abstractmethod
    def remote_rule(self, config):
        """Low order rule for well separated pairs."""
        raise NotImplementedError()

    def quadrature_points(self, bary, facet_ids=None):
        """Physical points ``(n, n_q, dim)`` of a barycentric rule on facets."""
        pts = self.points if facet_ids is None else self.points[facet_ids]
        return np.einsum("qa,fad->fqd", bary, pts)

    # Geometry

    @abc.abstractmethod
    def local_curls(self):
        """Surface curls of the corner hats on side 0, ``(n_facets, n_local, n_comp)``."""
        raise NotImplementedError()

    @abc.abstractmethod
    def potential(self, facet_ids, x):
        """Exact ``int_T G(x, y) dy`` for facets ``facet_ids[k]`` and points ``x[k]``."""
        raise NotImplementedError()

    @abc.abstractmethod
    def facet_distance(self, facet_ids, x):
        """Distance from ``x[k]`` to facet ``facet_ids[k]``."""
        raise NotImplementedError()

    def distance(self, x, chunk=2048):
        """Distance from every point to the screen."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(len(x))
        nf = self.mesh.n_facets
        for a, b in chunks(len(x), max(BLOCK_BUDGET // (nf * 8), 1)):
            m = b - a
            ids = np.tile(np.arange(nf), m)
            pts = np.repeat(x[a:b], nf, axis=0)
            out[a:b] = self.facet_distance(ids, pts).reshape(m, nf).min(axis=1)
        return out

    # Singular pair integrals

    @abc.abstractmethod
    def identical_integrals(self, facet_ids, config):
        raise NotImplementedError()

    @abc.abstractmethod
    def edge_integrals(self, i, j, config):
        raise NotImplementedError()

    @abc.abstractmethod
    def vertex_integrals(self, i, j, config):
        raise NotImplementedError()

    @abc.abstractmethod
    def double_layer(self, nodal_jumps, x, config):
        """Double layer potential of corner jumps ``(n_facets, n_local)`` at ``x``."""
        raise NotImplementedError()

    # Pair classification

    def shared_counts(self, rows=None):
        """Sparse matrix of shared vertex counts between facets ``rows`` and all facets."""
        F = self._incidence if rows is None else self._incidence[rows]
        return (F @ self._incidence.T).tocoo()

    def separation(self, i, j):
        """Gap between bounding spheres over the larger diameter."""
        gap = (
            np.linalg.norm(self.centroids[i] - self.centroids[j], axis=-1)
            - self.radii[i]
            - self.radii[j]
        )
        return gap / np.maximum(self.diameters[i], self.diameters[j])

    def classify_pairs(self, config):
        """Upper triangle pairs ``(i, j)``, ``i <= j``, by class.

        Returns:
            Dict mapping ``"identical"``, ``"edge"``, ``"vertex"`` and
            ``"near"`` to ``(i, j)`` index arrays. Remaining pairs are far
            or remote.

        """
        S = self.shared_counts()
        keep = S.row <= S.col
        i, j, c = S.row[keep], S.col[keep], S.data[keep].astype(int)
        out = {
            "identical": (i[c == self.n_local], j[c == self.n_local]),
            "edge": (i[c == 2], j[c == 2]) if self.n_local == 3 else (i[:0], j[:0]),
            "vertex": (i[c == 1], j[c == 1]),
        }
        near_i, near_j = [], []
        touching = set(zip(i.tolist(), j.tolist()))
        n = self.mesh.n_facets
        for a, b in chunks(n, max(BLOCK_BUDGET // max(n, 1), 1)):
            rows = np.arange(a, b)
            ratio = self.separation(rows[:, None], np.arange(n)[None, :])
            ri, rj = np.nonzero(ratio < config.near_threshold)
            ri = rows[ri]
            sel = ri <= rj
            for p, q in zip(ri[sel].tolist(), rj[sel].tolist()):
                if (p, q) not in touching:
                    near_i.append(p)
                    near_j.append(q)
        out["near"] = (np.array(near_i, dtype=np.int64), np.array(near_j, dtype=np.int64))
        return out

    # Assembly

    def _tensor_pairs(self, i, j, bary, w):
        """Tensor rule on facet pairs listed in ``i``, ``j``."""
        out = np.empty(len(i))
        nq = len(w)
        for a, b in chunks(len(i), max(BLOCK_BUDGET // (nq * nq), 1)):
            xi = self.quadrature_points(bary, i[a:b])
            xj = self.quadrature_points(bary, j[a:b])
            r = np.linalg.norm(xi[:, :, None, :] - xj[:, None, :, :], axis=3)
            out[a:b] = np.einsum("p,q,kpq->k", w, w, self.kernel(r))
        return out * self.measures[i] * self.measures[j]

    def near_integrals(self, i, j, config):
        """Outer Gauss rule on facet ``i``, exact inner integral on facet ``j``."""
        bary, w = self.facet_rule(config.singular_order)
        out = np.empty(len(i))
        nq = len(w)
        for a, b in chunks(len(i), max(BLOCK_BUDGET // (nq * 8), 1)):
            x = self.quadrature_points(bary, i[a:b]).reshape(-1, self.dim)
            ids = np.repeat(j[a:b], nq)
            vals = self.potential(ids, x).reshape(b - a, nq)
            out[a:b] = vals @ w
        return out * self.measures[i]

    def far_integrals(self, i, j, config):
        bary, w = self.facet_rule(config.far_order)
        return self._tensor_pairs(i, j, bary, w)

    def pair_integrals(self, i, j, config):
        """Single layer entries for arbitrary pairs, dispatched by class."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        shared = np.array(
            [len(set(self.mesh.facets[a]) & set(self.mesh.facets[b])) for a, b in zip(i, j)],
            dtype=int,
        )
        ratio = self.separation(i, j)
        out = np.empty(len(i))
        classes = [
            (shared == self.n_local, lambda a, b: self.identical_integrals(a, config)),
            ((shared == 2) & (self.n_local == 3), lambda a, b: self.edge_integrals(a, b, config)),
            (shared == 1, lambda a, b: self.vertex_integrals(a, b, config)),
            ((shared == 0) & (ratio < config.near_threshold), lambda a, b: self.near_integrals(a, b, config)),
            ((shared == 0) & (ratio >= config.near_threshold), lambda a, b: self.far_integrals(a, b, config)),
        ]
        for mask, fn in classes:
            if mask.any():
                out[mask] = fn(i[mask], j[mask])
        return out

    def _regular_rows(self, a, b, config):
        """Remote and far entries of rows ``a..b`` against columns ``a..n``."""
        n = self.mesh.n_facets
        cols = np.arange(a, n)
        rows = np.arange(a, b)
        bary, w = self.remote_rule(config)
        xr = self.quadrature_points(bary, rows)
        xc = self.quadrature_points(bary, cols)
        block = np.empty((b - a, n - a))
        nq = len(w)
        step = max(BLOCK_BUDGET // (nq * nq * self.dim * max(b - a, 1)), 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            for c0, c1 in chunks(len(cols), step):
                r = np.linalg.norm(
                    xr[:, :, None, None, :] - xc[None, None, c0:c1, :, :], axis=4
                )
                block[:, c0:c1] = np.einsum("p,q,ipjq->ij", w, w, self.kernel(r))
        block *= self.measures[rows][:, None] * self.measures[cols][None, :]
        if self.tiered:
            ratio = self.separation(rows[:, None], cols[None, :])
            # Touching pairs are filled by the singular rules afterwards.
            S = self.shared_counts(rows)
            upper = (S.col >= a) & (S.data > 0)
            touching = np.zeros(block.shape, dtype=bool)
            touching[S.row[upper], S.col[upper] - a] = True
            fi, fj = np.nonzero((ratio < 4.0 * config.near_threshold) & ~touching)
            if len(fi):
                block[fi, fj] = self.far_integrals(rows[fi], cols[fj], config)
        return block

    def single_layer_matrix(self, config, threads=1):
        """Dense symmetric piecewise constant single layer matrix.

        Rows are computed in independent blocks, optionally on a thread
        pool; the upper triangle is then mirrored.

        Args:
            config (QuadratureConfig): Quadrature orders.
            threads (int): Worker threads.

        Returns:
            ``(n_facets, n_facets)`` array.

        Raises:
            QuadratureError: on non-finite entries.

        """
        n = self.mesh.n_facets
        V = np.zeros((n, n))
        bary, w = self.remote_rule(config)
        rows_per_block = max(min(BLOCK_BUDGET // (len(w) ** 2 * max(n, 1)), 256), 1)
        blocks = chunks(n, rows_per_block)

        def work(block):
            a, b = block
            return a, b, self._regular_rows(a, b, config)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(work, blocks))
        else:
            results = [work(blk) for blk in blocks]
        for a, b, block in results:
            V[a:b, a:] = block

        classes = self.classify_pairs(config)
        handlers = [
            ("near", lambda i, j: self.near_integrals(i, j, config)),
            ("vertex", lambda i, j: self.vertex_integrals(i, j, config)),
            ("edge", lambda i, j: self.edge_integrals(i, j, config)),
            ("identical", lambda i, j: self.identical_integrals(i, config)),
        ]
        for name, fn in handlers:
            i, j = classes[name]
            if len(i):
                V[i, j] = fn(i, j)
            logger.debug("{0} {1} pairs: {2}".format(self, name, len(i)))
        V = np.triu(V) + np.triu(V, 1).T
        if not np.all(np.isfinite(V)):
            raise QuadratureError("Non-finite single layer entries; degenerate geometry?")
        return V

    # Reference integration

    @abc.abstractmethod
    def split(self, pieces):
        """Children of sub-facets ``(m, n_local, dim)``."""
        raise NotImplementedError()

    def piece_measures(self, pieces):
        if self.dim == 2:
            return np.linalg.norm(pieces[:, 1] - pieces[:, 0], axis=1)
        return 0.5 * np.linalg.norm(
            np.cross(pieces[:, 1] - pieces[:, 0], pieces[:, 2] - pieces[:, 0]), axis=1
        )

    @abc.abstractmethod
    def oracle_rule(self):
        """Fixed low order rule used by :meth:`oracle_pair_integral`."""
        raise NotImplementedError()

    def oracle_pair_integral(self, i, j, tol=1e-11, max_depth=14):
        """Reference value of ``V[i, j]`` by adaptive subdivision of facet ``i``.

        The inner integral over facet ``j`` is exact; the outer one refines
        pieces level by level until a piece's fine and coarse estimates agree
        to ``tol`` relative to the total.

        Raises:
            QuadratureError: when ``max_depth`` is exhausted.

        """
        bary, w = self.oracle_rule()

        def estimate(pieces):
            x = np.einsum("qa,mad->mqd", bary, pieces).reshape(-1, self.dim)
            vals = self.potential(np.full(len(x), j), x).reshape(len(pieces), len(w))
            return (vals @ w) * self.piece_measures(pieces)

        pieces = self.points[[i]].copy()
        coarse = estimate(pieces)
        scale = max(abs(coarse.sum()), 1e-300)
        total = 0.0
        for _ in range(max_depth):
            children = self.split(pieces)
            per_child = estimate(children)
            fine = per_child.reshape(len(pieces), -1).sum(axis=1)
            share = self.piece_measures(pieces) / self.measures[i]
            done = np.abs(fine - coarse) <= tol * scale * share
            total += fine[done].sum()
            if done.all():
                return float(total)
            keep = np.repeat(~done, len(children) // len(pieces))
            pieces = children[keep]
            coarse = per_child[keep]
        raise QuadratureError(
            "Reference integration of pair ({0}, {1}) did not converge.".format(i, j)
        )
