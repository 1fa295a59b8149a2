# -*- coding: utf-8 -*-
"""
Integrator for screens made of segments in the plane.

The kernel is ``G(x, y) = -ln|x - y| / (2 pi)``. Inner integrals over a
segment are exact, so near pairs and the double layer potential need no
adaptive refinement.

"""
import logging

import numpy as np

from screenbem.backends.integrator import BaseScreenIntegrator, BLOCK_BUDGET
from screenbem.backends.planar import quadrature
from screenbem.backends.rules import segment_rule
from screenbem.exc import QuadratureError
from screenbem.utils import chunks

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class PlanarIntegrator(BaseScreenIntegrator):
    """Segment pairs with a logarithmic kernel."""

    dim = 2
    tiered = False

    def kernel(self, r):
        return -np.log(r) / TWO_PI

    def facet_rule(self, order):
        return segment_rule(order)

    def remote_rule(self, config):
        return segment_rule(config.far_order)

    def oracle_rule(self):
        return segment_rule(3)

    def local_curls(self):
        inv = 1.0 / self.measures
        return np.stack([-inv, inv], axis=1)[:, :, None]

    def potential(self, facet_ids, x):
        p = self.points[facet_ids]
        return -quadrature.log_integral(p[:, 0], p[:, 1], x) / TWO_PI

    def facet_distance(self, facet_ids, x):
        p = self.points[facet_ids]
        return quadrature.segment_distance(p[:, 0], p[:, 1], x)

    def identical_integrals(self, facet_ids, config):
        return -quadrature.identical_log(self.measures[facet_ids]) / TWO_PI

    def edge_integrals(self, i, j, config):
        if len(i):
            raise QuadratureError("Segments share no edges.")
        return np.zeros(0)

    def vertex_integrals(self, i, j, config):
        fi, fj = self.mesh.facets[i], self.mesh.facets[j]
        first_shared = (fi[:, 0] == fj[:, 0]) | (fi[:, 0] == fj[:, 1])
        p = np.where(first_shared, fi[:, 0], fi[:, 1])
        a = np.where(first_shared, fi[:, 1], fi[:, 0])
        b = np.where(fj[:, 0] == p, fj[:, 1], fj[:, 0])
        v = self.mesh.vertices
        out = quadrature.adjacent_log(v[p], v[a], v[b], config.singular_order)
        return -out / TWO_PI

    def double_layer(self, nodal_jumps, x, config=None):
        """Exact double layer potential of piecewise linear jumps.

        Args:
            nodal_jumps: ``(n_facets, 2)`` side 0 minus side 1 corner values.
            x: ``(n, 2)`` evaluation points off the screen.

        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        nf = self.mesh.n_facets
        active = np.flatnonzero(np.any(nodal_jumps != 0, axis=1))
        out = np.zeros(len(x))
        if not len(active):
            return out
        step = max(BLOCK_BUDGET // len(active), 1)
        for a, b in chunks(len(x), step):
            m = b - a
            ids = np.tile(active, m)
            pts = np.repeat(x[a:b], len(active), axis=0)
            p = self.points[ids]
            i0, it = quadrature.dipole_integrals(p[:, 0], p[:, 1], pts)
            frac = it / self.measures[ids]
            ja, jb = nodal_jumps[ids, 0], nodal_jumps[ids, 1]
            vals = ja * (i0 - frac) + jb * frac
            out[a:b] = vals.reshape(m, len(active)).sum(axis=1) / TWO_PI
        logger.debug("Evaluated planar double layer of {0} facets at {1} points".format(nf, len(x)))
        return out

    def split(self, pieces):
        mid = 0.5 * (pieces[:, 0] + pieces[:, 1])
        left = np.stack([pieces[:, 0], mid], axis=1)
        right = np.stack([mid, pieces[:, 1]], axis=1)
        return np.stack([left, right], axis=1).reshape(-1, 2, 2)
