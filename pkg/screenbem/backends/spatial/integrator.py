# -*- coding: utf-8 -*-
"""
Integrator for triangulated screens in space.

The kernel is ``G(x, y) = 1 / (4 pi |x - y|)``.

"""
import logging

import numpy as np

from screenbem.backends.integrator import BaseScreenIntegrator, BLOCK_BUDGET
from screenbem.backends.rules import dunavant6, subdivided_triangle_rule, triangle_rule
from screenbem.backends.spatial import quadrature
from screenbem.utils import chunks

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi
MAX_SUBDIVISION = 6


def _shared_layout(fi, fj):
    """Positions of shared and unshared corners for facet pairs ``(m, 3)``."""
    match = fi[:, :, None] == fj[:, None, :]
    in_i = match.any(axis=2)
    in_j = match.any(axis=1)
    # Stable sort puts shared corners first, in facet order.
    order_i = np.argsort(~in_i, axis=1, kind="stable")
    order_j = np.argsort(~in_j, axis=1, kind="stable")
    return order_i, order_j


class SpatialIntegrator(BaseScreenIntegrator):
    """Triangle pairs with the Newton kernel."""

    dim = 3

    def kernel(self, r):
        return 1.0 / (FOUR_PI * r)

    def facet_rule(self, order):
        return triangle_rule(order)

    def remote_rule(self, config):
        return dunavant6()

    def oracle_rule(self):
        return dunavant6()

    def local_curls(self):
        P = self.points
        edges = np.stack([P[:, 2] - P[:, 1], P[:, 0] - P[:, 2], P[:, 1] - P[:, 0]], axis=1)
        return -edges / (2.0 * self.measures[:, None, None])

    def gradients(self):
        """Surface gradients of the corner hats, ``(n_facets, 3, 3)``."""
        return np.cross(self.local_curls(), self.normals[:, None, :])

    def potential(self, facet_ids, x):
        return quadrature.inverse_distance_integral(self.points[facet_ids], x) / FOUR_PI

    def facet_distance(self, facet_ids, x):
        return quadrature.triangle_distance(self.points[facet_ids], x)

    def identical_integrals(self, facet_ids, config):
        return quadrature.identical(self.points[facet_ids]) / FOUR_PI

    def edge_integrals(self, i, j, config):
        fi, fj = self.mesh.facets[i], self.mesh.facets[j]
        oi, oj = _shared_layout(fi, fj)
        k = np.arange(len(i))
        v = self.mesh.vertices
        p = v[fi[k, oi[:, 0]]]
        q = v[fi[k, oi[:, 1]]]
        r1 = v[fi[k, oi[:, 2]]]
        r2 = v[fj[k, oj[:, 2]]]
        return quadrature.edge_adjacent(p, q, r1, r2, config.singular_order) / FOUR_PI

    def vertex_integrals(self, i, j, config):
        fi, fj = self.mesh.facets[i], self.mesh.facets[j]
        oi, oj = _shared_layout(fi, fj)
        k = np.arange(len(i))
        v = self.mesh.vertices
        return (
            quadrature.vertex_adjacent(
                v[fi[k, oi[:, 0]]],
                v[fi[k, oi[:, 1]]],
                v[fi[k, oi[:, 2]]],
                v[fj[k, oj[:, 1]]],
                v[fj[k, oj[:, 2]]],
                config.singular_order,
            )
            / FOUR_PI
        )

    def _dipole_moments(self, ids, x, level, config):
        """``int_T n.(y-x) (y-x) / |y-x|^3 dy`` with a rule refined ``level`` times."""
        if level < 0:
            bary, w = dunavant6()
        else:
            bary, w = subdivided_triangle_rule(config.far_order, level)
        out = np.empty((len(ids), 3))
        nq = len(w)
        for a, b in chunks(len(ids), max(BLOCK_BUDGET // (nq * 3), 1)):
            y = self.quadrature_points(bary, ids[a:b])
            rel = y - x[a:b, None, :]
            r = np.linalg.norm(rel, axis=2)
            dn = np.einsum("kqd,kd->kq", rel, self.normals[ids[a:b]])
            out[a:b] = np.einsum("q,kq,kqd->kd", w, dn / r ** 3, rel)
        return out * self.measures[ids][:, None]

    def _levels(self, ids, x):
        """Rule refinement level per (facet, point) pair; -1 marks remote pairs."""
        gap = np.linalg.norm(x - self.centroids[ids], axis=1) - self.radii[ids]
        diam = self.diameters[ids]
        level = np.full(len(ids), -1)
        close = gap < 4.0 * diam
        level[close] = 0
        near = np.flatnonzero(gap < diam)
        if len(near):
            dist = self.facet_distance(ids[near], x[near])
            ratio = np.maximum(dist / diam[near], 1e-300)
            lv = np.ceil(np.log2(1.0 / ratio)) + 1
            level[near] = np.clip(lv, 0, MAX_SUBDIVISION).astype(int)
        return level

    def double_layer(self, nodal_jumps, x, config):
        """Double layer potential of piecewise linear jumps.

        The constant part of the density on each triangle is integrated
        exactly through the solid angle, the linear remainder by quadrature
        refined toward nearby points.

        Args:
            nodal_jumps: ``(n_facets, 3)`` side 0 minus side 1 corner values.
            x: ``(n, 3)`` evaluation points off the screen.
            config (QuadratureConfig): Base rule order.

        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        active = np.flatnonzero(np.any(nodal_jumps != 0, axis=1))
        out = np.zeros(len(x))
        if not len(active):
            return out
        grads = self.gradients()
        jump_grad = np.einsum("fa,fad->fd", nodal_jumps, grads)
        for a, b in chunks(len(x), max(BLOCK_BUDGET // (8 * len(active)), 1)):
            m = b - a
            ids = np.tile(active, m)
            pts = np.repeat(x[a:b], len(active), axis=0)
            P = self.points[ids]
            # Affine extension of the corner hats evaluated at the point.
            lam = np.einsum("kad,kd->ka", grads[ids], pts - P[:, 0])
            lam[:, 0] += 1.0
            const = np.einsum("ka,ka->k", nodal_jumps[ids], lam)
            vals = const * quadrature.solid_angle(P, pts)
            level = self._levels(ids, pts)
            for lv in np.unique(level):
                sel = np.flatnonzero(level == lv)
                Q = self._dipole_moments(ids[sel], pts[sel], int(lv), config)
                vals[sel] += np.einsum("kd,kd->k", jump_grad[ids[sel]], Q)
            out[a:b] = vals.reshape(m, len(active)).sum(axis=1) / FOUR_PI
        logger.debug("Evaluated spatial double layer at {0} points".format(len(x)))
        return out

    def split(self, pieces):
        a, b, c = pieces[:, 0], pieces[:, 1], pieces[:, 2]
        ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
        children = np.stack(
            [
                np.stack([a, ab, ca], axis=1),
                np.stack([ab, b, bc], axis=1),
                np.stack([ca, bc, c], axis=1),
                np.stack([ab, bc, ca], axis=1),
            ],
            axis=1,
        )
        return children.reshape(-1, 3, 3)
