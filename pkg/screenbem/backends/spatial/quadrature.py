# -*- coding: utf-8 -*-
"""
Integrals of ``1/|x - y|`` over triangles and pairs of triangles.

Touching pairs are integrated in relative coordinates: the double integral
over the product of the two triangles is written as a cone over the
singular point, the radial integral is done exactly and the remaining face
integrals are smooth.

All functions are vectorized over the leading axis; triangles are given as
``(m, 3, 3)`` corner arrays, points as ``(m, 3)``.

"""
import numpy as np

from screenbem.backends.rules import collapsed_gauss, gauss_legendre
from screenbem.utils import chunks

PAIR_CHUNK = 2048


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _norm(a):
    return np.sqrt(_dot(a, a))


def areas(P):
    return 0.5 * _norm(np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]))


def _line_inverse_distance(p, q):
    """``int_0^1 dt / |p + t q|``."""
    nq = _norm(q)
    num = nq * _norm(p + q) + _dot(q, p + q)
    den = nq * _norm(p) + _dot(q, p)
    return np.log(num / den) / nq


def identical(P):
    """``int_T int_T 1/|x - y|`` for every triangle."""
    A, B, C = P[:, 0], P[:, 1], P[:, 2]
    total = (
        _line_inverse_distance(B - A, C - B)
        + _line_inverse_distance(C - A, A - B)
        + _line_inverse_distance(C - B, A - C)
    )
    return 4.0 * areas(P) ** 2 / 3.0 * total


def _edge_faces(a, b, c, order):
    """Face integrals of the cone decomposition for one orientation."""
    uv, wt = collapsed_gauss(order)
    s, ws = gauss_legendre(order)
    z, d = uv[:, 0], uv[:, 1]
    # Face where the offset along the first third vertex is one.
    v1 = a[:, None, :] + z[None, :, None] * b[:, None, :] - d[None, :, None] * c[:, None, :]
    f1 = (1.0 / _norm(v1)) @ wt
    # Face where the shift along the shared edge is complete.
    S, T = np.meshgrid(s, s, indexing="ij")
    W = np.outer(ws, ws).ravel()
    S, T = S.ravel(), T.ravel()
    v2 = (
        (1.0 - T)[None, :, None] * b[:, None, :]
        + S[None, :, None] * a[:, None, :]
        - T[None, :, None] * c[:, None, :]
    )
    f2 = (1.0 / _norm(v2)) @ W
    return f1 + f2


def edge_adjacent(p, q, r1, r2, order):
    """``int_T1 int_T2 1/|x - y|`` for triangles ``(p, q, r1)`` and ``(p, q, r2)``."""
    out = np.empty(len(p))
    for a0, a1 in chunks(len(p), PAIR_CHUNK):
        sl = slice(a0, a1)
        b = q[sl] - p[sl]
        a = r1[sl] - q[sl]
        c = r2[sl] - q[sl]
        A1 = 0.5 * _norm(np.cross(b, a))
        A2 = 0.5 * _norm(np.cross(b, c))
        faces = _edge_faces(a, b, c, order) + _edge_faces(c, b, a, order)
        out[sl] = 4.0 * A1 * A2 * faces / 6.0
    return out


def vertex_adjacent(p, b1, c1, b2, c2, order):
    """``int_T1 int_T2 1/|x - y|`` for triangles ``(p, b1, c1)`` and ``(p, b2, c2)``."""
    uv, wt = collapsed_gauss(order)
    s, ws = gauss_legendre(order)
    out = np.empty(len(p))
    for a0, a1 in chunks(len(p), PAIR_CHUNK):
        sl = slice(a0, a1)
        e1, f1 = b1[sl] - p[sl], c1[sl] - p[sl]
        e2, f2 = b2[sl] - p[sl], c2[sl] - p[sl]
        A1 = 0.5 * _norm(np.cross(e1, f1))
        A2 = 0.5 * _norm(np.cross(e2, f2))
        # Points on the far edge of one triangle, shape (m, ns, 3).
        edge1 = (1.0 - s)[None, :, None] * e1[:, None, :] + s[None, :, None] * f1[:, None, :]
        edge2 = (1.0 - s)[None, :, None] * e2[:, None, :] + s[None, :, None] * f2[:, None, :]
        tri1 = uv[None, :, 0, None] * e1[:, None, :] + uv[None, :, 1, None] * f1[:, None, :]
        tri2 = uv[None, :, 0, None] * e2[:, None, :] + uv[None, :, 1, None] * f2[:, None, :]
        g1 = 1.0 / _norm(edge1[:, :, None, :] - tri2[:, None, :, :])
        g2 = 1.0 / _norm(tri1[:, None, :, :] - edge2[:, :, None, :])
        faces = np.einsum("s,t,mst->m", ws, wt, g1) + np.einsum("s,t,mst->m", ws, wt, g2)
        out[sl] = 4.0 * A1 * A2 * faces / 3.0
    return out


def inverse_distance_integral(P, x):
    """Exact ``int_T 1/|x - y| dy`` for triangle ``P[k]`` and point ``x[k]``."""
    e01 = P[:, 1] - P[:, 0]
    e02 = P[:, 2] - P[:, 0]
    n = np.cross(e01, e02)
    n = n / _norm(n)[:, None]
    d = _dot(x - P[:, 0], n)
    ad = np.abs(d)
    xp = x - d[:, None] * n
    scale = np.maximum(_norm(e01), _norm(e02))
    total = np.zeros(len(x))
    for k in range(3):
        A, B = P[:, k], P[:, (k + 1) % 3]
        edge = B - A
        ell = edge / _norm(edge)[:, None]
        u = np.cross(ell, n)
        p0 = _dot(A - xp, u)
        lp = _dot(B - xp, ell)
        lm = _dot(A - xp, ell)
        rp = _norm(B - x)
        rm = _norm(A - x)
        r02 = p0 * p0 + d * d
        degenerate = r02 <= (1e-14 * scale) ** 2
        safe_r02 = np.where(degenerate, 1.0, r02)
        plus = np.where(lp >= 0, rp + lp, safe_r02 / (rp - lp))
        minus = np.where(lm >= 0, rm + lm, safe_r02 / (rm - lm))
        with np.errstate(divide="ignore", invalid="ignore"):
            log_term = p0 * np.log(plus / minus)
            atan_term = ad * (
                np.arctan(p0 * lp / (r02 + ad * rp)) - np.arctan(p0 * lm / (r02 + ad * rm))
            )
        total += np.where(degenerate, 0.0, log_term - atan_term)
    return total


def solid_angle(P, x):
    """Signed solid angle of triangle ``P[k]`` seen from ``x[k]``.

    Positive when ``x`` lies on the side opposite to the right-hand normal.
    """
    a, b, c = P[:, 0] - x, P[:, 1] - x, P[:, 2] - x
    la, lb, lc = _norm(a), _norm(b), _norm(c)
    num = _dot(a, np.cross(b, c))
    den = la * lb * lc + _dot(a, b) * lc + _dot(a, c) * lb + _dot(b, c) * la
    return 2.0 * np.arctan2(num, den)


def _segment_distance(a, b, x):
    t = b - a
    s = np.clip(_dot(x - a, t) / _dot(t, t), 0.0, 1.0)
    return _norm(x - (a + s[:, None] * t))


def triangle_distance(P, x):
    """Distance from ``x[k]`` to triangle ``P[k]``."""
    e1 = P[:, 1] - P[:, 0]
    e2 = P[:, 2] - P[:, 0]
    rel = x - P[:, 0]
    g11, g12, g22 = _dot(e1, e1), _dot(e1, e2), _dot(e2, e2)
    r1, r2 = _dot(rel, e1), _dot(rel, e2)
    det = g11 * g22 - g12 * g12
    s = (g22 * r1 - g12 * r2) / det
    t = (g11 * r2 - g12 * r1) / det
    inside = (s >= 0) & (t >= 0) & (s + t <= 1)
    foot = P[:, 0] + s[:, None] * e1 + t[:, None] * e2
    edge = np.minimum(
        np.minimum(_segment_distance(P[:, 0], P[:, 1], x), _segment_distance(P[:, 1], P[:, 2], x)),
        _segment_distance(P[:, 0], P[:, 2], x),
    )
    return np.where(inside, _norm(x - foot), edge)
