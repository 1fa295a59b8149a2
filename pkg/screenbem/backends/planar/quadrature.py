# -*- coding: utf-8 -*-
"""
Closed forms for logarithmic and dipole integrals over straight segments.

All functions are vectorized over their leading axis: ``a`` and ``b`` are
``(m, 2)`` segment endpoints and ``x`` ``(m, 2)`` points.

"""
import numpy as np

from screenbem.backends.rules import gauss_legendre


def _frame(a, b, x):
    """Segment length, arclength of the foot point and signed offset ``n0 . (a - x)``."""
    t = b - a
    length = np.linalg.norm(t, axis=1)
    tau = t / length[:, None]
    n0 = np.stack([tau[:, 1], -tau[:, 0]], axis=1)
    s0 = np.einsum("ij,ij->i", x - a, tau)
    c = np.einsum("ij,ij->i", a - x, n0)
    return length, s0, c


def _log_antiderivative(u, d):
    """Antiderivative of ``ln sqrt(u^2 + d^2)`` in ``u``."""
    r2 = u * u + d * d
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(r2 > 0, u * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        atan_term = np.where(d > 0, 2.0 * d * np.arctan(u / np.where(d > 0, d, 1.0)), 0.0)
    return 0.5 * (log_term - 2.0 * u + atan_term)


def log_integral(a, b, x):
    """Exact ``int_[a,b] ln|x - y| dy``."""
    length, s0, c = _frame(a, b, x)
    d = np.abs(c)
    return _log_antiderivative(length - s0, d) - _log_antiderivative(-s0, d)


def identical_log(length):
    """``int int ln|s - t| ds dt`` over a segment of the given length with itself."""
    return length ** 2 * (np.log(length) - 1.5)


def adjacent_log(p, a, b, order):
    """Double log integral over segments ``[p, a]`` and ``[p, b]`` sharing ``p``.

    Splitting the parameter square into two triangles at the shared vertex
    leaves a radial factor with a closed form and two smooth line integrals.
    """
    ua, ub = a - p, b - p
    x, w = gauss_legendre(order)
    first = np.log(np.linalg.norm(ua[:, None, :] - x[None, :, None] * ub[:, None, :], axis=2)) @ w
    second = np.log(np.linalg.norm(x[None, :, None] * ua[:, None, :] - ub[:, None, :], axis=2)) @ w
    la, lb = np.linalg.norm(ua, axis=1), np.linalg.norm(ub, axis=1)
    return la * lb * (-0.5 + 0.5 * (first + second))


def dipole_integrals(a, b, x):
    """Moments of the planar dipole kernel over a segment.

    Returns:
        Tuple ``(i0, it)`` with ``i0 = int c / r^2 ds`` and
        ``it = int s c / r^2 ds``, ``s`` the arclength from ``a`` and
        ``c = n0 . (a - x)``.

    """
    length, s0, c = _frame(a, b, x)
    t1, t2 = -s0, length - s0
    nz = c != 0
    safe_c = np.where(nz, c, 1.0)
    i0 = np.where(nz, np.arctan(t2 / safe_c) - np.arctan(t1 / safe_c), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (t2 * t2 + c * c) / (t1 * t1 + c * c)
        i1 = np.where(nz, 0.5 * c * np.log(np.where(nz, ratio, 1.0)), 0.0)
    return i0, i1 + s0 * i0


def segment_distance(a, b, x):
    t = b - a
    s = np.clip(np.einsum("ij,ij->i", x - a, t) / np.einsum("ij,ij->i", t, t), 0.0, 1.0)
    return np.linalg.norm(x - (a + s[:, None] * t), axis=1)
