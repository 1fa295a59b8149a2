# -*- coding: utf-8 -*-
"""
Dense matrix dumps.

``bin``: 16-byte header (magic ``SBEMW\\0``, little-endian ``u32`` size,
six zero bytes) followed by the row-major ``float64`` entries.
``mtx``: MatrixMarket array text.

"""
import logging
import os
import struct

import numpy as np
import scipy.io

from screenbem.exc import ScreenBemValidationError

logger = logging.getLogger(__name__)

MAGIC = b"SBEMW\0"
HEADER = struct.Struct("<6sI6x")
FORMATS = ("bin", "mtx")


def _format_of(path, fmt):
    if fmt is None:
        fmt = "mtx" if str(path).endswith(".mtx") else "bin"
    if fmt not in FORMATS:
        raise ScreenBemValidationError(
            "Unknown matrix format {0!r}, expected one of {1}.".format(fmt, FORMATS)
        )
    return fmt


def dump_matrix(W, path, fmt=None):
    """Write a square matrix to ``path``.

    Args:
        W: Square matrix or :class:`~screenbem.assembly.GalerkinMatrix`.
        path (str): Output file.
        fmt (str): ``"bin"`` or ``"mtx"``; inferred from the suffix when ``None``.

    """
    A = np.ascontiguousarray(np.asarray(W, dtype="<f8"))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ScreenBemValidationError("Expected a square matrix, got shape {0}.".format(A.shape))
    fmt = _format_of(path, fmt)
    if fmt == "bin":
        with open(path, "wb") as f:
            f.write(HEADER.pack(MAGIC, A.shape[0]))
            f.write(A.tobytes(order="C"))
    else:
        scipy.io.mmwrite(path, A, field="real", precision=17, symmetry="general")
    logger.debug("Wrote {0}x{0} matrix to {1} ({2})".format(A.shape[0], path, fmt))


def load_matrix(path, fmt=None):
    """Read a matrix written by :func:`dump_matrix`.

    Raises:
        ScreenBemValidationError: bad magic or truncated payload.

    """
    fmt = _format_of(path, fmt)
    if fmt == "mtx":
        return np.asarray(scipy.io.mmread(path), dtype=float)
    size = os.path.getsize(path)
    with open(path, "rb") as f:
        head = f.read(HEADER.size)
        if len(head) < HEADER.size:
            raise ScreenBemValidationError("{0}: truncated header.".format(path))
        magic, n = HEADER.unpack(head)
        if magic != MAGIC:
            raise ScreenBemValidationError("{0}: bad magic {1!r}.".format(path, magic))
        if size != HEADER.size + 8 * n * n:
            raise ScreenBemValidationError(
                "{0}: expected {1} entries, file has {2} bytes.".format(path, n * n, size)
            )
        data = np.frombuffer(f.read(), dtype="<f8")
    return data.reshape(n, n).astype(float)
