#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.matrixio` module."""

import numpy as np
import pytest

from screenbem.assembly import assemble_W
from screenbem.exc import ScreenBemValidationError
from screenbem.matrixio import HEADER, MAGIC, dump_matrix, load_matrix
from screenbem.multiscreen import inflate


def test_binary_layout(tmp_path, plus_fine):
    W = assemble_W(inflate(plus_fine.fine))
    path = tmp_path / "W.bin"
    dump_matrix(W, str(path))
    raw = path.read_bytes()
    assert raw[:6] == MAGIC
    assert HEADER.unpack(raw[:16]) == (MAGIC, W.n)
    assert raw[10:16] == b"\0" * 6
    assert len(raw) == 16 + 8 * W.n ** 2
    np.testing.assert_array_equal(np.frombuffer(raw[16:24], dtype="<f8"), W.values[0, :1])
    np.testing.assert_array_equal(load_matrix(str(path)), W.values)


def test_matrix_market(tmp_path, rng):
    A = rng.randn(4, 4)
    path = str(tmp_path / "A.mtx")
    dump_matrix(A, path)
    assert open(path).readline().startswith("%%MatrixMarket")
    np.testing.assert_allclose(load_matrix(path), A, rtol=1e-15)


def test_corrupt_files(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"NOTSBM" + b"\0" * 10)
    with pytest.raises(ScreenBemValidationError):
        load_matrix(str(bad))
    short = tmp_path / "short.bin"
    short.write_bytes(HEADER.pack(MAGIC, 3) + b"\0" * 8)
    with pytest.raises(ScreenBemValidationError):
        load_matrix(str(short))
    tiny = tmp_path / "tiny.bin"
    tiny.write_bytes(MAGIC)
    with pytest.raises(ScreenBemValidationError):
        load_matrix(str(tiny))


def test_bad_arguments(tmp_path):
    with pytest.raises(ScreenBemValidationError):
        dump_matrix(np.ones((2, 3)), str(tmp_path / "x.bin"))
    with pytest.raises(ScreenBemValidationError):
        dump_matrix(np.eye(2), str(tmp_path / "x.bin"), fmt="hdf5")
