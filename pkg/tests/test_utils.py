#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.utils` module."""

import numpy as np
import pytest

from screenbem.utils import (
    DisjointSet,
    chunks,
    format_float,
    json_header,
    loglog_slope,
    read_table,
    write_table,
)


def test_format_float():
    assert format_float(0.1) == "1.0000000000000001e-01"
    assert format_float(1) == "1.0000000000000000e+00"
    assert float(format_float(np.pi)) == np.pi


def test_json_header_is_sorted():
    assert json_header({"b": 1, "a": [1, 2]}) == '# {"a":[1,2],"b":1}'


def test_loglog_slope():
    h = np.array([0.5, 0.25, 0.125, 0.0625])
    assert loglog_slope(h, 3.0 * h ** 1.5) == pytest.approx(1.5)
    assert loglog_slope(h, 1.0 / h) == pytest.approx(-1.0)


def test_chunks():
    assert chunks(5, 2) == [(0, 2), (2, 4), (4, 5)]
    assert chunks(0, 3) == []
    assert chunks(3, 0) == [(0, 1), (1, 2), (2, 3)]


def test_disjoint_set():
    ds = DisjointSet(6)
    assert ds.union(4, 2) == 2
    ds.union(5, 4)
    ds.union(1, 3)
    assert ds.find(5) == 2
    assert ds.groups(range(6)) == [[0], [1, 3], [2, 4, 5]]
    assert ds.groups([5, 3]) == [[3], [5]]


def test_table_round_trip(tmp_path):
    path = str(tmp_path / "t.csv")
    write_table(path, {"geometry": "plus", "levels": 2}, ["h", "err", "space"], [(0.5, 0.1, "jump"), (0.25, np.float64(0.05), "naive")])
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0] == '# {"geometry":"plus","levels":2}'
    assert lines[1] == "h,err,space"
    assert lines[2] == "5.0000000000000000e-01,1.0000000000000001e-01,jump"
    config, columns, rows = read_table(path)
    assert config == {"geometry": "plus", "levels": 2}
    assert columns == ["h", "err", "space"]
    assert rows[1] == ["2.5000000000000000e-01", "5.0000000000000003e-02", "naive"]


def test_read_table_without_header(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("a,b\n1,2\n")
    assert read_table(str(path)) == ({}, ["a", "b"], [["1", "2"]])
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert read_table(str(empty)) == ({}, [], [])
