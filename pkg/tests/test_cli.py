#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the `screenbem` command line."""

import json

import pytest

import screenbem
from screenbem import experiments
from screenbem.exc import FactorizationError


def test_no_command(capsys):
    assert screenbem.main([]) == 2
    assert "usage" in capsys.readouterr().out


def test_inflate(capsys):
    assert screenbem.main(["inflate", "plus", "--levels", "2"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["dofs"] == 7


def test_validation_errors_exit_with_2(capsys, tmp_path):
    assert screenbem.main(["inflate", "--geometry", "nonagon"]) == 2
    assert "error" in capsys.readouterr().err
    assert screenbem.main(["solve", "--g", "1,x"]) == 2
    assert screenbem.main(["cond", "--config", str(tmp_path / "missing.json")]) == 2


def test_numerical_errors_exit_with_3(monkeypatch, capsys, tmp_path):
    def fail(config, dump_matrix_path=None):
        raise FactorizationError("not positive definite")

    monkeypatch.setattr(experiments, "cmd_solve", fail)
    assert screenbem.main(["solve", "--out", str(tmp_path)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_config_file_and_overrides(monkeypatch, tmp_path):
    seen = {}

    def record(config):
        seen["config"] = config
        return {}

    monkeypatch.setitem(experiments.COMMANDS, "cond", record)
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"command": "cond", "geometry": "threefold", "levels": 3}))
    args = ["cond", "--config", str(path), "--levels", "2", "--coarse-levels", "0,1", "--quad-far", "6", "--no-precondition"]
    assert screenbem.main(args) == 0
    config = seen["config"]
    assert config.levels == 2
    assert config.coarse_levels == [0, 1]
    assert config.quadrature.far_order == 6
    assert config.quadrature.singular_order == 8
    assert config.precondition is False


def test_grid_flags(monkeypatch):
    seen = {}
    monkeypatch.setitem(experiments.COMMANDS, "eval", lambda config: seen.setdefault("c", config) and {})
    assert screenbem.main(["eval", "plus", "--grid-points", "9", "--grid-extent", "1.5"]) == 0
    assert seen["c"].grid.points == 9
    assert seen["c"].grid.extent == 1.5


def test_plot(tmp_path, capsys):
    from screenbem.utils import write_table

    csv_path = str(tmp_path / "t.csv")
    write_table(csv_path, {}, ["h", "err"], [(0.5, 0.1), (0.25, 0.05)])
    assert screenbem.main(["plot", csv_path, "--y", "err"]) == 0
    assert capsys.readouterr().out.strip().endswith("t.svg")
    assert screenbem.main(["plot", csv_path, "--y", "kappa"]) == 2


def test_version():
    with pytest.raises(SystemExit):
        screenbem.main(["--version"])
