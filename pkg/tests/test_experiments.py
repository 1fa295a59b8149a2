#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.experiments` module."""

import json
import os

import numpy as np
import pytest

from screenbem.config import ExperimentConfig, GridSpec
from screenbem.exc import ConfigError
from screenbem.experiments import (
    KAPPA_COLUMNS,
    cmd_cond,
    cmd_eval,
    cmd_experiment1,
    cmd_experiment2,
    cmd_experiment3,
    cmd_inflate,
    cmd_solve,
    kappa_fits,
    level_pair,
    mesh_chain,
    neumann_data,
    resolve_mesh,
)
from screenbem.mesh import save_mesh
from screenbem.utils import read_table

from .conftest import slow


def _config(command, tmp_path, **kwargs):
    return ExperimentConfig.for_command(command, out=str(tmp_path), **kwargs)


def test_inflate_summary(tmp_path):
    summary = cmd_inflate(_config("inflate", tmp_path, levels=2))
    assert summary["dofs"] == 7
    assert summary["q_histogram"] == {"1": 4, "2": 4, "4": 1}
    assert summary["oriented_facets"] == 16
    assert cmd_inflate(_config("inflate", tmp_path, geometry="octahedron"))["components"] == 2


def test_resolve_mesh(tmp_path, plus):
    path = str(tmp_path / "plus.off")
    save_mesh(plus, path)
    assert resolve_mesh(ExperimentConfig(geometry=path)).n_facets == 4
    with pytest.raises(ConfigError):
        resolve_mesh(ExperimentConfig(geometry="dodecahedron"))


def test_level_pairs(plus):
    meshes, pairs = mesh_chain(plus, 2)
    assert [m.n_facets for m in meshes] == [4, 8, 16]
    pair = level_pair(meshes, pairs, 0, 2)
    assert pair.coarse is meshes[0] and pair.fine is meshes[2]
    assert pair.H / pair.h == pytest.approx(4.0)
    with pytest.raises(ConfigError):
        level_pair(meshes, pairs, 2, 1)


def test_neumann_data():
    with pytest.raises(ConfigError):
        neumann_data(ExperimentConfig(g=[1.0, 2.0, 3.0]), 2)
    with pytest.raises(ConfigError):
        neumann_data(ExperimentConfig(geometry="threefold", g=[]), 2)
    g, exact = neumann_data(ExperimentConfig(geometry="plus:n=3", g=[]), 2)
    assert callable(g) and callable(exact)


def test_solve_writes_artifacts(tmp_path):
    summary = cmd_solve(_config("solve", tmp_path, levels=3), str(tmp_path / "W.bin"))
    assert summary["converged"]
    assert summary["dofs"] == 15
    assert len(summary["junction_values"]["0"]) == 4
    for name in ("density.csv", "report.json", "W.bin"):
        assert os.path.exists(str(tmp_path / name))
    config, columns, rows = read_table(str(tmp_path / "density.csv"))
    assert config["levels"] == 3
    assert columns == ["vertex", "branch", "x", "y", "value"]
    assert len(rows) == 15
    with open(str(tmp_path / "report.json")) as f:
        report = json.load(f)
    assert report["iterations"] == summary["iterations"]
    assert set(report["timings"]) >= {"assemble", "pcg"}


def test_solve_is_reproducible(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    cmd_solve(ExperimentConfig.for_command("solve", levels=2, out="{0}".format(first)))
    cmd_solve(ExperimentConfig.for_command("solve", levels=2, out="{0}".format(second)))
    a = (first / "density.csv").read_text().splitlines()
    b = (second / "density.csv").read_text().splitlines()
    # Only the output directory in the header differs.
    assert a[1:] == b[1:]


def test_eval_against_exact_solution(tmp_path):
    config = _config("eval", tmp_path, levels=2, g=[], grid=GridSpec(points=11))
    summary = cmd_eval(config)
    assert summary["grid_error"] < 1.0
    _, columns, rows = read_table(summary["potential"])
    assert columns == ["x", "y", "value", "exact", "error"]
    assert rows


def test_cond_table(tmp_path):
    result = cmd_cond(_config("cond", tmp_path, levels=2))
    config, columns, rows = read_table(result["table"])
    assert columns == KAPPA_COLUMNS
    assert len(rows) == 2
    # Identical coarse and fine levels: the coarse space solves exactly.
    assert float(rows[0][4]) == pytest.approx(1.0, abs=1e-8)
    assert int(rows[1][8]) == 1
    assert result["fits"]["polylog_ratio"] == {"0": 1.0}


def test_kappa_fits():
    rows = [
        [1.0, 0.5, 3, 10.0, 2.0, 0.5, 1.0, 0, 1, 3],
        [1.0, 0.25, 7, 20.0, 3.0, 0.5, 1.5, 0, 2, 5],
    ]
    fits = kappa_fits(rows)
    assert fits["unprec_slope"] == pytest.approx(-1.0)
    assert fits["polylog_ratio"]["0"] > 1.0
    assert fits["checks"] == {
        "unprec_slope": True,
        "prec_below_unprec": {"0": True},
        "polylog_ratio": {"0": True},
    }
    # A flat preconditioned condition number spreads once divided by (1 + log(H/h))^2.
    flat = [r[:4] + [2.0] + r[5:] for r in rows]
    flat.append([1.0, 1.0 / 16.0, 97, 70.0, 2.0, 0.5, 1.0, 0, 4, 9])
    fits = kappa_fits(flat)
    spread = (1.0 + np.log(16.0)) ** 2 / (1.0 + np.log(2.0)) ** 2
    assert fits["polylog_ratio"]["0"] == pytest.approx(spread)
    assert fits["checks"]["polylog_ratio"] == {"0": False}
    assert fits["polylog_max"]["0"] == pytest.approx(2.0 / (1.0 + np.log(2.0)) ** 2)


def test_sweep_rejects_empty_levels(tmp_path):
    with pytest.raises(ConfigError):
        cmd_cond(_config("cond", tmp_path, geometry="bowtie", levels=2, coarse_levels=[0]))


def test_experiment2(tmp_path):
    result = cmd_experiment2(_config("exp2", tmp_path, levels=2))
    _, _, rows = read_table(result["table"])
    assert sorted(set(int(r[7]) for r in rows)) == [0, 1]
    for name in ("exp2.csv", "exp2.svg", "exp2_summary.json"):
        assert os.path.exists(str(tmp_path / name))
    with pytest.raises(ConfigError):
        cmd_experiment2(_config("exp2", tmp_path, geometry="bowtie"))
    with pytest.raises(ConfigError):
        cmd_experiment3(_config("exp3", tmp_path, geometry="threefold"))


def test_experiment1(tmp_path):
    config = _config("exp1", tmp_path, geometry="plus:n=2", levels=3, grid=GridSpec(points=21))
    result = cmd_experiment1(config)
    _, columns, rows = read_table(result["table"])
    assert columns == ["h", "error_uniform", "error_graded", "error_naive_uniform", "error_naive_graded"]
    errors = [float(r[1]) for r in rows]
    assert errors[-1] < errors[0]
    assert errors[-1] < float(rows[-1][3])
    assert set(result["eoc"]) == {"eoc_uniform", "eoc_graded", "eoc_naive_uniform", "eoc_naive_graded"}
    with pytest.raises(ConfigError):
        cmd_experiment1(_config("exp1", tmp_path, geometry="threefold"))


def _scaled_kappas(rows, coarse):
    """``kappa_prec / (1 + log(H/h))^2`` of one coarse level, ordered by ``H/h``."""
    sweep = sorted(
        (float(r[0]) / float(r[1]), float(r[4])) for r in rows if int(r[7]) == coarse
    )
    return [k / (1.0 + np.log(ratio)) ** 2 for ratio, k in sweep if ratio > 1.5]


@slow
def test_experiment1_orders(tmp_path):
    eoc = cmd_experiment1(_config("exp1", tmp_path))["eoc"]
    assert 0.8 <= eoc["eoc_uniform"] <= 1.2
    assert 1.6 <= eoc["eoc_graded"] <= 2.3


@slow
def test_experiment2_growth(tmp_path):
    result = cmd_experiment2(_config("exp2", tmp_path))
    checks = result["fits"]["checks"]
    assert checks["unprec_slope"]
    assert checks["prec_below_unprec"] == {"0": True, "1": True}
    _, _, rows = read_table(result["table"])
    for coarse in (0, 1):
        scaled = _scaled_kappas(rows, coarse)
        assert len(scaled) == 4
        # Nearly flat in 2D: bounded by its H/h = 2 multiple of (1 + log(H/h))^2.
        assert max(scaled) <= scaled[0] * (1.0 + 1e-9)


@slow
def test_experiment3_growth(tmp_path):
    result = cmd_experiment3(_config("exp3", tmp_path))
    checks = result["fits"]["checks"]
    assert checks["prec_below_unprec"] == {"1": True}
    assert checks["polylog_ratio"] == {"1": True}
    _, _, rows = read_table(result["table"])
    assert max(int(r[2]) for r in rows) <= 4000
    assert len(_scaled_kappas(rows, 1)) == 4
