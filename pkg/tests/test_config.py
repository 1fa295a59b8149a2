#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for `screenbem.config` module."""

import json

import pytest

from screenbem.config import ExperimentConfig, GridSpec, QuadratureConfig
from screenbem.exc import ConfigError, ScreenBemValidationError


def test_defaults():
    config = ExperimentConfig()
    assert config.quadrature == QuadratureConfig(4, 8, 2.0)
    assert config.dim == 2
    assert config.tol == 1e-8
    assert ExperimentConfig(geometry="bowtie:size=2").dim == 3
    assert ExperimentConfig(geometry="meshes/foo.msh").dim is None


@pytest.mark.parametrize(
    "command,geometry,levels",
    [
        ("exp1", "plus:n=5", 5),
        ("exp2", "threefold", 5),
        ("exp3", "bowtie", 5),
        ("inflate", "plus", 1),
    ],
)
def test_command_defaults(command, geometry, levels):
    config = ExperimentConfig.for_command(command)
    assert config.command == command
    assert config.geometry == geometry
    assert config.levels == levels


def test_command_overrides():
    config = ExperimentConfig.for_command("exp2", levels=3, graded=None)
    assert config.levels == 3
    assert config.coarse_levels == [0, 1]
    assert ExperimentConfig.for_command("exp1").graded == 2.0
    # Level 0 of the bow-tie carries no jump unknowns.
    assert ExperimentConfig.for_command("exp3").coarse_levels == [1]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(levels=0),
        dict(coarse_levels=[-1]),
        dict(graded=0.5),
        dict(tol=0.0),
        dict(threads=0),
        dict(quadrature=dict(far_order=0)),
        dict(quadrature=dict(near_threshold=-1.0)),
        dict(grid=dict(points=1)),
        dict(grid=dict(extent=0.0)),
    ],
)
def test_invalid_configs(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_config_error_is_a_validation_error():
    with pytest.raises(ScreenBemValidationError) as info:
        ExperimentConfig.for_command("nope")
    assert info.value.exit_code == 2


def test_json_round_trip(tmp_path):
    config = ExperimentConfig.for_command("exp1", levels=3)
    path = tmp_path / "config.json"
    path.write_text(config.to_json())
    loaded = ExperimentConfig.from_json_file(str(path))
    assert loaded == config
    assert isinstance(loaded.grid, GridSpec)
    assert json.loads(config.to_json())["quadrature"]["far_order"] == 4


def test_bad_json_files(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json_file(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json_file(str(broken))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"levels": 2, "colour": "red"})


def test_grid_points():
    assert GridSpec().points_for(2) == 100
    assert GridSpec().points_for(3) == 25
    assert GridSpec(points=7).points_for(3) == 7


def test_header_keeps_the_relevant_coarse_setting():
    sweep = ExperimentConfig.for_command("exp3").to_dict()
    assert sweep["coarse_levels"] == [1]
    assert "coarse_level" not in sweep
    solve = ExperimentConfig.for_command("solve", coarse_level=1).to_dict()
    assert solve["coarse_level"] == 1
    assert "coarse_levels" not in solve
    expected = ExperimentConfig.for_command("solve", coarse_level=1)
    assert ExperimentConfig.from_dict(solve) == expected
