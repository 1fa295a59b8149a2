# -*- coding: utf-8 -*-
"""
Configuration objects for quadrature and experiment runs.

Every artifact written by the command line embeds the resolved
:class:`ExperimentConfig` as JSON so that a run can be reproduced from its
output alone.

"""
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

from screenbem.exc import ConfigError

logger = logging.getLogger(__name__)

GEOMETRIES_2D = ("plus", "threefold", "slit")
GEOMETRIES_3D = ("bowtie", "square", "octahedron")
# Commands sweeping several coarse levels; the others use the single coarse_level.
SWEEP_COMMANDS = ("cond", "exp2", "exp3")


@dataclass(frozen=True)
class QuadratureConfig:
    """Orders and thresholds of the facet-pair quadrature.

    Attributes:
        far_order (int): Gauss points per direction for well separated pairs.
        singular_order (int): Gauss points per direction for the transformed
            rules of touching pairs and for near pairs.
        near_threshold (float): Pairs whose separation is below this multiple
            of the larger facet diameter count as near.

    """

    far_order: int = 4
    singular_order: int = 8
    near_threshold: float = 2.0

    def __post_init__(self):
        if int(self.far_order) < 1 or int(self.singular_order) < 1:
            raise ConfigError(
                "Quadrature orders must be >= 1, got far={0}, singular={1}.".format(
                    self.far_order, self.singular_order
                )
            )
        if not self.near_threshold > 0:
            raise ConfigError(
                "near_threshold must be positive, got {0}.".format(self.near_threshold)
            )


GRID_POINTS = {2: 100, 3: 25}


@dataclass(frozen=True)
class GridSpec:
    """Cartesian evaluation grid ``[-extent, extent]^d`` with ``points`` per axis.

    ``mask`` is the exclusion distance from the screen; ``None`` means half
    the mesh size. ``points=None`` picks 100 per axis in 2D and 25 in 3D.
    """

    extent: float = 2.0
    points: Optional[int] = None
    mask: Optional[float] = None

    def __post_init__(self):
        if (self.points is not None and self.points < 2) or not self.extent > 0:
            raise ConfigError("Grid needs extent > 0 and at least 2 points per axis.")

    def points_for(self, dim):
        return GRID_POINTS[dim] if self.points is None else int(self.points)


@dataclass
class ExperimentConfig:
    """Resolved parameters of one command line run."""

    command: str = "solve"
    geometry: str = "plus"
    levels: int = 3
    coarse_levels: List[int] = field(default_factory=lambda: [0])
    graded: Optional[float] = None
    g: List[float] = field(default_factory=lambda: [1.0, 2.0])
    grid: Optional[GridSpec] = None
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tol: float = 1e-8
    maxit: int = 1000
    precondition: bool = True
    coarse_level: int = 0
    out: str = "."
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.quadrature, dict):
            self.quadrature = QuadratureConfig(**self.quadrature)
        if isinstance(self.grid, dict):
            self.grid = GridSpec(**self.grid)
        self.coarse_levels = [int(c) for c in self.coarse_levels]
        self.g = [float(v) for v in self.g]
        self.validate()

    def validate(self):
        if self.levels < 1:
            raise ConfigError("levels must be >= 1, got {0}.".format(self.levels))
        if any(c < 0 for c in self.coarse_levels):
            raise ConfigError("coarse levels must be >= 0.")
        if self.graded is not None and self.graded < 1:
            raise ConfigError(
                "Grading exponent must be >= 1, got {0}.".format(self.graded)
            )
        if not self.tol > 0:
            raise ConfigError("tol must be positive, got {0}.".format(self.tol))
        if self.threads < 1:
            raise ConfigError("threads must be >= 1, got {0}.".format(self.threads))

    @property
    def dim(self):
        name = self.geometry.split(":")[0]
        if name in GEOMETRIES_3D:
            return 3
        if name in GEOMETRIES_2D:
            return 2
        return None

    @classmethod
    def for_command(cls, command, **overrides):
        """Defaults of a command, updated with ``overrides``.

        Args:
            command (str): One of ``solve``, ``inflate``, ``cond``, ``exp1``,
                ``exp2``, ``exp3``, ``eval``.

        Returns:
            A validated :class:`ExperimentConfig`.

        """
        defaults = {
            "solve": dict(geometry="plus", levels=3, g=[1.0, 2.0]),
            "inflate": dict(geometry="plus", levels=1),
            "eval": dict(geometry="plus", levels=3, grid=GridSpec()),
            "cond": dict(geometry="threefold", levels=4, coarse_levels=[0]),
            "exp1": dict(
                geometry="plus:n=5", levels=5, graded=2.0, grid=GridSpec(), g=[]
            ),
            "exp2": dict(geometry="threefold", levels=5, coarse_levels=[0, 1]),
            "exp3": dict(geometry="bowtie", levels=5, coarse_levels=[1]),
        }
        if command not in defaults:
            raise ConfigError("Unknown command {0!r}.".format(command))
        params = dict(defaults[command])
        params.update({k: v for k, v in overrides.items() if v is not None})
        params["command"] = command
        return cls(**params)

    def updated(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        """Fields as plain data, without the coarse level setting the command ignores."""
        d = asdict(self)
        d.pop("coarse_level" if self.command in SWEEP_COMMANDS else "coarse_levels")
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError("Unknown config keys: {0}".format(sorted(unknown)))
        return cls(**d)

    @classmethod
    def from_json_file(cls, path):
        try:
            with open(path, "r") as f:
                d = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError("Cannot read config {0}: {1}".format(path, e))
        logger.debug("Loaded config from {0}".format(path))
        return cls.from_dict(d)
