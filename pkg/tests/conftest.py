# -*- coding: utf-8 -*-
import os

import numpy as np
import pytest

from screenbem.geometries import builtin
from screenbem.mesh import SurfaceMesh, refine_levels

_SLOW = bool(os.environ.get("SCREENBEM_SLOW_TESTS", False))

slow = pytest.mark.skipif(
    condition=not _SLOW, reason="Set SCREENBEM_SLOW_TESTS=1 to run the long sweeps."
)


@pytest.fixture
def plus():
    return builtin("plus")


@pytest.fixture
def plus_fine():
    """Plus screen refined twice, with the composed parent map."""
    return refine_levels(builtin("plus"), 2)


@pytest.fixture
def slit():
    return builtin("slit:n=2")


@pytest.fixture
def square():
    return builtin("square")


@pytest.fixture
def bowtie():
    return builtin("bowtie")


@pytest.fixture
def single_triangle():
    return SurfaceMesh([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0, 1, 2]])


@pytest.fixture
def rng():
    return np.random.RandomState(1234)
