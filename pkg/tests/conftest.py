"""Shared fixtures: default physical parameters and a seeded generator."""
import numpy as np
import pytest

from momentflow.states import SystemParams


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)
