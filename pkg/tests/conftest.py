# tests/conftest.py

import numpy as np
import pytest

from antenna import ElementModel, GuideGeometry
from config import create_default_settings, merge_settings, resolve_experiment
from link import LinkConfig


@pytest.fixture
def geometry():
    return GuideGeometry()


@pytest.fixture
def model():
    # Code-1 fit of the 1.407 mm row: lobes near -48 / +23 deg
    return ElementModel(off_state_phase_rad=-1.071683)


@pytest.fixture
def plain_model():
    # No leakage, no loading phase: the bare array-factor model
    return ElementModel(off_leakage_rho=0.0, off_state_phase_rad=0.0)


@pytest.fixture
def link_config():
    return LinkConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_payload(rng):
    return rng.bytes(600)


@pytest.fixture
def make_experiment(tmp_path):
    """Resolve an experiment from the defaults merged with `overrides`, writing to tmp_path."""

    def build(overrides=None, out_dir=None, seed=None):
        settings = merge_settings(create_default_settings(), overrides or {})
        return resolve_experiment(settings, seed=seed, out_dir=str(out_dir or tmp_path / "out"))

    return build
