from __future__ import annotations

import numpy as np
import pytest

from lipsynckit.fixtures import sinusoidal_track


@pytest.fixture(scope="session")
def sine_track():
    return sinusoidal_track()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
