import numpy as np
import pytest

from gridpilot.fixtures import generate_fixture
from gridpilot.imagery import PlanarImage
from gridpilot.pilot import PilotConfig
from gridpilot.pipeline import make_stego


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_fixture():
    """512x512 RGB test image, integer samples."""
    return generate_fixture(512, 512, seed=9)


@pytest.fixture(scope="session")
def small_pilot_cfg():
    return PilotConfig(gamma=50)


@pytest.fixture(scope="session")
def small_stego(small_fixture, small_pilot_cfg):
    """Pilot-carrying RGB image (gamma=50) plus its source."""
    stego, quality = make_stego(small_fixture, small_pilot_cfg)
    return stego


def gray_image(width, height, value=128.0, colorspace="RGB"):
    return PlanarImage(np.full((3, height, width), value), colorspace)
