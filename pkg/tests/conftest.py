import numpy as np
import pytest

from leafbench.image import make_rng
from leafbench.severity import load_severity_table
from leafbench.synth import probe_set


@pytest.fixture(scope="session")
def table():
    return load_severity_table()


@pytest.fixture(scope="session")
def probes():
    """The frozen 20-image 64x64 probe set used by invariant checks."""
    return probe_set(20, 64, seed=0)


@pytest.fixture()
def rng():
    return make_rng(0xBEEF)


def random_image(seed: int, h: int = 16, w: int = 16) -> np.ndarray:
    return make_rng(seed).random((h, w, 3)).astype(np.float32)
