import numpy as np
import pytest

from isoquad import Quadrilateral
from isoquad.geometry import corner_sigmas

REFERENCE_STAR = Quadrilateral(-0.2, 1.1, 1.2, 1.3)
SECOND_STAR = Quadrilateral(0.2, 1.1, 1.2, 1.3)


def sample_valid_quads(rng, n, margin=0.2):
    """Random family members with a comfortable orientation margin; the
    ranges keep all discrete spectra real (checked over 400 draws)."""
    out = []
    while len(out) < n:
        a = rng.uniform(-0.35, 0.35)
        b = rng.uniform(0.7, 1.5)
        g = rng.uniform(0.65, 1.55)
        d = rng.uniform(0.7, 1.5)
        if min(corner_sigmas(a, b, g, d)) > margin:
            out.append(Quadrilateral(a, b, g, d))
    return out


@pytest.fixture
def star():
    return REFERENCE_STAR


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture
def random_quads(rng):
    return sample_valid_quads(rng, 50)
