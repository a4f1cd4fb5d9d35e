import numpy as np
import pytest

from phasetomo.states import make_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, d):
    """Random convention-fixed state, rejecting near-zero amplitude sums."""
    while True:
        raw = rng.normal(size=d) + 1j * rng.normal(size=d)
        if abs(raw.sum()) / np.linalg.norm(raw) > 0.05:
            return make_state(raw)
