import numpy as np
import pytest

from cosetcap import PauliChannel


def random_channels(count, seed=0, alpha=(2.0, 1.0, 1.0, 1.0)):
    """Deterministic batch of valid Pauli channels, identity-weighted."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.dirichlet(alpha)
        out.append(PauliChannel(*(v / v.sum())))
    return out


@pytest.fixture
def channels25():
    return random_channels(25, seed=20240811)
