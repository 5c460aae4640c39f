import numpy as np
import pytest
from hypothesis import settings

from fraccvnn import catalog
from fraccvnn.activation import GeorgiouActivation, LinearActivation
from fraccvnn.model import NetworkSpec

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def hub_spec():
    return catalog.ex_hub()


@pytest.fixture
def ring_spec():
    return catalog.ex_ring()


def random_complex(rng, *shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_network(rng, n, linear=False, inputs=False):
    """Random valid network; with Georgiou units and no inputs the origin is a steady state."""
    a = rng.uniform(0.5, 3.0, n)
    T = random_complex(rng, n, n)
    if linear:
        acts = [LinearActivation(complex(w)) for w in random_complex(rng, n, scale=0.5)]
    else:
        acts = [GeorgiouActivation(float(c), float(d)) for c, d in zip(rng.uniform(0.5, 2, n), rng.uniform(0.1, 2, n))]
    I = random_complex(rng, n) if inputs else None
    return NetworkSpec(n, a, T, acts, I)


def scalar_decay(a=1.0, gain=0.0):
    """n = 1, linear unit, ``D^q z = -a z + gain z``."""
    return NetworkSpec(1, np.array([a]), np.array([[gain]], dtype=complex), [LinearActivation(1.0)])
