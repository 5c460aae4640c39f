"""The worked example networks: a 3-neuron hub and a 3-neuron ring."""

from __future__ import annotations

import numpy as np

from fraccvnn.activation import GeorgiouActivation
from fraccvnn.model import NetworkSpec

EX_HUB_Q_STAR = 0.844976


def ex_hub() -> NetworkSpec:
    T = np.array(
        [
            [2 - 5j, -2 - 1j, 2 + 1j],
            [3, 1 + 1j, 0],
            [1 - 1j, 0, 1 + 1j],
        ]
    )
    return NetworkSpec(3, [1.0, 2.0, 2.0], T, (GeorgiouActivation(1.0, 1.0),) * 3)


def ring_weights(n: int, t0: complex, t1: complex, t2: complex) -> np.ndarray:
    """Ring matrix with self weight ``t0``, forward ``t1`` (j -> j+1) and backward ``t2``."""
    T = np.zeros((n, n), dtype=complex)
    for j in range(n):
        T[j, j] = t0
        T[j, (j + 1) % n] = t1
        T[j, (j - 1) % n] = t2
    return T


def ex_ring() -> NetworkSpec:
    T = ring_weights(3, 1 - 2j, 1 + 1j, 1j)
    return NetworkSpec(3, [1.0] * 3, T, (GeorgiouActivation(1.0, 1.0),) * 3)
