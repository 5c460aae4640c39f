"""Ring networks: circulant spectra, the sufficient stability test, and (theta1, theta2) scans."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from fraccvnn.equilibrium import EquilibriumState
from fraccvnn.errors import DegenerateSpectrumError, NonUniformCoefficientsError
from fraccvnn.model import NetworkSpec, has_ring_pattern
from fraccvnn.spectral import ZERO_EIG_REL, complex_derivatives, principal_args

UNIFORM_TOL = 1e-10


@dataclass(frozen=True)
class RingCoefficients:
    alpha: complex
    beta: complex
    gamma: complex
    n: int


def ring_coefficients(spec: NetworkSpec, eq: EquilibriumState) -> RingCoefficients:
    spec.require_valid()
    if not has_ring_pattern(spec.T):
        raise NonUniformCoefficientsError("interconnection matrix does not have the ring pattern")
    n = spec.n
    d = complex_derivatives(spec, eq.z)
    idx = np.arange(n)
    fwd, bwd = (idx + 1) % n, (idx - 1) % n
    alphas = -spec.a + np.diag(spec.T) * d
    betas = spec.T[idx, fwd] * d[fwd]
    gammas = spec.T[idx, bwd] * d[bwd]
    for name, vals in (("alpha", alphas), ("beta", betas), ("gamma", gammas)):
        spread = float(np.max(np.abs(vals - vals[0])))
        if spread > UNIFORM_TOL:
            raise NonUniformCoefficientsError(
                f"{name} not uniform around the ring (spread {spread:.3e}); "
                "use the general spectral analysis"
            )
    return RingCoefficients(complex(alphas[0]), complex(betas[0]), complex(gammas[0]), n)


def _roots_of_unity(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def circulant_eigenvalues(c: RingCoefficients) -> np.ndarray:
    """``alpha + beta w^p + gamma conj(w)^p`` for ``p = 0..n-1``, ``w = exp(2 pi i / n)``."""
    if c.n < 3:
        raise ValueError("a ring needs n >= 3")
    w = _roots_of_unity(c.n)
    return c.alpha + c.beta * w + c.gamma * np.conj(w)


def circulant_matrix(c: RingCoefficients) -> np.ndarray:
    """Dense ``circ(alpha, beta, 0, ..., 0, gamma)``."""
    first = np.zeros(c.n, dtype=complex)
    first[0], first[1], first[-1] = c.alpha, c.beta, c.gamma
    return np.array([np.roll(first, k) for k in range(c.n)])


def ring_sufficient_stable(c: RingCoefficients) -> bool:
    # equality is deliberately not sufficient; the critical order decides there
    return c.alpha.real + abs(c.beta + c.gamma.conjugate()) < 0.0


def ring_critical_order(c: RingCoefficients) -> float:
    lam = circulant_eigenvalues(c)
    scale = abs(c.alpha) + abs(c.beta) + abs(c.gamma)
    if np.any(np.abs(lam) <= ZERO_EIG_REL * scale):
        raise DegenerateSpectrumError("a circulant eigenvalue vanishes")
    return float(2.0 / math.pi * np.min(np.abs(principal_args(lam))))


def parametric_eigs(theta1: float, theta2: float, n: int) -> np.ndarray:
    """Spectrum of ``circ(-1, e^{i theta1}, 0, ..., 0, e^{i theta2})`` in closed form."""
    if n < 3:
        raise ValueError("a ring needs n >= 3")
    p = np.arange(n)
    return -1.0 + 2.0 * np.cos(0.5 * (theta1 - theta2) + 2.0 * np.pi * p / n) * np.exp(
        0.5j * (theta1 + theta2)
    )


def parametric_coefficients(theta1: float, theta2: float, n: int) -> RingCoefficients:
    return RingCoefficients(-1.0 + 0j, complex(np.exp(1j * theta1)), complex(np.exp(1j * theta2)), n)


def grid_centres(resolution: int) -> np.ndarray:
    return -np.pi + (np.arange(resolution) + 0.5) * (2.0 * np.pi / resolution)


@dataclass(frozen=True, eq=False)
class DensityGrid:
    n_neurons: int
    resolution: int
    theta: np.ndarray
    values: np.ndarray  # values[i, j] is q* at (theta1 = theta[i], theta2 = theta[j])
    degenerate: np.ndarray

    @property
    def stable_all_q(self) -> np.ndarray:
        return self.values >= 1.0

    def rows(self):
        """Row-major ``(theta1, theta2, q_star, stable_all_q)`` records."""
        for i, t1 in enumerate(self.theta):
            for j, t2 in enumerate(self.theta):
                yield float(t1), float(t2), float(self.values[i, j]), bool(self.values[i, j] >= 1.0)


def _scan_rows(n: int, resolution: int, rows: range) -> tuple[np.ndarray, np.ndarray]:
    # Angles come from integer cell indices: theta1 + theta2 = (i + j + 1 - R) 2pi/R and
    # (theta1 - theta2)/2 = (i - j) pi/R, so the anti-diagonal gets an exactly real spectrum.
    R = resolution
    i = np.asarray(rows)[:, None, None]
    j = np.arange(R)[None, :, None]
    p = np.arange(n)[None, None, :]
    total = (i + j + 1 - R) * (2.0 * np.pi / R)
    half_diff = (i - j) * (np.pi / R)
    lam = -1.0 + 2.0 * np.cos(half_diff + 2.0 * np.pi * p / n) * np.exp(0.5j * total)
    zero = np.any(np.abs(lam) <= ZERO_EIG_REL * 3.0, axis=2)
    args = np.abs(np.arctan2(lam.imag, lam.real))
    q = 2.0 / np.pi * np.min(args, axis=2)
    q[zero] = 0.0
    return q, zero


def density_scan(n: int, resolution: int = 256, threads: int = 1) -> DensityGrid:
    """Critical order of ``circ(-1, e^{i theta1}, 0, ..., 0, e^{i theta2})`` on a cell-centred grid.

    Rows are independent; ``threads > 1`` splits them across workers and
    the merge keeps row-major order, so output does not depend on scheduling.
    """
    if n < 3:
        raise ValueError("a ring needs n >= 3")
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    values = np.empty((resolution, resolution))
    degenerate = np.empty((resolution, resolution), dtype=bool)
    # bound the (rows x R x n) temporary to roughly 4M complex entries
    chunk = max(1, min(resolution, 4_000_000 // (resolution * n)))
    blocks = [range(s, min(s + chunk, resolution)) for s in range(0, resolution, chunk)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _scan_rows(n, resolution, r), blocks))
    else:
        results = [_scan_rows(n, resolution, r) for r in blocks]
    for block, (q, zero) in zip(blocks, results):
        values[block.start : block.stop] = q
        degenerate[block.start : block.stop] = zero
    return DensityGrid(n, resolution, grid_centres(resolution), values, degenerate)
