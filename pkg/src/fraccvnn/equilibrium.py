"""Steady states: residuals, Newton solves on the real-split system, ring scalar reduction."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from fraccvnn.activation import ActivationSpec, act_real_jacobian
from fraccvnn.model import NetworkSpec, merge_state, real_split, split_state

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100
DEDUP_RADIUS = 1e-8
MAX_HALVINGS = 20


def residual(spec: NetworkSpec, z: np.ndarray) -> float:
    """Max-norm of ``-A z + T g(z) + I``, computed in complex arithmetic."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (spec.n,):
        raise ValueError(f"state must have length {spec.n}")
    return float(np.max(np.abs(spec.field(z))))


@dataclass(frozen=True, eq=False)
class EquilibriumState:
    z: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int = 0

    @classmethod
    def build(
        cls, spec: NetworkSpec, z: np.ndarray, converged: bool, iterations: int = 0
    ) -> "EquilibriumState":
        z = np.array(z, dtype=complex)
        z.setflags(write=False)
        return cls(z, residual(spec, z), converged, iterations)

    @classmethod
    def exact(cls, spec: NetworkSpec, z: Sequence[complex]) -> "EquilibriumState":
        """Wrap a known steady state; ``converged`` reflects the recomputed residual."""
        z = np.array(z, dtype=complex)
        res = residual(spec, z)
        z.setflags(write=False)
        return cls(z, res, res <= DEFAULT_TOL, 0)


def _split_jacobian(acts: Sequence[ActivationSpec], T_tilde, A_tilde, u) -> np.ndarray:
    n = len(acts)
    z = merge_state(u)
    dg = np.zeros((2 * n, 2 * n))
    for k, (act, zk) in enumerate(zip(acts, z)):
        jac = act_real_jacobian(act, zk)
        dg[k, k] = jac.dRdx
        dg[k, n + k] = jac.dRdy
        dg[n + k, k] = jac.dIdx
        dg[n + k, n + k] = jac.dIdy
    return -A_tilde + T_tilde @ dg


def _newton(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    measure: Callable[[np.ndarray], float],
    u0: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, bool, int]:
    u = np.array(u0, dtype=float)
    res = measure(u)
    for it in range(max_iter):
        if res <= tol:
            return u, True, it
        F = fun(u)
        J = jac(u)
        try:
            step = np.linalg.solve(J, -F)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
        merit = np.linalg.norm(F)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + t * step
            F_trial = fun(trial)
            if np.all(np.isfinite(F_trial)) and np.linalg.norm(F_trial) < merit:
                break
            t *= 0.5
        else:
            logger.debug("newton stalled at iteration %d, residual %.3e", it, res)
            return u, False, it
        u = trial
        res = measure(u)
    return u, res <= tol, max_iter


def find_equilibrium(
    spec: NetworkSpec,
    guess: Sequence[complex],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EquilibriumState:
    """Newton iteration on the 2n real-split residual from ``guess``.

    The returned state is the last iterate whether or not it converged.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    sys = real_split(spec)
    acts = spec.activations
    u, ok, iters = _newton(
        sys.field,
        lambda u: _split_jacobian(acts, sys.T_tilde, sys.A_tilde, u),
        lambda u: residual(spec, merge_state(u)),
        split_state(np.asarray(guess, dtype=complex)),
        tol,
        max_iter,
    )
    return EquilibriumState.build(spec, merge_state(u), ok, iters)


def scalar_residual(a0: float, S: complex, act: ActivationSpec, z: complex) -> float:
    return abs(-a0 * z + S * act(z))


def equal_component_equilibria(
    a0: float,
    S: complex,
    act: ActivationSpec,
    seeds: Iterable[complex],
    n: int = 1,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[EquilibriumState]:
    """Roots of ``-a0 z + S g(z) = 0`` lifted to ``(z, ..., z)``.

    ``S`` is the row sum of the circulant weights.  The origin is always
    included; non-convergent seeds are dropped, converged ones are polished
    until the residual stops falling, and roots closer than
    :data:`DEDUP_RADIUS` (max-norm) are merged.
    """
    if a0 <= 0:
        raise ValueError("a0 must be positive")
    S = complex(S)
    w = np.array([[S.real, -S.imag], [S.imag, S.real]])

    def fun(u):
        z = complex(u[0], u[1])
        r = -a0 * z + S * act(z)
        return np.array([r.real, r.imag])

    def jac(u):
        return -a0 * np.eye(2) + w @ act_real_jacobian(act, complex(u[0], u[1])).as_matrix()

    def measure(u):
        return scalar_residual(a0, S, act, complex(u[0], u[1]))

    roots: list[tuple[complex, int]] = [(0j, 0)]
    for seed in seeds:
        seed = complex(seed)
        u, ok, iters = _newton(fun, jac, measure, np.array([seed.real, seed.imag]), tol, max_iter)
        if not ok:
            continue
        # Keep iterating past tol: near a multiple root Newton is only linear and
        # stops well outside the dedup radius.  tol=0 runs until the merit stalls.
        polished, _, extra = _newton(fun, jac, measure, u, 0.0, max_iter)
        if measure(polished) <= measure(u):
            u, iters = polished, iters + extra
        z = complex(u[0], u[1])
        if any(max(abs(z.real - r.real), abs(z.imag - r.imag)) < DEDUP_RADIUS for r, _ in roots):
            continue
        roots.append((z, iters))
    out = []
    for z, iters in roots:
        res = scalar_residual(a0, S, act, z)
        vec = np.full(n, z, dtype=complex)
        vec.setflags(write=False)
        out.append(EquilibriumState(vec, res, res <= tol, iters))
    return out
