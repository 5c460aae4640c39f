"""Caputo-derivative trajectories via the fractional Adams-Bashforth-Moulton scheme.

One predictor-corrector pass per step (PECE).  The history sums are the
O(N^2) hot loop.  The compiled ``_abm_kernel`` extension runs them as a
BLAS product and, for the complex form, keeps the whole step loop out of
the interpreter; ``_abm_py`` is the numpy twin with the same contract.
The extension is used when importable unless ``FRACCVNN_PURE_PYTHON=1``.
"""

from __future__ import annotations

import enum
import logging
import math
import os
from dataclasses import dataclass
from types import ModuleType
from typing import Literal

import numpy as np

from fraccvnn import _abm_py
from fraccvnn.activation import GeorgiouActivation, LinearActivation
from fraccvnn.model import NetworkSpec, merge_state, real_split, split_state

logger = logging.getLogger(__name__)

KERNELS: dict[str, ModuleType] = {"python": _abm_py}
try:
    from fraccvnn import _abm_kernel

    KERNELS["cython"] = _abm_kernel
except ImportError:  # extension not built
    pass

if "cython" in KERNELS and os.environ.get("FRACCVNN_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"


@dataclass(frozen=True)
class SimConfig:
    q: float
    h: float
    t_end: float
    memory_window: int | None = None  # None: full memory; L: keep the L most recent terms

    def __post_init__(self) -> None:
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"q must lie in (0, 1], got {self.q}")
        if not (self.h > 0 and self.t_end > 0):
            raise ValueError("h and t_end must be positive")
        if self.h > self.t_end:
            raise ValueError("h must not exceed t_end")
        if self.memory_window is not None and self.memory_window < 1:
            raise ValueError("memory window must be >= 1")

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.h))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n), complex
    diverged: bool = False

    def __post_init__(self) -> None:
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")


# ---------------------------------------------------------------------------
# quadrature weights


def _binomial_tail(p: float, x: np.ndarray, start: int) -> np.ndarray:
    """``(1 + x)^p - sum_{i < start} C(p, i) x^i`` without cancellation for small ``|x|``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.1
    xs = x[small]
    coef = 1.0
    for i in range(start):
        coef *= (p - i) / (i + 1)
    term = coef * xs**start
    acc = term.copy()
    for i in range(start, start + 40):
        term = term * (p - i) / (i + 1) * xs
        acc += term
        if np.all(np.abs(term) <= 1e-18 * np.abs(acc)):
            break
    out[small] = acc
    xl = x[~small]
    direct = (1.0 + xl) ** p
    coef = 1.0
    for i in range(start):
        direct -= coef * xl**i
        coef *= (p - i) / (i + 1)
    out[~small] = direct
    return out


def abm_weights(q: float, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Predictor weights ``b[m]``, corrector weights ``c[m]`` and first-node weights ``a0[k]``.

    ``b[m] = (m+1)^q - m^q``, ``c[m] = (m+2)^{q+1} + m^{q+1} - 2 (m+1)^{q+1}``,
    ``a0[k] = k^{q+1} - (k - q)(k+1)^q``, each evaluated as a scaled binomial
    tail so that large ``m``/``k`` do not lose digits to cancellation.
    """
    m = np.arange(N + 1, dtype=float)
    b = np.empty(N + 1)
    b[0] = 1.0
    b[1:] = m[1:] ** q * _binomial_tail(q, 1.0 / m[1:], 1)
    v = 1.0 / (m + 1.0)
    p = q + 1.0
    c = (m + 1.0) ** p * (_binomial_tail(p, v, 2) + _binomial_tail(p, -v, 2))
    a0 = (m + 1.0) ** p * _binomial_tail(p, -v, 2)
    return b, c, a0


# ---------------------------------------------------------------------------
# integrator


def _activation_table(spec: NetworkSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kind = np.empty(spec.n, dtype=np.int_)
    p1 = np.empty(spec.n)
    p2 = np.empty(spec.n)
    for k, act in enumerate(spec.activations):
        if isinstance(act, GeorgiouActivation):
            kind[k], p1[k], p2[k] = 0, act.c1, act.c2
        elif isinstance(act, LinearActivation):
            w = complex(act.gain)
            kind[k], p1[k], p2[k] = 1, w.real, w.imag
        else:
            raise TypeError(f"unsupported activation {act!r}")
    return kind, p1, p2


def reversed_weights(q: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """``W[:, N - m] = (b_m, c_m)`` as one contiguous block, plus ``a0``."""
    b, c, a0 = abm_weights(q, N)
    return np.ascontiguousarray(np.stack([b[::-1], c[::-1]])), a0


def abm_simulate(
    spec: NetworkSpec,
    z0,
    cfg: SimConfig,
    form: Literal["complex", "split"] = "complex",
    backend: str | None = None,
) -> Trajectory:
    """Integrate ``D^q z = -A z + T g(z) + I`` from ``z0`` on ``t_k = k h``.

    ``form="split"`` advances the equivalent 2n real system instead; both
    forms share weights and history kernel.  A non-finite state stops the
    run and marks the trajectory as diverged.
    """
    spec.require_valid()
    kernel = KERNELS[backend or BACKEND]
    z0 = np.asarray(z0, dtype=complex)
    if z0.shape != (spec.n,):
        raise ValueError(f"z0 must have length {spec.n}")
    q, h, N = cfg.q, cfg.h, cfg.steps
    W, a0 = reversed_weights(q, N)
    c_pred = h**q / math.gamma(q + 1.0)
    c_corr = h**q / math.gamma(q + 2.0)
    L = cfg.memory_window
    window = 0 if L is None else L

    if form == "complex":
        # interleaved (re, im) float rows
        Y = np.empty((N + 1, spec.n), dtype=complex)
        Y[0] = z0
        Yv = Y.view(float)
        F = np.empty_like(Yv)
        kind, p1, p2 = _activation_table(spec)
        T = np.ascontiguousarray(spec.T)
        last = kernel.integrate_network(
            Yv, F, W, a0, c_pred, c_corr, window,
            np.ascontiguousarray(spec.a, dtype=float),
            np.ascontiguousarray(T.real), np.ascontiguousarray(T.imag),
            np.ascontiguousarray(spec.inputs.real), np.ascontiguousarray(spec.inputs.imag),
            kind, p1, p2,
        )
        states = Y[: last + 1]
    elif form == "split":
        split_field = real_split(spec).field

        def rhs(u):
            # overflow is handled by the finiteness check below
            with np.errstate(over="ignore", invalid="ignore"):
                return split_field(u)

        y0 = split_state(z0)
        Y = np.empty((N + 1, y0.shape[0]))
        F = np.empty_like(Y)
        Y[0] = y0
        F[0] = rhs(y0)
        acc = np.zeros((2, y0.shape[0]))
        last = N
        for k in range(N):
            j0 = 0 if L is None else max(0, k - L + 1)
            kernel.history_sums(F, k, j0, W, a0[k], acc)
            Y[k + 1] = y0 + c_corr * (rhs(y0 + c_pred * acc[0]) + acc[1])
            if np.all(np.isfinite(Y[k + 1])):
                F[k + 1] = rhs(Y[k + 1])
            if not (np.all(np.isfinite(Y[k + 1])) and np.all(np.isfinite(F[k + 1]))):
                last = k
                break
        states = np.array([merge_state(u) for u in Y[: last + 1]])
    else:
        raise ValueError(f"unknown form {form!r}")

    if last < N:
        logger.warning("state left the finite range at t=%g; trajectory truncated", (last + 1) * h)
    return Trajectory(h * np.arange(last + 1), states, diverged=last < N)


# ---------------------------------------------------------------------------
# Mittag-Leffler reference


ML_WINDOW = 5.0


ML_MAX_ROUNDING = 1e-10


def ml_oracle(q: float, x: float, tol: float = 1e-16, max_terms: int | None = None) -> float:
    """One-parameter Mittag-Leffler ``E_q(x) = sum_m x^m / Gamma(q m + 1)`` for ``-5 <= x <= 0``.

    The power series is only trusted on that window; requests outside it
    raise rather than return a degraded value.  The alternating terms can
    peak far above the result for small ``q``; when the largest term times
    the unit roundoff exceeds :data:`ML_MAX_ROUNDING` the oracle refuses too.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1]")
    if x > 0.0 or x < -ML_WINDOW:
        raise ValueError(f"x={x} outside the trusted series window [-{ML_WINDOW:g}, 0]")
    if x == 0.0:
        return 1.0
    log_ax = math.log(-x)
    # terms grow while |x| > (q m)^q, i.e. up to m ~ |x|^(1/q) / q
    horizon = (-x) ** (1.0 / q)
    if max_terms is None:
        max_terms = int(4.0 * horizon / q) + 200
    log_limit = math.log(ML_MAX_ROUNDING / np.finfo(float).eps)
    total = 1.0
    for m in range(1, max_terms):
        log_mag = m * log_ax - math.lgamma(q * m + 1.0)
        if log_mag > log_limit:
            raise ArithmeticError(
                f"series cancellation: term {m} has magnitude e^{log_mag:.1f}; no trustworthy digits"
            )
        mag = math.exp(log_mag)
        total += -mag if m % 2 else mag
        if mag < tol and m > horizon:
            return total
    raise ArithmeticError("Mittag-Leffler series did not reach tolerance")


# ---------------------------------------------------------------------------
# qualitative classification


class TailClass(enum.Enum):
    DECAYED = "decayed"
    SUSTAINED_OSCILLATION = "sustained_oscillation"
    DIVERGED = "diverged"
    INDETERMINATE = "indeterminate"


def _window(traj: Trajectory, window_fraction: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < window_fraction < 1.0:
        raise ValueError("window_fraction must lie in (0, 1)")
    m = int(round(window_fraction * len(traj.times)))
    if m < 10:
        raise ValueError(f"trailing window has {m} samples; need at least 10")
    return traj.times[-m:], traj.states[-m:]


def _peak_to_peak(states: np.ndarray) -> float:
    parts = np.concatenate([states.real, states.imag], axis=1)
    return float(np.max(np.ptp(parts, axis=0)))


def classify_tail(
    traj: Trajectory,
    window_fraction: float = 0.2,
    eps_decay: float = 1e-3,
    eps_osc: float = 1e-3,
    chunks: int = 4,
) -> TailClass:
    """Classify the trailing window of a trajectory.

    Oscillation requires a peak-to-peak excursion of at least ``eps_osc`` and
    an amplitude trend (least-squares slope over ``chunks`` sub-windows,
    times the window length) within 10% of the mean amplitude.
    """
    times, states = _window(traj, window_fraction)
    if traj.diverged:
        return TailClass.DIVERGED
    if np.max(np.abs(states)) <= eps_decay:
        return TailClass.DECAYED
    if _peak_to_peak(states) < eps_osc:
        return TailClass.INDETERMINATE
    pieces = np.array_split(np.arange(len(times)), chunks)
    amp = np.array([_peak_to_peak(states[idx]) for idx in pieces])
    centre = np.array([times[idx].mean() for idx in pieces])
    slope = np.polyfit(centre, amp, 1)[0]
    span = times[-1] - times[0]
    if abs(slope) * span <= 0.1 * amp.mean():
        return TailClass.SUSTAINED_OSCILLATION
    return TailClass.INDETERMINATE


@dataclass(frozen=True)
class RingAttractorReport:
    spread: float
    modulus_defect: float
    final_mean: complex


def ring_attractor_check(traj: Trajectory, window_fraction: float = 0.2) -> RingAttractorReport:
    """Worst component spread and distance of the component mean from the unit circle."""
    _, states = _window(traj, window_fraction)
    diffs = np.abs(states[:, :, None] - states[:, None, :])
    mean = states.mean(axis=1)
    return RingAttractorReport(
        spread=float(np.max(diffs)),
        modulus_defect=float(np.max(np.abs(np.abs(mean) - 1.0))),
        final_mean=complex(mean[-1]),
    )
