"""Network description, validation, topology detection and the real-split form.

A network is the complex system

    D^q z = -A z + T g(z) + I

with ``A = diag(a)``, ``a_k > 0``.  Complex scalars are plain Python
``complex`` values; vectors and matrices are numpy ``complex128`` arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from fraccvnn.activation import (
    ActivationSpec,
    activation_from_json,
    activation_to_json,
    evaluate_many,
)


class InvalidNetworkError(ValueError):
    """Raised when an operation receives a network that fails validation."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid network: " + "; ".join(violations))


def principal_arg(z: complex) -> float:
    """Argument of ``z`` in (-pi, pi]; a signed-zero imaginary part never yields -pi."""
    a = math.atan2(z.imag, z.real)
    return math.pi if a == -math.pi else a


def wrap_angle(x: float) -> float:
    """Map a real angle into (-pi, pi]."""
    if -math.pi < x <= math.pi:
        return x
    x = math.fmod(x, 2.0 * math.pi)
    if x > math.pi:
        x -= 2.0 * math.pi
    elif x <= -math.pi:
        x += 2.0 * math.pi
    return x


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Immutable description of a complex-valued fractional Hopfield network.

    Construction performs type coercion only; call :func:`validate_network`
    (or :meth:`require_valid`) to check the structural invariants.
    """

    n: int
    a: np.ndarray
    T: np.ndarray
    activations: tuple[ActivationSpec, ...]
    inputs: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        a = _frozen(np.array(self.a, dtype=float, ndmin=1))
        T = _frozen(np.array(self.T, dtype=complex, ndmin=2))
        if self.inputs is None:
            inputs = np.zeros(len(a), dtype=complex)
        else:
            inputs = np.array(self.inputs, dtype=complex, ndmin=1)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "inputs", _frozen(inputs))
        object.__setattr__(self, "activations", tuple(self.activations))

    def require_valid(self) -> "NetworkSpec":
        violations = validate_network(self)
        if violations:
            raise InvalidNetworkError(violations)
        return self

    def g(self, z: np.ndarray) -> np.ndarray:
        """Apply each neuron's activation to the matching component of ``z``."""
        return evaluate_many(self.activations, z)

    def field(self, z: np.ndarray) -> np.ndarray:
        """Right-hand side ``-A z + T g(z) + I``."""
        z = np.asarray(z, dtype=complex)
        return -self.a * z + self.T @ self.g(z) + self.inputs

    # JSON ----------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "a": [float(x) for x in self.a],
            "T": [[[float(w.real), float(w.imag)] for w in row] for row in self.T],
            "I": [[float(w.real), float(w.imag)] for w in self.inputs],
            "activations": [activation_to_json(act) for act in self.activations],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "NetworkSpec":
        allowed = {"n", "a", "T", "I", "activations"}
        unknown = sorted(set(obj) - allowed)
        if unknown:
            raise ValueError(f"unknown network fields: {', '.join(unknown)}")
        missing = sorted({"n", "a", "T", "activations"} - set(obj))
        if missing:
            raise ValueError(f"missing network fields: {', '.join(missing)}")
        n = int(obj["n"])
        T = np.array(
            [[complex(*_pair(w)) for w in row] for row in obj["T"]], dtype=complex
        )
        inputs = obj.get("I")
        if inputs is not None:
            inputs = [complex(*_pair(w)) for w in inputs]
        acts = obj["activations"]
        if isinstance(acts, dict):
            acts = [acts] * n
        return cls(
            n=n,
            a=obj["a"],
            T=T,
            activations=tuple(activation_from_json(x) for x in acts),
            inputs=inputs,
        )


def _pair(w: Any) -> tuple[float, float]:
    if isinstance(w, (int, float)):
        return float(w), 0.0
    re, im = w
    return float(re), float(im)


def complex_vector_from_json(obj: Sequence[Any]) -> np.ndarray:
    return np.array([complex(*_pair(w)) for w in obj], dtype=complex)


def complex_vector_to_json(z: np.ndarray) -> list[list[float]]:
    return [[float(w.real), float(w.imag)] for w in np.asarray(z, dtype=complex)]


def validate_network(spec: NetworkSpec) -> list[str]:
    """Every violated structural invariant of ``spec``; empty when well formed."""
    problems: list[str] = []
    n = spec.n
    if n < 1:
        problems.append(f"n must be >= 1 (got {n})")
    if spec.a.ndim != 1 or spec.a.shape[0] != n:
        problems.append(f"a must have length n={n} (got shape {spec.a.shape})")
    for k, ak in enumerate(spec.a.ravel()):
        if not (math.isfinite(ak) and ak > 0):
            problems.append(f"a_{k + 1} must be finite and > 0 (got {ak})")
    if spec.T.shape != (n, n):
        problems.append(f"T shape mismatch: expected {n}x{n}, got {spec.T.shape[0]}x{spec.T.shape[1]}")
    if not np.all(np.isfinite(spec.T)):
        problems.append("T has non-finite entries")
    if spec.inputs.shape != (n,):
        problems.append(f"inputs must have length n={n} (got {spec.inputs.shape[0]})")
    elif not np.all(np.isfinite(spec.inputs)):
        problems.append("inputs have non-finite entries")
    if len(spec.activations) != n:
        problems.append(f"need {n} activations (got {len(spec.activations)})")
    for k, act in enumerate(spec.activations):
        for msg in act.violations():
            problems.append(f"activation {k + 1}: {msg}")
    return problems


class TopologyTag(enum.Enum):
    GENERAL = "general"
    HUB = "hub"
    RING = "ring"


def has_hub_pattern(T: np.ndarray) -> bool:
    """Peripheral neurons (index >= 1) talk only to the centre and themselves."""
    n = T.shape[0]
    if n < 2:
        return False
    off = T[1:, 1:].copy()
    np.fill_diagonal(off, 0)
    return not np.any(off)


def has_ring_pattern(T: np.ndarray) -> bool:
    """Nonzeros only on the diagonal and the two cyclic neighbour bands."""
    n = T.shape[0]
    if n < 3:
        return False
    idx = np.arange(n)
    dist = (idx[None, :] - idx[:, None]) % n
    allowed = (dist == 0) | (dist == 1) | (dist == n - 1)
    return not np.any(T[~allowed])


def classify_topology(spec: NetworkSpec) -> TopologyTag:
    # Hub wins when both patterns hold (n = 3 with zero corner entries).
    if has_hub_pattern(spec.T):
        return TopologyTag.HUB
    if has_ring_pattern(spec.T):
        return TopologyTag.RING
    return TopologyTag.GENERAL


@dataclass(frozen=True, eq=False)
class RealSplitSystem:
    """Real 2n-dimensional form ``D^q u = -A_tilde u + T_tilde g_tilde(u) + I_tilde``."""

    dim: int
    A_tilde: np.ndarray
    T_tilde: np.ndarray
    I_tilde: np.ndarray
    activations: tuple[ActivationSpec, ...]

    def g_tilde(self, u: np.ndarray) -> np.ndarray:
        n = self.dim // 2
        gz = evaluate_many(self.activations, u[:n] + 1j * u[n:])
        return np.concatenate([gz.real, gz.imag])

    def field(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return -self.A_tilde @ u + self.T_tilde @ self.g_tilde(u) + self.I_tilde


def real_split(spec: NetworkSpec) -> RealSplitSystem:
    spec.require_valid()
    TR, TI = spec.T.real, spec.T.imag
    T_tilde = np.block([[TR, -TI], [TI, TR]])
    A_tilde = np.diag(np.concatenate([spec.a, spec.a]))
    I_tilde = np.concatenate([spec.inputs.real, spec.inputs.imag])
    return RealSplitSystem(
        dim=2 * spec.n,
        A_tilde=_frozen(A_tilde),
        T_tilde=_frozen(T_tilde),
        I_tilde=_frozen(I_tilde),
        activations=spec.activations,
    )


def split_state(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


def merge_state(u: np.ndarray) -> np.ndarray:
    n = len(u) // 2
    return u[:n] + 1j * u[n:]
