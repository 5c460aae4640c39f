"""Complex activation functions.

Two kinds are supported: the bounded Georgiou-Koutsougeras map
``g(z) = z / (c1 + c2 |z|)`` and a linear map ``g(z) = w z`` used as a
hand-checkable reference in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, NamedTuple, Sequence, Union

import numpy as np

#: Tolerance on the analytic partials when testing the Cauchy-Riemann equations.
CR_TOL = 1e-10


class RealJacobian2x2(NamedTuple):
    dRdx: float
    dRdy: float
    dIdx: float
    dIdy: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.dRdx, self.dRdy], [self.dIdx, self.dIdy]])


@dataclass(frozen=True)
class GeorgiouActivation:
    c1: float = 1.0
    c2: float = 1.0

    kind = "georgiou"

    def violations(self) -> list[str]:
        out = []
        if not (math.isfinite(self.c1) and self.c1 > 0):
            out.append(f"c1 must be > 0 (got {self.c1})")
        if not (math.isfinite(self.c2) and self.c2 > 0):
            out.append(f"c2 must be > 0 (got {self.c2})")
        return out

    def __call__(self, z: complex) -> complex:
        return z / (self.c1 + self.c2 * abs(z))

    def real_jacobian(self, z: complex) -> RealJacobian2x2:
        x, y = z.real, z.imag
        r = abs(z)
        d = self.c1 + self.c2 * r
        if r == 0.0:
            # continuous extension of the partials at the origin
            return RealJacobian2x2(1.0 / self.c1, 0.0, 0.0, 1.0 / self.c1)
        k = self.c2 / (r * d * d)
        return RealJacobian2x2(1.0 / d - k * x * x, -k * x * y, -k * x * y, 1.0 / d - k * y * y)


@dataclass(frozen=True)
class LinearActivation:
    gain: complex = 1.0 + 0j

    kind = "linear"

    def violations(self) -> list[str]:
        g = complex(self.gain)
        if not (math.isfinite(g.real) and math.isfinite(g.imag)):
            return [f"gain must be finite (got {g})"]
        return []

    def __call__(self, z: complex) -> complex:
        return self.gain * z

    def real_jacobian(self, z: complex) -> RealJacobian2x2:
        w = complex(self.gain)
        return RealJacobian2x2(w.real, -w.imag, w.imag, w.real)


ActivationSpec = Union[GeorgiouActivation, LinearActivation]


def act_eval(act: ActivationSpec, z: complex) -> complex:
    return act(complex(z))


def act_real_jacobian(act: ActivationSpec, z: complex) -> RealJacobian2x2:
    """Partials of (Re g, Im g) with respect to (x, y) at ``z = x + iy``."""
    return act.real_jacobian(complex(z))


def act_complex_derivative(act: ActivationSpec, z: complex) -> complex | None:
    """Complex derivative ``g'(z)``, or ``None`` where the Cauchy-Riemann equations fail."""
    jac = act.real_jacobian(complex(z))
    if abs(jac.dRdx - jac.dIdy) > CR_TOL or abs(jac.dRdy + jac.dIdx) > CR_TOL:
        return None
    return complex(jac.dRdx, jac.dIdx)


def evaluate_many(acts: Sequence[ActivationSpec], z: np.ndarray) -> np.ndarray:
    """Vectorised ``g_k(z_k)`` for a whole state vector."""
    z = np.asarray(z, dtype=complex)
    first = acts[0]
    if all(act == first for act in acts):
        if isinstance(first, GeorgiouActivation):
            return z / (first.c1 + first.c2 * np.abs(z))
        return first.gain * z
    return np.array([act(zk) for act, zk in zip(acts, z)], dtype=complex)


def activation_to_json(act: ActivationSpec) -> dict[str, Any]:
    if isinstance(act, GeorgiouActivation):
        return {"kind": "georgiou", "c1": act.c1, "c2": act.c2}
    g = complex(act.gain)
    return {"kind": "linear", "gain": [g.real, g.imag]}


def activation_from_json(obj: dict[str, Any]) -> ActivationSpec:
    """Parse ``{"kind": ..., <params>}``; a nested ``"params"`` object is also accepted."""
    obj = dict(obj)
    params = obj.pop("params", None)
    if params is not None:
        obj.update(params)
    kind = obj.pop("kind", None)
    if kind == "georgiou":
        allowed = {"c1", "c2"}
    elif kind == "linear":
        allowed = {"gain"}
    else:
        raise ValueError(f"unknown activation kind {kind!r}")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ValueError(f"unknown activation fields: {', '.join(unknown)}")
    if kind == "georgiou":
        return GeorgiouActivation(float(obj.get("c1", 1.0)), float(obj.get("c2", 1.0)))
    gain = obj.get("gain", [1.0, 0.0])
    if isinstance(gain, (int, float)):
        gain = [gain, 0.0]
    return LinearActivation(complex(float(gain[0]), float(gain[1])))
