"""Closed-form stability of hub networks.

For a hub whose peripheral neurons share the diagonal value ``beta`` the
characteristic polynomial factors as

    (lambda - beta)^(n-2) * (lambda^2 - (alpha + beta) lambda + alpha beta - gamma)

and the principal arguments of the quadratic's roots follow from a case
analysis on ``A = Arg(alpha + beta) - Arg(alpha beta - gamma) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from fraccvnn.equilibrium import EquilibriumState
from fraccvnn.errors import DegenerateSpectrumError, NonUniformCoefficientsError
from fraccvnn.model import NetworkSpec, has_hub_pattern, principal_arg, wrap_angle
from fraccvnn.spectral import complex_derivatives

PERIPHERAL_TOL = 1e-10
COS_A_ZERO = 1e-14
ARCCOS_OVERSHOOT = 1e-9
BRANCH_AGREEMENT = 1e-10
PI_SNAP = 1e-14

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class HubCoefficients:
    alpha: complex
    beta: complex
    gamma: complex
    n: int

    def quadratic(self) -> tuple[complex, complex]:
        """Coefficients ``(alpha + beta, alpha beta - gamma)`` of the reduced quadratic."""
        return self.alpha + self.beta, self.alpha * self.beta - self.gamma


def hub_coefficients(spec: NetworkSpec, eq: EquilibriumState) -> HubCoefficients:
    spec.require_valid()
    if not has_hub_pattern(spec.T):
        raise NonUniformCoefficientsError("interconnection matrix does not have the hub pattern")
    d = complex_derivatives(spec, eq.z)
    T = spec.T
    alpha = complex(-spec.a[0] + T[0, 0] * d[0])
    peripheral = -spec.a[1:] + np.diag(T)[1:] * d[1:]
    beta = complex(peripheral[0])
    spread = float(np.max(np.abs(peripheral - beta)))
    if spread > PERIPHERAL_TOL:
        raise NonUniformCoefficientsError(
            f"non-uniform peripheral diagonal (spread {spread:.3e}); use the general spectral analysis"
        )
    gamma = complex(np.sum(T[0, 1:] * T[1:, 0] * d[0] * d[1:]))
    return HubCoefficients(alpha, beta, gamma, spec.n)


@dataclass(frozen=True)
class Lemma1Inputs:
    rho1: float
    theta1: float
    rho2: float
    theta2: float
    A: float
    B: float
    u: float
    arccos_arg: float
    case: str


def lemma1_inputs(alpha: complex, beta: complex, gamma: complex) -> Lemma1Inputs:
    s = complex(alpha) + complex(beta)
    p = complex(alpha) * complex(beta) - complex(gamma)
    rho1, rho2 = abs(s), abs(p)
    if rho2 == 0.0:
        raise DegenerateSpectrumError("alpha*beta - gamma = 0: a root sits at the origin")
    theta1, theta2 = principal_arg(s), principal_arg(p)
    A = theta1 - 0.5 * theta2
    u = rho1 * rho1 / (2.0 * rho2)
    cos_a, sin_a = math.cos(A), math.sin(A)

    # x = (u - sqrt(u^2 + 4 - 4u cos 2A)) / 2 and B = arccos(x) / 2, evaluated
    # through 1 - x and 1 + x so that neither large u nor u ~ 2 cancels.
    root = math.sqrt((u - 2.0) ** 2 + 8.0 * u * sin_a * sin_a)
    one_plus_x = 4.0 * u * cos_a * cos_a / (root + u + 2.0)
    if u < 2.0:
        one_minus_x = (root + (2.0 - u) + 4.0 * u * sin_a * sin_a) / (u + root)
    else:
        denom = root + u - 2.0
        one_minus_x = 4.0 * u * sin_a * sin_a / denom if denom > 0.0 else 0.0
    x = 2.0 * (u * math.cos(2.0 * A) - 1.0) / (u + root)
    overshoot = max(abs(x) - 1.0, 0.0)
    if overshoot > ARCCOS_OVERSHOOT:
        raise ArithmeticError(f"arccos argument {x!r} outside [-1, 1] by {overshoot:.3e}")
    x = min(1.0, max(-1.0, x))
    B = math.atan2(math.sqrt(one_minus_x), math.sqrt(one_plus_x))

    if rho1 == 0.0:
        case = "rho1=0"
    elif abs(cos_a) <= COS_A_ZERO:
        case = "cosA=0"
    elif cos_a > 0.0:
        case = "a"
    elif theta2 <= -2.0 * B:
        case = "b.1"
    elif theta2 <= 2.0 * B:
        case = "b.2"
    else:
        case = "b.3"
    return Lemma1Inputs(rho1, theta1, rho2, theta2, A, B, u, x, case)


def lemma1_arguments(inputs: Lemma1Inputs) -> tuple[float, float]:
    """Principal arguments of the two quadratic roots for precomputed ``inputs``."""
    half = 0.5 * inputs.theta2
    B = inputs.B
    case = inputs.case
    if case in ("rho1=0", "cosA=0"):
        # roots are +-sqrt(-(alpha beta - gamma)): arguments differ by exactly pi
        phi1, phi2 = half + HALF_PI, half - HALF_PI
    elif case == "a":
        phi1, phi2 = half + B, half - B
    elif case == "b.1":
        phi1, phi2 = half + math.pi + B, half + math.pi - B
    elif case == "b.2":
        phi1, phi2 = half + (math.pi - B), half - (math.pi - B)
    else:
        phi1, phi2 = half - math.pi + B, half - math.pi - B
    return _snap_pi(wrap_angle(phi1)), _snap_pi(wrap_angle(phi2))


def _snap_pi(phi: float) -> float:
    # a root on the negative real axis can come out as -pi + ulps; keep the (-pi, pi] convention
    return math.pi if phi <= -math.pi + PI_SNAP else phi


def lemma1_root_args(alpha: complex, beta: complex, gamma: complex) -> tuple[float, float]:
    return lemma1_arguments(lemma1_inputs(alpha, beta, gamma))


def prop2_q_double_star(inputs: Lemma1Inputs) -> float:
    """Four-branch closed form of the quadratic's critical order."""
    t, B, tp = inputs.theta2, inputs.B, 2.0 * math.pi
    if inputs.case in ("a", "rho1=0", "cosA=0"):
        pair = (abs(t - 2 * B), abs(t + 2 * B))
    elif inputs.case == "b.1":
        pair = (abs(t + tp - 2 * B), abs(t + tp + 2 * B))
    elif inputs.case == "b.2":
        pair = (abs(t + tp - 2 * B), abs(t - tp + 2 * B))
    else:
        pair = (abs(t - tp + 2 * B), abs(t - tp - 2 * B))
    return min(pair) / math.pi


@dataclass(frozen=True)
class HubStability:
    coefficients: HubCoefficients
    inputs: Lemma1Inputs
    phi1: float
    phi2: float
    q_double_star: float
    q_beta: float | None
    q_star: float

    def to_json(self) -> dict:
        c = self.coefficients
        return {
            "coefficients": {
                "alpha": [c.alpha.real, c.alpha.imag],
                "beta": [c.beta.real, c.beta.imag],
                "gamma": [c.gamma.real, c.gamma.imag],
                "n": c.n,
            },
            "lemma1": asdict(self.inputs),
            "phi1": self.phi1,
            "phi2": self.phi2,
            "q_double_star": self.q_double_star,
            "q_beta": self.q_beta,
            "q_star": self.q_star,
        }


def hub_stability(coeffs: HubCoefficients) -> HubStability:
    inputs = lemma1_inputs(coeffs.alpha, coeffs.beta, coeffs.gamma)
    phi1, phi2 = lemma1_arguments(inputs)
    q_args = 2.0 / math.pi * min(abs(phi1), abs(phi2))
    q_formula = prop2_q_double_star(inputs)
    if abs(q_args - q_formula) > BRANCH_AGREEMENT:
        raise ArithmeticError(
            f"closed-form q** {q_formula!r} disagrees with root arguments {q_args!r} (case {inputs.case})"
        )
    q_beta = None
    q_star = q_formula
    if coeffs.n >= 3:
        scale = abs(coeffs.alpha) + abs(coeffs.beta) + abs(coeffs.gamma)
        if abs(coeffs.beta) <= 1e-12 * scale:
            raise DegenerateSpectrumError(
                f"beta = 0: zero eigenvalue of multiplicity {coeffs.n - 2}"
            )
        q_beta = 2.0 / math.pi * abs(principal_arg(coeffs.beta))
        q_star = min(q_beta, q_formula)
    return HubStability(coeffs, inputs, phi1, phi2, q_formula, q_beta, q_star)


def hub_critical_order(coeffs: HubCoefficients) -> float:
    return hub_stability(coeffs).q_star
