"""Linearisation at an equilibrium and the fractional argument criterion.

The steady state is asymptotically stable for order ``q`` iff every
eigenvalue of ``M = -A + T diag(g'(z*))`` satisfies ``|arg lambda| > q pi / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from fraccvnn.activation import act_complex_derivative
from fraccvnn.equilibrium import EquilibriumState, _split_jacobian
from fraccvnn.errors import DegenerateSpectrumError, EigenSolverError, NonHolomorphicError
from fraccvnn.model import NetworkSpec, real_split

MARGINAL_BAND = 1e-12
ZERO_EIG_REL = 1e-12
EIG_RESIDUAL_TOL = 1e-10


class Verdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"
    DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class JacobianM:
    M: np.ndarray
    derivatives: np.ndarray

    @property
    def U(self) -> np.ndarray:
        return self.M.real

    @property
    def V(self) -> np.ndarray:
        return self.M.imag


def complex_derivatives(spec: NetworkSpec, z: np.ndarray) -> np.ndarray:
    out = np.empty(spec.n, dtype=complex)
    for k, (act, zk) in enumerate(zip(spec.activations, z)):
        d = act_complex_derivative(act, zk)
        if d is None:
            raise NonHolomorphicError(k, complex(zk))
        out[k] = d
    return out


def jacobian_m(spec: NetworkSpec, eq: EquilibriumState) -> JacobianM:
    spec.require_valid()
    d = complex_derivatives(spec, eq.z)
    M = -np.diag(spec.a).astype(complex) + spec.T * d[None, :]
    M.setflags(write=False)
    return JacobianM(M, d)


def eig_complex(M: np.ndarray) -> np.ndarray:
    """All eigenvalues of a dense complex matrix (LAPACK ``zgeev``), residual-checked."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    try:
        w, vecs = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}", partial=np.array([])) from exc
    scale = np.linalg.norm(M, 1)
    if scale > 0:
        res = np.linalg.norm(M @ vecs - vecs * w, axis=0) / (np.linalg.norm(vecs, axis=0) * scale)
        if np.max(res) > EIG_RESIDUAL_TOL:
            raise EigenSolverError(
                f"eigenpair residual {np.max(res):.2e} exceeds {EIG_RESIDUAL_TOL:g}", partial=w
            )
    return w


def principal_args(eigs) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=complex)
    args = np.arctan2(eigs.imag, eigs.real)
    args[args == -math.pi] = math.pi
    return args


def _zero_mask(eigs: np.ndarray, scale: float | None) -> np.ndarray:
    mags = np.abs(eigs)
    if scale is None:
        scale = float(np.max(mags)) if mags.size else 0.0
    return mags <= ZERO_EIG_REL * scale


def critical_order(eigs, scale: float | None = None) -> float:
    """``(2/pi) min |arg lambda|``, unclamped; values >= 1 mean stable for every q in (0,1).

    ``scale`` (typically a norm of the matrix) sets the zero-eigenvalue
    threshold; it defaults to the spectral radius.  An argument within
    :data:`MARGINAL_BAND` of 0 is a positive real eigenvalue up to rounding
    and gives exactly 0.
    """
    eigs = np.asarray(eigs, dtype=complex)
    if np.any(_zero_mask(eigs, scale)):
        raise DegenerateSpectrumError("zero eigenvalue: argument undefined")
    smallest = float(np.min(np.abs(principal_args(eigs))))
    if smallest <= MARGINAL_BAND:
        return 0.0
    return 2.0 / math.pi * smallest


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    args: np.ndarray
    q_star: float | None
    stable_for: str
    degenerate: bool

    @property
    def hopf_candidate(self) -> bool:
        """Threshold crossing inside (0, 1): a candidate, never a certified, Hopf point."""
        return self.q_star is not None and 0.0 < self.q_star < 1.0

    def margins(self, q: float) -> np.ndarray:
        return np.abs(self.args) - q * math.pi / 2.0

    def to_json(self) -> dict:
        return {
            "eigenvalues": [[float(w.real), float(w.imag)] for w in self.eigenvalues],
            "args": [float(x) for x in self.args],
            "q_star": self.q_star,
            "stable_for": self.stable_for,
            "degenerate": self.degenerate,
            "hopf_candidate": self.hopf_candidate,
        }


def spectrum_report(eigs, scale: float | None = None) -> SpectrumReport:
    eigs = np.array(eigs, dtype=complex)
    args = principal_args(eigs)
    if np.any(_zero_mask(eigs, scale)):
        return SpectrumReport(eigs, args, None, "degenerate", True)
    q_star = critical_order(eigs, scale)
    if q_star >= 1.0:
        stable_for = "all q in (0,1)"
    elif q_star > 0.0:
        stable_for = "q in (0,q*)"
    else:
        stable_for = "none"
    return SpectrumReport(eigs, args, q_star, stable_for, False)


@dataclass(frozen=True, eq=False)
class MatignonResult:
    report: SpectrumReport
    q: float
    verdict: Verdict
    margins: np.ndarray


def matignon_report(eigs, q: float, scale: float | None = None) -> MatignonResult:
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    report = spectrum_report(eigs, scale)
    margins = report.margins(q)
    if report.degenerate:
        verdict = Verdict.DEGENERATE
    else:
        m = float(np.min(margins))
        if abs(m) <= MARGINAL_BAND:
            verdict = Verdict.MARGINAL
        elif m > 0:
            verdict = Verdict.STABLE
        else:
            verdict = Verdict.UNSTABLE
    return MatignonResult(report, q, verdict, margins)


def real_split_spectrum(spec: NetworkSpec, eq: EquilibriumState) -> np.ndarray:
    """Eigenvalues of the 2n x 2n real Jacobian ``-A~ + T~ Dg~(u*)``."""
    complex_derivatives(spec, eq.z)
    sys = real_split(spec)
    u = np.concatenate([eq.z.real, eq.z.imag])
    J = _split_jacobian(spec.activations, sys.T_tilde, sys.A_tilde, u)
    try:
        return np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}") from exc


def multiset_distance(a, b) -> float:
    """Largest pairwise gap under the optimal one-to-one matching of two spectra."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError("multisets differ in size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))
