"""Acceptance criteria 1-11, each at its stated tolerance and runtime budget.

Run under pytest (one summary line per criterion is printed at the end) or
directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from conftest import ACCEPTANCE_LINES, scalar_decay  # noqa: E402
from fraccvnn import catalog, fde  # noqa: E402
from fraccvnn.activation import GeorgiouActivation, LinearActivation  # noqa: E402
from fraccvnn.equilibrium import EquilibriumState  # noqa: E402
from fraccvnn.hub import hub_coefficients, hub_critical_order, lemma1_inputs, lemma1_arguments  # noqa: E402
from fraccvnn.model import NetworkSpec  # noqa: E402
from fraccvnn.ring import circulant_eigenvalues, density_scan, parametric_coefficients, parametric_eigs, ring_coefficients, ring_critical_order  # noqa: E402
from fraccvnn.spectral import Verdict, critical_order, eig_complex, jacobian_m, matignon_report, multiset_distance, real_split_spectrum, spectrum_report  # noqa: E402


def origin(spec):
    return EquilibriumState.exact(spec, np.zeros(spec.n))


def timed(fn, repeat=1):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return result, best


def c1_hub_critical_order():
    spec = catalog.ex_hub()

    def both():
        eq = origin(spec)
        closed = hub_critical_order(hub_coefficients(spec, eq))
        numeric = critical_order(eig_complex(jacobian_m(spec, eq).M))
        return closed, numeric

    (closed, numeric), dt = timed(both, repeat=5)
    ok = abs(closed - 0.844976) <= 1e-5 and abs(numeric - 0.844976) <= 1e-5
    ok = ok and abs(closed - numeric) <= 1e-8 and dt < 0.010
    return ok, f"closed {closed:.9f}, numeric {numeric:.9f}, gap {abs(closed - numeric):.1e}, {dt * 1e3:.2f} ms"


def c2_hub_coefficients():
    c = hub_coefficients(catalog.ex_hub(), origin(catalog.ex_hub()))
    target = (1 - 5j, -1 + 1j, -3 - 4j)
    err = max(abs(x - y) for x, y in zip((c.alpha, c.beta, c.gamma), target))
    return err <= 1e-12, f"alpha={c.alpha}, beta={c.beta}, gamma={c.gamma}, max error {err:.1e}"


def c3_lemma_oracle():
    rng = np.random.default_rng(12345)
    triples = oracles.random_triples(rng, 100_000)

    def run():
        phi = np.empty((len(triples), 2))
        rho2 = np.empty(len(triples))
        theta2 = np.empty(len(triples))
        for k, (alpha, beta, gamma) in enumerate(triples.tolist()):
            inp = lemma1_inputs(alpha, beta, gamma)
            phi[k] = lemma1_arguments(inp)
            rho2[k], theta2[k] = inp.rho2, inp.theta2
        r1, r2 = oracles.quadratic_roots(triples[:, 0] + triples[:, 1], triples[:, 0] * triples[:, 1] - triples[:, 2])
        o1, o2 = oracles.principal(r1), oracles.principal(r2)
        dist = oracles.angular_distance
        e_arg = np.minimum(np.maximum(dist(phi[:, 0], o1), dist(phi[:, 1], o2)),
                           np.maximum(dist(phi[:, 0], o2), dist(phi[:, 1], o1)))
        e_vieta = np.maximum(np.abs(np.abs(r1) * np.abs(r2) - rho2) / np.maximum(1.0, rho2),
                             dist(phi[:, 0] + phi[:, 1], theta2))
        failures = int(np.count_nonzero((e_arg > 1e-9) | (e_vieta > 1e-9)))
        return float(e_arg.max()), float(e_vieta.max()), failures

    (worst_arg, worst_vieta, failures), dt = timed(run)
    ok = failures == 0 and dt < 5.0
    return ok, f"1e5 triples, worst arg {worst_arg:.1e}, worst Vieta {worst_vieta:.1e}, {failures} failures, {dt:.2f} s"


def c4_ring_instability():
    spec = catalog.ex_ring()
    eq = origin(spec)
    lam = circulant_eigenvalues(ring_coefficients(spec, eq))
    q_closed = ring_critical_order(ring_coefficients(spec, eq))
    M = jacobian_m(spec, eq).M
    report = spectrum_report(eig_complex(M), float(np.linalg.norm(M, 1)))
    verdicts = {matignon_report(report.eigenvalues, q).verdict for q in np.linspace(0.01, 0.99, 99)}
    ok = abs(lam[0] - 1) <= 1e-12 and q_closed == 0 and report.q_star == 0
    ok = ok and report.stable_for == "none" and verdicts == {Verdict.UNSTABLE}
    return ok, f"lambda_0 = {lam[0]:.3g}, q* closed {q_closed}, numeric {report.q_star}, unstable for all q: {verdicts == {Verdict.UNSTABLE}}"


def c5_density_region():
    def run():
        return density_scan(5, 128), density_scan(100, 128)

    (small, large), dt = timed(run)
    total = np.abs(small.theta[:, None] + small.theta[None, :])
    band = (total > 2 * math.pi / 3) & (total < 4 * math.pi / 3)
    band_ok = bool(np.all(small.stable_all_q[band]) and np.all(large.stable_all_q[band]))
    anti = total <= 1e-9
    anti_ok = bool(anti.any() and np.all(large.values[anti] == 0))
    ok = band_ok and anti_ok and dt < 30.0
    return ok, f"band cells {int(band.sum())} all stable: {band_ok}; anti-diagonal cells {int(anti.sum())} at q*=0: {anti_ok}; {dt:.2f} s"


def c6_parametric_identity():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        t1, t2 = rng.uniform(-math.pi, math.pi, 2)
        n = int(rng.integers(3, 51))
        gap = np.max(np.abs(parametric_eigs(t1, t2, n) - circulant_eigenvalues(parametric_coefficients(t1, t2, n))))
        worst = max(worst, float(gap))
    return worst <= 1e-12, f"1000 draws, worst gap {worst:.1e}"


def c7_integrator_accuracy():
    def run():
        tr = fde.abm_simulate(scalar_decay(), [1.0], fde.SimConfig(1.0, 1e-3, 5.0))
        e1 = float(np.max(np.abs(tr.states[:, 0] - np.exp(-tr.times))))
        errs = []
        for h in (2e-3, 1e-3):
            tr = fde.abm_simulate(scalar_decay(), [1.0], fde.SimConfig(0.6, h, 2.0))
            ref = np.array([fde.ml_oracle(0.6, -(t**0.6)) for t in tr.times])
            errs.append(float(np.max(np.abs(tr.states[:, 0] - ref))))
        return e1, errs

    (e1, (coarse, fine)), dt = timed(run)
    ratio = coarse / fine
    ok = e1 <= 1e-5 and fine <= 1e-3 and ratio >= 2.0 and dt < 30.0
    return ok, f"q=1 error {e1:.1e}; q=0.6 error {fine:.1e} (h=1e-3), halving ratio {ratio:.2f}; {dt:.2f} s"


def c8_fig1_regimes():
    spec = catalog.ex_hub()
    z0 = 0.1 * (1 + 1j) * np.ones(3)
    got = {}
    for q in (0.80, 0.87):
        tr = fde.abm_simulate(spec, z0, fde.SimConfig(q, 0.01, 300.0))
        got[q] = fde.classify_tail(tr)
    ok = got[0.80] is fde.TailClass.DECAYED and got[0.87] is fde.TailClass.SUSTAINED_OSCILLATION
    return ok, f"q=0.80 -> {got[0.80].value}, q=0.87 -> {got[0.87].value}"


FIG3_T_END = 200.0
FIG3_PERTURBATION = 0.1


def c9_fig3_regime():
    spec = catalog.ex_ring()
    passes, worst = 0, (0.0, 0.0)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        z0 = FIG3_PERTURBATION * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
        tr = fde.abm_simulate(spec, z0, fde.SimConfig(0.8, 0.01, FIG3_T_END))
        rep = fde.ring_attractor_check(tr)
        passes += rep.spread <= 1e-2 and rep.modulus_defect <= 1e-2
        worst = (max(worst[0], rep.spread), max(worst[1], rep.modulus_defect))
    return passes >= 9, f"{passes}/10 seeds pass (t_end={FIG3_T_END:g}); worst spread {worst[0]:.1e}, worst modulus defect {worst[1]:.1e}"


def c10_monotonicity():
    rng = np.random.default_rng(10)
    q_grid = np.linspace(0.001, 0.999, 250)
    violations = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        eigs = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 10 ** rng.uniform(-2, 2, n)
        if rng.random() < 0.2:
            eigs = eigs.real + 0j
        stable = np.array([matignon_report(eigs, q).verdict is Verdict.STABLE for q in q_grid])
        # downward closed: no stable q above an unstable one
        if stable.any() and not stable[: np.max(np.nonzero(stable)) + 1].all():
            violations += 1
    return violations == 0, f"1000 spectra x 250 orders, {violations} violations"


def c11_split_spectrum():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 21))
        acts = [
            GeorgiouActivation(float(rng.uniform(0.5, 2)), float(rng.uniform(0.1, 2)))
            if rng.random() < 0.5 else LinearActivation(complex(*rng.standard_normal(2)))
            for _ in range(n)
        ]
        spec = NetworkSpec(n, rng.uniform(0.5, 3, n), rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), acts)
        eq = origin(spec)
        m = eig_complex(jacobian_m(spec, eq).M)
        gap = multiset_distance(real_split_spectrum(spec, eq), np.concatenate([m, np.conj(m)]))
        worst = max(worst, gap)
    return worst <= 1e-8, f"200 networks (n <= 20), worst multiset gap {worst:.1e}"


CRITERIA = [
    (1, "hub critical order", c1_hub_critical_order),
    (2, "hub coefficients", c2_hub_coefficients),
    (3, "root-argument oracle suite", c3_lemma_oracle),
    (4, "ring instability", c4_ring_instability),
    (5, "density scan region", c5_density_region),
    (6, "parametric identity", c6_parametric_identity),
    (7, "integrator accuracy", c7_integrator_accuracy),
    (8, "hub trajectory regimes", c8_fig1_regimes),
    (9, "ring attractor regime", c9_fig3_regime),
    (10, "verdict monotonicity in q", c10_monotonicity),
    (11, "split spectrum", c11_split_spectrum),
]


def _line(number, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} ({name}): {detail}"


@pytest.mark.parametrize("number,name,check", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, check):
    ok, detail = check()
    line = _line(number, name, ok, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [(n, name, *check()) for n, name, check in CRITERIA]
    for n, name, ok, detail in results:
        print(_line(n, name, ok, detail))
    sys.exit(0 if all(r[2] for r in results) else 1)
