"""Independent reference computations shared by the unit and acceptance tests."""

import math

import numpy as np


def angular_distance(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi
    return np.abs(d)


def quadratic_roots(s, p):
    """Roots of ``x^2 - s x + p`` by the cancellation-free quadratic formula, vectorised."""
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    d = np.sqrt(s * s - 4 * p)
    plus, minus = s + d, s - d
    big = np.where(np.abs(plus) >= np.abs(minus), plus, minus) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, p / big, 0)
    return big, small


def principal(z):
    a = np.angle(z)
    return np.where(a == -np.pi, np.pi, a)


def random_triples(rng, count, lo=-5.0, hi=5.0, min_rho2=1e-6):
    """``count`` triples with components uniform in [lo, hi] and ``|alpha beta - gamma| >= min_rho2``."""
    out = np.empty((0, 3), dtype=complex)
    while len(out) < count:
        raw = rng.uniform(lo, hi, (count, 3)) + 1j * rng.uniform(lo, hi, (count, 3))
        keep = np.abs(raw[:, 0] * raw[:, 1] - raw[:, 2]) >= min_rho2
        out = np.concatenate([out, raw[keep]])
    return out[:count]


def pair_error(phi, oracle):
    """Largest angular mismatch under the better of the two pairings."""
    (f1, f2), (o1, o2) = phi, oracle
    straight = max(angular_distance(f1, o1), angular_distance(f2, o2))
    crossed = max(angular_distance(f1, o2), angular_distance(f2, o1))
    return float(min(straight, crossed))


def ml_partial_sum(q, x, terms=400):
    """Mittag-Leffler series in exact-ish rational steps via math.lgamma, independent of fde."""
    total = 0.0
    for m in range(terms):
        total += (-1) ** m * math.exp(m * math.log(-x) - math.lgamma(q * m + 1)) if x else (1.0 if m == 0 else 0.0)
    return total


# 50-digit mpmath values, frozen before the build
E_06_AT_MINUS_1 = 0.4133273409431062974
HUB_PHI = (2.28735629226944, -1.32728592986375)
HUB_THETA2 = 0.960070362405688
HUB_A = -2.05083150799774
HUB_B = 1.3342715425232
HUB_U = 0.655385536415232
HUB_Q_STAR = 0.844976466536557
RING_N4_HALF_PI_Q_STAR = 1.29516723530087
