"""Numpy fallback for the compiled ``_abm_kernel``; identical contracts."""

import numpy as np


def history_sums(F, k, j0, W, a0k, out):
    N = W.shape[1] - 1
    start = 1 if j0 == 0 else j0
    if k >= start:
        out[:] = W[:, N - k + start :] @ F[start : k + 1]
    else:
        out[:] = 0.0
    if j0 == 0:
        out[0] += W[0, N - k] * F[0]
        out[1] += a0k * F[0]


def _field_factory(a, Tr, Ti, Ir, Ii, kind, p1, p2):
    T = Tr + 1j * Ti
    inputs = Ir + 1j * Ii
    georgiou = kind == 0
    gain = p1 + 1j * p2

    c1, c2 = p1[georgiou], p2[georgiou]

    def field(y):
        z = y.view(complex)
        g = gain * z
        g[georgiou] = z[georgiou] / (c1 + c2 * np.abs(z[georgiou]))
        return (-a * z + T @ g + inputs).view(float)

    return field


def _quiet(field):
    # overflow is detected by the caller's finiteness check
    def wrapped(y):
        with np.errstate(over="ignore", invalid="ignore"):
            return field(y)

    return wrapped


def integrate_network(Y, F, W, a0, c_pred, c_corr, window, a, Tr, Ti, Ir, Ii, kind, p1, p2):
    N = Y.shape[0] - 1
    field = _quiet(_field_factory(a, Tr, Ti, Ir, Ii, kind, p1, p2))
    acc = np.zeros((2, Y.shape[1]))
    F[0] = field(Y[0])
    for k in range(N):
        j0 = 0 if window <= 0 else max(0, k - window + 1)
        history_sums(F, k, j0, W, a0[k], acc)
        fp = field(Y[0] + c_pred * acc[0])
        Y[k + 1] = Y[0] + c_corr * (fp + acc[1])
        if not np.all(np.isfinite(Y[k + 1])):
            return k
        F[k + 1] = field(Y[k + 1])
        if not np.all(np.isfinite(F[k + 1])):
            return k
    return N
