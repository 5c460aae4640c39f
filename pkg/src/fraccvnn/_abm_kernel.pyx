# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled core of the fractional predictor-corrector integrator.

States and field values are stored as float rows; a complex n-vector is the
interleaved row (re_1, im_1, ..., re_n, im_n).  Weight rows are reversed so
that one GEMM forms both history sums: ``W[:, N - m] = (b_m, c_m)``.
"""

from libc.math cimport hypot, isfinite
from scipy.linalg.cython_blas cimport dgemm


cdef void _history(const double[:, ::1] F, Py_ssize_t k, Py_ssize_t j0,
                   const double[:, ::1] W, double a0k, double[:, ::1] out) noexcept nogil:
    cdef int d = <int>F.shape[1]
    cdef int N = <int>(W.shape[1] - 1)
    cdef int start = 1 if j0 == 0 else <int>j0
    cdef int kk = <int>k - start + 1
    cdef int two = 2
    cdef int ldw = N + 1
    cdef double one = 1.0
    cdef double zero = 0.0
    cdef char tr = b'N'
    cdef Py_ssize_t c
    if kk > 0:
        # column-major view: (d x kk) history block times (kk x 2) weight block
        dgemm(&tr, &tr, &d, &two, &kk, &one, <double*>&F[start, 0], &d,
              <double*>&W[0, N - k + start], &ldw, &zero, &out[0, 0], &d)
    else:
        for c in range(d):
            out[0, c] = 0.0
            out[1, c] = 0.0
    if j0 == 0:
        for c in range(d):
            out[0, c] += W[0, N - k] * F[0, c]
            out[1, c] += a0k * F[0, c]


def history_sums(const double[:, ::1] F, Py_ssize_t k, Py_ssize_t j0,
                 const double[:, ::1] W, double a0k, double[:, ::1] out):
    """out[0] = sum_{j=j0..k} b_{k-j} F[j];  out[1] = [j0 == 0] a0k F[0] + sum_{j=max(j0,1)..k} c_{k-j} F[j]."""
    with nogil:
        _history(F, k, j0, W, a0k, out)


cdef void _field(const double* y, double* f, Py_ssize_t n,
                 const double[::1] a, const double[:, ::1] Tr, const double[:, ::1] Ti,
                 const double[::1] Ir, const double[::1] Ii,
                 const long[::1] kind, const double[::1] p1, const double[::1] p2,
                 double* g) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double x, v, den, sr, si
    for j in range(n):
        x = y[2 * j]
        v = y[2 * j + 1]
        if kind[j] == 0:
            den = p1[j] + p2[j] * hypot(x, v)
            g[2 * j] = x / den
            g[2 * j + 1] = v / den
        else:
            g[2 * j] = p1[j] * x - p2[j] * v
            g[2 * j + 1] = p1[j] * v + p2[j] * x
    for i in range(n):
        sr = Ir[i] - a[i] * y[2 * i]
        si = Ii[i] - a[i] * y[2 * i + 1]
        for j in range(n):
            sr += Tr[i, j] * g[2 * j] - Ti[i, j] * g[2 * j + 1]
            si += Tr[i, j] * g[2 * j + 1] + Ti[i, j] * g[2 * j]
        f[2 * i] = sr
        f[2 * i + 1] = si


def integrate_network(double[:, ::1] Y, double[:, ::1] F, const double[:, ::1] W,
                      const double[::1] a0, double c_pred, double c_corr, Py_ssize_t window,
                      const double[::1] a, const double[:, ::1] Tr, const double[:, ::1] Ti,
                      const double[::1] Ir, const double[::1] Ii,
                      const long[::1] kind, const double[::1] p1, const double[::1] p2):
    """Advance ``Y[0]`` through all rows of ``Y``; returns the last finite step index.

    ``window <= 0`` keeps the full memory.  Activation ``kind`` 0 is
    z/(p1 + p2|z|), kind 1 is the linear gain p1 + i p2.
    """
    cdef Py_ssize_t N = Y.shape[0] - 1
    cdef Py_ssize_t d = Y.shape[1]
    cdef Py_ssize_t n = d // 2
    cdef Py_ssize_t k, c, j0
    cdef double[:, ::1] acc = F[:2].copy()
    cdef double[::1] yp = Y[0].copy()
    cdef double[::1] fp = Y[0].copy()
    cdef double[::1] g = Y[0].copy()
    cdef bint ok
    cdef Py_ssize_t last = N
    with nogil:
        _field(&Y[0, 0], &F[0, 0], n, a, Tr, Ti, Ir, Ii, kind, p1, p2, &g[0])
        for k in range(N):
            j0 = 0 if window <= 0 else (k - window + 1 if k - window + 1 > 0 else 0)
            _history(F, k, j0, W, a0[k], acc)
            for c in range(d):
                yp[c] = Y[0, c] + c_pred * acc[0, c]
            _field(&yp[0], &fp[0], n, a, Tr, Ti, Ir, Ii, kind, p1, p2, &g[0])
            ok = True
            for c in range(d):
                Y[k + 1, c] = Y[0, c] + c_corr * (fp[c] + acc[1, c])
                ok = ok and isfinite(Y[k + 1, c])
            if ok:
                _field(&Y[k + 1, 0], &F[k + 1, 0], n, a, Tr, Ti, Ir, Ii, kind, p1, p2, &g[0])
                for c in range(d):
                    ok = ok and isfinite(F[k + 1, c])
            if not ok:
                last = k
                break
    return last
