"""Cyclic Jacobi eigensolver for dense complex Hermitian matrices (compiled).

Mirrors ``melab._jacobi_py`` operation for operation; see that module for the
rotation convention.
"""
import numpy as np

from libc.math cimport copysign, fabs, hypot, sqrt


cdef inline void _rotate_columns(double complex[:, ::1] m, Py_ssize_t n, Py_ssize_t p,
                                 Py_ssize_t q, double c, double s,
                                 double complex phc) noexcept nogil:
    cdef Py_ssize_t k
    cdef double complex mkp, mkq
    for k in range(n):
        mkp = m[k, p]
        mkq = m[k, q]
        m[k, p] = c * mkp - s * phc * mkq
        m[k, q] = s * mkp + c * phc * mkq


cdef inline double _off_norm(double complex[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    return sqrt(acc)


def jacobi_eigh(a, double tol=1e-13, int max_sweeps=100, bint want_vectors=True):
    """Return ``(eigenvalues, eigenvectors, sweeps, off_norm)``; eigenvalues unsorted."""
    work = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] A = work
    cdef Py_ssize_t n = A.shape[0]
    vecs = np.eye(n, dtype=np.complex128) if want_vectors else np.empty((0, 0), np.complex128)
    cdef double complex[:, ::1] V = vecs
    cdef Py_ssize_t i, j, p, q, k
    cdef double total = 0.0
    for i in range(n):
        for j in range(n):
            total += A[i, j].real * A[i, j].real + A[i, j].imag * A[i, j].imag
    cdef double threshold = tol * sqrt(total)
    cdef double off = _off_norm(A, n)
    cdef int sweep = 0
    cdef double mag, app, aqq, theta, t, c, s
    cdef double complex apq, ph, phc, apk, aqk

    with nogil:
        while off > threshold and sweep < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    mag = hypot(apq.real, apq.imag)
                    if mag == 0.0:
                        continue
                    app = A[p, p].real
                    aqq = A[q, q].real
                    theta = (aqq - app) / (2.0 * mag)
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    ph = apq / mag
                    phc = ph.conjugate()
                    _rotate_columns(A, n, p, q, c, s, phc)
                    for k in range(n):
                        apk = A[p, k]
                        aqk = A[q, k]
                        A[p, k] = c * apk - s * ph * aqk
                        A[q, k] = s * apk + c * ph * aqk
                    A[p, p] = app - t * mag
                    A[q, q] = aqq + t * mag
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    if want_vectors:
                        _rotate_columns(V, n, p, q, c, s, phc)
            sweep += 1
            off = _off_norm(A, n)

    w = np.array([A[i, i].real for i in range(n)], dtype=np.float64)
    return w, vecs, sweep, off
