"""Cyclic Jacobi eigensolver for dense complex Hermitian matrices (pure Python).

Each pair (p, q) is annihilated by ``G = D R`` where ``D = diag(1, e^{-i theta})``
removes the phase of ``a[p, q]`` and ``R`` is the real symmetric Jacobi rotation
with ``t = tan`` chosen as the smaller root, so ``a[p, p] -= t |a[p, q]|`` and
``a[q, q] += t |a[p, q]|``.
"""
import math

import numpy as np


def _rotate_columns(m, p, q, c, s, phc):
    mp = m[:, p].copy()
    mq = m[:, q]
    m[:, p] = c * mp - s * phc * mq
    m[:, q] = s * mp + c * phc * mq


def _off_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(a, tol=1e-13, max_sweeps=100, want_vectors=True):
    """Return ``(eigenvalues, eigenvectors, sweeps, off_norm)``; eigenvalues unsorted."""
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128) if want_vectors else np.empty((0, 0), np.complex128)
    threshold = tol * math.sqrt(np.vdot(a, a).real)
    off = _off_norm(a)
    sweep = 0
    while off > threshold and sweep < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                mag = abs(apq)
                if mag == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ph = apq / mag
                phc = ph.conjugate()
                _rotate_columns(a, p, q, c, s, phc)
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * ph * aq
                a[q, :] = s * ap + c * ph * aq
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    _rotate_columns(v, p, q, c, s, phc)
        sweep += 1
        off = _off_norm(a)
    return np.diagonal(a).real.copy(), v, sweep, off
